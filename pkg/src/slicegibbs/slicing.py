"""Fixed-height 1-D slice draws by rejection inside a bracket.

Given a log slice height and a bracket [a, b] that (approximately) contains
the level set {z: g(z) > u}, draw uniforms on [a, b] until one lands above
the height. Conditional on acceptance the draw is exactly uniform on the
intersection of the level set with the bracket, whatever the shape of g -
including disjoint pieces, which is how the sampler crosses valleys between
modes in a single update.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["SliceDrawStats", "SliceInvariantError", "slice_height", "slice_1d_fixed_u"]

DEFAULT_MAX_REJECTIONS = 10_000
_BLOCK = 64


class SliceInvariantError(RuntimeError):
    """The current point is not in the slice; signals a bug upstream."""


@dataclass(frozen=True)
class SliceDrawStats:
    proposals: int
    accepted_value: float
    hit_cap: bool


def slice_height(log_k_current: float, rng) -> float:
    """Draw log u with u ~ Uniform(0, K(x)), entirely in log space."""
    if not np.isfinite(log_k_current):
        raise SliceInvariantError(
            f"slice height needs a state with finite log-kernel, got {log_k_current}"
        )
    return log_k_current + float(np.log(rng.random()))


def slice_1d_fixed_u(
    g,
    log_u: float,
    a: float,
    b: float,
    current: float,
    rng,
    max_rejections: int = DEFAULT_MAX_REJECTIONS,
):
    """Uniform draw from {z in [a, b]: log g(z) > log_u}.

    ``g`` is a Conditional1D (or anything with ``eval_many``). Comparisons
    are strict, so a tie at exactly the height rejects. If the cap is
    reached the incoming ``current`` is returned unchanged (it is a valid
    slice member by precondition) with ``hit_cap`` set.

    Returns (accepted z, SliceDrawStats).
    """
    if not a < b:
        raise ValueError(f"invalid bracket: a={a} must be < b={b}")
    eval_many = g.eval_many if hasattr(g, "eval_many") else lambda z: np.asarray(g(z), dtype=float)
    g_cur = float(eval_many(np.array([current]))[0])
    if not g_cur > log_u:
        raise SliceInvariantError(
            f"current point is outside the slice: g(current)={g_cur} <= log_u={log_u}"
        )
    proposals = 0
    while proposals < max_rejections:
        block = min(_BLOCK, max_rejections - proposals)
        z = rng.uniform(a, b, size=block)
        vals = eval_many(z)
        hits = np.flatnonzero(vals > log_u)
        if hits.size:
            first = int(hits[0])
            return float(z[first]), SliceDrawStats(
                proposals=proposals + first + 1,
                accepted_value=float(z[first]),
                hit_cap=False,
            )
        proposals += block
    return float(current), SliceDrawStats(
        proposals=proposals, accepted_value=float(current), hit_cap=True
    )
