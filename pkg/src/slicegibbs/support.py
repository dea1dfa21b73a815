"""Effective-support estimation for 1-D log-kernels.

The primary route maps the real line onto (0, 1) with a Cauchy probability
integral transform, integrates the transformed kernel adaptively, and inverts
the resulting CDF at the equal-tail masses eps/2 and 1 - eps/2. When the
transformed quadrature misbehaves (non-finite or non-positive mass, failure
to converge, excessive overflow clamping) a grid fallback scans a finite
window for non-negligible kernel values and does the same CDF inversion
directly in x-space.

The returned interval [a, b] carries 1 - eps of the normalized kernel mass
with eps/2 in each tail, up to quadrature tolerance.
"""

import math
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from .numerics import (
    DEFAULT_ABS_TOL,
    DEFAULT_MAX_DEPTH,
    DEFAULT_REL_TOL,
    INIT_PANELS,
    _adaptive_panels,
    find_root,
)

__all__ = [
    "SupportEstimate",
    "SupportEstimationError",
    "cauchy_maps",
    "effective_support_1d",
    "EXP_CLAMP",
    "GRID_POINTS",
    "GRID_LOG_THRESHOLD",
    "DENSE_CELLS",
]

# overflow guard for exp(log g - log f_C); clamping is counted and fails the
# Cauchy path when more than 0.1% of evaluations hit it
EXP_CLAMP = 700.0
# fallback grid: 10001 points so the default [-100, 100] window has 0.02 spacing
GRID_POINTS = 10001
GRID_LOG_THRESHOLD = math.log(1e-10)
# per-panel refinement cells used to invert the CDF
DENSE_CELLS = 128
_QUANTILE_CLIP = 1e-12


class SupportEstimationError(RuntimeError):
    """Kernel numerically zero on the fallback grid, or CDF inversion failed."""


@dataclass(frozen=True)
class SupportEstimate:
    lower: float
    upper: float
    norm_const: float
    method: str  # "cauchy_transform" | "grid_fallback"
    epsilon: float
    s0: float
    evaluations: int = 0


def cauchy_maps(s0: float):
    """CDF, density and quantile of the Cauchy(0, s0) distribution.

    Quantile arguments are clipped to [1e-12, 1 - 1e-12] before the tangent.
    The round trip Q(F(x)) = x holds to ~4e-12 relative error for |x| <= 1e4;
    the absolute error grows like pi*eps*x^2 (inherent to storing F near 1 in
    a double), so treat the round trip as exact in relative, not absolute,
    terms far out in the tails.
    """
    if not s0 > 0:
        raise ValueError(f"s0 must be positive, got {s0}")

    def cdf(x):
        return 0.5 + np.arctan(np.asarray(x, dtype=float) / s0) / np.pi

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return s0 / (np.pi * (s0 * s0 + x * x))

    def quantile(u):
        u = np.clip(np.asarray(u, dtype=float), _QUANTILE_CLIP, 1.0 - _QUANTILE_CLIP)
        return s0 * np.tan(np.pi * (u - 0.5))

    return SimpleNamespace(cdf=cdf, pdf=pdf, quantile=quantile, s0=s0)


def _as_batch_logk(g):
    """Normalize a Conditional1D / 1-D LogKernel / callable to a batch evaluator."""
    if hasattr(g, "eval_many"):
        return g.eval_many
    if hasattr(g, "log_eval_many"):
        if g.dim != 1:
            raise ValueError(f"need a 1-D kernel, got dim {g.dim}")
        return lambda z: g.log_eval_many(np.asarray(z, dtype=float)[:, None])
    if callable(g):
        return lambda z: np.asarray(g(np.asarray(z, dtype=float)), dtype=float)
    raise TypeError(f"cannot evaluate {type(g).__name__} as a 1-D log-kernel")


def _invert_cdf(fb, panels, z_total, target):
    """Solve F(x) = target/z_total on a converged panel decomposition.

    Locates the panel holding the target mass, then narrows twice on
    DENSE_CELLS midpoint grids (each rescaled so its total matches the mass
    attributed to the interval) before handing the final linear segment to
    the bracketed root finder.
    """
    cum = panels.cum
    target = min(max(target, 0.0), cum[-1])
    j = int(np.searchsorted(cum, target, side="right")) - 1
    j = min(max(j, 0), panels.lo.size - 1)
    # searchsorted can land past zero-mass panels; walk to one that has mass
    while panels.val[j] <= 0.0 and j + 1 < panels.lo.size and cum[j + 1] <= target:
        j += 1
    lo, hi = float(panels.lo[j]), float(panels.hi[j])
    mass = float(panels.val[j])
    tau = target - cum[j]
    # midpoint cells: panel edges are never evaluated, so discontinuities or
    # blow-ups that the adaptive splitter has pushed onto an edge stay out of
    # the cumulative; the uniform cell width cancels in the rescaling
    for _ in range(2):
        if mass <= 0.0:
            return 0.5 * (lo + hi)
        h = (hi - lo) / DENSE_CELLS
        mids = lo + (np.arange(DENSE_CELLS) + 0.5) * h
        vals = fb(mids)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        ctr = np.concatenate(([0.0], np.cumsum(vals)))
        if ctr[-1] <= 0.0:
            return 0.5 * (lo + hi)
        scale = mass / ctr[-1]
        s = int(np.searchsorted(ctr * scale, tau, side="right")) - 1
        s = min(max(s, 0), DENSE_CELLS - 1)
        tau = min(max(tau - ctr[s] * scale, 0.0), (ctr[s + 1] - ctr[s]) * scale)
        mass = (ctr[s + 1] - ctr[s]) * scale
        lo, hi = lo + s * h, lo + (s + 1) * h

    if mass <= 0.0:
        return 0.5 * (lo + hi)

    def fhat(u):
        return mass * (u - lo) / (hi - lo) - tau

    res = find_root(fhat, lo, hi, x_tol=1e-13, f_tol=max(1e-14 * z_total, 1e-300))
    return res.root


def _cdf_probe(fb, panels, z_total, points):
    """F(x) at probe points, for the diagnostic dump on hard failure."""
    out = []
    for p in points:
        mass = 0.0
        for lo, hi, val in zip(panels.lo, panels.hi, panels.val):
            if p >= hi:
                mass += val
            elif p > lo:
                mass += val * (p - lo) / (hi - lo)
        out.append(mass / z_total if z_total > 0 else float("nan"))
    return out


def effective_support_1d(
    g,
    epsilon: float,
    s0: float = 1.0,
    fallback_range=(-100.0, 100.0),
    *,
    warm_bracket=None,
    abs_tol: float = DEFAULT_ABS_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> SupportEstimate:
    """Equal-tailed effective support [a, b] of a 1-D kernel.

    ``g`` is a Conditional1D, a 1-D LogKernel, or a vectorized callable
    returning log-kernel values. ``warm_bracket`` (from a previous sweep)
    only ever widens the fallback search window and seeds the initial panel
    mesh; it never short-circuits estimation.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if not s0 > 0:
        raise ValueError(f"s0 must be positive, got {s0}")
    logg = _as_batch_logk(g)
    maps = cauchy_maps(s0)
    clamp_events = [0]
    evals = [0]

    def transformed(u):
        x = maps.quantile(u)
        expo = logg(x) - np.log(maps.pdf(x))
        n = expo.size
        evals[0] += n
        clamped = expo > EXP_CLAMP
        if np.any(clamped):
            clamp_events[0] += int(clamped.sum())
            expo = np.where(clamped, EXP_CLAMP, expo)
        with np.errstate(over="ignore"):
            return np.exp(expo)

    init_edges = None
    if warm_bracket is not None:
        wa, wb = float(warm_bracket[0]), float(warm_bracket[1])
        if np.isfinite(wa) and np.isfinite(wb) and wa < wb:
            ua = float(np.clip(maps.cdf(wa), 0.02, 0.98))
            ub = float(np.clip(maps.cdf(wb), 0.02, 0.98))
            if ub - ua > 1e-6:
                inner = np.linspace(ua, ub, INIT_PANELS - 1)
                init_edges = np.concatenate(([0.0], inner, [1.0]))

    panels, qres = _adaptive_panels(
        transformed, 0.0, 1.0, abs_tol, rel_tol, max_depth, init_edges=init_edges
    )
    z = qres.value
    clamp_frac = clamp_events[0] / max(evals[0], 1)
    cauchy_ok = (
        qres.converged and np.isfinite(z) and z > 0.0 and clamp_frac <= 1e-3
    )
    if cauchy_ok:
        u_a = _invert_cdf(transformed, panels, z, 0.5 * epsilon * z)
        u_b = _invert_cdf(transformed, panels, z, (1.0 - 0.5 * epsilon) * z)
        a = float(maps.quantile(u_a))
        b = float(maps.quantile(u_b))
        if a < b:
            return SupportEstimate(
                lower=a, upper=b, norm_const=float(z),
                method="cauchy_transform", epsilon=epsilon, s0=s0,
                evaluations=qres.evaluations,
            )
        # degenerate inversion: fall through to the grid

    # ---- grid fallback ----------------------------------------------------
    flo, fhi = float(fallback_range[0]), float(fallback_range[1])
    if warm_bracket is not None:
        wa, wb = float(warm_bracket[0]), float(warm_bracket[1])
        if np.isfinite(wa):
            flo = min(flo, wa)
        if np.isfinite(wb):
            fhi = max(fhi, wb)
    xs = np.linspace(flo, fhi, GRID_POINTS)
    lk = logg(xs)
    alive = np.flatnonzero(np.isfinite(lk) & (lk > GRID_LOG_THRESHOLD))
    if alive.size == 0:
        raise SupportEstimationError(
            f"kernel is numerically zero everywhere on the fallback grid [{flo}, {fhi}]"
        )
    a_t = float(xs[alive[0]])
    b_t = float(xs[alive[-1]])
    if not a_t < b_t:
        step = (fhi - flo) / (GRID_POINTS - 1)
        a_t, b_t = a_t - step, b_t + step

    def direct(x):
        expo = logg(np.asarray(x, dtype=float))
        expo = np.where(expo > EXP_CLAMP, EXP_CLAMP, expo)
        with np.errstate(over="ignore"):
            vals = np.exp(expo)
        return np.where(np.isfinite(vals), vals, 0.0)

    panels, qres = _adaptive_panels(direct, a_t, b_t, abs_tol, rel_tol, max_depth)
    z = qres.value
    if not (np.isfinite(z) and z > 0.0):
        raise SupportEstimationError(
            f"fallback integration failed on [{a_t}, {b_t}]: Z={z}"
        )
    a = _invert_cdf(direct, panels, z, 0.5 * epsilon * z)
    b = _invert_cdf(direct, panels, z, (1.0 - 0.5 * epsilon) * z)
    if not a < b:
        probes = _cdf_probe(direct, panels, z, np.linspace(a_t, b_t, 11))
        raise SupportEstimationError(
            "fallback CDF inversion failed; F at 11 probe points on "
            f"[{a_t:.6g}, {b_t:.6g}]: {[round(p, 6) for p in probes]}"
        )
    return SupportEstimate(
        lower=float(a), upper=float(b), norm_const=float(z),
        method="grid_fallback", epsilon=epsilon, s0=s0,
        evaluations=qres.evaluations,
    )
