"""The sliced-Gibbs chain: per-sweep height, coordinate-wise bracketing and
slice draws, burn-in/thinning bookkeeping.

One sweep draws a single slice height from the current state and then updates
the m coordinates sequentially, each against the mixed state (already-updated
coordinates at their new values, the rest at the previous sweep's values).
Support is re-estimated at every coordinate update; the previous bracket only
widens the fallback window and seeds the panel mesh.

Two execution paths produce a ChainOutput: a pure-numpy sweep loop that works
with any LogKernel, and a compiled whole-chain engine for registered kernels
(see ``engine``). Both are deterministic given (kernel, x0, config); the two
paths draw from the RNG in different patterns, so replay must stay on the
path recorded in the manifest.
"""

import time
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .accel import resolve_engine
from .kernels import LogKernel, conditional_1d
from .slicing import DEFAULT_MAX_REJECTIONS, slice_1d_fixed_u, slice_height
from .support import effective_support_1d

__all__ = ["ChainConfig", "ChainState", "ChainOutput", "run_asg", "single_sweep", "make_rng"]

SCAN_MODES = ("systematic", "random_permutation")
CAP_WARN_RATE = 1e-3


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator; independent streams via Philox jumps.

    Stream k for a given seed starts 2**128 * k steps into the Philox
    sequence, so any number of chains can share one seed without overlap.
    """
    bitgen = np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF)
    if stream:
        bitgen = bitgen.jumped(stream)
    return np.random.Generator(bitgen)


@dataclass(frozen=True)
class ChainConfig:
    n_samples: int
    burn_in: int = 250
    thin: int = 1
    epsilon: float = 0.01
    s0: float = 1.0
    seed: int = 0
    scan: str = "systematic"
    max_rejections: int = DEFAULT_MAX_REJECTIONS
    fallback_range: tuple = (-100.0, 100.0)
    support_abs_tol: float = 1e-10
    support_rel_tol: float = 1e-8
    reuse_bracket_if_unchanged: bool = False
    track_brackets: bool = False
    engine: str = "auto"

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must be in (0, 1)")
        if not self.s0 > 0:
            raise ValueError("s0 must be positive")
        if self.scan not in SCAN_MODES:
            raise ValueError(f"scan must be one of {SCAN_MODES}")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be >= 1")
        if not self.fallback_range[0] < self.fallback_range[1]:
            raise ValueError("fallback_range must be an increasing interval")

    @property
    def total_iterations(self) -> int:
        return self.burn_in + self.n_samples * self.thin


@dataclass
class ChainState:
    x: np.ndarray
    log_k: float
    brackets: np.ndarray  # (m, 2) warm-start intervals
    iteration: int = 0


@dataclass
class ChainOutput:
    samples: np.ndarray  # (N, m) retained draws
    log_k_trace: np.ndarray  # (T,) including burn-in
    wall_time_seconds: float
    cap_hits: int
    fallback_uses: int
    config: object
    engine: str
    acceptance_rate: float | None = None  # RW-MH only
    final_brackets: np.ndarray | None = None
    bracket_history: np.ndarray | None = None  # (N, m, 2) when tracked

    def to_summary(self) -> dict:
        return {
            "n_samples": int(self.samples.shape[0]),
            "dim": int(self.samples.shape[1]),
            "wall_time_seconds": self.wall_time_seconds,
            "cap_hits": self.cap_hits,
            "fallback_uses": self.fallback_uses,
            "engine": self.engine,
            "acceptance_rate": self.acceptance_rate,
        }


def default_x0(kernel: LogKernel, config: ChainConfig) -> np.ndarray:
    """Zero vector if the kernel is positive there, else the best of 100
    uniform probes over the fallback range (drawn from a separate stream so
    the chain stream is untouched)."""
    x0 = np.zeros(kernel.dim)
    if np.isfinite(kernel.log_eval(x0)):
        return x0
    rng = make_rng(config.seed, stream=10_000)
    lo, hi = config.fallback_range
    probes = rng.uniform(lo, hi, size=(100, kernel.dim))
    vals = kernel.log_eval_many(probes)
    best = int(np.argmax(vals))
    if not np.isfinite(vals[best]):
        raise ValueError("no initialization point with K > 0 found in the fallback range")
    return probes[best]


def _init_state(kernel: LogKernel, x0) -> ChainState:
    x0 = np.asarray(x0, dtype=float).copy()
    if x0.shape != (kernel.dim,):
        raise ValueError(f"x0 must have shape ({kernel.dim},), got {x0.shape}")
    log_k = kernel.log_eval(x0)
    if not np.isfinite(log_k):
        raise ValueError(f"K(x0) must be positive; log K(x0) = {log_k}")
    brackets = np.full((kernel.dim, 2), np.nan)
    return ChainState(x=x0, log_k=log_k, brackets=brackets, iteration=0)


def single_sweep(
    state: ChainState,
    kernel: LogKernel,
    config: ChainConfig,
    rng,
    counters: dict | None = None,
    reuse_cache: dict | None = None,
) -> ChainState:
    """One full sweep: a height draw followed by m coordinate updates.

    Returns a new ChainState; ``counters`` (if given) accumulates cap hits
    and fallback uses across sweeps.
    """
    m = kernel.dim
    x = state.x.copy()
    brackets = state.brackets.copy()
    log_u = slice_height(state.log_k, rng)
    if config.scan == "random_permutation":
        order = rng.permutation(m)
    else:
        order = range(m)
    for k in order:
        fixed = np.delete(x, k)
        cond = conditional_1d(kernel, k, fixed)
        est = None
        if config.reuse_bracket_if_unchanged and reuse_cache is not None:
            prev = reuse_cache.get(k)
            if prev is not None and np.array_equal(prev[0], fixed):
                est = prev[1]
        if est is None:
            warm = brackets[k] if np.all(np.isfinite(brackets[k])) else None
            est = effective_support_1d(
                cond,
                config.epsilon,
                config.s0,
                config.fallback_range,
                warm_bracket=warm,
                abs_tol=config.support_abs_tol,
                rel_tol=config.support_rel_tol,
            )
            if reuse_cache is not None:
                reuse_cache[k] = (fixed, est)
        z, stats = slice_1d_fixed_u(
            cond, log_u, est.lower, est.upper, x[k], rng, config.max_rejections
        )
        x[k] = z
        brackets[k] = (est.lower, est.upper)
        if counters is not None:
            counters["cap_hits"] += int(stats.hit_cap)
            counters["fallback_uses"] += int(est.method == "grid_fallback")
    log_k = kernel.log_eval(x)
    return ChainState(x=x, log_k=log_k, brackets=brackets, iteration=state.iteration + 1)


def _run_numpy(kernel, state, config, rng):
    n, m = config.n_samples, kernel.dim
    total = config.total_iterations
    samples = np.empty((n, m))
    trace = np.empty(total)
    history = np.empty((n, m, 2)) if config.track_brackets else None
    counters = {"cap_hits": 0, "fallback_uses": 0}
    reuse_cache = {} if config.reuse_bracket_if_unchanged else None
    kept = 0
    for t in range(1, total + 1):
        state = single_sweep(state, kernel, config, rng, counters, reuse_cache)
        trace[t - 1] = state.log_k
        if t > config.burn_in and (t - config.burn_in) % config.thin == 0:
            samples[kept] = state.x
            if history is not None:
                history[kept] = state.brackets
            kept += 1
    return samples, trace, counters, state.brackets, history


def run_asg(kernel: LogKernel, x0=None, config: ChainConfig | None = None, **cfg_kwargs) -> ChainOutput:
    """Run the sampler for ``burn_in + n_samples * thin`` sweeps.

    ``config`` may be given directly or assembled from keyword arguments
    (``run_asg(k, n_samples=1000, seed=7)``). Identical (kernel, x0, config)
    always reproduces bit-identical samples.
    """
    if config is None:
        config = ChainConfig(**cfg_kwargs)
    elif cfg_kwargs:
        config = replace(config, **cfg_kwargs)
    if x0 is None:
        x0 = default_x0(kernel, config)
    state = _init_state(kernel, x0)
    which = resolve_engine(config.engine, kernel.packed is not None)
    rng = make_rng(config.seed)
    if which == "numba":
        from . import engine as _engine  # outside the timed section

    start = time.perf_counter()
    if which == "numba":
        samples, trace, counters, final_brackets, history = _engine.run_asg_compiled(
            kernel, state.x, config, rng
        )
    else:
        samples, trace, counters, final_brackets, history = _run_numpy(
            kernel, state, config, rng
        )
    elapsed = time.perf_counter() - start

    total_updates = config.total_iterations * kernel.dim
    if counters["cap_hits"] > CAP_WARN_RATE * total_updates:
        warnings.warn(
            f"slice rejection cap hit in {counters['cap_hits']} of {total_updates} "
            "coordinate updates (>0.1%); results may be biased",
            RuntimeWarning,
            stacklevel=2,
        )
    return ChainOutput(
        samples=samples,
        log_k_trace=trace,
        wall_time_seconds=elapsed,
        cap_hits=counters["cap_hits"],
        fallback_uses=counters["fallback_uses"],
        config=config,
        engine=which,
        final_brackets=final_brackets,
        bracket_history=history,
    )
