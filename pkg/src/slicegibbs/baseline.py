"""Random-walk Metropolis-Hastings baseline.

Gaussian proposals with a fixed per-coordinate scale, log-space acceptance,
and the same burn-in/thin/trace bookkeeping as the sliced-Gibbs chain so the
two outputs are directly comparable.
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from .accel import resolve_engine
from .asg import ChainConfig, ChainOutput, default_x0, make_rng

__all__ = ["RwmhConfig", "run_rwmh"]


@dataclass(frozen=True)
class RwmhConfig(ChainConfig):
    proposal_sd: float | tuple = 1.0

    def sd_vector(self, dim: int) -> np.ndarray:
        sd = np.broadcast_to(np.asarray(self.proposal_sd, dtype=float), (dim,)).copy()
        if not np.all(np.isfinite(sd)) or not np.all(sd > 0):
            raise ValueError(f"proposal_sd must be finite and positive, got {self.proposal_sd}")
        return sd


def _run_numpy(kernel, x, log_k, sd, config, rng):
    total = config.total_iterations
    m = kernel.dim
    samples = np.empty((config.n_samples, m))
    trace = np.empty(total)
    kept = 0
    accepts = 0
    for t in range(1, total + 1):
        prop = x + sd * rng.standard_normal(m)
        log_k_prop = kernel.log_eval(prop)
        # accept iff log V < log K(x*) - log K(x); -inf proposals never pass
        if np.log(rng.random()) < log_k_prop - log_k:
            x, log_k = prop, log_k_prop
            accepts += 1
        trace[t - 1] = log_k
        if t > config.burn_in and (t - config.burn_in) % config.thin == 0:
            samples[kept] = x
            kept += 1
    return samples, trace, accepts


def run_rwmh(kernel, x0=None, config: RwmhConfig | None = None, **cfg_kwargs) -> ChainOutput:
    """Metropolis-Hastings comparator producing the same ChainOutput format."""
    if config is None:
        config = RwmhConfig(**cfg_kwargs)
    elif cfg_kwargs:
        config = replace(config, **cfg_kwargs)
    if x0 is None:
        x0 = default_x0(kernel, config)
    x = np.asarray(x0, dtype=float).copy()
    if x.shape != (kernel.dim,):
        raise ValueError(f"x0 must have shape ({kernel.dim},), got {x.shape}")
    log_k = kernel.log_eval(x)
    if not np.isfinite(log_k):
        raise ValueError(f"K(x0) must be positive; log K(x0) = {log_k}")
    sd = config.sd_vector(kernel.dim)
    which = resolve_engine(config.engine, kernel.packed is not None)
    rng = make_rng(config.seed)
    if which == "numba":
        from . import engine as _engine  # outside the timed section

    start = time.perf_counter()
    if which == "numba":
        samples, trace, accepts = _engine.run_rwmh_compiled(kernel, x, sd, config, rng)
    else:
        samples, trace, accepts = _run_numpy(kernel, x, log_k, sd, config, rng)
    elapsed = time.perf_counter() - start

    return ChainOutput(
        samples=samples,
        log_k_trace=trace,
        wall_time_seconds=elapsed,
        cap_hits=0,
        fallback_uses=0,
        config=config,
        engine=which,
        acceptance_rate=accepts / config.total_iterations,
    )
