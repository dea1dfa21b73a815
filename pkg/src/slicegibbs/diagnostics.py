"""Chain quality diagnostics: autocorrelation, integrated autocorrelation
time (Geyer initial monotone sequence), effective sample size, and a
stationarity check on the log-kernel trace.

The lag sum in ``acf`` is the package's textbook hot loop: a compiled numba
version and a vectorized numpy version coexist and the engine benchmark
times both. The numpy path (per-lag BLAS dots) measures ~2x faster than the
fastmath numba loop on this shape, so it is the default; set
``SLICEGIBBS_ENGINE=numba`` to force the compiled loop. ``iact_geyer``
implements the initial monotone sequence estimator: consecutive-lag pairs
are summed while positive, clipped to be non-increasing, and truncated at
the first non-positive pair. tau below 1 is legal - predominantly negative
autocorrelations make ESS exceed the number of retained draws.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from .accel import ENGINE_PREFERENCE, NUMBA_ENABLED

__all__ = [
    "DegenerateSeriesError",
    "EssReport",
    "acf",
    "iact_geyer",
    "ess",
    "ess_report",
    "logk_stationarity",
    "TAU_FLOOR",
]

# pathological short series can drive the pair sums to tau <= 0; the floor
# keeps ESS finite (and visibly huge, flagging the event)
TAU_FLOOR = 1e-3


class DegenerateSeriesError(ValueError):
    """Constant series: autocorrelation undefined."""


def _acf_loops(x, max_lag):
    # plain nested loop; the numba target
    n = x.size
    mean = 0.0
    for t in range(n):
        mean += x[t]
    mean /= n
    c0 = 0.0
    for t in range(n):
        d = x[t] - mean
        c0 += d * d
    rho = np.empty(max_lag + 1)
    rho[0] = 1.0
    for k in range(1, max_lag + 1):
        s = 0.0
        for t in range(n - k):
            s += (x[t] - mean) * (x[t + k] - mean)
        rho[k] = s / c0
    return rho


if NUMBA_ENABLED:
    from numba import njit

    _acf_compiled = njit("f8[::1](f8[::1], i8)", cache=True, fastmath=True)(_acf_loops)
else:  # pragma: no cover - depends on environment
    _acf_compiled = None


def _acf_numpy(x, max_lag):
    d = x - x.mean()
    c0 = float(d @ d)
    rho = np.empty(max_lag + 1)
    rho[0] = 1.0
    for k in range(1, max_lag + 1):
        rho[k] = float(d[:-k] @ d[k:]) / c0
    return rho


def acf(series, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelation rho_0..rho_max_lag (rho_0 = 1).

    Normalization is by the lag-0 autocovariance, the standard estimator
    whose slight bias keeps the spectral estimate positive.
    """
    x = np.ascontiguousarray(series, dtype=float)
    if x.ndim != 1 or x.size < 4:
        raise ValueError("series must be 1-D with at least 4 elements")
    if not 1 <= max_lag <= x.size - 1:
        raise ValueError(f"max_lag must be in [1, {x.size - 1}], got {max_lag}")
    if np.ptp(x) == 0.0:
        raise DegenerateSeriesError("constant series has no autocorrelation")
    if _acf_compiled is not None and ENGINE_PREFERENCE == "numba":
        return _acf_compiled(x, max_lag)
    return _acf_numpy(x, max_lag)


def iact_geyer(rho) -> float:
    """Integrated autocorrelation time from an ACF vector (rho[0] = 1)."""
    rho = np.asarray(rho, dtype=float)
    if rho.size == 0:
        raise ValueError("empty ACF")
    n_pairs = (rho.size + 1) // 2
    total = 0.0
    prev = np.inf
    for m in range(n_pairs):
        gamma = rho[2 * m]
        if 2 * m + 1 < rho.size:
            gamma += rho[2 * m + 1]
        if gamma <= 0.0:
            break
        gamma = min(gamma, prev)
        total += gamma
        prev = gamma
    return max(2.0 * total - 1.0, TAU_FLOOR)


def default_max_lag(n: int) -> int:
    return int(min(n - 1, 10 * np.sqrt(n)))


def ess(series, max_lag: int | None = None) -> float:
    """Effective sample size T / tau; may exceed T (super-efficiency)."""
    x = np.asarray(series, dtype=float)
    if max_lag is None:
        max_lag = default_max_lag(x.size)
    return x.size / iact_geyer(acf(x, max_lag))


@dataclass
class EssReport:
    per_dim_tau: np.ndarray
    per_dim_ess: np.ndarray
    min_ess: float
    ess_per_second: float
    acf: np.ndarray  # (dim, max_lag + 1)
    n_retained: int
    wall_time_seconds: float

    def to_dict(self) -> dict:
        return {
            "n_retained": self.n_retained,
            "per_dim_tau": [float(v) for v in self.per_dim_tau],
            "per_dim_ess": [float(v) for v in self.per_dim_ess],
            "min_ess": float(self.min_ess),
            "ess_per_second": float(self.ess_per_second),
            "wall_time_seconds": float(self.wall_time_seconds),
        }


def ess_report(samples, wall_time_seconds: float, max_lag: int | None = None) -> EssReport:
    """Per-dimension tau/ESS for a (N, m) sample matrix.

    ``ess_per_second`` divides the minimum ESS by the sampler wall time,
    support estimation included, so slow-but-decorrelated and
    fast-but-sticky samplers compare on equal footing.
    """
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    if X.ndim != 2:
        raise ValueError("samples must be a (N, m) matrix")
    n, m = X.shape
    if max_lag is None:
        max_lag = default_max_lag(n)
    rhos = np.empty((m, max_lag + 1))
    taus = np.empty(m)
    for j in range(m):
        rhos[j] = acf(X[:, j], max_lag)
        taus[j] = iact_geyer(rhos[j])
    esses = n / taus
    min_ess = float(esses.min())
    eps_s = min_ess / wall_time_seconds if wall_time_seconds > 0 else float("inf")
    return EssReport(
        per_dim_tau=taus,
        per_dim_ess=esses,
        min_ess=min_ess,
        ess_per_second=eps_s,
        acf=rhos,
        n_retained=n,
        wall_time_seconds=wall_time_seconds,
    )


def marginal_mode(x, bw_factor: float = 0.4) -> float:
    """Mode of a 1-D sample via oversmoothed Gaussian KDE.

    The bandwidth is ``bw_factor`` times the sample sd - deliberately wide,
    trading a little bias on skewed marginals for much lower variance of the
    peak location - followed by a parabolic refinement of the log-density
    around the grid argmax.
    """
    x = np.asarray(x, dtype=float)
    kde = _sps.gaussian_kde(x, bw_method=bw_factor)
    grid = np.linspace(np.quantile(x, 0.001), np.quantile(x, 0.999), 801)
    dens = kde(grid)
    i = int(np.argmax(dens))
    if 0 < i < grid.size - 1:
        y0, y1, y2 = np.log(dens[i - 1]), np.log(dens[i]), np.log(dens[i + 1])
        denom = y0 - 2.0 * y1 + y2
        if denom < 0:
            return float(grid[i] + 0.5 * (y0 - y2) / denom * (grid[1] - grid[0]))
    return float(grid[i])


def logk_stationarity(trace, burn_in: int) -> dict:
    """Split-half two-sample KS on the post-burn-in log-kernel trace.

    Stationarity of the chain is equivalent to stationarity of log K along
    it, so a drifting trace shows up as a small p-value here. Also returns
    the running mean of the full trace for plotting.
    """
    x = np.asarray(trace, dtype=float)
    if x.ndim != 1:
        raise ValueError("trace must be 1-D")
    if x.size <= 2 * burn_in or x.size - burn_in < 8:
        raise ValueError(
            f"trace too short: length {x.size} with burn_in {burn_in}"
        )
    post = x[burn_in:]
    half = post.size // 2
    ks_stat, p_value = _sps.ks_2samp(post[:half], post[half:], method="asymp")
    running_mean = np.cumsum(x) / np.arange(1, x.size + 1)
    return {
        "ks_statistic": float(ks_stat),
        "p_value": float(p_value),
        "running_mean": running_mean,
    }
