"""Sliced Gibbs sampling for arbitrary unnormalized probability kernels.

The sampler alternates a uniform slice-height draw with coordinate-wise
uniform draws over the level set of each 1-D conditional, bracketed
automatically by an effective-support estimator built on a Cauchy
probability-integral transform. No proposal scales, step sizes, or support
bounds need to be supplied. A random-walk Metropolis-Hastings baseline and
ESS/IACT diagnostics round out the benchmark harness.
"""

from .accel import HAVE_NUMBA, NUMBA_ENABLED
from .asg import ChainConfig, ChainOutput, ChainState, make_rng, run_asg, single_sweep
from .baseline import RwmhConfig, run_rwmh
from .diagnostics import (
    DegenerateSeriesError,
    EssReport,
    acf,
    ess,
    ess_report,
    iact_geyer,
    logk_stationarity,
    marginal_mode,
)
from .kernels import (
    KERNEL_NAMES,
    Conditional1D,
    LogKernel,
    conditional_1d,
    list_kernels,
    make_kernel,
)
from .numerics import (
    BracketingError,
    QuadResult,
    RootResult,
    adaptive_quadrature,
    find_root,
)
from .regression import RegressionData, load_regression_data, synthetic_regression
from .slicing import SliceDrawStats, SliceInvariantError, slice_1d_fixed_u, slice_height
from .support import (
    SupportEstimate,
    SupportEstimationError,
    cauchy_maps,
    effective_support_1d,
)

__version__ = "0.1.0"

__all__ = [
    "HAVE_NUMBA",
    "NUMBA_ENABLED",
    "ChainConfig",
    "ChainOutput",
    "ChainState",
    "make_rng",
    "run_asg",
    "single_sweep",
    "RwmhConfig",
    "run_rwmh",
    "DegenerateSeriesError",
    "EssReport",
    "acf",
    "ess",
    "ess_report",
    "iact_geyer",
    "logk_stationarity",
    "marginal_mode",
    "KERNEL_NAMES",
    "Conditional1D",
    "LogKernel",
    "conditional_1d",
    "list_kernels",
    "make_kernel",
    "BracketingError",
    "QuadResult",
    "RootResult",
    "adaptive_quadrature",
    "find_root",
    "RegressionData",
    "load_regression_data",
    "synthetic_regression",
    "SliceDrawStats",
    "SliceInvariantError",
    "slice_1d_fixed_u",
    "slice_height",
    "SupportEstimate",
    "SupportEstimationError",
    "cauchy_maps",
    "effective_support_1d",
    "__version__",
]
