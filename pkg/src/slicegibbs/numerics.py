"""Self-contained 1-D adaptive quadrature and bracketed root finding.

The quadrature is a globally adaptive Gauss-Kronrod (7, 15) pair: panels are
bisected until the summed error estimate meets ``max(abs_tol, rel_tol*|I|)``.
Non-finite integrand values are replaced by zero and counted; a result with
more than half its evaluations non-finite is reported as failed. The root
finder is Brent's method (bisection with secant/inverse-quadratic steps),
which keeps the bisection convergence guarantee.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "QuadResult",
    "RootResult",
    "BracketingError",
    "adaptive_quadrature",
    "find_root",
    "DEFAULT_ABS_TOL",
    "DEFAULT_REL_TOL",
    "DEFAULT_MAX_DEPTH",
    "DEFAULT_X_TOL",
    "DEFAULT_F_TOL",
]

DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-8
DEFAULT_MAX_DEPTH = 50
DEFAULT_X_TOL = 1e-10
DEFAULT_F_TOL = 1e-9

# panel budget shared with the compiled engine; 256 panels at max_depth 50 is
# enough for integrable endpoint singularities like u**-0.5
MAX_PANELS = 256
INIT_PANELS = 8

# Gauss-Kronrod (7, 15) nodes on [-1, 1], ascending; Gauss-7 nodes sit at the
# odd indices
GK_NODES = np.array(
    [
        -0.9914553711208126,
        -0.9491079123427585,
        -0.8648644233597691,
        -0.7415311855993944,
        -0.5860872354676911,
        -0.4058451513773972,
        -0.2077849550078985,
        0.0,
        0.2077849550078985,
        0.4058451513773972,
        0.5860872354676911,
        0.7415311855993944,
        0.8648644233597691,
        0.9491079123427585,
        0.9914553711208126,
    ]
)
GK_WEIGHTS = np.array(
    [
        0.0229353220105292,
        0.0630920926299785,
        0.1047900103222502,
        0.1406532597155259,
        0.1690047266392679,
        0.1903505780647854,
        0.2044329400752989,
        0.2094821410847278,
        0.2044329400752989,
        0.1903505780647854,
        0.1690047266392679,
        0.1406532597155259,
        0.1047900103222502,
        0.0630920926299785,
        0.0229353220105292,
    ]
)
G7_WEIGHTS = np.array(
    [
        0.1294849661688697,
        0.2797053914892767,
        0.3818300505051189,
        0.4179591836734694,
        0.3818300505051189,
        0.2797053914892767,
        0.1294849661688697,
    ]
)


class BracketingError(ValueError):
    """Raised when find_root is called without a sign change."""


@dataclass(frozen=True)
class QuadResult:
    """Outcome of one adaptive integration.

    ``converged`` is False when the error target was not met at max_depth or
    when more than 50% of the evaluations were non-finite; ``value`` then
    still carries the best estimate so the caller can decide on a fallback.
    """

    value: float
    abs_error_estimate: float
    evaluations: int
    converged: bool
    nonfinite_fraction: float


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int


class _PanelSet:
    """Converged panel decomposition of an adaptive integration.

    Arrays are sorted by panel lower edge; ``cum[i]`` is the integral over
    all panels left of panel ``i``, so cum[-1] is the total. Used by the
    support estimator to build the transformed CDF without re-integrating.
    """

    __slots__ = ("lo", "hi", "val", "err", "cum")

    def __init__(self, lo, hi, val, err):
        order = np.argsort(lo, kind="stable")
        self.lo = lo[order]
        self.hi = hi[order]
        self.val = val[order]
        self.err = err[order]
        self.cum = np.concatenate(([0.0], np.cumsum(self.val)))


def _as_batch(f, vectorized):
    if vectorized:
        return f
    return lambda xs: np.array([f(x) for x in xs], dtype=float)


def _gk_batch(fb, lo, hi):
    """Apply the GK15 pair to each [lo_i, hi_i]; returns (k15, err, n_nonfinite)."""
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    pts = c[:, None] + h[:, None] * GK_NODES
    vals = np.asarray(fb(pts.ravel()), dtype=float).reshape(pts.shape)
    bad = ~np.isfinite(vals)
    n_bad = int(bad.sum())
    if n_bad:
        vals = np.where(bad, 0.0, vals)
    k15 = h * (vals @ GK_WEIGHTS)
    g7 = h * (vals[:, 1::2] @ G7_WEIGHTS)
    err = np.abs(k15 - g7)
    return k15, err, n_bad


def _adaptive_panels(
    fb,
    lo,
    hi,
    abs_tol,
    rel_tol,
    max_depth,
    init_edges=None,
):
    """Globally adaptive GK15 integration of batch-callable ``fb`` over [lo, hi].

    Each round splits every panel whose error exceeds its share tol/n (capped
    at MAX_PANELS, worst errors first). Returns (_PanelSet, QuadResult).
    """
    if init_edges is None:
        edges = np.linspace(lo, hi, INIT_PANELS + 1)
    else:
        edges = np.asarray(init_edges, dtype=float)
    plo = edges[:-1].copy()
    phi = edges[1:].copy()
    val, err, n_bad = _gk_batch(fb, plo, phi)
    depth = np.zeros(plo.size, dtype=np.int64)
    evals = 15 * plo.size
    nonfinite = n_bad
    converged = False

    while True:
        total = float(val.sum())
        total_err = float(err.sum())
        tol = max(abs_tol, rel_tol * abs(total))
        if total_err <= tol:
            converged = True
            break
        n = plo.size
        cand = np.flatnonzero((err > tol / n) & (depth < max_depth))
        if cand.size == 0:
            break
        room = MAX_PANELS - n
        if room <= 0:
            break
        if cand.size > room:
            worst = np.argsort(err[cand])[::-1][:room]
            cand = cand[worst]
        mid = 0.5 * (plo[cand] + phi[cand])
        new_lo = np.concatenate([plo[cand], mid])
        new_hi = np.concatenate([mid, phi[cand]])
        new_val, new_err, n_bad = _gk_batch(fb, new_lo, new_hi)
        evals += 15 * new_lo.size
        nonfinite += n_bad
        new_depth = np.concatenate([depth[cand], depth[cand]]) + 1
        keep = np.ones(n, dtype=bool)
        keep[cand] = False
        plo = np.concatenate([plo[keep], new_lo])
        phi = np.concatenate([phi[keep], new_hi])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])
        depth = np.concatenate([depth[keep], new_depth])

    frac_bad = nonfinite / evals if evals else 0.0
    if frac_bad > 0.5:
        converged = False
    result = QuadResult(
        value=float(val.sum()),
        abs_error_estimate=float(err.sum()),
        evaluations=evals,
        converged=converged,
        nonfinite_fraction=frac_bad,
    )
    return _PanelSet(plo, phi, val, err), result


def adaptive_quadrature(
    f,
    lo: float,
    hi: float,
    abs_tol: float = DEFAULT_ABS_TOL,
    rel_tol: float = DEFAULT_REL_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
    vectorized: bool = False,
) -> QuadResult:
    """Integrate ``f`` over the finite interval (lo, hi).

    Parameters
    ----------
    f : callable
        Integrand. Scalar-in/scalar-out unless ``vectorized`` is set, in
        which case it must map a 1-D array to a 1-D array.
    lo, hi : float
        Finite integration limits with lo < hi. Endpoints themselves are
        never evaluated (interior rule), so integrable endpoint blow-ups
        are handled by panel refinement.
    abs_tol, rel_tol : float
        The run converges when the summed panel error estimate is below
        ``max(abs_tol, rel_tol * |integral|)``.
    max_depth : int
        Per-panel bisection limit.

    Non-convergence is not an exception: inspect ``QuadResult.converged``.
    """
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError(f"need finite lo < hi, got [{lo}, {hi}]")
    _, result = _adaptive_panels(_as_batch(f, vectorized), lo, hi, abs_tol, rel_tol, max_depth)
    return result


def find_root(
    f,
    lo: float,
    hi: float,
    x_tol: float = DEFAULT_X_TOL,
    f_tol: float = DEFAULT_F_TOL,
) -> RootResult:
    """Locate a zero of ``f`` inside the bracket [lo, hi] with Brent's method.

    Requires a sign change, or one endpoint already within ``f_tol`` of zero.
    Success means ``|f(root)| <= f_tol`` or the bracket has shrunk to
    ``x_tol``; either way the returned root lies inside [lo, hi].
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    fa = float(f(lo))
    fb = float(f(hi))
    if abs(fa) <= f_tol and abs(fa) <= abs(fb):
        return RootResult(root=lo, residual=fa, iterations=0)
    if abs(fb) <= f_tol:
        return RootResult(root=hi, residual=fb, iterations=0)
    if fa * fb > 0:
        raise BracketingError(
            f"no sign change on [{lo}, {hi}]: f(lo)={fa:.6g}, f(hi)={fb:.6g}"
        )

    # a, b bracket the root with |f(b)| <= |f(a)|; c is the previous b
    a, b = lo, hi
    if abs(fa) < abs(fb):
        a, b, fa, fb = b, a, fb, fa
    c, fc = a, fa
    mflag = True
    d = c
    iterations = 0
    while True:
        iterations += 1
        if fa != fc and fb != fc:
            # inverse quadratic interpolation
            s = (
                a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
            )
        else:
            s = b - fb * (b - a) / (fb - fa)
        cond = (
            not (min((3 * a + b) / 4, b) < s < max((3 * a + b) / 4, b))
            or (mflag and abs(s - b) >= abs(b - c) / 2)
            or (not mflag and abs(s - b) >= abs(c - d) / 2)
            or (mflag and abs(b - c) < x_tol)
            or (not mflag and abs(c - d) < x_tol)
        )
        if cond:
            s = 0.5 * (a + b)
            mflag = True
        else:
            mflag = False
        fs = float(f(s))
        d, c, fc = c, b, fb
        if fa * fs < 0:
            b, fb = s, fs
        else:
            a, fa = s, fs
        if abs(fa) < abs(fb):
            a, b, fa, fb = b, a, fb, fa
        if abs(fb) <= f_tol or abs(b - a) <= x_tol or iterations >= 200:
            return RootResult(root=b, residual=fb, iterations=iterations)
