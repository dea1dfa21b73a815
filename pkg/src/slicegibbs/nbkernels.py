"""Compiled evaluator trios for the registered kernels.

Each kernel contributes three eagerly-typed njit functions sharing universal
signatures so the chain engine compiles once and dispatches through
first-class function values:

* ``logk(x, params, dmat, dvec)``  - full-point log-kernel;
* ``prep(j, x, params, dmat, dvec, coeffs)`` - fill per-coordinate profile
  coefficients from the current point;
* ``ceval(z, j, coeffs, params, dmat, dvec)`` - log of the 1-D conditional.

The profile algebra mirrors the numpy profile factories in ``kernels``;
parity between the two is covered by tests. ``params``/``dmat``/``dvec``
layouts are whatever the matching ``PackedKernel`` carries.
"""

import math

import numpy as np
from numba import njit, types

from .accel import NUMBA_ENABLED

if not NUMBA_ENABLED:  # pragma: no cover
    raise ImportError("compiled kernels unavailable: numba disabled or missing")

f8 = types.float64
i8 = types.int64

LOGK_SIG = f8(f8[::1], f8[::1], f8[:, ::1], f8[::1])
PREP_SIG = types.void(i8, f8[::1], f8[::1], f8[:, ::1], f8[::1], f8[::1])
CEVAL_SIG = f8(f8, i8, f8[::1], f8[::1], f8[:, ::1], f8[::1])

NEG_INF = -np.inf
LOG2PI = math.log(2.0 * math.pi)

# beta mixture constants: weight * 0.5 / B(a, b) per component
_BM1 = math.log(0.3 * 0.5 / 2.0)
_BM2 = math.log(0.4 * 0.5 * 6.0)
_BM3 = math.log(0.3 * 0.5 / 2.0)


@njit(PREP_SIG, cache=True)
def prep_noop(j, x, params, dmat, dvec, coeffs):
    pass


# --- beta_mixture (dim 1) --------------------------------------------------


@njit(f8(f8), cache=True)
def _beta_mix_scalar(z):
    t1 = NEG_INF
    t2 = NEG_INF
    t3 = NEG_INF
    u = 0.5 * (z + 5.0)
    if 0.0 < u < 1.0:
        t1 = _BM1 - 0.5 * math.log(u)
    u = 0.5 * (z + 1.0)
    if 0.0 < u < 1.0:
        t2 = _BM2 + math.log(u) + math.log1p(-u)
    u = 0.5 * (z - 5.0)
    if 0.0 < u < 1.0:
        t3 = _BM3 - 0.5 * math.log1p(-u)
    hi = max(t1, max(t2, t3))
    if hi == NEG_INF:
        return NEG_INF
    return hi + math.log(math.exp(t1 - hi) + math.exp(t2 - hi) + math.exp(t3 - hi))


@njit(LOGK_SIG, cache=True)
def logk_beta_mixture(x, params, dmat, dvec):
    return _beta_mix_scalar(x[0])


@njit(CEVAL_SIG, cache=True)
def ceval_beta_mixture(z, j, coeffs, params, dmat, dvec):
    return _beta_mix_scalar(z)


# --- rosenbrock (dim 2) ----------------------------------------------------


@njit(LOGK_SIG, cache=True)
def logk_rosenbrock(x, params, dmat, dvec):
    d = x[1] - x[0] * x[0]
    return -x[0] * x[0] / 10.0 - x[1] * x[1] / 10.0 - 2.0 * d * d


@njit(PREP_SIG, cache=True)
def prep_rosenbrock(j, x, params, dmat, dvec, coeffs):
    coeffs[0] = x[1] if j == 0 else x[0]


@njit(CEVAL_SIG, cache=True)
def ceval_rosenbrock(z, j, coeffs, params, dmat, dvec):
    if j == 0:
        x2 = coeffs[0]
        d = x2 - z * z
        return -z * z / 10.0 - x2 * x2 / 10.0 - 2.0 * d * d
    x1 = coeffs[0]
    d = z - x1 * x1
    return -x1 * x1 / 10.0 - z * z / 10.0 - 2.0 * d * d


# --- ackley ----------------------------------------------------------------
# params: [dim, a, b, c, temp, box]


@njit(LOGK_SIG, cache=True)
def logk_ackley(x, params, dmat, dvec):
    m = int(params[0])
    a, b, c, temp, box = params[1], params[2], params[3], params[4], params[5]
    s2 = 0.0
    sc = 0.0
    for i in range(m):
        if abs(x[i]) > box:
            return NEG_INF
        s2 += x[i] * x[i]
        sc += math.cos(c * x[i])
    f = -a * math.exp(-b * math.sqrt(s2 / m)) - math.exp(sc / m) + a + math.e
    return -f / temp


@njit(PREP_SIG, cache=True)
def prep_ackley(j, x, params, dmat, dvec, coeffs):
    m = int(params[0])
    c, box = params[3], params[5]
    s2 = 0.0
    sc = 0.0
    inside = 1.0
    for i in range(m):
        if i == j:
            continue
        if abs(x[i]) > box:
            inside = 0.0
        s2 += x[i] * x[i]
        sc += math.cos(c * x[i])
    coeffs[0] = s2
    coeffs[1] = sc
    coeffs[2] = inside


@njit(CEVAL_SIG, cache=True)
def ceval_ackley(z, j, coeffs, params, dmat, dvec):
    m = int(params[0])
    a, b, c, temp, box = params[1], params[2], params[3], params[4], params[5]
    if coeffs[2] == 0.0 or abs(z) > box:
        return NEG_INF
    s2 = (coeffs[0] + z * z) / m
    sc = (coeffs[1] + math.cos(c * z)) / m
    f = -a * math.exp(-b * math.sqrt(s2)) - math.exp(sc) + a + math.e
    return -f / temp


# --- radial_exp ------------------------------------------------------------
# params: [dim]


@njit(LOGK_SIG, cache=True)
def logk_radial_exp(x, params, dmat, dvec):
    s2 = 0.0
    for i in range(x.size):
        s2 += x[i] * x[i]
    return -math.sqrt(s2)


@njit(PREP_SIG, cache=True)
def prep_radial_exp(j, x, params, dmat, dvec, coeffs):
    s2 = 0.0
    for i in range(x.size):
        if i != j:
            s2 += x[i] * x[i]
    coeffs[0] = s2


@njit(CEVAL_SIG, cache=True)
def ceval_radial_exp(z, j, coeffs, params, dmat, dvec):
    return -math.sqrt(coeffs[0] + z * z)


# --- lasso_bridge ----------------------------------------------------------
# params: [n_obs, n_pred, lam, alpha]; dmat = standardized design; dvec = y
# coeffs: [sum r^2, sum r*zj (or sum r), sum zj^2 (or N), penalty of the rest]


@njit(LOGK_SIG, cache=True)
def logk_lasso_bridge(x, params, dmat, dvec):
    n = int(params[0])
    p = int(params[1])
    lam, alpha = params[2], params[3]
    loss = 0.0
    for i in range(n):
        r = dvec[i] - x[0]
        for k in range(p):
            r -= dmat[i, k] * x[k + 1]
        loss += r * r
    pen = 0.0
    for k in range(p):
        pen += abs(x[k + 1]) ** alpha
    return -(loss / (2.0 * n) + lam * pen)


@njit(PREP_SIG, cache=True)
def prep_lasso_bridge(j, x, params, dmat, dvec, coeffs):
    n = int(params[0])
    p = int(params[1])
    lam, alpha = params[2], params[3]
    sr2 = 0.0
    srz = 0.0
    if j == 0:
        # residual without the intercept
        for i in range(n):
            r = dvec[i]
            for k in range(p):
                r -= dmat[i, k] * x[k + 1]
            sr2 += r * r
            srz += r
        coeffs[2] = float(n)
        pen = 0.0
        for k in range(p):
            pen += abs(x[k + 1]) ** alpha
        coeffs[3] = lam * pen
    else:
        jz = j - 1
        szz = 0.0
        for i in range(n):
            r = dvec[i] - x[0]
            for k in range(p):
                if k != jz:
                    r -= dmat[i, k] * x[k + 1]
            sr2 += r * r
            srz += r * dmat[i, jz]
            szz += dmat[i, jz] * dmat[i, jz]
        coeffs[2] = szz
        pen = 0.0
        for k in range(p):
            if k != jz:
                pen += abs(x[k + 1]) ** alpha
        coeffs[3] = lam * pen
    coeffs[0] = sr2
    coeffs[1] = srz


@njit(CEVAL_SIG, cache=True)
def ceval_lasso_bridge(z, j, coeffs, params, dmat, dvec):
    n = params[0]
    lam, alpha = params[2], params[3]
    loss = (coeffs[0] - 2.0 * z * coeffs[1] + z * z * coeffs[2]) / (2.0 * n)
    pen = coeffs[3]
    if j > 0:
        pen += lam * abs(z) ** alpha
    return -(loss + pen)


# --- funnel ----------------------------------------------------------------
# params: [dim, sigma, mu]


@njit(LOGK_SIG, cache=True)
def logk_funnel(x, params, dmat, dvec):
    m = int(params[0])
    sigma, mu = params[1], params[2]
    v = x[m - 1]
    r2 = 0.0
    for i in range(m - 1):
        d = x[i] - mu
        r2 += d * d
    ev = math.exp(min(-v, 700.0))
    quad = 0.5 * ev * r2
    return (
        -v * v / (2.0 * sigma * sigma)
        - 0.5 * math.log(2.0 * math.pi * sigma * sigma)
        - 0.5 * (m - 1) * (LOG2PI + v)
        - quad
    )


@njit(PREP_SIG, cache=True)
def prep_funnel(j, x, params, dmat, dvec, coeffs):
    m = int(params[0])
    sigma, mu = params[1], params[2]
    if j == m - 1:
        s = 0.0
        for i in range(m - 1):
            d = x[i] - mu
            s += d * d
        coeffs[0] = s
    else:
        v = x[m - 1]
        rest = 0.0
        for i in range(m - 1):
            if i != j:
                d = x[i] - mu
                rest += d * d
        head = (
            -v * v / (2.0 * sigma * sigma)
            - 0.5 * math.log(2.0 * math.pi * sigma * sigma)
            - 0.5 * (m - 1) * (LOG2PI + v)
        )
        coeffs[0] = head
        coeffs[1] = 0.5 * math.exp(min(-v, 700.0))
        coeffs[2] = rest


@njit(CEVAL_SIG, cache=True)
def ceval_funnel(z, j, coeffs, params, dmat, dvec):
    m = int(params[0])
    sigma, mu = params[1], params[2]
    if j == m - 1:
        ev = math.exp(min(-z, 700.0))
        return (
            -z * z / (2.0 * sigma * sigma)
            - 0.5 * math.log(2.0 * math.pi * sigma * sigma)
            - 0.5 * (m - 1) * (LOG2PI + z)
            - 0.5 * ev * coeffs[0]
        )
    d = z - mu
    return coeffs[0] - coeffs[1] * (coeffs[2] + d * d)


# --- hybrid_rosenbrock -----------------------------------------------------
# params: [a, b]


@njit(LOGK_SIG, cache=True)
def logk_hybrid_rosenbrock(x, params, dmat, dvec):
    a, b = params[0], params[1]
    const = 0.5 * math.log(b) - math.log(math.pi)
    d1 = x[0] - a
    d2 = x[1] - x[0] * x[0]
    return -d1 * d1 - b * d2 * d2 + const


@njit(PREP_SIG, cache=True)
def prep_hybrid_rosenbrock(j, x, params, dmat, dvec, coeffs):
    coeffs[0] = x[1] if j == 0 else x[0]


@njit(CEVAL_SIG, cache=True)
def ceval_hybrid_rosenbrock(z, j, coeffs, params, dmat, dvec):
    a, b = params[0], params[1]
    const = 0.5 * math.log(b) - math.log(math.pi)
    if j == 0:
        x2 = coeffs[0]
        d1 = z - a
        d2 = x2 - z * z
        return -d1 * d1 - b * d2 * d2 + const
    x1 = coeffs[0]
    d1 = x1 - a
    d2 = z - x1 * x1
    return -d1 * d1 - b * d2 * d2 + const


# --- squiggle ----------------------------------------------------------------
# params: [dim, a]


@njit(LOGK_SIG, cache=True)
def logk_squiggle(x, params, dmat, dvec):
    m = int(params[0])
    a = params[1]
    const = -0.5 * math.log(2.0 * math.pi * 5.0) - 0.5 * (m - 1) * math.log(math.pi)
    s = math.sin(a * x[0])
    acc = 0.0
    for i in range(1, m):
        zi = x[i] + s
        acc += zi * zi
    return -x[0] * x[0] / 10.0 - acc + const


@njit(PREP_SIG, cache=True)
def prep_squiggle(j, x, params, dmat, dvec, coeffs):
    m = int(params[0])
    a = params[1]
    const = -0.5 * math.log(2.0 * math.pi * 5.0) - 0.5 * (m - 1) * math.log(math.pi)
    if j == 0:
        sx = 0.0
        sx2 = 0.0
        for i in range(1, m):
            sx += x[i]
            sx2 += x[i] * x[i]
        coeffs[0] = sx
        coeffs[1] = sx2
    else:
        s = math.sin(a * x[0])
        rest = 0.0
        for i in range(1, m):
            if i != j:
                zi = x[i] + s
                rest += zi * zi
        coeffs[0] = s
        coeffs[1] = -x[0] * x[0] / 10.0 - rest + const


@njit(CEVAL_SIG, cache=True)
def ceval_squiggle(z, j, coeffs, params, dmat, dvec):
    m = int(params[0])
    a = params[1]
    if j == 0:
        const = -0.5 * math.log(2.0 * math.pi * 5.0) - 0.5 * (m - 1) * math.log(math.pi)
        s = math.sin(a * z)
        return -z * z / 10.0 - (coeffs[1] + 2.0 * s * coeffs[0] + (m - 1) * s * s) + const
    zi = z + coeffs[0]
    return coeffs[1] - zi * zi


# --- allen_cahn --------------------------------------------------------------
# params: [dim, beta, a]; grid step 1/dim, well coefficient (1/a)*step/4


@njit(LOGK_SIG, cache=True)
def logk_allen_cahn(x, params, dmat, dvec):
    m = int(params[0])
    beta, a = params[1], params[2]
    ds = 1.0 / m
    cg = a / (2.0 * ds)
    cw = (1.0 / a) * ds / 4.0
    grad = x[0] * x[0] + x[m - 1] * x[m - 1]
    for i in range(1, m):
        d = x[i] - x[i - 1]
        grad += d * d
    well = 0.0
    for i in range(m):
        w = 1.0 - x[i] * x[i]
        well += w * w
    return -beta * (cg * grad + cw * well)


@njit(PREP_SIG, cache=True)
def prep_allen_cahn(j, x, params, dmat, dvec, coeffs):
    m = int(params[0])
    beta, a = params[1], params[2]
    ds = 1.0 / m
    cg = a / (2.0 * ds)
    cw = (1.0 / a) * ds / 4.0
    left = x[j - 1] if j > 0 else 0.0
    right = x[j + 1] if j < m - 1 else 0.0
    # gradient edges not touching coordinate j
    grad = 0.0
    for k in range(m + 1):
        if k == j or k == j + 1:
            continue
        lnode = x[k - 1] if k > 0 else 0.0
        rnode = x[k] if k < m else 0.0
        d = rnode - lnode
        grad += d * d
    well = 0.0
    for i in range(m):
        if i != j:
            w = 1.0 - x[i] * x[i]
            well += w * w
    coeffs[0] = left
    coeffs[1] = right
    coeffs[2] = -beta * (cg * grad + cw * well)


@njit(CEVAL_SIG, cache=True)
def ceval_allen_cahn(z, j, coeffs, params, dmat, dvec):
    m = int(params[0])
    beta, a = params[1], params[2]
    ds = 1.0 / m
    cg = a / (2.0 * ds)
    cw = (1.0 / a) * ds / 4.0
    dl = z - coeffs[0]
    dr = coeffs[1] - z
    w = 1.0 - z * z
    return coeffs[2] - beta * (cg * (dl * dl + dr * dr) + cw * w * w)


TRIOS = {
    "beta_mixture": (logk_beta_mixture, prep_noop, ceval_beta_mixture),
    "rosenbrock": (logk_rosenbrock, prep_rosenbrock, ceval_rosenbrock),
    "ackley": (logk_ackley, prep_ackley, ceval_ackley),
    "radial_exp": (logk_radial_exp, prep_radial_exp, ceval_radial_exp),
    "lasso_bridge": (logk_lasso_bridge, prep_lasso_bridge, ceval_lasso_bridge),
    "funnel": (logk_funnel, prep_funnel, ceval_funnel),
    "hybrid_rosenbrock": (logk_hybrid_rosenbrock, prep_hybrid_rosenbrock, ceval_hybrid_rosenbrock),
    "squiggle": (logk_squiggle, prep_squiggle, ceval_squiggle),
    "allen_cahn": (logk_allen_cahn, prep_allen_cahn, ceval_allen_cahn),
}
