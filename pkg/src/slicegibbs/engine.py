"""Compiled whole-chain engine.

Mirrors the numpy path - same transformed integrand, same panel-splitting
rule, same two-stage midpoint CDF inversion, same fallback triggers - but
runs the entire sweep loop in machine code, calling the kernel's compiled
conditional profile per integrand evaluation. One compilation covers every
registered kernel because evaluators are passed as first-class function
values with a fixed signature.

Draw-for-draw RNG consumption differs from the numpy path (scalar rejection
draws instead of blocks), so the two engines are each deterministic but not
bit-identical to one another.
"""

import numpy as np
import numba
from numba import njit, types
from numba.core.types import FunctionType, Tuple

from .accel import NUMBA_ENABLED
from .nbkernels import CEVAL_SIG, LOGK_SIG, PREP_SIG, TRIOS
from .numerics import DEFAULT_MAX_DEPTH, G7_WEIGHTS, GK_NODES, GK_WEIGHTS
from .support import EXP_CLAMP, GRID_LOG_THRESHOLD, GRID_POINTS

if not NUMBA_ENABLED:  # pragma: no cover
    raise ImportError("compiled engine unavailable: numba disabled or missing")

f8 = types.float64
i8 = types.int64
b1 = types.boolean

_RNG_TYPE = numba.typeof(np.random.Generator(np.random.Philox(key=0)))
_CEVAL = FunctionType(CEVAL_SIG)
_PREP = FunctionType(PREP_SIG)
_LOGK = FunctionType(LOGK_SIG)

MAX_PANELS = 256
INIT_PANELS = 8
DENSE_CELLS = 128
QCLIP = 1e-12

_GK_X = np.ascontiguousarray(GK_NODES)
_GK_W = np.ascontiguousarray(GK_WEIGHTS)
_G7_W = np.ascontiguousarray(G7_WEIGHTS)


@njit(f8(f8, f8), cache=True)
def _q_cauchy(u, s0):
    if u < QCLIP:
        u = QCLIP
    elif u > 1.0 - QCLIP:
        u = 1.0 - QCLIP
    return s0 * np.tan(np.pi * (u - 0.5))


# one GK15 panel; transformed mode integrates exp(g(Q(u)) - log f_C(Q(u))),
# direct mode integrates exp(g(x)); returns (integral, err, n_nonfinite, n_clamped)
_panel_sig = Tuple((f8, f8, i8, i8))(
    _CEVAL, i8, f8[::1], f8[::1], f8[:, ::1], f8[::1], f8, f8, f8, b1
)


@njit(_panel_sig, cache=True)
def _gk_panel(ceval, j, coeffs, params, dmat, dvec, s0, lo, hi, transformed):
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    k15 = 0.0
    g7 = 0.0
    nbad = 0
    nclamp = 0
    for i in range(15):
        u = c + h * _GK_X[i]
        if transformed:
            x = _q_cauchy(u, s0)
            lf = np.log(s0 / (np.pi * (s0 * s0 + x * x)))
            e = ceval(x, j, coeffs, params, dmat, dvec) - lf
        else:
            e = ceval(u, j, coeffs, params, dmat, dvec)
        if e > EXP_CLAMP:
            e = EXP_CLAMP
            nclamp += 1
        v = np.exp(e)
        if not np.isfinite(v):
            v = 0.0
            nbad += 1
        k15 += _GK_W[i] * v
        if i % 2 == 1:
            g7 += _G7_W[(i - 1) // 2] * v
    k15 *= h
    g7 *= h
    return k15, abs(k15 - g7), nbad, nclamp


# adaptive splitter writing sorted panels + cumulative masses into caller
# buffers; returns (n_panels, Z, total_err, converged, evals, nbad, nclamp)
_adapt_sig = Tuple((i8, f8, f8, b1, i8, i8, i8))(
    _CEVAL, i8, f8[::1], f8[::1], f8[:, ::1], f8[::1], f8, b1,
    f8[::1], i8,
    f8, f8, i8,
    f8[::1], f8[::1], f8[::1], f8[::1], i8[::1], f8[::1],
)


@njit(_adapt_sig, cache=True)
def _adaptive(
    ceval, j, coeffs, params, dmat, dvec, s0, transformed,
    edges, n_edges,
    abs_tol, rel_tol, max_depth,
    plo, phi, pval, perr, pdep, cum,
):
    n = n_edges - 1
    evals = 0
    nbad = 0
    nclamp = 0
    for i in range(n):
        v, e, nb, nc = _gk_panel(
            ceval, j, coeffs, params, dmat, dvec, s0, edges[i], edges[i + 1], transformed
        )
        plo[i] = edges[i]
        phi[i] = edges[i + 1]
        pval[i] = v
        perr[i] = e
        pdep[i] = 0
        evals += 15
        nbad += nb
        nclamp += nc
    converged = False
    while True:
        total = 0.0
        total_err = 0.0
        for i in range(n):
            total += pval[i]
            total_err += perr[i]
        tol = max(abs_tol, rel_tol * abs(total))
        if total_err <= tol:
            converged = True
            break
        room = MAX_PANELS - n
        if room <= 0:
            break
        # candidates above their error share, worst first when space is short
        n_cand = 0
        for i in range(n):
            if perr[i] > tol / n and pdep[i] < max_depth:
                n_cand += 1
        if n_cand == 0:
            break
        n_split = n_cand if n_cand <= room else room
        thresh = tol / n
        n0 = n
        for _ in range(n_split):
            best = -1
            best_err = thresh
            for i in range(n0):
                if pdep[i] < max_depth and perr[i] > best_err:
                    best = i
                    best_err = perr[i]
            if best < 0:
                break
            mid = 0.5 * (plo[best] + phi[best])
            v1, e1, nb1, nc1 = _gk_panel(
                ceval, j, coeffs, params, dmat, dvec, s0, plo[best], mid, transformed
            )
            v2, e2, nb2, nc2 = _gk_panel(
                ceval, j, coeffs, params, dmat, dvec, s0, mid, phi[best], transformed
            )
            evals += 30
            nbad += nb1 + nb2
            nclamp += nc1 + nc2
            d = pdep[best] + 1
            phi[n] = phi[best]
            plo[n] = mid
            pval[n] = v2
            perr[n] = e2
            pdep[n] = d
            phi[best] = mid
            pval[best] = v1
            perr[best] = e1
            pdep[best] = d
            n += 1
    # sort by panel lower edge (insertion sort; panels arrive nearly sorted)
    for i in range(1, n):
        klo = plo[i]
        khi = phi[i]
        kval = pval[i]
        kerr = perr[i]
        kdep = pdep[i]
        t = i - 1
        while t >= 0 and plo[t] > klo:
            plo[t + 1] = plo[t]
            phi[t + 1] = phi[t]
            pval[t + 1] = pval[t]
            perr[t + 1] = perr[t]
            pdep[t + 1] = pdep[t]
            t -= 1
        plo[t + 1] = klo
        phi[t + 1] = khi
        pval[t + 1] = kval
        perr[t + 1] = kerr
        pdep[t + 1] = kdep
    total = 0.0
    total_err = 0.0
    cum[0] = 0.0
    for i in range(n):
        total += pval[i]
        total_err += perr[i]
        cum[i + 1] = cum[i] + pval[i]
    frac_bad = nbad / evals if evals > 0 else 0.0
    if frac_bad > 0.5:
        converged = False
    return n, total, total_err, converged, evals, nbad, nclamp


# CDF inversion on sorted panels: locate the mass panel, narrow twice on
# midpoint-cell grids, then solve the final linear segment
_invert_sig = f8(
    _CEVAL, i8, f8[::1], f8[::1], f8[:, ::1], f8[::1], f8, b1,
    f8[::1], f8[::1], f8[::1], f8[::1], i8, f8,
)


@njit(_invert_sig, cache=True)
def _invert_cdf(
    ceval, j, coeffs, params, dmat, dvec, s0, transformed,
    plo, phi, pval, cum, n, target,
):
    if target < 0.0:
        target = 0.0
    if target > cum[n]:
        target = cum[n]
    # rightmost panel with cum[p] <= target
    lo_i = 0
    hi_i = n
    while hi_i - lo_i > 1:
        mid = (lo_i + hi_i) // 2
        if cum[mid] <= target:
            lo_i = mid
        else:
            hi_i = mid
    p = lo_i
    while pval[p] <= 0.0 and p + 1 < n and cum[p + 1] <= target:
        p += 1
    lo = plo[p]
    hi = phi[p]
    mass = pval[p]
    tau = target - cum[p]
    buf = np.empty(DENSE_CELLS)
    for _ in range(2):
        if mass <= 0.0:
            return 0.5 * (lo + hi)
        h = (hi - lo) / DENSE_CELLS
        # midpoint-cell masses, rescaled so the total matches `mass`
        total = 0.0
        for i in range(DENSE_CELLS):
            u = lo + (i + 0.5) * h
            if transformed:
                x = _q_cauchy(u, s0)
                lf = np.log(s0 / (np.pi * (s0 * s0 + x * x)))
                e = ceval(x, j, coeffs, params, dmat, dvec) - lf
            else:
                e = ceval(u, j, coeffs, params, dmat, dvec)
            if e > EXP_CLAMP:
                e = EXP_CLAMP
            v = np.exp(e)
            if not np.isfinite(v):
                v = 0.0
            buf[i] = v
            total += v
        if total <= 0.0:
            return 0.5 * (lo + hi)
        scale = mass / total
        acc = 0.0
        prev = 0.0
        s = DENSE_CELLS - 1
        for i in range(DENSE_CELLS):
            prev = acc
            acc += buf[i] * scale
            if acc >= tau:
                s = i
                break
        cell_mass = acc - prev
        t2 = tau - prev
        if t2 < 0.0:
            t2 = 0.0
        if t2 > cell_mass:
            t2 = cell_mass
        tau = t2
        mass = cell_mass
        lo = lo + s * h
        hi = lo + h
    if mass <= 0.0:
        return 0.5 * (lo + hi)
    return lo + (hi - lo) * (tau / mass)


# effective support for the conditional held in coeffs; returns
# (a, b, z, used_fallback, evals, nclamp)
_supp_sig = Tuple((f8, f8, f8, b1, i8, i8))(
    _CEVAL, i8, f8[::1], f8[::1], f8[:, ::1], f8[::1],
    f8, f8, f8, f8, f8, f8, b1,
    f8, f8, i8,
    f8[::1], f8[::1], f8[::1], f8[::1], i8[::1], f8[::1], f8[::1],
)


@njit(_supp_sig, cache=True)
def _effective_support(
    ceval, j, coeffs, params, dmat, dvec,
    epsilon, s0, flo, fhi, wlo, whi, has_warm,
    abs_tol, rel_tol, max_depth,
    plo, phi, pval, perr, pdep, cum, edges,
):
    # warm bracket seeds the panel mesh (finer where mass sat last sweep)
    n_edges = INIT_PANELS + 1
    if has_warm and whi > wlo:
        ua = 0.5 + np.arctan(wlo / s0) / np.pi
        ub = 0.5 + np.arctan(whi / s0) / np.pi
        if ua < 0.02:
            ua = 0.02
        if ua > 0.98:
            ua = 0.98
        if ub < 0.02:
            ub = 0.02
        if ub > 0.98:
            ub = 0.98
        if ub - ua > 1e-6:
            edges[0] = 0.0
            inner = INIT_PANELS - 1
            for i in range(inner):
                edges[i + 1] = ua + (ub - ua) * i / (inner - 1)
            edges[n_edges - 1] = 1.0
        else:
            for i in range(n_edges):
                edges[i] = i / (n_edges - 1)
    else:
        for i in range(n_edges):
            edges[i] = i / (n_edges - 1)

    n, z, terr, conv, evals, nbad, nclamp = _adaptive(
        ceval, j, coeffs, params, dmat, dvec, s0, True,
        edges, n_edges, abs_tol, rel_tol, max_depth,
        plo, phi, pval, perr, pdep, cum,
    )
    clamp_frac = nclamp / evals if evals > 0 else 0.0
    if conv and np.isfinite(z) and z > 0.0 and clamp_frac <= 1e-3:
        u_a = _invert_cdf(
            ceval, j, coeffs, params, dmat, dvec, s0, True,
            plo, phi, pval, cum, n, 0.5 * epsilon * z,
        )
        u_b = _invert_cdf(
            ceval, j, coeffs, params, dmat, dvec, s0, True,
            plo, phi, pval, cum, n, (1.0 - 0.5 * epsilon) * z,
        )
        a = _q_cauchy(u_a, s0)
        b = _q_cauchy(u_b, s0)
        if a < b:
            return a, b, z, False, evals, nclamp

    # grid fallback in x-space
    glo = flo
    ghi = fhi
    if has_warm:
        if wlo < glo:
            glo = wlo
        if whi > ghi:
            ghi = whi
    step = (ghi - glo) / (GRID_POINTS - 1)
    first = -1
    last = -1
    for i in range(GRID_POINTS):
        xv = glo + i * step
        lk = ceval(xv, j, coeffs, params, dmat, dvec)
        if np.isfinite(lk) and lk > GRID_LOG_THRESHOLD:
            if first < 0:
                first = i
            last = i
    evals += GRID_POINTS
    if first < 0:
        raise ValueError("support estimation failed: kernel numerically zero on the fallback grid")
    a_t = glo + first * step
    b_t = glo + last * step
    if a_t >= b_t:
        a_t -= step
        b_t += step
    for i in range(n_edges):
        edges[i] = a_t + (b_t - a_t) * i / (n_edges - 1)
    n, z, terr, conv, ev2, nbad, nc2 = _adaptive(
        ceval, j, coeffs, params, dmat, dvec, s0, False,
        edges, n_edges, abs_tol, rel_tol, max_depth,
        plo, phi, pval, perr, pdep, cum,
    )
    evals += ev2
    if not (np.isfinite(z) and z > 0.0):
        raise ValueError("support estimation failed: fallback integration returned no mass")
    a = _invert_cdf(
        ceval, j, coeffs, params, dmat, dvec, s0, False,
        plo, phi, pval, cum, n, 0.5 * epsilon * z,
    )
    b = _invert_cdf(
        ceval, j, coeffs, params, dmat, dvec, s0, False,
        plo, phi, pval, cum, n, (1.0 - 0.5 * epsilon) * z,
    )
    if not a < b:
        raise ValueError("support estimation failed: fallback CDF inversion degenerate")
    return a, b, z, True, evals, nclamp


_slice_sig = Tuple((f8, i8, b1))(
    _CEVAL, i8, f8[::1], f8[::1], f8[:, ::1], f8[::1],
    f8, f8, f8, f8, i8, _RNG_TYPE,
)


@njit(_slice_sig, cache=True)
def _slice_draw(ceval, j, coeffs, params, dmat, dvec, log_u, a, b, current, max_rej, rng):
    g_cur = ceval(current, j, coeffs, params, dmat, dvec)
    if not g_cur > log_u:
        raise ValueError("slice invariant violated: current point fell outside the slice")
    for i in range(max_rej):
        z = rng.uniform(a, b)
        if ceval(z, j, coeffs, params, dmat, dvec) > log_u:
            return z, i + 1, False
    return current, max_rej, True


_run_sig = Tuple((f8[:, ::1], f8[::1], f8[:, :, ::1], f8[:, ::1], i8, i8, i8))(
    _LOGK, _PREP, _CEVAL,
    f8[::1], f8[::1], f8[:, ::1], f8[::1],
    i8, i8, i8, f8, f8, b1, i8, f8, f8,
    f8, f8, i8, i8, b1, _RNG_TYPE,
)


@njit(_run_sig, cache=True)
def _run_asg(
    logk, prep, ceval,
    x0, params, dmat, dvec,
    n_retain, burn_in, thin, epsilon, s0, scan_random, max_rej, flo, fhi,
    abs_tol, rel_tol, max_depth, n_coeffs, track, rng,
):
    m = x0.size
    total = burn_in + n_retain * thin
    samples = np.empty((n_retain, m))
    trace = np.empty(total)
    hist = np.empty((n_retain if track else 0, m, 2))
    warm = np.full((m, 2), np.nan)
    coeffs = np.empty(n_coeffs)
    plo = np.empty(MAX_PANELS)
    phi = np.empty(MAX_PANELS)
    pval = np.empty(MAX_PANELS)
    perr = np.empty(MAX_PANELS)
    pdep = np.empty(MAX_PANELS, dtype=np.int64)
    cum = np.empty(MAX_PANELS + 1)
    edges = np.empty(INIT_PANELS + 1)
    x = x0.copy()
    log_kv = logk(x, params, dmat, dvec)
    cap_hits = 0
    fallback_uses = 0
    clamp_events = 0
    kept = 0
    order = np.arange(m)
    for t in range(1, total + 1):
        log_u = log_kv + np.log(rng.random())
        if scan_random:
            order = rng.permutation(m)
        for oi in range(m):
            k = order[oi]
            prep(k, x, params, dmat, dvec, coeffs)
            has_warm = np.isfinite(warm[k, 0]) and np.isfinite(warm[k, 1])
            a, b, z, used_fb, evals, nclamp = _effective_support(
                ceval, k, coeffs, params, dmat, dvec,
                epsilon, s0, flo, fhi, warm[k, 0], warm[k, 1], has_warm,
                abs_tol, rel_tol, max_depth,
                plo, phi, pval, perr, pdep, cum, edges,
            )
            znew, props, hit = _slice_draw(
                ceval, k, coeffs, params, dmat, dvec, log_u, a, b, x[k], max_rej, rng
            )
            x[k] = znew
            warm[k, 0] = a
            warm[k, 1] = b
            if hit:
                cap_hits += 1
            if used_fb:
                fallback_uses += 1
            clamp_events += nclamp
        log_kv = logk(x, params, dmat, dvec)
        trace[t - 1] = log_kv
        if t > burn_in and (t - burn_in) % thin == 0:
            for d in range(m):
                samples[kept, d] = x[d]
                if track:
                    hist[kept, d, 0] = warm[d, 0]
                    hist[kept, d, 1] = warm[d, 1]
            kept += 1
    return samples, trace, hist, warm, cap_hits, fallback_uses, clamp_events


_rwmh_sig = Tuple((f8[:, ::1], f8[::1], i8))(
    _LOGK, f8[::1], f8[::1], f8[:, ::1], f8[::1], i8, i8, i8, f8[::1], _RNG_TYPE
)


@njit(_rwmh_sig, cache=True)
def _run_rwmh(logk, x0, params, dmat, dvec, n_retain, burn_in, thin, sd, rng):
    m = x0.size
    total = burn_in + n_retain * thin
    samples = np.empty((n_retain, m))
    trace = np.empty(total)
    x = x0.copy()
    prop = np.empty(m)
    log_kv = logk(x, params, dmat, dvec)
    accepts = 0
    kept = 0
    for t in range(1, total + 1):
        for d in range(m):
            prop[d] = x[d] + sd[d] * rng.standard_normal()
        log_kp = logk(prop, params, dmat, dvec)
        if np.log(rng.random()) < log_kp - log_kv:
            for d in range(m):
                x[d] = prop[d]
            log_kv = log_kp
            accepts += 1
        trace[t - 1] = log_kv
        if t > burn_in and (t - burn_in) % thin == 0:
            for d in range(m):
                samples[kept, d] = x[d]
            kept += 1
    return samples, trace, accepts


def _lookup(kernel):
    packed = kernel.packed
    if packed is None or packed.trio not in TRIOS:
        raise ValueError(f"kernel {kernel.name!r} has no compiled evaluators")
    logk, prep, ceval = TRIOS[packed.trio]
    return logk, prep, ceval, packed


def run_asg_compiled(kernel, x0, config, rng):
    """Engine entry point; returns the same tuple shape as the numpy path."""
    logk, prep, ceval, packed = _lookup(kernel)
    n_coeffs = max(kernel.dim + 2, 8)
    samples, trace, hist, warm, cap_hits, fallback_uses, clamp_events = _run_asg(
        logk, prep, ceval,
        np.ascontiguousarray(x0, dtype=float),
        packed.params, packed.dmat, packed.dvec,
        config.n_samples, config.burn_in, config.thin,
        config.epsilon, config.s0,
        config.scan == "random_permutation",
        config.max_rejections,
        float(config.fallback_range[0]), float(config.fallback_range[1]),
        config.support_abs_tol, config.support_rel_tol, DEFAULT_MAX_DEPTH,
        n_coeffs, config.track_brackets, rng,
    )
    counters = {
        "cap_hits": int(cap_hits),
        "fallback_uses": int(fallback_uses),
        "clamp_events": int(clamp_events),
    }
    history = hist if config.track_brackets else None
    return samples, trace, counters, warm, history


def run_rwmh_compiled(kernel, x0, sd, config, rng):
    logk, _, _, packed = _lookup(kernel)
    samples, trace, accepts = _run_rwmh(
        logk,
        np.ascontiguousarray(x0, dtype=float),
        packed.params, packed.dmat, packed.dvec,
        config.n_samples, config.burn_in, config.thin,
        np.ascontiguousarray(sd, dtype=float), rng,
    )
    return samples, trace, int(accepts)


def warmup():
    """Force compilation (or cache load) of the full engine."""
    from .kernels import make_kernel
    from .asg import ChainConfig, make_rng

    k = make_kernel("rosenbrock")
    cfg = ChainConfig(n_samples=2, burn_in=1, seed=0)
    run_asg_compiled(k, np.zeros(2), cfg, make_rng(0))
    run_rwmh_compiled(k, np.zeros(2), np.ones(2), cfg, make_rng(0))
