"""Agreement between the compiled engine and the numpy path."""

import numpy as np
import pytest
from scipy import stats

import slicegibbs as sg
from slicegibbs.accel import NUMBA_ENABLED, resolve_engine
from slicegibbs.kernels import KERNEL_NAMES

pytestmark = pytest.mark.skipif(not NUMBA_ENABLED, reason="numba disabled")


def build(name):
    data = sg.synthetic_regression(40, 6, 3, 1.0, seed=3) if name == "lasso_bridge" else None
    return sg.make_kernel(name, None, data)


class TestResolveEngine:
    def test_auto_prefers_compiled_kernels(self):
        assert resolve_engine("auto", True) == "numba"
        assert resolve_engine("auto", False) == "numpy"
        assert resolve_engine("numpy", True) == "numpy"

    def test_numba_requires_compiled_kernel(self):
        with pytest.raises(RuntimeError, match="compiled"):
            resolve_engine("numba", False)

    def test_invalid_name(self):
        with pytest.raises(ValueError):
            resolve_engine("cuda", True)

    def test_python_kernel_on_numba_engine_rejected(self):
        k = sg.LogKernel("g", 1, lambda X: -0.5 * X[:, 0] ** 2)
        with pytest.raises(RuntimeError):
            sg.run_asg(k, config=sg.ChainConfig(n_samples=5, engine="numba"))


class TestCompiledEvaluators:
    def test_logk_matches_python(self, rng):
        from slicegibbs.nbkernels import TRIOS

        for name in KERNEL_NAMES:
            k = build(name)
            logk, _, _ = TRIOS[k.packed.trio]
            X = rng.uniform(-4, 4, size=(200, k.dim))
            for row in X:
                a = logk(np.ascontiguousarray(row), k.packed.params, k.packed.dmat, k.packed.dvec)
                b = k.log_eval(row)
                if np.isneginf(a) and np.isneginf(b):
                    continue
                assert abs(a - b) <= 1e-9 * max(1.0, abs(b)), name

    def test_conditional_profiles_match_python(self, rng):
        from slicegibbs.nbkernels import TRIOS

        for name in KERNEL_NAMES:
            k = build(name)
            _, prep, ceval = TRIOS[k.packed.trio]
            coeffs = np.empty(max(k.dim + 2, 8))
            for _ in range(40):
                j = int(rng.integers(k.dim))
                x = np.ascontiguousarray(rng.uniform(-3, 3, k.dim))
                prep(j, x, k.packed.params, k.packed.dmat, k.packed.dvec, coeffs)
                cond = sg.conditional_1d(k, j, np.delete(x, j))
                for z in rng.uniform(-4, 4, 8):
                    a = ceval(z, j, coeffs, k.packed.params, k.packed.dmat, k.packed.dvec)
                    b = cond(float(z))
                    if np.isneginf(a) and np.isneginf(b):
                        continue
                    assert abs(a - b) <= 1e-9 * max(1.0, abs(b)), (name, j)


class TestChainAgreement:
    @pytest.mark.parametrize("name", ["rosenbrock", "beta_mixture", "squiggle"])
    def test_same_distribution_across_engines(self, name):
        # thin so the retained draws are close to independent (the banana's
        # second coordinate has tau ~ 13, which would invalidate a raw
        # two-sample KS), then compare distributions and moments
        import warnings

        thin = 15 if name == "rosenbrock" else 3
        k = build(name)
        outs = {}
        for eng in ("numba", "numpy"):
            cfg = sg.ChainConfig(n_samples=600, burn_in=250, thin=thin, seed=21, engine=eng)
            with warnings.catch_warnings():
                # the mixture's unbounded edge modes make occasional cap
                # hits expected
                warnings.simplefilter("ignore", RuntimeWarning)
                outs[eng] = sg.run_asg(k, config=cfg)
            assert outs[eng].engine == eng
        for j in range(k.dim):
            a = outs["numba"].samples[:, j]
            b = outs["numpy"].samples[:, j]
            assert stats.ks_2samp(a, b).pvalue > 0.001, (name, j)
            joint_se = np.hypot(a.std() / np.sqrt(len(a)), b.std() / np.sqrt(len(b)))
            assert abs(a.mean() - b.mean()) <= 4.5 * joint_se, (name, j)

    def test_support_bounds_agree_between_engines(self):
        # the compiled support estimator is exercised through a short chain
        # with bracket tracking; its final brackets must match the numpy
        # estimator's on the same conditioning values
        k = build("rosenbrock")
        cfg = sg.ChainConfig(n_samples=3, burn_in=0, seed=5, engine="numba", track_brackets=True)
        out = sg.run_asg(k, x0=np.zeros(2), config=cfg)
        x = out.samples[-1]
        for j in range(2):
            est = sg.effective_support_1d(
                sg.conditional_1d(k, j, np.delete(x, j)), 0.01,
                warm_bracket=out.bracket_history[-1, j],
            )
            a, b = out.bracket_history[-1, j]
            # brackets were computed on the penultimate mixed state; only a
            # coarse agreement check is meaningful here
            assert abs(est.lower - a) < 0.5 and abs(est.upper - b) < 0.5

    def test_rwmh_engines_agree(self):
        k = build("rosenbrock")
        outs = {}
        for eng in ("numba", "numpy"):
            cfg = sg.RwmhConfig(n_samples=4000, burn_in=500, seed=9, engine=eng, proposal_sd=0.8)
            outs[eng] = sg.run_rwmh(k, config=cfg)
        for j in range(2):
            p = stats.ks_2samp(
                outs["numba"].samples[:, j], outs["numpy"].samples[:, j]
            ).pvalue
            assert p > 0.001

    def test_compiled_grid_fallback_path(self):
        # a conditional exceeding the overflow clamp everywhere forces the
        # compiled estimator onto the grid path; compare with the numpy
        # estimator on the same (clamped) kernel
        from numba import njit

        from slicegibbs import engine as eng
        from slicegibbs.nbkernels import CEVAL_SIG

        @njit(CEVAL_SIG, cache=False)
        def ceval_hot(z, j, coeffs, params, dmat, dvec):
            return 750.0 - z * z

        coeffs = np.empty(8)
        empty2 = np.empty((0, 0))
        empty1 = np.empty(0)
        plo = np.empty(eng.MAX_PANELS)
        phi = np.empty(eng.MAX_PANELS)
        pval = np.empty(eng.MAX_PANELS)
        perr = np.empty(eng.MAX_PANELS)
        pdep = np.empty(eng.MAX_PANELS, dtype=np.int64)
        cum = np.empty(eng.MAX_PANELS + 1)
        edges = np.empty(eng.INIT_PANELS + 1)
        a, b, z, used_fb, evals, nclamp = eng._effective_support(
            ceval_hot, 0, coeffs, empty1, empty2, empty1,
            0.01, 1.0, -100.0, 100.0, np.nan, np.nan, False,
            1e-10, 1e-8, 50,
            plo, phi, pval, perr, pdep, cum, edges,
        )
        assert used_fb
        assert nclamp > 0
        ref = sg.effective_support_1d(lambda x: 750.0 - np.asarray(x) ** 2, 0.01)
        assert ref.method == "grid_fallback"
        assert abs(a - ref.lower) <= 1e-6
        assert abs(b - ref.upper) <= 1e-6

    def test_compiled_support_golden_row(self):
        # drive the compiled estimator directly on the x2 | x1 = 0 section
        from slicegibbs import engine as eng
        from slicegibbs.nbkernels import TRIOS

        k = build("rosenbrock")
        _, prep, ceval = TRIOS[k.packed.trio]
        coeffs = np.empty(8)
        x = np.zeros(2)
        prep(1, x, k.packed.params, k.packed.dmat, k.packed.dvec, coeffs)
        plo = np.empty(eng.MAX_PANELS)
        phi = np.empty(eng.MAX_PANELS)
        pval = np.empty(eng.MAX_PANELS)
        perr = np.empty(eng.MAX_PANELS)
        pdep = np.empty(eng.MAX_PANELS, dtype=np.int64)
        cum = np.empty(eng.MAX_PANELS + 1)
        edges = np.empty(eng.INIT_PANELS + 1)
        a, b, z, used_fb, evals, nclamp = eng._effective_support(
            ceval, 1, coeffs, k.packed.params, k.packed.dmat, k.packed.dvec,
            0.01, 1.0, -100.0, 100.0, np.nan, np.nan, False,
            1e-10, 1e-8, 50,
            plo, phi, pval, perr, pdep, cum, edges,
        )
        assert not used_fb
        assert abs(a + 1.256894) <= 5e-4
        assert abs(b - 1.256894) <= 5e-4
        assert abs(z - np.sqrt(np.pi / 2.1)) <= 1e-8
