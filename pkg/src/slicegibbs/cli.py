"""Benchmark command line.

Subcommands: ``list-kernels``, ``sample``, ``support``, ``benchmark``,
``lasso``, ``engine-bench``. Exit codes: 0 success, 1 runtime failure,
2 usage error. Matrices go to CSV (header row, shortest round-trip floats),
reports and manifests to JSON; all writes are atomic, and every sample run
stores a manifest sufficient for bit-exact replay (``sample
--from-manifest``).
"""

import argparse
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .accel import ENGINE_ENV_VAR
from .asg import ChainConfig, run_asg
from .baseline import RwmhConfig, run_rwmh
from .diagnostics import ess_report, logk_stationarity, marginal_mode
from .iofmt import RunManifest, write_csv_atomic, write_json_atomic
from .kernels import KERNEL_NAMES, conditional_1d, list_kernels, make_kernel
from .regression import load_regression_data, synthetic_regression
from .support import effective_support_1d

JOBS_ENV_VAR = "SLICEGIBBS_JOBS"


class SystemExit2(SystemExit):
    """Usage error: message on stderr, exit code 2."""

    def __init__(self, msg):
        print(f"error: {msg}", file=sys.stderr)
        super().__init__(2)


def _default_jobs() -> int:
    env = os.environ.get(JOBS_ENV_VAR)
    if env:
        return max(1, int(env))
    try:
        import psutil

        phys = psutil.cpu_count(logical=False)
        if phys:
            return phys
    except ImportError:
        pass
    return os.cpu_count() or 1


def _parse_params(pairs):
    params = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise SystemExit2(f"--param expects key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        try:
            params[key] = int(val) if val.strip().lstrip("+-").isdigit() else float(val)
        except ValueError:
            raise SystemExit2(f"--param {key}: non-numeric value {val!r}") from None
    return params


def _parse_floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise SystemExit2(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _load_data(args):
    if getattr(args, "data_csv", None):
        return load_regression_data(args.data_csv), {"csv": os.path.abspath(args.data_csv)}
    if getattr(args, "synthetic", None):
        vals = args.synthetic.split(",")
        if len(vals) != 4:
            raise SystemExit2("--synthetic expects N,p,sparsity,noise_sd")
        n, p, s = int(vals[0]), int(vals[1]), int(vals[2])
        noise = float(vals[3])
        seed = args.data_seed
        return (
            synthetic_regression(n, p, s, noise, seed=seed),
            {"synthetic": {"n_obs": n, "n_pred": p, "sparsity": s, "noise_sd": noise, "seed": seed}},
        )
    return None, None


def _build_kernel(args):
    params = _parse_params(getattr(args, "param", None))
    data, data_source = _load_data(args)
    if args.kernel == "lasso_bridge" and data is None:
        raise SystemExit2("lasso_bridge needs --data-csv or --synthetic")
    kernel = make_kernel(args.kernel, params, data)
    return kernel, params, data_source


def _add_kernel_args(p):
    p.add_argument("--kernel", required=True, choices=KERNEL_NAMES)
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="kernel parameter override (repeatable)")
    p.add_argument("--data-csv", help="regression CSV (header, response column 'y')")
    p.add_argument("--synthetic", metavar="N,P,SPARSITY,NOISE_SD",
                   help="synthetic regression data spec")
    p.add_argument("--data-seed", type=int, default=42)


def _add_chain_args(p):
    p.add_argument("-n", "--n-samples", type=int, default=1000)
    p.add_argument("--burn-in", type=int, default=250)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--s0", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scan", choices=("systematic", "random_permutation"), default="systematic")
    p.add_argument("--max-rejections", type=int, default=10_000)
    p.add_argument("--fallback-range", default="-100,100", metavar="LO,HI")
    p.add_argument("--proposal-sd", default="1.0",
                   help="RW-MH proposal scale, scalar or comma-separated per coordinate")
    p.add_argument("--engine", choices=("auto", "numba", "numpy"), default="auto",
                   help=f"execution path (also settable via {ENGINE_ENV_VAR})")
    p.add_argument("--track-brackets", action="store_true")


def _chain_config(args, sampler):
    frange = _parse_floats(args.fallback_range, "--fallback-range")
    if len(frange) != 2:
        raise SystemExit2("--fallback-range expects LO,HI")
    common = dict(
        n_samples=args.n_samples,
        burn_in=args.burn_in,
        thin=args.thin,
        epsilon=args.epsilon,
        s0=args.s0,
        seed=args.seed,
        scan=args.scan,
        max_rejections=args.max_rejections,
        fallback_range=(frange[0], frange[1]),
        track_brackets=getattr(args, "track_brackets", False),
        engine=args.engine,
    )
    if sampler == "rwmh":
        sd = _parse_floats(args.proposal_sd, "--proposal-sd")
        return RwmhConfig(proposal_sd=sd[0] if len(sd) == 1 else tuple(sd), **common)
    return ChainConfig(**common)


def _run_sampler(kernel, sampler, config, x0=None):
    if sampler == "asg":
        return run_asg(kernel, x0=x0, config=config)
    return run_rwmh(kernel, x0=x0, config=config)


def _config_dict(config):
    d = {k: v for k, v in config.__dict__.items()}
    d["fallback_range"] = list(d["fallback_range"])
    if "proposal_sd" in d and isinstance(d["proposal_sd"], tuple):
        d["proposal_sd"] = list(d["proposal_sd"])
    return d


def _write_run_artifacts(out_dir, kernel, params, sampler, config, output, data_source):
    os.makedirs(out_dir, exist_ok=True)
    m = output.samples.shape[1]
    header = [f"x{i + 1}" for i in range(m)]
    write_csv_atomic(os.path.join(out_dir, "samples.csv"), header, output.samples)
    write_csv_atomic(
        os.path.join(out_dir, "logk_trace.csv"), ["log_k"], output.log_k_trace[:, None]
    )
    report = ess_report(output.samples, output.wall_time_seconds)
    # plot-data series: per-dimension ACF and running means of the draws
    n = output.samples.shape[0]
    lags = np.arange(report.acf.shape[1], dtype=float)
    write_csv_atomic(
        os.path.join(out_dir, "acf.csv"),
        ["lag"] + header,
        np.column_stack([lags, report.acf.T]),
    )
    running = np.cumsum(output.samples, axis=0) / np.arange(1, n + 1)[:, None]
    write_csv_atomic(
        os.path.join(out_dir, "running_mean.csv"),
        ["draw"] + header,
        np.column_stack([np.arange(1, n + 1, dtype=float), running]),
    )
    rep = report.to_dict()
    rep.update(output.to_summary())
    try:
        stat = logk_stationarity(output.log_k_trace, config.burn_in)
        rep["logk_split_ks_p"] = stat["p_value"]
    except ValueError:
        rep["logk_split_ks_p"] = None  # trace too short for the split test
    write_json_atomic(os.path.join(out_dir, "ess_report.json"), rep)
    manifest = RunManifest(
        kernel=kernel.name,
        kernel_params=params,
        sampler=sampler,
        config=_config_dict(config),
        seed=config.seed,
        engine=output.engine,
        output_dir=os.path.abspath(out_dir),
        timestamp=datetime.now(timezone.utc).isoformat(),
        version=__version__,
        data_source=data_source,
    )
    write_json_atomic(os.path.join(out_dir, "manifest.json"), manifest.to_dict())
    return report, manifest


def cmd_list_kernels(args):
    rows = list_kernels()
    if args.format == "json":
        print(json.dumps(rows, indent=2, sort_keys=True))
        return 0
    width = max(len(r["name"]) for r in rows)
    for r in rows:
        params = ", ".join(f"{k}={v}" for k, v in r["params"].items()) or "-"
        dim = r["dim"]
        extra = " (requires data)" if r["requires_data"] else ""
        print(f"{r['name']:<{width}}  dim={dim}  params: {params}{extra}")
    return 0


def _restore_from_manifest(path):
    with open(path, encoding="utf-8") as fh:
        man = RunManifest.from_dict(json.load(fh))
    data = None
    if man.data_source:
        if "csv" in man.data_source:
            data = load_regression_data(man.data_source["csv"])
        else:
            spec = man.data_source["synthetic"]
            data = synthetic_regression(
                spec["n_obs"], spec["n_pred"], spec["sparsity"], spec["noise_sd"], seed=spec["seed"]
            )
    kernel = make_kernel(man.kernel, man.kernel_params, data)
    cfg = dict(man.config)
    cfg["fallback_range"] = tuple(cfg["fallback_range"])
    if man.sampler == "rwmh":
        sd = cfg.get("proposal_sd", 1.0)
        cfg["proposal_sd"] = tuple(sd) if isinstance(sd, list) else sd
        config = RwmhConfig(**cfg)
    else:
        config = ChainConfig(**cfg)
    return kernel, man, config, data


def cmd_sample(args):
    if args.from_manifest:
        kernel, man, config, _ = _restore_from_manifest(args.from_manifest)
        sampler = man.sampler
        params = man.kernel_params
        data_source = man.data_source
    else:
        if not args.kernel:
            raise SystemExit2("sample needs --kernel (or --from-manifest)")
        kernel, params, data_source = _build_kernel(args)
        sampler = args.sampler
        config = _chain_config(args, sampler)
    output = _run_sampler(kernel, sampler, config)
    report, _ = _write_run_artifacts(
        args.output_dir, kernel, params, sampler, config, output, data_source
    )
    print(
        f"{sampler} on {kernel.name}: {output.samples.shape[0]} samples in "
        f"{output.wall_time_seconds:.3f}s (engine {output.engine}), "
        f"min ESS {report.min_ess:.1f}, ESS/s {report.ess_per_second:.1f}"
    )
    print(f"artifacts in {os.path.abspath(args.output_dir)}")
    return 0


def cmd_support(args):
    kernel, params, _ = _build_kernel(args)
    coord = args.coord
    if not 1 <= coord <= kernel.dim:
        raise SystemExit2(f"--coord must be in 1..{kernel.dim}")
    if kernel.dim == 1:
        target = kernel
    else:
        fixed = _parse_floats(args.fixed, "--fixed") if args.fixed else []
        if len(fixed) != kernel.dim - 1:
            raise SystemExit2(f"--fixed must supply {kernel.dim - 1} values")
        target = conditional_1d(kernel, coord - 1, fixed)
    frange = _parse_floats(args.fallback_range, "--fallback-range")
    est = effective_support_1d(
        target, args.epsilon, args.s0, (frange[0], frange[1])
    )
    print(
        json.dumps(
            {
                "lower": est.lower,
                "upper": est.upper,
                "norm_const": est.norm_const,
                "method": est.method,
                "epsilon": est.epsilon,
                "s0": est.s0,
            },
            indent=2,
            sort_keys=True,
        )
    )
    return 0


def _bench_cell(task):
    """One benchmark cell (kernel x sampler x replicate); worker-safe."""
    (name, params, data_source, sampler, config_dict, out_dir) = task
    data = None
    if data_source:
        if "csv" in data_source:
            data = load_regression_data(data_source["csv"])
        else:
            spec = data_source["synthetic"]
            data = synthetic_regression(
                spec["n_obs"], spec["n_pred"], spec["sparsity"], spec["noise_sd"], seed=spec["seed"]
            )
    kernel = make_kernel(name, params, data)
    cfg = dict(config_dict)
    cfg["fallback_range"] = tuple(cfg["fallback_range"])
    if sampler == "rwmh":
        config = RwmhConfig(**cfg)
    else:
        config = ChainConfig(**cfg)
    output = _run_sampler(kernel, sampler, config)
    report, _ = _write_run_artifacts(out_dir, kernel, params, sampler, config, output, data_source)
    return {
        "kernel": name,
        "sampler": sampler,
        "seed": config.seed,
        "n_samples": output.samples.shape[0],
        "wall_time_seconds": output.wall_time_seconds,
        "per_dim_ess": [float(v) for v in report.per_dim_ess],
        "min_ess": float(report.min_ess),
        "ess_per_second": float(report.ess_per_second),
        "engine": output.engine,
        "artifacts": os.path.abspath(out_dir),
    }


def _cell_seed(base_seed, index):
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1)[0])


def cmd_benchmark(args):
    kernels = [k.strip() for k in args.kernels.split(",") if k.strip()]
    samplers = [s.strip() for s in args.samplers.split(",") if s.strip()]
    if not kernels or not samplers:
        raise SystemExit2("empty benchmark suite (need --kernels and --samplers)")
    for k in kernels:
        if k not in KERNEL_NAMES:
            raise SystemExit2(f"unknown kernel {k!r}")
    for s in samplers:
        if s not in ("asg", "rwmh"):
            raise SystemExit2(f"unknown sampler {s!r}")
    if args.seconds is not None and args.seconds <= 0:
        raise SystemExit2("--seconds must be positive")
    if args.n_samples <= 0:
        raise SystemExit2("--n-samples must be positive")

    data_source = None
    if "lasso_bridge" in kernels:
        _, data_source = _load_data(args)
        if data_source is None:
            raise SystemExit2("lasso_bridge in suite needs --data-csv or --synthetic")

    os.makedirs(args.output_dir, exist_ok=True)
    if args.seconds is None:
        results = _benchmark_fixed_samples(args, kernels, samplers, data_source)
        mode = {"budget": "fixed_samples", "n_samples": args.n_samples}
    else:
        results = _benchmark_fixed_time(args, kernels, samplers, data_source)
        mode = {"budget": "fixed_time", "seconds": args.seconds}

    report = {
        "suite": {
            "kernels": kernels,
            "samplers": samplers,
            "replicates": args.replicates,
            "seed": args.seed,
            **mode,
        },
        "results": results,
        "version": __version__,
    }
    path = os.path.join(args.output_dir, "benchmark_report.json")
    write_json_atomic(path, report)
    print(f"benchmark report: {path}")
    _print_benchmark_table(results)
    return 0


def _benchmark_fixed_samples(args, kernels, samplers, data_source):
    tasks = []
    index = 0
    for name in kernels:
        for sampler in samplers:
            for rep in range(args.replicates):
                cfg = dict(
                    n_samples=args.n_samples,
                    burn_in=args.burn_in,
                    thin=args.thin,
                    epsilon=args.epsilon,
                    s0=args.s0,
                    seed=_cell_seed(args.seed, index),
                    scan="systematic",
                    max_rejections=args.max_rejections,
                    fallback_range=[-100.0, 100.0],
                    engine=args.engine,
                )
                if sampler == "rwmh":
                    sd = _parse_floats(args.proposal_sd, "--proposal-sd")
                    cfg["proposal_sd"] = sd[0] if len(sd) == 1 else tuple(sd)
                out_dir = os.path.join(args.output_dir, f"{name}_{sampler}_r{rep}")
                tasks.append((name, {}, data_source if name == "lasso_bridge" else None,
                              sampler, cfg, out_dir))
                index += 1

    jobs = args.jobs or _default_jobs()
    cells = []
    failures = 0
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_bench_cell, t) for t in tasks]
            for t, f in zip(tasks, futs):
                try:
                    cells.append(f.result())
                except Exception as exc:  # noqa: BLE001 - cell failure must not kill suite
                    failures += 1
                    cells.append({"kernel": t[0], "sampler": t[3], "failed": str(exc)})
    else:
        for t in tasks:
            try:
                cells.append(_bench_cell(t))
            except Exception as exc:  # noqa: BLE001
                failures += 1
                cells.append({"kernel": t[0], "sampler": t[3], "failed": str(exc)})

    # aggregate mean +/- sd per (kernel, sampler)
    summary = []
    for name in set(c["kernel"] for c in cells):
        for sampler in set(c["sampler"] for c in cells if c["kernel"] == name):
            ok = [c for c in cells
                  if c["kernel"] == name and c["sampler"] == sampler and "failed" not in c]
            if ok:
                ess = np.array([c["min_ess"] for c in ok])
                eps = np.array([c["ess_per_second"] for c in ok])
                wall = np.array([c["wall_time_seconds"] for c in ok])
                summary.append(
                    {
                        "kernel": name,
                        "sampler": sampler,
                        "replicates_ok": len(ok),
                        "min_ess_mean": float(ess.mean()),
                        "min_ess_sd": float(ess.std(ddof=1)) if len(ok) > 1 else 0.0,
                        "wall_mean": float(wall.mean()),
                        "ess_per_second_mean": float(eps.mean()),
                        "ess_per_second_median": float(np.median(eps)),
                    }
                )
            else:
                summary.append({"kernel": name, "sampler": sampler, "replicates_ok": 0})
    return {"cells": cells, "summary": sorted(summary, key=lambda r: (r["kernel"], r["sampler"])),
            "failures": failures}


def _benchmark_fixed_time(args, kernels, samplers, data_source):
    """Wall-clock budget: double N while the budget allows, recording the
    ESS/s against log10(N) series used for the timing plots. Only the series
    is stored; per-rung sample dumps would dwarf the sampling itself."""
    data = None
    if data_source:
        data, _ = _load_data(args)
    series = []
    for name in kernels:
        kernel = make_kernel(name, {}, data if name == "lasso_bridge" else None)
        for sampler in samplers:
            rows = []
            n = args.n_samples
            spent = 0.0
            last = 0.0
            idx = 0
            while spent + 2.0 * last <= args.seconds:
                common = dict(
                    n_samples=n, burn_in=args.burn_in, thin=args.thin,
                    epsilon=args.epsilon, s0=args.s0,
                    seed=_cell_seed(args.seed, idx), engine=args.engine,
                )
                try:
                    if sampler == "rwmh":
                        sd = _parse_floats(args.proposal_sd, "--proposal-sd")
                        cfg = RwmhConfig(
                            proposal_sd=sd[0] if len(sd) == 1 else tuple(sd), **common
                        )
                        out = run_rwmh(kernel, config=cfg)
                    else:
                        out = run_asg(kernel, config=ChainConfig(**common))
                except Exception as exc:  # noqa: BLE001
                    rows.append({"n_samples": n, "failed": str(exc)})
                    break
                report = ess_report(out.samples, out.wall_time_seconds)
                rows.append(
                    {
                        "n_samples": n,
                        "log10_n": float(np.log10(n)),
                        "wall_time_seconds": out.wall_time_seconds,
                        "min_ess": float(report.min_ess),
                        "ess_per_second": float(report.ess_per_second),
                    }
                )
                last = out.wall_time_seconds
                spent += last
                n *= 2
                idx += 1
            series.append({"kernel": name, "sampler": sampler, "rows": rows})
    return {"series": series}


def _print_benchmark_table(results):
    if "summary" not in results:
        for s in results["series"]:
            print(f"{s['kernel']}/{s['sampler']}: "
                  + ", ".join(f"N={r['n_samples']} ESS/s={r.get('ess_per_second', float('nan')):.1f}"
                              for r in s["rows"] if "failed" not in r))
        return
    for row in results["summary"]:
        if row.get("replicates_ok"):
            print(
                f"{row['kernel']:<18} {row['sampler']:<5} "
                f"minESS {row['min_ess_mean']:8.1f} +/- {row['min_ess_sd']:6.1f}  "
                f"wall {row['wall_mean']:7.3f}s  ESS/s median {row['ess_per_second_median']:10.1f}"
            )
        else:
            print(f"{row['kernel']:<18} {row['sampler']:<5} FAILED")


def cmd_lasso(args):
    data, data_source = _load_data(args)
    if data is None:
        raise SystemExit2("lasso needs --data-csv or --synthetic")
    if data.n_pred < 2:
        raise SystemExit2("need at least 2 predictors")
    if args.lam < 0:
        raise SystemExit2("--lam must be >= 0")
    if args.alpha <= 0:
        raise SystemExit2("--alpha must be > 0")
    kernel = make_kernel("lasso_bridge", {"lam": args.lam, "alpha": args.alpha}, data)
    n = 100_000 if args.full_size else args.n_samples
    config = ChainConfig(
        n_samples=n,
        burn_in=args.burn_in,
        thin=args.thin,
        epsilon=args.epsilon,
        s0=args.s0,
        seed=args.seed,
        engine=args.engine,
    )
    output = run_asg(kernel, config=config)
    params = {"lam": args.lam, "alpha": args.alpha}
    report, _ = _write_run_artifacts(
        args.output_dir, kernel, params, "asg", config, output, data_source
    )
    # joint mode proxy: the retained draw with the highest log-kernel value;
    # per-coordinate modes come from the marginal densities, which is what
    # stays comparable to a penalized point estimate in high dimension
    idx = config.burn_in + args.thin * np.arange(1, n + 1) - 1
    retained_logk = output.log_k_trace[idx]
    mode_row = int(np.argmax(retained_logk))
    lo, hi = np.quantile(output.samples, [0.025, 0.975], axis=0)
    summary = {
        "lam": args.lam,
        "alpha": args.alpha,
        "n_retained": n,
        "max_logk_draw": [float(v) for v in output.samples[mode_row]],
        "coefficients": [
            {
                "name": "beta0" if j == 0 else f"beta{j}",
                "posterior_mode": marginal_mode(output.samples[:, j]),
                "posterior_mean": float(output.samples[:, j].mean()),
                "ci_2.5": float(lo[j]),
                "ci_97.5": float(hi[j]),
            }
            for j in range(kernel.dim)
        ],
        "min_ess": float(report.min_ess),
        "avg_ess": float(report.per_dim_ess.mean()),
        "wall_time_seconds": output.wall_time_seconds,
        "engine": output.engine,
    }
    write_json_atomic(os.path.join(args.output_dir, "posterior_summary.json"), summary)
    print(
        f"lasso kernel (lam={args.lam}, alpha={args.alpha}): {n} draws in "
        f"{output.wall_time_seconds:.1f}s, avg ESS {summary['avg_ess']:.0f}"
    )
    print(f"artifacts in {os.path.abspath(args.output_dir)}")
    return 0


def cmd_engine_bench(args):
    """Compare the compiled and numpy paths on one kernel (plus the ACF
    hot loop), after a warm-up run so compilation is not billed."""
    from .accel import NUMBA_ENABLED
    from .diagnostics import _acf_compiled, _acf_numpy

    kernel = make_kernel(args.kernel, _parse_params(args.param))
    rows = []
    engines = ["numpy"] + (["numba"] if NUMBA_ENABLED else [])
    for sampler, runner in (("asg", run_asg), ("rwmh", run_rwmh)):
        for eng in engines:
            cfg_cls = RwmhConfig if sampler == "rwmh" else ChainConfig
            cfg = cfg_cls(n_samples=args.n_samples, burn_in=args.burn_in,
                          seed=args.seed, engine=eng)
            runner(kernel, config=cfg_cls(n_samples=8, burn_in=2, seed=args.seed, engine=eng))
            best = np.inf
            ess = None
            for _ in range(args.replicates):
                out = runner(kernel, config=cfg)
                if out.wall_time_seconds < best:
                    best = out.wall_time_seconds
                    ess = ess_report(out.samples, out.wall_time_seconds)
            updates = cfg.total_iterations * kernel.dim
            rows.append(
                {
                    "sampler": sampler,
                    "engine": eng,
                    "wall_time_seconds": best,
                    "us_per_coordinate_update": 1e6 * best / updates,
                    "min_ess": float(ess.min_ess),
                    "ess_per_second": float(ess.min_ess / best),
                }
            )
    x = np.ascontiguousarray(np.sin(np.arange(200_000) * 0.01))
    t0 = time.perf_counter()
    _acf_numpy(x, 1000)
    t_np = time.perf_counter() - t0
    acf_rows = {"numpy_seconds": t_np}
    if _acf_compiled is not None:
        _acf_compiled(x, 10)  # compile
        t0 = time.perf_counter()
        _acf_compiled(x, 1000)
        acf_rows["numba_seconds"] = time.perf_counter() - t0

    report = {"kernel": args.kernel, "n_samples": args.n_samples, "runs": rows,
              "acf_hot_loop": acf_rows}
    print(f"{'sampler':<6} {'engine':<6} {'wall s':>9} {'us/update':>10} {'ESS/s':>12}")
    for r in rows:
        print(
            f"{r['sampler']:<6} {r['engine']:<6} {r['wall_time_seconds']:>9.4f} "
            f"{r['us_per_coordinate_update']:>10.2f} {r['ess_per_second']:>12.1f}"
        )
    print(f"acf hot loop (T=200k, 1000 lags): {acf_rows}")
    if args.output:
        write_json_atomic(args.output, report)
        print(f"report: {args.output}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="slicegibbs",
        description="Sliced Gibbs sampler benchmark harness "
        "(automatic effective-support bracketing, RW-MH baseline, ESS diagnostics)",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-kernels", help="registered kernels with defaults")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_list_kernels)

    p = sub.add_parser("sample", help="run one sampler and store artifacts")
    _add_kernel_args(p)
    _add_chain_args(p)
    p.add_argument("--sampler", choices=("asg", "rwmh"), default="asg")
    p.add_argument("--output-dir", default="run_output")
    p.add_argument("--from-manifest", help="replay a stored manifest.json bit-identically")
    # --kernel is irrelevant when replaying; relax the requirement
    for act in p._actions:
        if act.dest == "kernel":
            act.required = False
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("support", help="effective support of a 1-D conditional")
    _add_kernel_args(p)
    p.add_argument("--coord", type=int, default=1, help="coordinate index, 1-based (column x<j>)")
    p.add_argument("--fixed", help="comma-separated values of the other coordinates")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--s0", type=float, default=1.0)
    p.add_argument("--fallback-range", default="-100,100")
    p.set_defaults(func=cmd_support)

    p = sub.add_parser("benchmark", help="kernels x samplers suite")
    p.add_argument("--kernels", required=True, help="comma-separated kernel names")
    p.add_argument("--samplers", default="asg,rwmh")
    p.add_argument("-n", "--n-samples", type=int, default=1000)
    p.add_argument("--seconds", type=float, default=None,
                   help="fixed wall-clock budget instead of fixed samples")
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--burn-in", type=int, default=250)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--s0", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rejections", type=int, default=10_000)
    p.add_argument("--proposal-sd", default="1.0")
    p.add_argument("--engine", choices=("auto", "numba", "numpy"), default="auto")
    p.add_argument("--jobs", type=int, default=None,
                   help=f"worker processes (default: physical cores or ${JOBS_ENV_VAR})")
    p.add_argument("--output-dir", default="benchmark_output")
    p.add_argument("--data-csv")
    p.add_argument("--synthetic", metavar="N,P,SPARSITY,NOISE_SD")
    p.add_argument("--data-seed", type=int, default=42)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("lasso", help="posterior sampling for the regression-loss kernel")
    p.add_argument("--data-csv")
    p.add_argument("--synthetic", metavar="N,P,SPARSITY,NOISE_SD", default="100,20,5,1.0")
    p.add_argument("--data-seed", type=int, default=42)
    p.add_argument("--lam", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("-n", "--n-samples", type=int, default=20_000,
                   help="retained draws (desk-scale default; see --full-size)")
    p.add_argument("--full-size", action="store_true", help="run 100,000 retained draws")
    p.add_argument("--burn-in", type=int, default=2500)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--s0", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=("auto", "numba", "numpy"), default="auto")
    p.add_argument("--output-dir", default="lasso_output")
    p.set_defaults(func=cmd_lasso)

    p = sub.add_parser("engine-bench", help="compare compiled vs numpy execution paths")
    p.add_argument("--kernel", default="rosenbrock", choices=KERNEL_NAMES)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("-n", "--n-samples", type=int, default=500)
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--replicates", type=int, default=3)
    p.add_argument("--output", help="write the comparison as JSON")
    p.set_defaults(func=cmd_engine_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit2:
        raise
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
