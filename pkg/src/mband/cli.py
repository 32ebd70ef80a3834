"""Command-line front end.

Subcommands: depth, rank, simulate, verify, bench. All randomness flows from
the --seed flag (default 0); identical flags and seed give byte-identical
outputs regardless of --threads. Exit codes: 0 success, 2 configuration or
usage error, 3 data error, 4 verification failure.
"""

import argparse
import json
import math
import os
import sys
import time
import warnings

import numpy as np

from . import _backend
from .core import AllCombinations, Curve, ExplicitTuples, LagSet, TimeGrid
from .dataio import dump_report, load_sample, write_report, write_sample
from .depth import (
    DepthConfig,
    Exhaustive,
    Sampled,
    depth_all,
    monte_carlo_distinct_tuple_share,
    monte_carlo_population_depth,
    rank_and_flag,
)
from .errors import ConfigError, DataError, InputError, MbandError
from .reference import (
    Gaussian,
    IidGaussianPaths,
    TranslationScalar,
    TranslationVector,
    simulate,
    td_center_value,
    wendel_probability,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_VERIFY = 4


def _parse_reduction(text):
    if text == "all":
        return AllCombinations()
    if text.startswith("lag="):
        try:
            return LagSet(float(text[4:]))
        except ValueError as exc:
            raise ConfigError(f"--reduction: bad lag value in {text!r}") from exc
    if text.startswith("tuples="):
        path = text[7:]
        try:
            with open(path, encoding="utf-8") as fh:
                tuples = json.load(fh)
        except OSError as exc:
            raise DataError(f"--reduction: cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"--reduction: {path} is not valid JSON: {exc}") from exc
        if not isinstance(tuples, list) or not all(isinstance(t, list) for t in tuples):
            raise ConfigError("--reduction: tuples file must hold a JSON list of index lists")
        return ExplicitTuples(tuple(tuple(t) for t in tuples))
    raise ConfigError(f"--reduction: expected all, lag=H or tuples=FILE, got {text!r}")


def _parse_subsets(text, seed):
    if text == "exact":
        return Exhaustive()
    if text.startswith("sample:"):
        try:
            count = int(text[7:])
        except ValueError as exc:
            raise ConfigError(f"--subsets: bad sample count in {text!r}") from exc
        return Sampled(count=count, seed=seed)
    raise ConfigError(f"--subsets: expected exact or sample:N, got {text!r}")


def _add_depth_flags(sub):
    sub.add_argument("--input", required=True, help="sample CSV file")
    sub.add_argument("--schema", choices=["wide", "long"], default="wide")
    sub.add_argument("--m", type=int, default=1, help="band order")
    sub.add_argument("--j", type=int, default=4, help="subset size")
    sub.add_argument("--mode", choices=["band", "timeshare"], default="band")
    sub.add_argument("--reduction", default="all", help="all | lag=H | tuples=FILE")
    sub.add_argument("--subsets", default="exact", help="exact | sample:N")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tol", type=float, default=1e-9)
    sub.add_argument("--output", default="-", help="report path, - for stdout")
    sub.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    sub.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sub.add_argument("--exclude-self", action="store_true")
    sub.add_argument("--max-exhaustive", type=int, default=10**6)


def _depth_config(args):
    return DepthConfig(
        m=args.m,
        j=args.j,
        mode=args.mode,
        enumeration=_parse_subsets(args.subsets, args.seed),
        reduction=_parse_reduction(args.reduction),
        tol=args.tol,
        exclude_self=args.exclude_self,
        exhaustive_cap=args.max_exhaustive,
    )


def _emit_report(report, args):
    if args.output == "-":
        dump_report(report, sys.stdout, args.format)
    else:
        write_report(report, args.output, args.format)


def _cmd_depth(args):
    sample = load_sample(args.input, args.schema)
    cfg = _depth_config(args)
    report = depth_all(sample, cfg, threads=args.threads)
    _emit_report(report, args)
    return EXIT_OK


def _cmd_rank(args):
    sample = load_sample(args.input, args.schema)
    cfg = _depth_config(args)
    report = depth_all(sample, cfg, threads=args.threads)
    flagged = rank_and_flag(report, args.flag_fraction)
    report = type(report)(
        config=report.config,
        entries=report.entries,
        subset_count=report.subset_count,
        flagged=tuple(flagged),
    )
    _emit_report(report, args)
    return EXIT_OK


def _load_base_curve(spec_text, k):
    if spec_text.startswith("const:"):
        try:
            level = float(spec_text[6:])
        except ValueError as exc:
            raise ConfigError(f"--a: bad constant in {spec_text!r}") from exc
        return Curve("a", np.full((k, 1), level)), TimeGrid.regular(k)
    sample = load_sample(spec_text, "wide")
    return sample.curves[0], sample.grid


def _cmd_simulate(args):
    if args.n < 1 or args.k < 1:
        raise ConfigError("--n and --k must be positive")
    if args.sigma < 0:
        raise ConfigError("--sigma must be nonnegative")
    if args.model == "translation":
        a, grid = _load_base_curve(args.a, args.k)
        model = TranslationScalar(a, Gaussian(args.sigma), seed=args.seed)
    elif args.model == "gauss-paths":
        grid = TimeGrid.regular(args.k)
        model = IidGaussianPaths(args.sigma, args.k, seed=args.seed)
    else:
        raise ConfigError(f"unknown model {args.model!r}")
    sample = simulate(model, args.n, grid)
    write_sample(sample, args.output, args.schema)
    return EXIT_OK


def _verify_line(suite, estimate, target, se):
    diff = abs(estimate - target)
    ok = diff <= 4.0 * se
    print(
        f"{suite}: estimate={estimate:.6f} target={target:.6f} "
        f"se={se:.6f} |diff|={diff:.6f} -> {'PASS' if ok else 'FAIL'}"
    )
    return ok


def _cmd_verify(args):
    if args.replications < 100:
        raise ConfigError("--replications must be at least 100")
    seed = args.seed
    if args.suite == "wendel":
        a = Curve("a", np.zeros((args.k, args.d)))
        if args.d == 1:
            model = TranslationScalar(a, Gaussian(args.sigma), seed=seed)
        else:
            model = TranslationVector(a, args.sigma, seed=seed)
        cfg = DepthConfig(m=1, j=args.j, mode="band")
        estimate, se = monte_carlo_population_depth(a, model, cfg, args.replications)
        target = wendel_probability(args.d, args.j)
        return EXIT_OK if _verify_line("wendel", estimate, target, se) else EXIT_VERIFY
    if args.suite == "center":
        f = Curve("center", np.zeros((args.k, args.d)))
        model = IidGaussianPaths(args.sigma, args.k, d=args.d, seed=seed)
        estimate, se = monte_carlo_distinct_tuple_share(
            f, model, args.m, args.j, args.replications
        )
        target = td_center_value(args.d, args.m, args.j)
        return EXIT_OK if _verify_line("center", estimate, target, se) else EXIT_VERIFY
    if args.suite == "zerodepth":
        f = Curve("origin", np.zeros((args.k, args.d)))
        model = IidGaussianPaths(args.sigma, args.k, d=args.d, seed=seed)
        cfg = DepthConfig(m=args.m, j=args.j, mode="band")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            estimate, se = monte_carlo_population_depth(f, model, cfg, args.replications)
        return EXIT_OK if _verify_line("zerodepth", estimate, 0.0, se) else EXIT_VERIFY
    if args.suite == "consistency":
        return _verify_consistency(args)
    raise ConfigError(f"unknown suite {args.suite!r}")


def _verify_consistency(args):
    """Mean (over seeds) sup-error of empirical vs population band depth must
    decrease along the sample-size ladder."""
    k = args.k
    grid = TimeGrid.regular(k)
    base = np.sin(np.linspace(0.0, np.pi, k))[:, None]
    a = Curve("a", base)
    offsets = np.linspace(-2.0, 2.0, 10)
    candidates = [Curve(f"f{i}", base + c) for i, c in enumerate(offsets)]
    cfg_pop = DepthConfig(m=1, j=args.j, mode="band")
    population = {}
    for cand in candidates:
        model = TranslationScalar(a, Gaussian(args.sigma), seed=args.seed + 7919)
        est, _ = monte_carlo_population_depth(cand, model, cfg_pop, 100_000)
        population[cand.id] = est
    ladder = [20, 80, 320]
    n_seeds = args.seeds
    mean_sup = []
    for n in ladder:
        total = 0.0
        for s in range(n_seeds):
            model = TranslationScalar(a, Gaussian(args.sigma), seed=args.seed + 1000 * s + n)
            sample = simulate(model, n, grid)
            cfg = DepthConfig(
                m=1, j=args.j, mode="band",
                enumeration=Sampled(count=args.replications, seed=args.seed + s),
            )
            from .depth import empirical_band_depth

            sup = 0.0
            for cand in candidates:
                emp = empirical_band_depth(cand, sample, cfg)
                sup = max(sup, abs(emp - population[cand.id]))
            total += sup
        mean_sup.append(total / n_seeds)
        print(f"consistency: n={n} mean_sup_error={mean_sup[-1]:.6f}")
    decreasing = all(b < a for a, b in zip(mean_sup, mean_sup[1:]))
    print(f"consistency: {'PASS' if decreasing else 'FAIL'} (errors must decrease)")
    return EXIT_OK if decreasing else EXIT_VERIFY


def _cmd_bench(args):
    model = IidGaussianPaths(1.0, args.k, seed=args.seed)
    sample = simulate(model, args.n)
    if args.sample_count:
        enumeration = Sampled(count=args.sample_count, seed=args.seed)
        subsets = args.sample_count
    else:
        enumeration = Exhaustive()
        subsets = math.comb(sample.n, args.j)
    cfg = DepthConfig(m=args.m, j=args.j, mode=args.mode, enumeration=enumeration)
    original = _backend.active_name()
    timings = {}
    try:
        for name in _backend.available_backends():
            _backend.use_backend(name)
            for _ in range(args.repeat):
                start = time.perf_counter()
                depth_all(sample, cfg, threads=args.threads)
                elapsed = time.perf_counter() - start
                timings[name] = min(elapsed, timings.get(name, elapsed))
                rate = sample.n * subsets / elapsed
                print(
                    f"bench[{name}]: n={args.n} k={args.k} m={args.m} j={args.j} "
                    f"subsets={subsets} wall={elapsed:.3f}s rate={rate:,.0f} subsets/s"
                )
    finally:
        _backend.use_backend(original)
    if "compiled" in timings and "python" in timings and timings["compiled"] > 0:
        print(f"bench: compiled is {timings['python'] / timings['compiled']:.1f}x faster")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mband",
        description="m-band and time-share depths for functional samples",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_depth = sub.add_parser("depth", help="compute depths for every curve")
    _add_depth_flags(p_depth)
    p_depth.set_defaults(func=_cmd_depth)

    p_rank = sub.add_parser("rank", help="depths plus low-depth flagging")
    _add_depth_flags(p_rank)
    p_rank.add_argument("--flag-fraction", type=float, default=0.1)
    p_rank.set_defaults(func=_cmd_rank)

    p_sim = sub.add_parser("simulate", help="draw a synthetic sample")
    p_sim.add_argument("--model", choices=["translation", "gauss-paths"], required=True)
    p_sim.add_argument("--a", default="const:0", help="base curve: const:C or wide CSV")
    p_sim.add_argument("--sigma", type=float, default=1.0)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--k", type=int, default=10)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--output", required=True)
    p_sim.add_argument("--schema", choices=["wide", "long"], default="wide")
    p_sim.set_defaults(func=_cmd_simulate)

    p_ver = sub.add_parser("verify", help="Monte Carlo checks against closed forms")
    p_ver.add_argument(
        "--suite",
        choices=["wendel", "center", "zerodepth", "consistency"],
        required=True,
    )
    p_ver.add_argument("--replications", type=int, default=10_000)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--d", type=int, default=1)
    p_ver.add_argument("--m", type=int, default=None)
    p_ver.add_argument("--j", type=int, default=None)
    p_ver.add_argument("--k", type=int, default=None)
    p_ver.add_argument("--sigma", type=float, default=1.0)
    p_ver.add_argument("--seeds", type=int, default=20, help="consistency suite seeds")
    p_ver.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser("bench", help="time the depth engine per backend")
    p_bench.add_argument("--n", type=int, default=20)
    p_bench.add_argument("--k", type=int, default=10)
    p_bench.add_argument("--m", type=int, default=2)
    p_bench.add_argument("--j", type=int, default=4)
    p_bench.add_argument("--repeat", type=int, default=1)
    p_bench.add_argument("--mode", choices=["band", "timeshare"], default="band")
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--sample-count", type=int, default=0,
                         help="use sampled enumeration with this many draws")
    p_bench.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p_bench.set_defaults(func=_cmd_bench)

    return parser


_SUITE_DEFAULTS = {
    "wendel": {"m": 1, "j": 4, "k": 10},
    "center": {"m": 2, "j": 4, "k": 5},
    "zerodepth": {"m": 2, "j": 2, "k": 5},
    "consistency": {"m": 1, "j": 4, "k": 10},
}


def _suite_defaults(args):
    for key, value in _SUITE_DEFAULTS.get(args.suite, {}).items():
        if getattr(args, key) is None:
            setattr(args, key, value)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        _suite_defaults(args)
    try:
        return args.func(args)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except MbandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
