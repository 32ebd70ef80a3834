"""Acceptance gate: twelve verification criteria, one test and one printed
pass/fail line each (run with ``pytest tests/test_acceptance.py -v -s``).

Criteria with Monte Carlo content run at their stated replication counts and
tolerances; combinatorial criteria are exact. The compiled kernel backend is
expected for the stated runtime budgets.
"""

import itertools
import math
import re
import time
import warnings
from fractions import Fraction

import numpy as np
import pytest

from mband import (
    BandSpec,
    Curve,
    DepthConfig,
    ExplicitTuples,
    FunctionalSample,
    Linear,
    Phase,
    TimeGrid,
    Translate,
    apply_transform,
    depth_all,
    empirical_band_depth,
    empirical_time_share_depth,
    exact_membership_oracle,
    m_band_contains,
    point_in_convex_hull,
    write_sample,
)
from mband.cli import main as cli_main


@pytest.fixture(autouse=True)
def _quiet_degenerate():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


def _report(num, name, ok, t0, detail=""):
    status = "PASS" if ok else "FAIL"
    extra = f" | {detail}" if detail else ""
    print(f"CRITERION {num:2d} [{name}]: {status} ({time.perf_counter() - t0:.1f}s){extra}")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def _run_cli(argv, capsys):
    code = cli_main(argv)
    out = capsys.readouterr().out
    print(out, end="")
    return code, out


def _estimate_from(out):
    return float(re.search(r"estimate=([-0-9.eE+]+)", out).group(1))


def test_criterion_01_wendel_reproduction(capsys):
    t0 = time.perf_counter()
    code, out = _run_cli(
        ["verify", "--suite", "wendel", "--replications", "100000", "--seed", "1"],
        capsys,
    )
    est = _estimate_from(out)
    elapsed = time.perf_counter() - t0
    ok = code == 0 and abs(est - 0.875) <= 0.01 and elapsed <= 60.0
    _report(1, "wendel", ok, t0, f"estimate={est:.5f} target=0.875")


def test_criterion_02_center_timeshare_value(capsys):
    t0 = time.perf_counter()
    code, out = _run_cli(
        ["verify", "--suite", "center", "--replications", "20000", "--seed", "2"],
        capsys,
    )
    est = _estimate_from(out)
    elapsed = time.perf_counter() - t0
    ok = code == 0 and abs(est - 0.5) <= 0.03 and elapsed <= 120.0
    _report(2, "center", ok, t0, f"estimate={est:.5f} target=0.5")


def test_criterion_03_zero_depth_regime(capsys):
    t0 = time.perf_counter()
    code, out = _run_cli(
        ["verify", "--suite", "zerodepth", "--replications", "10000", "--seed", "3"],
        capsys,
    )
    est = _estimate_from(out)
    elapsed = time.perf_counter() - t0
    ok = code == 0 and est <= 0.01 and elapsed <= 60.0
    _report(3, "zerodepth", ok, t0, f"estimate={est:.6f}")


def _random_fraction(rng):
    return Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 11)))


def _margin_certified_verdict(q, gens, delta):
    """Oracle verdict, or None when an axis nudge of size delta flips it
    (the instance is not 'bounded away from the boundary')."""
    base = exact_membership_oracle(q, gens)
    for axis in range(len(q)):
        for sgn in (1, -1):
            shifted = list(q)
            shifted[axis] = shifted[axis] + sgn * delta
            if exact_membership_oracle(shifted, gens) != base:
                return None
    return base


def test_criterion_04_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(404)
    delta = Fraction(1, 10**6)
    accepted = agreed = inside_count = 0
    attempts = 0
    while accepted < 1000 and attempts < 2000:
        attempts += 1
        n_dim = int(rng.integers(1, 5))
        j = int(rng.integers(1, 9))
        gens = [[_random_fraction(rng) for _ in range(n_dim)] for _ in range(j)]
        if rng.random() < 0.5:
            w = [Fraction(int(rng.integers(1, 10))) for _ in range(j)]
            tot = sum(w)
            q = [sum(w[i] * gens[i][r] for i in range(j)) / tot for r in range(n_dim)]
        else:
            q = [_random_fraction(rng) for _ in range(n_dim)]
        exact = _margin_certified_verdict(q, gens, delta)
        if exact is None:
            continue
        accepted += 1
        inside_count += int(exact)
        approx = point_in_convex_hull(
            [float(v) for v in q], [[float(v) for v in g] for g in gens], tol=1e-9
        ).inside
        agreed += int(approx == exact)
    elapsed = time.perf_counter() - t0
    ok = accepted == 1000 and agreed == accepted and elapsed <= 30.0
    _report(4, "oracle-equivalence", ok, t0,
            f"{agreed}/{accepted} agree ({inside_count} inside)")


def test_criterion_05_tuple_reduction_soundness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(505)
    mismatches = 0
    for _ in range(200):
        k = int(rng.integers(2, 6))
        m = int(rng.integers(1, 4))
        d = int(rng.integers(1, 3))
        j = int(rng.integers(2, 7))
        gens = [Curve(f"g{i}", rng.normal(0, 1, (k, d))) for i in range(j)]
        pick = rng.random()
        if pick < 0.4:
            w = rng.dirichlet(np.ones(j))
            cand = Curve("c", sum(wi * g.values for wi, g in zip(w, gens)))
        elif pick < 0.6:
            w = rng.dirichlet(np.ones(j))
            base = sum(wi * g.values for wi, g in zip(w, gens))
            base = base.copy()
            base[rng.integers(k), rng.integers(d)] += rng.normal(0, 0.5)
            cand = Curve("c", base)
        else:
            cand = Curve("c", rng.normal(0, 1, (k, d)))
        fast = m_band_contains(cand, gens, BandSpec(m)).inside
        brute_spec = BandSpec(m, ExplicitTuples(tuple(itertools.product(range(k), repeat=m))))
        brute = m_band_contains(cand, gens, brute_spec).inside
        mismatches += int(fast != brute)
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed <= 60.0
    _report(5, "tuple-reduction", ok, t0, f"{200 - mismatches}/200 verdicts agree")


def test_criterion_06_structural_examples():
    t0 = time.perf_counter()
    problems = []

    # constants: the 2-band holds exactly the constants in the generators' hull
    k = 4
    gens = [Curve(f"g{i}", np.full(k, level)) for i, level in enumerate((0.0, 0.4, 1.0))]
    if not m_band_contains(Curve("c", np.full(k, 0.5)), gens, BandSpec(2)).inside:
        problems.append("constant inside hull rejected")
    if m_band_contains(Curve("c", np.full(k, 1.5)), gens, BandSpec(2)).inside:
        problems.append("constant outside hull accepted")
    slope = np.full(k, 0.5) + 0.05 * np.arange(k)
    if m_band_contains(Curve("c", slope), gens, BandSpec(2)).inside:
        problems.append("non-constant accepted by constants' 2-band")

    # affine generators: 3-band rejects a midpoint bent at an interior point
    t = np.array([0.0, 1.0, 2.0])
    affine = [Curve("g1", t), Curve("g2", 2.0 - t), Curve("g3", 0.0 * t)]
    bent = Curve("kink", np.array([1.0, 1.5, 1.0]))
    if m_band_contains(bent, affine, BandSpec(3)).inside:
        problems.append("bent midpoint accepted by affine 3-band")
    if exact_membership_oracle([1, Fraction(3, 2), 1], [[0, 1, 2], [2, 1, 0], [0, 0, 0]]):
        problems.append("exact oracle disagrees on the affine example")
    if not m_band_contains(Curve("mid", np.full(3, 1.0)), affine, BandSpec(3)).inside:
        problems.append("true midpoint rejected by affine 3-band")

    # monotone generators: every 2-band member must be nondecreasing
    rng = np.random.default_rng(606)
    for _ in range(40):
        kk = int(rng.integers(3, 7))
        mono = [
            Curve(f"m{i}", np.cumsum(rng.uniform(0, 1, kk)) + rng.normal(0, 1))
            for i in range(4)
        ]
        w = rng.dirichlet(np.ones(4))
        combo_vals = sum(wi * g.values for wi, g in zip(w, mono))
        if not m_band_contains(Curve("c", combo_vals), mono, BandSpec(2)).inside:
            problems.append("constant-weight combo rejected by monotone 2-band")
        dipped = combo_vals.copy()
        pos = int(rng.integers(1, kk))
        dipped[pos, 0] = dipped[pos - 1, 0] - rng.uniform(0.1, 0.5)
        if m_band_contains(Curve("c", dipped), mono, BandSpec(2)).inside:
            problems.append("decreasing curve accepted by monotone 2-band")

    # k-band membership equals plain convex-hull membership of whole curves
    for _ in range(40):
        kk = int(rng.integers(2, 5))
        d = int(rng.integers(1, 3))
        gens_q = [[_random_fraction(rng) for _ in range(kk * d)] for _ in range(5)]
        cand_q = [_random_fraction(rng) for _ in range(kk * d)]
        if rng.random() < 0.5:
            w = [Fraction(int(rng.integers(1, 9))) for _ in range(5)]
            tot = sum(w)
            cand_q = [
                sum(w[i] * gens_q[i][r] for i in range(5)) / tot for r in range(kk * d)
            ]
        verdict = _margin_certified_verdict(cand_q, gens_q, Fraction(1, 10**6))
        if verdict is None:
            continue
        gens = [
            Curve(f"g{i}", np.asarray([float(v) for v in g]).reshape(kk, d))
            for i, g in enumerate(gens_q)
        ]
        cand = Curve("c", np.asarray([float(v) for v in cand_q]).reshape(kk, d))
        if m_band_contains(cand, gens, BandSpec(kk)).inside != verdict:
            problems.append("k-band disagrees with whole-curve hull")
        if m_band_contains(cand, gens, BandSpec(kk + 4)).inside != verdict:
            problems.append("m > k not capped to the k-band verdict")

    _report(6, "structural-examples", not problems, t0, "; ".join(problems[:3]))


def test_criterion_07_invariance_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(707)
    failures = 0
    for _ in range(50):
        n = int(rng.integers(6, 9))
        k = int(rng.integers(3, 5))
        d = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        grid = TimeGrid.regular(k)
        sample = FunctionalSample(
            grid, tuple(Curve(f"c{i:02d}", rng.normal(0, 1, (k, d))) for i in range(n))
        )
        cfg = DepthConfig(m=m, j=3, mode="band")
        base = [e.depth for e in depth_all(sample, cfg).entries]
        mats = np.stack(
            [np.linalg.qr(rng.normal(0, 1, (d, d)))[0] * rng.uniform(0.5, 2.0) for _ in range(k)]
        )
        transforms = [
            Translate(Curve("g", rng.normal(0, 100, (k, d)))),
            Linear(mats),
            Phase(tuple(rng.permutation(k).tolist())),
        ]
        for tr in transforms:
            moved = apply_transform(sample, tr)
            if [e.depth for e in depth_all(moved, cfg).entries] != base:
                failures += 1
        composed = sample
        for tr in transforms:
            composed = apply_transform(composed, tr)
        if [e.depth for e in depth_all(composed, cfg).entries] != base:
            failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed <= 120.0
    _report(7, "invariance", ok, t0, f"{failures} transform mismatches")


def test_criterion_08_monotonicity_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    grid = TimeGrid.regular(5)
    sample = FunctionalSample(
        grid, tuple(Curve(f"c{i:02d}", rng.normal(0, 1, (5, 1))) for i in range(12))
    )
    bad_m = bad_j = 0
    candidates = list(sample.curves) + [
        Curve("x1", rng.normal(0, 0.4, (5, 1))),
        Curve("x2", rng.normal(0, 1.5, (5, 1))),
    ]
    for cand in candidates:
        by_m = [empirical_band_depth(cand, sample, DepthConfig(m=m, j=4)) for m in (1, 2, 3)]
        if not (by_m[0] >= by_m[1] >= by_m[2]):
            bad_m += 1
        by_j = [empirical_band_depth(cand, sample, DepthConfig(m=2, j=j)) for j in (3, 4, 5)]
        if not (by_j[0] <= by_j[1] <= by_j[2]):
            bad_j += 1
    bad_dom = 0
    for _ in range(200):
        n = int(rng.integers(3, 8))
        k = int(rng.integers(2, 5))
        d = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        j = int(rng.integers(2, n + 1))
        s = FunctionalSample(
            TimeGrid.regular(k),
            tuple(Curve(f"c{i:02d}", rng.normal(0, 1, (k, d))) for i in range(n)),
        )
        f = Curve("f", rng.normal(0, 1, (k, d)))
        bd = empirical_band_depth(f, s, DepthConfig(m=m, j=j))
        td = empirical_time_share_depth(f, s, DepthConfig(m=m, j=j, mode="timeshare"))
        if td < bd:
            bad_dom += 1
    elapsed = time.perf_counter() - t0
    ok = bad_m == 0 and bad_j == 0 and bad_dom == 0 and elapsed <= 120.0
    _report(8, "monotonicity", ok, t0,
            f"m-violations={bad_m} j-violations={bad_j} domination-violations={bad_dom}")


def _direct_modified_band_depth(f_vals, values, j):
    n, k = values.shape
    total = Fraction(0)
    for subset in itertools.combinations(range(n), j):
        sel = values[list(subset)]
        lo, hi = sel.min(axis=0), sel.max(axis=0)
        total += Fraction(int(((f_vals >= lo) & (f_vals <= hi)).sum()), k)
    return float(total / math.comb(n, j))


def test_criterion_09_modified_band_depth_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    mismatches = 0
    for _ in range(100):
        n = int(rng.integers(4, 9))
        k = int(rng.integers(2, 8))
        j = int(rng.integers(2, min(5, n) + 1))
        sample = FunctionalSample(
            TimeGrid.regular(k),
            tuple(Curve(f"c{i:02d}", rng.normal(0, 1, (k, 1))) for i in range(n)),
        )
        f = Curve("f", rng.normal(0, 1, (k, 1)))
        direct = _direct_modified_band_depth(f.values[:, 0], sample.values[:, :, 0], j)
        engine = empirical_time_share_depth(
            f, sample, DepthConfig(m=1, j=j, mode="timeshare")
        )
        mismatches += int(engine != direct)
    ok = mismatches == 0
    _report(9, "modified-band-depth", ok, t0, f"{100 - mismatches}/100 exact matches")


def shape_outlier_sample():
    """Seventeen curves on nine points: sixteen gently sloped lines at levels
    well away from zero, plus one curve oscillating between two deep interior
    levels (pointwise central, shape-anomalous)."""
    t = np.arange(1.0, 10.0)
    slope = 0.05
    curves = []
    levels = [0.6 + 0.2 * i for i in range(8)]
    for i, level in enumerate(levels):
        curves.append(Curve(f"lo{i + 1}", -level + slope * t))
        curves.append(Curve(f"hi{i + 1}", level + slope * t))
    zig = np.where(np.arange(1, 10) % 2 == 1, -0.25, 0.25) + slope * t
    curves.append(Curve("zig", zig))
    grid = TimeGrid(tuple(str(int(x)) for x in t), tuple(t))
    return FunctionalSample(grid, tuple(curves))


def test_criterion_10_shape_outlier_scenario():
    t0 = time.perf_counter()
    sample = shape_outlier_sample()
    ranks = {}
    for m in (1, 2):
        report = depth_all(sample, DepthConfig(m=m, j=4))
        ranks[m] = {e.id: e.rank for e in report.entries}
    bd1_rank = ranks[1]["zig"]
    bd2_rank = ranks[2]["zig"]
    ok = bd1_rank <= 3 and bd2_rank > len(sample.curves) // 2
    _report(10, "shape-outlier", ok, t0,
            f"zig bd1 rank={bd1_rank} (top 3), bd2 rank={bd2_rank} of 17 (bottom half)")


def test_criterion_11_consistency_trend(capsys):
    t0 = time.perf_counter()
    code, out = _run_cli(
        ["verify", "--suite", "consistency", "--replications", "10000",
         "--seeds", "20", "--seed", "0"],
        capsys,
    )
    errors = [float(x) for x in re.findall(r"mean_sup_error=([0-9.]+)", out)]
    elapsed = time.perf_counter() - t0
    ok = code == 0 and len(errors) == 3 and errors[0] > errors[1] > errors[2]
    ok = ok and elapsed <= 600.0
    _report(11, "consistency", ok, t0, "errors: " + " > ".join(f"{e:.4f}" for e in errors))


def test_criterion_12_determinism_across_threads(tmp_path, capsys):
    t0 = time.perf_counter()
    wide = str(tmp_path / "outlier.csv")
    write_sample(shape_outlier_sample(), wide, "wide")
    runs = [
        ["depth", "--input", wide, "--m", "2", "--j", "4", "--output", "{out}"],
        ["depth", "--input", wide, "--m", "2", "--j", "4", "--subsets", "sample:800",
         "--seed", "11", "--output", "{out}"],
        ["depth", "--input", wide, "--m", "2", "--j", "4", "--mode", "timeshare",
         "--subsets", "sample:200", "--seed", "11", "--output", "{out}", "--format", "jsonl"],
        ["rank", "--input", wide, "--m", "1", "--j", "4", "--flag-fraction", "0.2",
         "--output", "{out}", "--format", "jsonl"],
    ]
    ok = True
    for idx, template in enumerate(runs):
        blobs = set()
        for threads in ("1", "2", "8"):
            out = str(tmp_path / f"run{idx}_t{threads}.out")
            argv = [a.replace("{out}", out) for a in template] + ["--threads", threads]
            code = cli_main(argv)
            capsys.readouterr()
            ok = ok and code == 0
            with open(out, "rb") as fh:
                blobs.add(fh.read())
        ok = ok and len(blobs) == 1
    # seeded verify reruns are reproducible line for line
    outs = set()
    for _ in range(2):
        code = cli_main(
            ["verify", "--suite", "wendel", "--replications", "2000", "--seed", "5"]
        )
        outs.add(capsys.readouterr().out)
        ok = ok and code == 0
    ok = ok and len(outs) == 1
    _report(12, "determinism", ok, t0)
