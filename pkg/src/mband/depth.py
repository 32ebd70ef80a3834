"""Empirical band depth and time-share depth over a functional sample.

Depths are U-statistics: averages of a hull-membership kernel over j-curve
subsets, enumerated exhaustively or sampled with a seed. Hit counts and
time-share masses are accumulated as exact integers, so results are
independent of chunking and thread count, and the final depth is the
correctly rounded double of an exact rational.
"""

import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _backend
from .bands import _combination_tables, concat_vectors, enumerate_check_tuples
from .core import AllCombinations, BandSpec, ExplicitTuples, LagSet
from .errors import ConfigError, InputError
from .reference import surjection_count

DEFAULT_EXHAUSTIVE_CAP = 10**6
_CHUNK = 4096


@dataclass(frozen=True)
class Exhaustive:
    """Enumerate every j-subset (lexicographic)."""


@dataclass(frozen=True)
class Sampled:
    """Draw ``count`` j-subsets uniformly (independent draws, repeats across
    draws allowed), seeded."""

    count: int
    seed: int = 0

    def __post_init__(self):
        if int(self.count) < 1:
            raise ConfigError("sample count must be positive")


@dataclass(frozen=True)
class DepthConfig:
    m: int
    j: int
    mode: str = "band"
    enumeration: object = field(default_factory=Exhaustive)
    reduction: object = field(default_factory=AllCombinations)
    tol: float = 1e-9
    exclude_self: bool = False
    exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP

    def __post_init__(self):
        if int(self.m) < 1 or int(self.j) < 1:
            raise ConfigError("m and j must be positive")
        if self.mode not in ("band", "timeshare"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not (float(self.tol) > 0.0):
            raise ConfigError("tol must be positive")
        if int(self.exhaustive_cap) < 1:
            raise ConfigError("exhaustive cap must be positive")

    def to_dict(self):
        if isinstance(self.enumeration, Exhaustive):
            enum = {"kind": "exhaustive"}
        else:
            enum = {"kind": "sampled", "count": self.enumeration.count,
                    "seed": self.enumeration.seed}
        if isinstance(self.reduction, AllCombinations):
            red = {"kind": "all"}
        elif isinstance(self.reduction, LagSet):
            red = {"kind": "lag", "h": self.reduction.h}
        elif isinstance(self.reduction, ExplicitTuples):
            red = {"kind": "tuples", "tuples": [list(t) for t in self.reduction.tuples]}
        else:
            red = {"kind": repr(self.reduction)}
        return {
            "m": self.m,
            "j": self.j,
            "mode": self.mode,
            "enumeration": enum,
            "reduction": red,
            "tol": self.tol,
            "exclude_self": self.exclude_self,
        }


@dataclass(frozen=True)
class DepthEntry:
    id: str
    depth: float
    rank: int


@dataclass(frozen=True)
class DepthReport:
    config: dict
    entries: tuple
    subset_count: int
    flagged: tuple | None = None


def subset_enumerator(n, j, enumeration):
    """Stream of j-index subsets (sorted tuples) of range(n)."""
    n, j = int(n), int(j)
    if j < 1 or j > n:
        raise InputError(f"need 1 <= j <= n, got j={j}, n={n}")
    if isinstance(enumeration, Exhaustive):
        yield from itertools.combinations(range(n), j)
    elif isinstance(enumeration, Sampled):
        rng = np.random.default_rng(enumeration.seed)
        for _ in range(enumeration.count):
            idx = np.sort(rng.choice(n, size=j, replace=False))
            yield tuple(int(i) for i in idx)
    else:
        raise ConfigError(f"unknown enumeration {enumeration!r}")


def _subset_count(n, j, enumeration, cap):
    if isinstance(enumeration, Sampled):
        return enumeration.count
    total = math.comb(n, j)
    if total > cap:
        raise ConfigError(
            f"C({n},{j}) = {total} exceeds the exhaustive cap {cap}; "
            "use sampled enumeration"
        )
    return total


def _subset_chunks(n, j, enumeration):
    """Yield (S, j) int64 arrays covering the enumeration, in fixed chunks.

    Chunk boundaries are independent of thread count; sampled draws are fully
    generated from the seed before any dispatch.
    """
    if isinstance(enumeration, Exhaustive):
        it = itertools.combinations(range(n), j)
        while True:
            block = list(itertools.islice(it, _CHUNK))
            if not block:
                return
            yield np.asarray(block, dtype=np.int64)
    else:
        rng = np.random.default_rng(enumeration.seed)
        draws = np.empty((enumeration.count, j), dtype=np.int64)
        for i in range(enumeration.count):
            draws[i] = np.sort(rng.choice(n, size=j, replace=False))
        for start in range(0, enumeration.count, _CHUNK):
            yield draws[start:start + _CHUNK]


def _map_chunks(worker, chunks, threads):
    chunks = list(chunks)
    if threads and threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, chunks))
    return [worker(c) for c in chunks]


def _warn_if_degenerate(cfg, d):
    if cfg.j <= d * cfg.m:
        warnings.warn(
            f"j={cfg.j} <= d*m={d * cfg.m}: band depth of absolutely "
            "continuous distributions vanishes in this regime",
            RuntimeWarning,
            stacklevel=3,
        )


def _uses_envelope(cfg, k, d):
    return (
        d == 1
        and isinstance(cfg.reduction, AllCombinations)
        and min(cfg.m, k) == 1
    )


class _BandEvaluator:
    """Per-candidate band hit counting against a fixed sample."""

    def __init__(self, sample, cfg):
        self.sample = sample
        self.cfg = cfg
        self.kernel = _backend.active()
        self.envelope = _uses_envelope(cfg, sample.k, sample.d)
        if self.envelope:
            self.flat_values = np.ascontiguousarray(sample.values[:, :, 0])
            self.tuples_arr = None
        else:
            tuples = enumerate_check_tuples(sample.grid, BandSpec(cfg.m, cfg.reduction))
            self.tuples_arr = np.asarray(tuples, dtype=np.int64)
            self.curve_vecs = concat_vectors(sample.values, self.tuples_arr)

    def hits(self, cand_values, self_idx, chunks, threads):
        tol = self.cfg.tol
        if self.envelope:
            f_vals = np.ascontiguousarray(cand_values[:, 0])
            worker = lambda chunk: self.kernel.envelope_hits(
                f_vals, self.flat_values, chunk, self_idx, tol)
        else:
            cand_vecs = concat_vectors(cand_values, self.tuples_arr)
            worker = lambda chunk: self.kernel.band_hits(
                cand_vecs, self.curve_vecs, chunk, self_idx, tol)
        return sum(_map_chunks(worker, chunks, threads))


class _TimeShareEvaluator:
    """Per-candidate time-share mass accumulation against a fixed sample.

    Works on the combination lattice: combinations implied by a passing
    superset are not re-solved (downward closure).
    """

    def __init__(self, sample, cfg):
        if not isinstance(cfg.reduction, AllCombinations):
            raise ConfigError(
                "time-share depth is defined for the all-combinations "
                "reduction only"
            )
        self.sample = sample
        self.cfg = cfg
        self.kernel = _backend.active()
        k, m = sample.k, cfg.m
        self.size_max = min(m, k)
        self.combos, self.subs = _combination_tables(k, self.size_max)
        self.combo_arrs = {
            a: np.asarray(self.combos[a], dtype=np.int64) for a in self.combos
        }
        self.curve_vecs = {
            a: concat_vectors(sample.values, self.combo_arrs[a]) for a in self.combos
        }
        self.surj = {a: surjection_count(m, a) for a in range(1, self.size_max + 1)}
        self.full_mass = k**m

    def _subset_numerator(self, cand_vecs, subset):
        tol = self.cfg.tol
        numer = 0
        passing = {}
        for a in range(self.size_max, 0, -1):
            n_combos = len(self.combos[a])
            implied = [False] * n_combos
            if a + 1 in passing:
                upper = passing[a + 1]
                rows = self.subs[a + 1]
                for ci, ok in enumerate(upper):
                    if ok:
                        for si in rows[ci]:
                            implied[si] = True
            level = []
            gens_a = self.curve_vecs[a]
            cand_a = cand_vecs[a]
            for ci in range(n_combos):
                if implied[ci]:
                    ok = True
                else:
                    gens = np.ascontiguousarray(gens_a[subset, ci, :])
                    ok = bool(self.kernel.hull_inside(cand_a[ci], gens, tol))
                level.append(ok)
                if ok:
                    numer += self.surj[a]
            passing[a] = level
        return numer

    def numerator(self, cand_values, self_idx, chunks, threads):
        cand_vecs = {
            a: concat_vectors(cand_values, self.combo_arrs[a]) for a in self.combos
        }

        def worker(chunk):
            total = 0
            for subset in chunk:
                if self_idx >= 0 and self_idx in subset:
                    total += self.full_mass
                else:
                    total += self._subset_numerator(cand_vecs, subset)
            return total

        return sum(_map_chunks(worker, chunks, threads))


def _make_evaluator(sample, cfg):
    if cfg.mode == "band":
        return _BandEvaluator(sample, cfg)
    return _TimeShareEvaluator(sample, cfg)


def _chunks_for(cache, n_pool, j, enumeration):
    if cache is None:
        return list(_subset_chunks(n_pool, j, enumeration))
    if n_pool not in cache:
        cache[n_pool] = list(_subset_chunks(n_pool, j, enumeration))
    return cache[n_pool]


def _candidate_fraction(evaluator, sample, cfg, cand_values, self_idx, threads,
                        chunk_cache=None):
    """Exact depth of one candidate as a Fraction."""
    n = sample.n
    if cfg.exclude_self and self_idx >= 0:
        if cfg.j > n - 1:
            raise InputError(
                f"j={cfg.j} with exclude_self needs at least {cfg.j + 1} curves"
            )
        pool = np.asarray([i for i in range(n) if i != self_idx], dtype=np.int64)
        total = _subset_count(n - 1, cfg.j, cfg.enumeration, cfg.exhaustive_cap)
        chunks = [pool[c] for c in _chunks_for(chunk_cache, n - 1, cfg.j, cfg.enumeration)]
        self_idx = -1
    else:
        total = _subset_count(n, cfg.j, cfg.enumeration, cfg.exhaustive_cap)
        chunks = _chunks_for(chunk_cache, n, cfg.j, cfg.enumeration)
    if cfg.mode == "band":
        hits = evaluator.hits(cand_values, self_idx, chunks, threads)
        return Fraction(hits, total)
    numer = evaluator.numerator(cand_values, self_idx, chunks, threads)
    return Fraction(numer, total * evaluator.full_mass)


def _check_candidate(f, sample):
    if f.k != sample.k or f.d != sample.d:
        raise InputError(
            f"candidate is {f.k} x {f.d}, sample is {sample.k} x {sample.d}"
        )


def _check_j(cfg, sample):
    if cfg.j > sample.n:
        raise InputError(f"j={cfg.j} exceeds the sample size n={sample.n}")


def empirical_band_depth(f, sample, cfg, threads=1):
    """Proportion of j-subsets whose m-band contains ``f``."""
    if cfg.mode != "band":
        raise ConfigError("config mode must be 'band'")
    _check_candidate(f, sample)
    _check_j(cfg, sample)
    _warn_if_degenerate(cfg, sample.d)
    evaluator = _BandEvaluator(sample, cfg)
    self_idx = _sample_index(f, sample)
    return float(_candidate_fraction(evaluator, sample, cfg, f.values, self_idx, threads))


def empirical_time_share_depth(f, sample, cfg, threads=1):
    """Average time-share measure of ``f`` over j-subsets."""
    if cfg.mode != "timeshare":
        raise ConfigError("config mode must be 'timeshare'")
    _check_candidate(f, sample)
    _check_j(cfg, sample)
    _warn_if_degenerate(cfg, sample.d)
    evaluator = _TimeShareEvaluator(sample, cfg)
    self_idx = _sample_index(f, sample)
    return float(_candidate_fraction(evaluator, sample, cfg, f.values, self_idx, threads))


def _sample_index(f, sample):
    """Index of the candidate in the sample (by id and identical values)."""
    for i, c in enumerate(sample.curves):
        if c.id == f.id and np.array_equal(c.values, f.values):
            return i
    return -1


def depth_all(sample, cfg, threads=1):
    """Depth of every sample curve with respect to the sample.

    Subsets containing the candidate count as containing it (bands absorb
    their generators) unless ``cfg.exclude_self`` is set. Ranks order curves
    deepest first, ties broken by curve id.
    """
    _check_j(cfg, sample)
    _warn_if_degenerate(cfg, sample.d)
    evaluator = _make_evaluator(sample, cfg)
    chunk_cache = {}
    fractions = [
        _candidate_fraction(evaluator, sample, cfg, c.values, i, threads, chunk_cache)
        for i, c in enumerate(sample.curves)
    ]
    depths = [float(fr) for fr in fractions]
    ids = sample.ids
    order = sorted(range(sample.n), key=lambda i: (-depths[i], ids[i]))
    ranks = [0] * sample.n
    for pos, i in enumerate(order):
        ranks[i] = pos + 1
    entries = tuple(
        DepthEntry(ids[i], depths[i], ranks[i]) for i in range(sample.n)
    )
    if cfg.exclude_self:
        total = _subset_count(sample.n - 1, cfg.j, cfg.enumeration, cfg.exhaustive_cap)
    else:
        total = _subset_count(sample.n, cfg.j, cfg.enumeration, cfg.exhaustive_cap)
    return DepthReport(config=cfg.to_dict(), entries=entries, subset_count=total)


def rank_and_flag(report, fraction):
    """Ids of the ceil(fraction * n) lowest-depth curves, ties by id order."""
    if not report.entries:
        raise InputError("report has no entries")
    if not (0.0 < fraction <= 1.0):
        raise InputError("fraction must be in (0, 1]")
    n = len(report.entries)
    count = min(n, math.ceil(fraction * n))
    by_depth = sorted(report.entries, key=lambda e: (e.depth, e.id))
    return [e.id for e in by_depth[:count]]


def band_depth_sum_over_j(f, sample, m, j_values, threads=1, **cfg_kwargs):
    """Sum of band depths over a range of subset sizes (the summed variant of
    the classical band depth); a convenience wrapper over per-j runs."""
    total = 0.0
    for j in j_values:
        cfg = DepthConfig(m=m, j=j, mode="band", **cfg_kwargs)
        total += empirical_band_depth(f, sample, cfg, threads=threads)
    return total


# --- Monte Carlo population depths ---------------------------------------------


def monte_carlo_population_depth(f, model, cfg, replications):
    """Monte Carlo estimate of the population depth of ``f`` under ``model``.

    Draws ``replications`` independent j-tuples of curves. Band mode returns
    the containment fraction with its binomial standard error; time-share
    mode returns the mean measure with the sample standard error.
    """
    if replications < 1:
        raise InputError("replications must be positive")
    _warn_if_degenerate(cfg, f.d)
    rng = np.random.default_rng(getattr(model, "seed", 0))
    k, d = f.k, f.d
    kernel = _backend.active()
    subset = np.arange(cfg.j, dtype=np.int64)

    if cfg.mode == "band":
        envelope = _uses_envelope(cfg, k, d)
        if envelope:
            f_vals = np.ascontiguousarray(f.values[:, 0])
            one = subset[None, :]
        else:
            tuples = enumerate_check_tuples(k, BandSpec(cfg.m, cfg.reduction))
            tuples_arr = np.asarray(tuples, dtype=np.int64)
            cand_vecs = concat_vectors(f.values, tuples_arr)
        hits = 0
        for _ in range(replications):
            draw = model.draw_values(rng, cfg.j)
            if envelope:
                flat = np.ascontiguousarray(draw[:, :, 0])
                hits += kernel.envelope_hits(f_vals, flat, one, -1, cfg.tol)
            else:
                gens = concat_vectors(draw, tuples_arr)
                if kernel.band_first_violation(cand_vecs, gens, subset, cfg.tol) < 0:
                    hits += 1
        estimate = float(Fraction(hits, replications))
        se = math.sqrt(estimate * (1.0 - estimate) / replications)
        return estimate, se

    if not isinstance(cfg.reduction, AllCombinations):
        raise ConfigError("time-share depth is defined for the all-combinations reduction only")
    size_max = min(cfg.m, k)
    combos, subs = _combination_tables(k, size_max)
    combo_arrs = {a: np.asarray(combos[a], dtype=np.int64) for a in combos}
    cand_vecs = {a: concat_vectors(f.values, combo_arrs[a]) for a in combos}
    surj = {a: surjection_count(cfg.m, a) for a in range(1, size_max + 1)}
    full_mass = k**cfg.m
    numerators = []
    for _ in range(replications):
        draw = model.draw_values(rng, cfg.j)
        curve_vecs = {a: concat_vectors(draw, combo_arrs[a]) for a in combos}
        numer = 0
        passing = {}
        for a in range(size_max, 0, -1):
            n_combos = len(combos[a])
            implied = [False] * n_combos
            if a + 1 in passing:
                rows = subs[a + 1]
                for ci, ok in enumerate(passing[a + 1]):
                    if ok:
                        for si in rows[ci]:
                            implied[si] = True
            level = []
            for ci in range(n_combos):
                if implied[ci]:
                    ok = True
                else:
                    gens = np.ascontiguousarray(curve_vecs[a][:, ci, :])
                    ok = bool(kernel.hull_inside(cand_vecs[a][ci], gens, cfg.tol))
                level.append(ok)
                if ok:
                    numer += surj[a]
            passing[a] = level
        numerators.append(numer)
    total = sum(numerators)
    estimate = float(Fraction(total, replications * full_mass))
    measures = np.asarray(numerators, dtype=np.float64) / full_mass
    se = float(measures.std(ddof=1) / math.sqrt(replications)) if replications > 1 else 0.0
    return estimate, se


def monte_carlo_distinct_tuple_share(f, model, m, j, replications, tol=1e-9):
    """Mean fraction of distinct m-point combinations whose hull test passes.

    This conditions the time-share measure on all-distinct tuples: repeated
    indices concatenate to vectors supported on a lower-dimensional subspace,
    where the d*m-dimensional hull-probability value does not apply. At an
    angular-symmetry center the expectation is exactly the closed-form
    center value.
    """
    if replications < 1:
        raise InputError("replications must be positive")
    k = f.k
    if m > k:
        raise InputError(f"m={m} exceeds the grid size k={k}")
    rng = np.random.default_rng(getattr(model, "seed", 0))
    kernel = _backend.active()
    combo_arr = np.asarray(list(itertools.combinations(range(k), m)), dtype=np.int64)
    n_combos = combo_arr.shape[0]
    cand_vecs = concat_vectors(f.values, combo_arr)
    counts = []
    for _ in range(replications):
        draw = model.draw_values(rng, j)
        curve_vecs = concat_vectors(draw, combo_arr)
        passed = 0
        for ci in range(n_combos):
            gens = np.ascontiguousarray(curve_vecs[:, ci, :])
            if kernel.hull_inside(cand_vecs[ci], gens, tol):
                passed += 1
        counts.append(passed)
    total = sum(counts)
    estimate = float(Fraction(total, replications * n_combos))
    shares = np.asarray(counts, dtype=np.float64) / n_combos
    se = float(shares.std(ddof=1) / math.sqrt(replications)) if replications > 1 else 0.0
    return estimate, se
