"""Band membership, space reduction and the time-share set.

A candidate curve lies in the m-band of a generator set when, for every
checked tuple of grid points, the concatenation of its values at the tuple
lies in the convex hull of the generators' concatenations. Only unordered
combinations of min(m, k) distinct points are checked: permuting or
duplicating tuple coordinates is an invertible linear map that commutes with
convex hulls, and membership at a superset of points projects down to every
subset, so the combination verdicts determine all k^m ordered tuples.
"""

import itertools
from fractions import Fraction

import numpy as np

from . import _backend
from .core import (
    AllCombinations,
    BandMembership,
    Curve,
    ExplicitTuples,
    FunctionalSample,
    LagSet,
    Linear,
    Phase,
    TimeShareResult,
    Translate,
)
from .errors import ConfigError, InputError
from .hull import DEFAULT_TOL
from .reference import surjection_count

_LAG_MATCH_RTOL = 1e-9


def concatenate(f, tuple_indices):
    """Concatenate the curve's rows at the given grid indices, in order."""
    vals = f.values
    k = vals.shape[0]
    idx = [int(i) for i in tuple_indices]
    for i in idx:
        if i < 0 or i >= k:
            raise InputError(f"grid index {i} out of range for k={k}")
    return vals[idx].reshape(-1)


def enumerate_check_tuples(grid, spec):
    """Index tuples to be checked for the given grid and band spec.

    The grid may be a ``TimeGrid`` or a plain point count; lag reduction
    needs numeric grid coordinates.
    """
    if isinstance(grid, int):
        k, coords = grid, None
    else:
        k, coords = grid.k, grid.coords
    red = spec.reduction
    if isinstance(red, AllCombinations):
        size = min(spec.m, k)
        return list(itertools.combinations(range(k), size))
    if isinstance(red, LagSet):
        if coords is None:
            raise ConfigError("lag reduction requires numeric grid coordinates")
        h = float(red.h)
        tol = _LAG_MATCH_RTOL * max(abs(h), 1.0)
        pairs = [
            (i, l)
            for i in range(k)
            for l in range(i + 1, k)
            if abs((coords[l] - coords[i]) - h) <= tol
        ]
        if not pairs:
            raise ConfigError(f"no grid point pairs at lag {h}")
        return pairs
    if isinstance(red, ExplicitTuples):
        for t in red.tuples:
            for i in t:
                if i < 0 or i >= k:
                    raise ConfigError(f"explicit tuple index {i} out of range for k={k}")
        return [tuple(t) for t in red.tuples]
    raise ConfigError(f"unknown reduction {red!r}")


def _common_shape(f, generators):
    if not generators:
        raise InputError("generator set is empty")
    k, d = f.k, f.d
    for g in generators:
        if g.k != k or g.d != d:
            raise InputError(
                f"curve {g.id!r} is on a different grid or dimension "
                f"({g.k} x {g.d} vs {k} x {d})"
            )
    return k, d


def concat_vectors(values, tuples_arr):
    """Concatenations of value rows at each tuple.

    ``values`` is (k, d) or (n, k, d); result is (T, len*d) or (n, T, len*d).
    """
    gathered = values[..., tuples_arr, :]
    shape = gathered.shape[:-2] + (gathered.shape[-2] * gathered.shape[-1],)
    return np.ascontiguousarray(gathered.reshape(shape))


def m_band_contains(f, generators, spec, tol=DEFAULT_TOL, grid=None):
    """m-band membership of ``f`` with respect to the generator curves.

    Returns a verdict with the first violating tuple (in enumeration order,
    lexicographic for the all-combinations reduction) as witness.
    """
    k, d = _common_shape(f, generators)
    tuples = enumerate_check_tuples(grid if grid is not None else k, spec)
    tuples_arr = np.asarray(tuples, dtype=np.int64)
    cand = concat_vectors(f.values, tuples_arr)
    gen_values = np.stack([g.values for g in generators])
    gens = concat_vectors(gen_values, tuples_arr)
    subset = np.arange(len(generators), dtype=np.int64)
    violation = _backend.active().band_first_violation(cand, gens, subset, tol)
    if violation < 0:
        return BandMembership(inside=True)
    return BandMembership(inside=False, witness=tuples[violation])


def band1_envelope_contains(f, generators, tol=DEFAULT_TOL):
    """Pointwise min/max envelope check; fast path for d=1, m=1."""
    k, d = _common_shape(f, generators)
    if d != 1:
        raise ConfigError("the envelope check applies to scalar curves only")
    fv = f.values[:, 0]
    gv = np.stack([g.values[:, 0] for g in generators])
    scale = 1.0 + max(float(np.abs(fv).max()), float(np.abs(gv).max()))
    pad = tol * scale
    lo = gv.min(axis=0)
    hi = gv.max(axis=0)
    return bool(((fv >= lo - pad) & (fv <= hi + pad)).all())


def _combination_tables(k, size_max):
    """Per-size combination lists plus, for each combination, the indices of
    its one-smaller sub-combinations (for downward-closure propagation)."""
    combos = {a: list(itertools.combinations(range(k), a)) for a in range(1, size_max + 1)}
    index = {a: {c: i for i, c in enumerate(combos[a])} for a in combos}
    subs = {}
    for a in range(2, size_max + 1):
        rows = []
        for combo in combos[a]:
            rows.append([index[a - 1][s] for s in itertools.combinations(combo, a - 1)])
        subs[a] = rows
    return combos, subs


def time_share_set(f, generators, spec, tol=DEFAULT_TOL, grid=None):
    """Time-share set of ``f``: which point combinations pass the band test.

    For the all-combinations reduction the result is downward closed (a
    passing combination certifies all its sub-combinations, which are then
    not re-tested) and carries the product-measure mass. For reduced specs
    only the raw list of passing tuples is reported and the measure is None.
    """
    k, d = _common_shape(f, generators)
    kernel = _backend.active()
    gen_values = np.stack([g.values for g in generators])
    subset = np.arange(len(generators), dtype=np.int64)

    if not isinstance(spec.reduction, AllCombinations):
        tuples = enumerate_check_tuples(grid if grid is not None else k, spec)
        members = set()
        for t in tuples:
            arr = np.asarray(t, dtype=np.int64)[None, :]
            cand = concat_vectors(f.values, arr)
            gens = concat_vectors(gen_values, arr)
            if kernel.band_first_violation(cand, gens, subset, tol) < 0:
                members.add(frozenset(t))
        return TimeShareResult(members=frozenset(members), measure=None)

    m = spec.m
    size_max = min(m, k)
    combos, subs = _combination_tables(k, size_max)
    members = set()
    passing = {}
    for a in range(size_max, 0, -1):
        clist = combos[a]
        implied = [False] * len(clist)
        if a + 1 <= size_max:
            for ci, ok in enumerate(passing[a + 1]):
                if ok:
                    for si in subs[a + 1][ci]:
                        implied[si] = True
        level = []
        for ci, combo in enumerate(clist):
            if implied[ci]:
                level.append(True)
            else:
                arr = np.asarray(combo, dtype=np.int64)[None, :]
                cand = concat_vectors(f.values, arr)
                gens = concat_vectors(gen_values, arr)
                level.append(kernel.band_first_violation(cand, gens, subset, tol) < 0)
            if level[-1]:
                members.add(frozenset(combo))
        passing[a] = level

    numerator = sum(surjection_count(m, len(a)) for a in members)
    denominator = k**m
    return TimeShareResult(
        members=frozenset(members),
        measure=float(Fraction(numerator, denominator)),
        numerator=numerator,
        denominator=denominator,
    )


def time_share_measure(members, k, m):
    """Product-measure mass of a downward-closed member collection.

    Each member set A accounts for the ordered m-tuples whose distinct-value
    set is exactly A; masses are exact integers over k^m.
    """
    numerator = sum(surjection_count(m, len(a)) for a in members)
    return float(Fraction(numerator, k**m))


def _transform_values(values, transform, k, d):
    if isinstance(transform, Translate):
        shift = transform.shift
        if shift.k != k or shift.d != d:
            raise InputError("translation curve has mismatched shape")
        return values + shift.values
    if isinstance(transform, Linear):
        mats = transform.matrices
        if mats.shape[-1] != d:
            raise InputError(f"linear transform is {mats.shape[-1]}-dimensional, data is {d}")
        if mats.ndim == 2:
            return values @ mats.T
        if mats.shape[0] != k:
            raise InputError("per-point linear transform needs one matrix per grid point")
        return np.einsum("tij,tj->ti", mats, values)
    if isinstance(transform, Phase):
        if len(transform.mapping) != k:
            raise InputError("phase permutation length must equal grid size")
        return values[list(transform.mapping), :]
    raise InputError(f"unknown transform {transform!r}")


def apply_transform(obj, transform):
    """Apply a curve transform to a single curve or a whole sample."""
    if isinstance(obj, Curve):
        return Curve(obj.id, _transform_values(obj.values, transform, obj.k, obj.d))
    if isinstance(obj, FunctionalSample):
        curves = tuple(apply_transform(c, transform) for c in obj.curves)
        return FunctionalSample(obj.grid, curves)
    raise InputError("apply_transform expects a Curve or FunctionalSample")
