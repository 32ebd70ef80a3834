"""Domain types: time grids, curves, samples, band specs and transforms."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigError, InputError


@dataclass(frozen=True)
class TimeGrid:
    """Ordered finite set of time points.

    ``coords`` are optional numeric time coordinates (required for lag-based
    reduction); when present they must be strictly increasing.
    """

    labels: tuple
    coords: tuple | None = None

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 1:
            raise InputError("a time grid needs at least one point")
        if len(set(labels)) != len(labels):
            raise InputError("time grid labels must be distinct")
        if self.coords is not None:
            coords = tuple(float(c) for c in self.coords)
            object.__setattr__(self, "coords", coords)
            if len(coords) != len(labels):
                raise InputError("coords and labels must have equal length")
            if not all(np.isfinite(coords)):
                raise InputError("time coordinates must be finite")
            if any(b <= a for a, b in zip(coords, coords[1:])):
                raise InputError("time coordinates must be strictly increasing")

    @property
    def k(self):
        return len(self.labels)

    @classmethod
    def regular(cls, k, start=1.0, step=1.0):
        """Grid with labels 't1'..'tk' at equally spaced coordinates."""
        coords = tuple(start + i * step for i in range(k))
        return cls(tuple(f"t{i + 1}" for i in range(k)), coords)


@dataclass(frozen=True)
class Curve:
    """One function observed on a grid: a k x d matrix of values."""

    id: str
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"curve {self.id!r}: values must be a k x d matrix")
        if not np.isfinite(arr).all():
            raise InputError(f"curve {self.id!r} has non-finite values")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def k(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class FunctionalSample:
    """n curves observed on a common grid; the empirical distribution."""

    grid: TimeGrid
    curves: tuple

    def __post_init__(self):
        curves = tuple(self.curves)
        object.__setattr__(self, "curves", curves)
        if not curves:
            raise InputError("a sample needs at least one curve")
        k = self.grid.k
        d = curves[0].d
        for c in curves:
            if c.k != k:
                raise InputError(f"curve {c.id!r} has {c.k} rows, grid has {k}")
            if c.d != d:
                raise InputError(f"curve {c.id!r} has dimension {c.d}, expected {d}")
        ids = [c.id for c in curves]
        if len(set(ids)) != len(ids):
            raise InputError("curve ids must be distinct")

    @property
    def n(self):
        return len(self.curves)

    @property
    def k(self):
        return self.grid.k

    @property
    def d(self):
        return self.curves[0].d

    @property
    def ids(self):
        return tuple(c.id for c in self.curves)

    @cached_property
    def values(self):
        """Stacked (n, k, d) value array."""
        arr = np.stack([c.values for c in self.curves])
        arr.setflags(write=False)
        return arr


# --- band specification -----------------------------------------------------


@dataclass(frozen=True)
class AllCombinations:
    """Check every combination of min(m, k) distinct grid points."""


@dataclass(frozen=True)
class LagSet:
    """Check pairs of grid points separated by the time lag ``h`` (m=2)."""

    h: float

    def __post_init__(self):
        if not (float(self.h) > 0.0):
            raise ConfigError("lag h must be positive")


@dataclass(frozen=True)
class ExplicitTuples:
    """Check exactly the given tuples of grid indices."""

    tuples: tuple

    def __post_init__(self):
        tuples = tuple(tuple(int(i) for i in t) for t in self.tuples)
        object.__setattr__(self, "tuples", tuples)
        if not tuples:
            raise ConfigError("explicit tuple list is empty")


@dataclass(frozen=True)
class BandSpec:
    """Band order m plus the rule selecting which m-tuples are checked."""

    m: int
    reduction: object = field(default_factory=AllCombinations)

    def __post_init__(self):
        if int(self.m) < 1:
            raise ConfigError("band order m must be >= 1")
        object.__setattr__(self, "m", int(self.m))
        if isinstance(self.reduction, LagSet) and self.m != 2:
            raise ConfigError("lag reduction requires m = 2")
        if isinstance(self.reduction, ExplicitTuples):
            for t in self.reduction.tuples:
                if len(t) != self.m:
                    raise ConfigError(
                        f"explicit tuple {t} has length {len(t)}, expected m={self.m}"
                    )


# --- transforms ---------------------------------------------------------------


@dataclass(frozen=True)
class Translate:
    """Add a fixed curve pointwise (Minkowski shift)."""

    shift: Curve


@dataclass(frozen=True)
class Linear:
    """Apply a nonsingular d x d matrix at each grid point.

    ``matrices`` is (d, d) for one shared matrix or (k, d, d) per point.
    """

    matrices: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.matrices, dtype=np.float64)
        if arr.ndim not in (2, 3) or arr.shape[-1] != arr.shape[-2]:
            raise InputError("linear transform needs square d x d matrices")
        if not np.isfinite(arr).all():
            raise InputError("linear transform has non-finite entries")
        dets = np.linalg.det(arr)
        if np.any(dets == 0.0) or not np.all(np.isfinite(dets)):
            raise InputError("linear transform matrix is singular")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "matrices", arr)


@dataclass(frozen=True)
class Phase:
    """Permute grid points: new row i takes its values from row mapping[i]."""

    mapping: tuple

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        object.__setattr__(self, "mapping", mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise InputError("phase mapping must be a permutation of 0..k-1")


# --- results ------------------------------------------------------------------


@dataclass(frozen=True)
class BandMembership:
    """Band verdict with the first violating check tuple as witness."""

    inside: bool
    witness: tuple | None = None


@dataclass(frozen=True)
class TimeShareResult:
    """Membership lattice of the time-share set.

    ``members`` holds the distinct-grid-point index sets whose concatenation
    test passes (downward closed for the all-combinations reduction).
    ``measure`` is the normalised product-measure mass, ``None`` when a
    space reduction makes the aggregation undefined; the exact value is
    ``numerator / denominator``.
    """

    members: frozenset
    measure: float | None
    numerator: int | None = None
    denominator: int | None = None
