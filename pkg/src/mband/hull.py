"""Convex-hull membership tests with certificates.

Membership is with respect to the closed hull: boundary points are inside.
The floating solver delegates to the active kernel backend (phase-1 simplex,
see ``_kernels_py``); the exact oracle repeats the same algorithm in rational
arithmetic with Bland's rule and no tolerances, and exists to cross-check the
floating solver in tests.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _backend
from .errors import InputError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class MembershipCertificate:
    """Result of a hull-membership query.

    ``weights`` are convex coefficients reproducing the query point from the
    generators (present iff inside; not unique for degenerate generator
    sets). ``residual`` is the feasibility gap achieved, in raw coordinate
    units.
    """

    inside: bool
    weights: np.ndarray | None
    residual: float

    @property
    def verdict(self):
        return "inside" if self.inside else "outside"


def _as_point(p):
    arr = np.ascontiguousarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise InputError("query point must be a 1-D sequence of coordinates")
    if not np.isfinite(arr).all():
        raise InputError("query point has non-finite coordinates")
    return arr


def _as_generators(g, n_dim):
    arr = np.ascontiguousarray(g, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise InputError("generators must be a non-empty 2-D array (one point per row)")
    if arr.shape[1] != n_dim:
        raise InputError(
            f"dimension mismatch: point has {n_dim} coordinates, "
            f"generators have {arr.shape[1]}"
        )
    if not np.isfinite(arr).all():
        raise InputError("generator set has non-finite coordinates")
    return arr


def point_in_convex_hull(p, g, tol=DEFAULT_TOL):
    """Decide whether ``p`` lies in the closed convex hull of the rows of ``g``.

    The verdict threshold is relative: the point is inside when the phase-1
    feasibility gap is at most ``tol * (1 + max|coordinate|)``.
    """
    if tol <= 0.0:
        raise InputError("tol must be positive")
    q = _as_point(p)
    gens = _as_generators(g, q.shape[0])
    inside, residual, weights = _backend.active().hull_membership(q, gens, tol)
    return MembershipCertificate(
        inside=bool(inside),
        weights=weights if inside else None,
        residual=float(residual),
    )


def _to_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)  # exact binary rational
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, (np.integer,)):
        return Fraction(int(value))
    if isinstance(value, (np.floating,)):
        return Fraction(float(value))
    raise InputError(f"coordinate {value!r} is not exactly representable as a rational")


def exact_membership_oracle(p, g):
    """Exact hull membership for rational inputs.

    Same phase-1 formulation as the floating solver, solved in ``Fraction``
    arithmetic with Bland's rule (termination is guaranteed, speed is not).
    Returns True iff the point is in the closed hull. No tolerance involved.
    """
    q = [_to_fraction(v) for v in p]
    gens = [[_to_fraction(v) for v in row] for row in g]
    n_dim = len(q)
    if n_dim < 1 or not gens:
        raise InputError("empty point or generator set")
    for row in gens:
        if len(row) != n_dim:
            raise InputError(
                f"dimension mismatch: point has {n_dim} coordinates, "
                f"a generator has {len(row)}"
            )
    return _exact_phase1_optimum(q, gens) == 0


def _exact_phase1_optimum(q, gens):
    """Phase-1 optimum (total artificial mass) in exact arithmetic."""
    j = len(gens)
    rows = len(q) + 1
    ncols = j + rows
    zero = Fraction(0)

    tab = [[zero] * ncols for _ in range(rows)]
    rhs = [zero] * rows
    for r in range(rows - 1):
        if q[r] < 0:
            for i in range(j):
                tab[r][i] = -gens[i][r]
            rhs[r] = -q[r]
        else:
            for i in range(j):
                tab[r][i] = gens[i][r]
            rhs[r] = q[r]
    one = Fraction(1)
    for i in range(j):
        tab[rows - 1][i] = one
    rhs[rows - 1] = one
    for r in range(rows):
        tab[r][j + r] = one
    basis = list(range(j, j + rows))

    dcost = [zero] * ncols
    for c in range(j):
        dcost[c] = -sum(tab[r][c] for r in range(rows))

    while True:
        enter = -1
        for c in range(ncols):
            if dcost[c] < 0:
                enter = c
                break
        if enter < 0:
            break
        leave = -1
        best = zero
        for r in range(rows):
            a = tab[r][enter]
            if a > 0:
                ratio = rhs[r] / a
                if leave < 0 or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave = r
                    best = ratio
        if leave < 0:
            break
        rowl = tab[leave]
        piv = rowl[enter]
        for c in range(ncols):
            rowl[c] = rowl[c] / piv
        rhs[leave] = rhs[leave] / piv
        for r in range(rows):
            if r != leave and tab[r][enter] != 0:
                f = tab[r][enter]
                rowr = tab[r]
                for c in range(ncols):
                    rowr[c] = rowr[c] - f * rowl[c]
                rhs[r] = rhs[r] - f * rhs[leave]
        f = dcost[enter]
        if f != 0:
            for c in range(ncols):
                dcost[c] = dcost[c] - f * rowl[c]
        basis[leave] = enter

    return sum(rhs[r] for r in range(rows) if basis[r] >= j)
