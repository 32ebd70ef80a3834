# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled evaluation kernels.

Twin of ``mband._kernels_py``; see that module for the algorithm notes. The
simplex here performs the same floating-point operations in the same order as
the pure version (build uses -ffp-contract=off), so results are bit-identical.
"""

from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc

import numpy as np

COMPILED = True

cdef double _EPS = 1e-12


cdef void _phase1(const double* q, const double* G, int j, int n_dim,
                  double* tab, double* rhs, double* dcost, int* basis,
                  double* out_residual, double* out_scale,
                  double* weights) noexcept nogil:
    cdef int rows = n_dim + 1
    cdef int ncols = j + rows
    cdef int r, c, i, it, enter, leave
    cdef double v, av, amax, scale, br, s, a, ratio, best, inv, f, residual
    cdef double* rowl
    cdef double* rowr

    amax = 0.0
    for r in range(n_dim):
        v = q[r]
        av = -v if v < 0.0 else v
        if av > amax:
            amax = av
    for i in range(j):
        for r in range(n_dim):
            v = G[i * n_dim + r]
            av = -v if v < 0.0 else v
            if av > amax:
                amax = av
    scale = 1.0 + amax

    for r in range(rows):
        for c in range(ncols):
            tab[r * ncols + c] = 0.0
    for r in range(n_dim):
        br = q[r] / scale
        if br < 0.0:
            for i in range(j):
                tab[r * ncols + i] = -(G[i * n_dim + r] / scale)
            rhs[r] = -br
        else:
            for i in range(j):
                tab[r * ncols + i] = G[i * n_dim + r] / scale
            rhs[r] = br
    for i in range(j):
        tab[(rows - 1) * ncols + i] = 1.0
    rhs[rows - 1] = 1.0
    for r in range(rows):
        tab[r * ncols + j + r] = 1.0
        basis[r] = j + r

    for c in range(ncols):
        dcost[c] = 0.0
    for c in range(j):
        s = 0.0
        for r in range(rows):
            s += tab[r * ncols + c]
        dcost[c] = -s

    for it in range(100 * (ncols + rows)):
        enter = -1
        for c in range(ncols):
            if dcost[c] < -_EPS:
                enter = c
                break
        if enter < 0:
            break

        leave = -1
        best = 0.0
        for r in range(rows):
            a = tab[r * ncols + enter]
            if a > _EPS:
                ratio = rhs[r] / a
                if leave < 0 or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave = r
                    best = ratio
        if leave < 0:
            break

        rowl = tab + leave * ncols
        inv = 1.0 / rowl[enter]
        for c in range(ncols):
            rowl[c] = rowl[c] * inv
        rhs[leave] = rhs[leave] * inv
        for r in range(rows):
            if r != leave:
                f = tab[r * ncols + enter]
                if f != 0.0:
                    rowr = tab + r * ncols
                    for c in range(ncols):
                        rowr[c] = rowr[c] - f * rowl[c]
                    rhs[r] = rhs[r] - f * rhs[leave]
        f = dcost[enter]
        if f != 0.0:
            for c in range(ncols):
                dcost[c] = dcost[c] - f * rowl[c]
        basis[leave] = enter

    residual = 0.0
    for r in range(rows):
        if basis[r] >= j and rhs[r] > 0.0:
            residual += rhs[r]
    if weights != NULL:
        for i in range(j):
            weights[i] = 0.0
        for r in range(rows):
            if basis[r] < j:
                weights[basis[r]] = rhs[r]
    out_residual[0] = residual
    out_scale[0] = scale


cdef double* _alloc_workspace(int j, int n_dim, double** rhs, double** dcost,
                              int** basis) except NULL:
    cdef int rows = n_dim + 1
    cdef int ncols = j + rows
    cdef double* tab = <double*> malloc(
        (rows * ncols + rows + ncols) * sizeof(double))
    if tab == NULL:
        raise MemoryError()
    basis[0] = <int*> malloc(rows * sizeof(int))
    if basis[0] == NULL:
        free(tab)
        raise MemoryError()
    rhs[0] = tab + rows * ncols
    dcost[0] = rhs[0] + rows
    return tab


def hull_membership(const double[::1] q, const double[:, ::1] G, double tol):
    """Convex-hull membership of ``q`` in the rows of ``G``.

    Returns ``(inside, residual, weights)``; see the pure twin for details.
    """
    cdef int j = G.shape[0]
    cdef int n_dim = q.shape[0]
    cdef double residual = 0.0
    cdef double scale = 1.0
    cdef double* rhs
    cdef double* dcost
    cdef int* basis
    cdef double* tab = _alloc_workspace(j, n_dim, &rhs, &dcost, &basis)
    weights = np.empty(j, dtype=np.float64)
    cdef double[::1] wview = weights
    try:
        _phase1(&q[0], &G[0, 0], j, n_dim, tab, rhs, dcost, basis,
                &residual, &scale, &wview[0] if j > 0 else NULL)
    finally:
        free(tab)
        free(basis)
    return residual <= tol, residual * scale, weights


def hull_inside(const double[::1] q, const double[:, ::1] G, double tol):
    """Verdict-only variant of :func:`hull_membership`."""
    cdef int j = G.shape[0]
    cdef int n_dim = q.shape[0]
    cdef double residual = 0.0
    cdef double scale = 1.0
    cdef double* rhs
    cdef double* dcost
    cdef int* basis
    cdef double* tab = _alloc_workspace(j, n_dim, &rhs, &dcost, &basis)
    try:
        _phase1(&q[0], &G[0, 0], j, n_dim, tab, rhs, dcost, basis,
                &residual, &scale, NULL)
    finally:
        free(tab)
        free(basis)
    return residual <= tol


def band_first_violation(const double[:, ::1] cand_vecs, const double[:, :, ::1] curve_vecs,
                         const int64_t[::1] subset, double tol):
    """First check-tuple outside the generators' hull, or -1."""
    cdef int n_tuples = cand_vecs.shape[0]
    cdef int n_dim = cand_vecs.shape[1]
    cdef int j = subset.shape[0]
    cdef int t, i, r, out
    cdef double residual = 0.0
    cdef double scale = 1.0
    cdef double* rhs
    cdef double* dcost
    cdef int* basis
    cdef double* tab = _alloc_workspace(j, n_dim, &rhs, &dcost, &basis)
    cdef double* gbuf = <double*> malloc(j * n_dim * sizeof(double))
    if gbuf == NULL:
        free(tab)
        free(basis)
        raise MemoryError()
    out = -1
    try:
        with nogil:
            for t in range(n_tuples):
                for i in range(j):
                    for r in range(n_dim):
                        gbuf[i * n_dim + r] = curve_vecs[subset[i], t, r]
                _phase1(&cand_vecs[t, 0], gbuf, j, n_dim, tab, rhs, dcost,
                        basis, &residual, &scale, NULL)
                if residual > tol:
                    out = t
                    break
    finally:
        free(tab)
        free(basis)
        free(gbuf)
    return out


def band_hits(const double[:, ::1] cand_vecs, const double[:, :, ::1] curve_vecs,
              const int64_t[:, ::1] subsets, int64_t self_idx, double tol):
    """Count subsets whose band contains the candidate."""
    cdef int n_subsets = subsets.shape[0]
    cdef int j = subsets.shape[1]
    cdef int n_tuples = cand_vecs.shape[0]
    cdef int n_dim = cand_vecs.shape[1]
    cdef int s, t, i, r
    cdef int64_t hits = 0
    cdef bint is_self, ok
    cdef double residual = 0.0
    cdef double scale = 1.0
    cdef double* rhs
    cdef double* dcost
    cdef int* basis
    cdef double* tab = _alloc_workspace(j, n_dim, &rhs, &dcost, &basis)
    cdef double* gbuf = <double*> malloc(j * n_dim * sizeof(double))
    if gbuf == NULL:
        free(tab)
        free(basis)
        raise MemoryError()
    try:
        with nogil:
            for s in range(n_subsets):
                is_self = False
                if self_idx >= 0:
                    for i in range(j):
                        if subsets[s, i] == self_idx:
                            is_self = True
                            break
                if is_self:
                    hits += 1
                    continue
                ok = True
                for t in range(n_tuples):
                    for i in range(j):
                        for r in range(n_dim):
                            gbuf[i * n_dim + r] = curve_vecs[subsets[s, i], t, r]
                    _phase1(&cand_vecs[t, 0], gbuf, j, n_dim, tab, rhs, dcost,
                            basis, &residual, &scale, NULL)
                    if residual > tol:
                        ok = False
                        break
                if ok:
                    hits += 1
    finally:
        free(tab)
        free(basis)
        free(gbuf)
    return int(hits)


def envelope_hits(const double[::1] f_vals, const double[:, ::1] values,
                  const int64_t[:, ::1] subsets, int64_t self_idx, double tol):
    """Count subsets whose pointwise envelope contains ``f_vals`` (d=1, m=1)."""
    cdef int n_subsets = subsets.shape[0]
    cdef int j = subsets.shape[1]
    cdef int k = f_vals.shape[0]
    cdef int s, t, i
    cdef int64_t hits = 0
    cdef bint is_self, ok
    cdef double f_amax, sel_amax, v, av, lo, hi, pad

    f_amax = 0.0
    for t in range(k):
        v = f_vals[t]
        av = -v if v < 0.0 else v
        if av > f_amax:
            f_amax = av

    with nogil:
        for s in range(n_subsets):
            is_self = False
            if self_idx >= 0:
                for i in range(j):
                    if subsets[s, i] == self_idx:
                        is_self = True
                        break
            if is_self:
                hits += 1
                continue
            sel_amax = 0.0
            for i in range(j):
                for t in range(k):
                    v = values[subsets[s, i], t]
                    av = -v if v < 0.0 else v
                    if av > sel_amax:
                        sel_amax = av
            pad = tol * (1.0 + (sel_amax if sel_amax > f_amax else f_amax))
            ok = True
            for t in range(k):
                lo = values[subsets[s, 0], t]
                hi = lo
                for i in range(1, j):
                    v = values[subsets[s, i], t]
                    if v < lo:
                        lo = v
                    if v > hi:
                        hi = v
                if not (f_vals[t] >= lo - pad and f_vals[t] <= hi + pad):
                    ok = False
                    break
            if ok:
                hits += 1
    return int(hits)
