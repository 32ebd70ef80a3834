"""Pure-Python evaluation kernels.

Reference implementation of the hot loops; ``mband._kernels`` is the compiled
mirror. The simplex code below and its Cython twin perform the same
floating-point operations in the same order (the extension is built with
``-ffp-contract=off``), so both backends return identical numbers, not just
identical verdicts. Envelope paths are vectorised with numpy; min/max and
comparisons are exact, so those verdicts also match the compiled loops.

The membership test solves a phase-1 feasibility problem: minimise the total
artificial-variable mass subject to ``sum(w_i * g_i) = q``, ``sum(w_i) = 1``,
``w >= 0``. Coordinate rows are pre-divided by ``scale = 1 + max|coord|`` so
the tableau entries are O(1); the query point is declared inside when the
optimum (in scaled units) is at most ``tol``, i.e. the raw feasibility gap is
at most ``tol * scale``. Pivoting uses Bland's rule (smallest eligible index,
ties on the leaving side broken by smallest basis variable), which cannot
cycle and makes the pivot sequence deterministic.
"""

import numpy as np

COMPILED = False

# eps below is an absolute threshold on the O(1)-scaled tableau: entries with
# smaller magnitude are treated as zero during pivoting.
_EPS = 1e-12


def _phase1(q, G):
    """Run the phase-1 simplex on plain Python lists.

    Returns (residual in scaled units, weights list, scale).
    """
    j = len(G)
    n_dim = len(q)

    amax = 0.0
    for v in q:
        av = -v if v < 0.0 else v
        if av > amax:
            amax = av
    for row in G:
        for v in row:
            av = -v if v < 0.0 else v
            if av > amax:
                amax = av
    scale = 1.0 + amax

    rows = n_dim + 1
    ncols = j + rows

    tab = [[0.0] * ncols for _ in range(rows)]
    rhs = [0.0] * rows
    for r in range(n_dim):
        br = q[r] / scale
        if br < 0.0:
            for i in range(j):
                tab[r][i] = -(G[i][r] / scale)
            rhs[r] = -br
        else:
            for i in range(j):
                tab[r][i] = G[i][r] / scale
            rhs[r] = br
    for i in range(j):
        tab[rows - 1][i] = 1.0
    rhs[rows - 1] = 1.0
    for r in range(rows):
        tab[r][j + r] = 1.0

    basis = [j + r for r in range(rows)]

    # Reduced costs with the all-artificial basis: d_c = c_c - sum_r tab[r][c],
    # which is -(column sum) for the weight columns and 0 for the artificials.
    dcost = [0.0] * ncols
    for c in range(j):
        s = 0.0
        for r in range(rows):
            s += tab[r][c]
        dcost[c] = -s

    max_iter = 100 * (ncols + rows)
    for _ in range(max_iter):
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
            a = tab[r][enter]
            if a > _EPS:
                ratio = rhs[r] / a
                if leave < 0 or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    leave = r
                    best = ratio
        if leave < 0:
            # Unbounded descent is impossible in phase 1; bail out defensively.
            break

        rowl = tab[leave]
        inv = 1.0 / rowl[enter]
        for c in range(ncols):
            rowl[c] = rowl[c] * inv
        rhs[leave] = rhs[leave] * inv
        for r in range(rows):
            if r != leave:
                f = tab[r][enter]
                if f != 0.0:
                    rowr = tab[r]
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
    weights = [0.0] * j
    for r in range(rows):
        if basis[r] < j:
            weights[basis[r]] = rhs[r]
    return residual, weights, scale


def hull_membership(q, G, tol):
    """Convex-hull membership of ``q`` in the rows of ``G``.

    Returns ``(inside, residual, weights)`` where ``residual`` is the raw-unit
    feasibility gap and ``weights`` the convex coefficients found (meaningful
    when inside).
    """
    ql = [float(v) for v in q]
    gl = [[float(v) for v in row] for row in G]
    residual, weights, scale = _phase1(ql, gl)
    return residual <= tol, residual * scale, np.asarray(weights, dtype=np.float64)


def hull_inside(q, G, tol):
    """Verdict-only variant of :func:`hull_membership`."""
    ql = [float(v) for v in q]
    gl = [[float(v) for v in row] for row in G]
    residual, _, _ = _phase1(ql, gl)
    return residual <= tol


def band_first_violation(cand_vecs, curve_vecs, subset, tol):
    """First check-tuple (row of ``cand_vecs``) outside the generators' hull.

    ``cand_vecs`` is (T, N): one concatenated query vector per check tuple.
    ``curve_vecs`` is (n, T, N): the same concatenation for every curve.
    ``subset`` selects the generator curves. Returns -1 when every tuple
    passes, otherwise the index of the first failing tuple.
    """
    cand = cand_vecs.tolist()
    curves = [curve_vecs[i].tolist() for i in subset]
    n_tuples = len(cand)
    for t in range(n_tuples):
        g_rows = [c[t] for c in curves]
        residual, _, _ = _phase1(cand[t], g_rows)
        if residual > tol:
            return t
    return -1


def band_hits(cand_vecs, curve_vecs, subsets, self_idx, tol):
    """Count subsets whose band contains the candidate.

    ``subsets`` is (S, j); a subset containing ``self_idx`` counts as a hit
    without solving (a band absorbs its generators).
    """
    cand = cand_vecs.tolist()
    all_curves = curve_vecs.tolist()
    n_tuples = len(cand)
    hits = 0
    for subset in np.asarray(subsets, dtype=np.int64).tolist():
        if self_idx >= 0 and self_idx in subset:
            hits += 1
            continue
        curves = [all_curves[i] for i in subset]
        ok = True
        for t in range(n_tuples):
            g_rows = [c[t] for c in curves]
            residual, _, _ = _phase1(cand[t], g_rows)
            if residual > tol:
                ok = False
                break
        if ok:
            hits += 1
    return hits


def envelope_hits(f_vals, values, subsets, self_idx, tol):
    """Count subsets whose pointwise envelope contains ``f_vals`` (d=1, m=1).

    Tolerance is ``tol * (1 + max|coord|)`` per subset, mirroring the hull
    kernel's scaling.
    """
    subs = np.asarray(subsets, dtype=np.int64)
    f = np.asarray(f_vals, dtype=np.float64)
    sel = values[subs]  # (S, j, k)
    lo = sel.min(axis=1)
    hi = sel.max(axis=1)
    f_amax = float(np.abs(f).max())
    scale = 1.0 + np.maximum(np.abs(sel).max(axis=(1, 2)), f_amax)
    pad = tol * scale
    ok = ((f >= lo - pad[:, None]) & (f <= hi + pad[:, None])).all(axis=1)
    if self_idx >= 0:
        ok |= (subs == self_idx).any(axis=1)
    return int(ok.sum())
