"""Hot numerical kernels: numba fast path, numpy/python fallback.

Public functions dispatch on the active backend (``LANDSKEW_BACKEND``; see
:mod:`landskew._backend`).  Both paths implement the same algorithms with the
same tie-break conventions, so they agree up to floating-point summation order.

Kernels here:

- ``single_linkage_heights``   merge heights of single-linkage clustering
  (equivalently: sorted minimum-spanning-tree edge weights; Kruskal/union-find
  on the jitted path, scipy's C single-linkage on the fallback path).
- ``enumerate_triangles``      all index triples whose pairwise filtration
  values sit under a cutoff, plus each triple's max edge value.
- ``reduce_triangle_columns``  Z/2 column reduction of the triangle-by-edge
  boundary matrix (the degree-1 persistence pairing).
- ``dp_align``                 dynamic program over monotone lattice paths that
  minimises the squared-curve mismatch under reparameterisation; ties broken
  toward the path closest to the diagonal.
"""
from __future__ import annotations

import math

import numpy as np

from ._backend import HAVE_NUMBA, use_numba

__all__ = [
    "single_linkage_heights",
    "enumerate_triangles",
    "reduce_triangle_columns",
    "dp_align",
    "warp_step_set",
    "warm_kernels",
]

# --------------------------------------------------------------------------
# single linkage (degree-0 merge heights)
# --------------------------------------------------------------------------


def _condensed_offset(i: int, n: int) -> int:
    return i * n - (i * (i + 1)) // 2


def _kruskal_impl(order, cond, n):
    # Edges arrive sorted by weight; decode condensed index -> (i, j) on the
    # fly to avoid materialising the full index arrays.
    parent = np.arange(n)
    size = np.ones(n, np.int64)
    heights = np.empty(n - 1 if n > 1 else 0, np.float64)
    cnt = 0
    for e in range(order.shape[0]):
        idx = order[e]
        fi = (2.0 * n - 1.0)
        i = int((fi - math.sqrt(fi * fi - 8.0 * idx)) * 0.5)
        while i * n - (i * (i + 1)) // 2 > idx:
            i -= 1
        while (i + 1) * n - ((i + 1) * (i + 2)) // 2 <= idx:
            i += 1
        j = idx - (i * n - (i * (i + 1)) // 2) + i + 1
        x = i
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        rx = x
        x = j
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        ry = x
        if rx == ry:
            continue
        if size[rx] < size[ry]:
            rx, ry = ry, rx
        parent[ry] = rx
        size[rx] += size[ry]
        heights[cnt] = cond[idx]
        cnt += 1
        if cnt == n - 1:
            break
    return heights[:cnt].copy()


def single_linkage_heights(cond: np.ndarray, n: int) -> np.ndarray:
    """Ascending merge heights of single linkage on condensed distances."""
    cond = np.ascontiguousarray(cond, np.float64)
    if n <= 1:
        return np.empty(0, np.float64)
    if cond.size != n * (n - 1) // 2:
        # the jitted union-find indexes blindly; a silent size mismatch
        # would read out of bounds instead of raising
        raise ValueError(f"condensed distance vector has {cond.size} entries; "
                         f"n={n} needs {n * (n - 1) // 2}")
    if use_numba():
        order = np.argsort(cond, kind="stable").astype(np.int64)
        return _kruskal_jit(order, cond, n)
    from scipy.cluster.hierarchy import linkage

    heights = linkage(cond, method="single")[:, 2]
    return np.ascontiguousarray(heights, np.float64)


# --------------------------------------------------------------------------
# triangle enumeration under a filtration cutoff
# --------------------------------------------------------------------------


def _tri_enum_impl(vmat, cutoff):
    n = vmat.shape[0]
    cnt = 0
    for i in range(n):
        for j in range(i + 1, n):
            if vmat[i, j] > cutoff:
                continue
            for k in range(j + 1, n):
                if vmat[i, k] <= cutoff and vmat[j, k] <= cutoff:
                    cnt += 1
    tris = np.empty((cnt, 3), np.int64)
    vals = np.empty(cnt, np.float64)
    p = 0
    for i in range(n):
        for j in range(i + 1, n):
            vij = vmat[i, j]
            if vij > cutoff:
                continue
            for k in range(j + 1, n):
                vik = vmat[i, k]
                vjk = vmat[j, k]
                if vik <= cutoff and vjk <= cutoff:
                    v = vij
                    if vik > v:
                        v = vik
                    if vjk > v:
                        v = vjk
                    tris[p, 0] = i
                    tris[p, 1] = j
                    tris[p, 2] = k
                    vals[p] = v
                    p += 1
    return tris, vals


def _tri_enum_numpy(vmat, cutoff):
    n = vmat.shape[0]
    adj = vmat <= cutoff
    np.fill_diagonal(adj, False)
    tri_rows = []
    val_rows = []
    idx = np.arange(n)
    for i in range(n):
        nb = idx[(idx > i) & adj[i]]
        if nb.size < 2:
            continue
        sub = adj[np.ix_(nb, nb)]
        jj, kk = np.nonzero(np.triu(sub, 1))
        if jj.size == 0:
            continue
        j = nb[jj]
        k = nb[kk]
        v = np.maximum(vmat[i, j], np.maximum(vmat[i, k], vmat[j, k]))
        tri_rows.append(np.column_stack((np.full(j.shape, i), j, k)))
        val_rows.append(v)
    if not tri_rows:
        return np.empty((0, 3), np.int64), np.empty(0, np.float64)
    return (
        np.concatenate(tri_rows).astype(np.int64),
        np.concatenate(val_rows).astype(np.float64),
    )


def enumerate_triangles(vmat: np.ndarray, cutoff: float):
    """All i<j<k with pairwise values <= cutoff, and each triple's max value."""
    vmat = np.ascontiguousarray(vmat, np.float64)
    if use_numba():
        return _tri_enum_jit(vmat, float(cutoff))
    return _tri_enum_numpy(vmat, float(cutoff))


# --------------------------------------------------------------------------
# Z/2 boundary-matrix column reduction (triangle columns over edge rows)
# --------------------------------------------------------------------------


def _reduce_impl(tri_cols, n_edges):
    m = tri_cols.shape[0]
    low_to = np.full(n_edges, -1, np.int64)
    starts = np.empty(m, np.int64)
    lens = np.empty(m, np.int64)
    pairs_e = np.empty(m, np.int64)
    pairs_t = np.empty(m, np.int64)
    cap = 8 * m + 64
    pool = np.empty(cap, np.int64)
    used = 0
    ncols = 0
    npairs = 0
    work = np.empty(n_edges, np.int64)
    scratch = np.empty(n_edges, np.int64)
    for t in range(m):
        lw = 3
        work[0] = tri_cols[t, 0]
        work[1] = tri_cols[t, 1]
        work[2] = tri_cols[t, 2]
        while lw > 0:
            low = work[lw - 1]
            c = low_to[low]
            if c == -1:
                break
            s = starts[c]
            lc = lens[c]
            ia = 0
            ib = 0
            lo = 0
            while ia < lw and ib < lc:
                va = work[ia]
                vb = pool[s + ib]
                if va == vb:
                    ia += 1
                    ib += 1
                elif va < vb:
                    scratch[lo] = va
                    lo += 1
                    ia += 1
                else:
                    scratch[lo] = vb
                    lo += 1
                    ib += 1
            while ia < lw:
                scratch[lo] = work[ia]
                lo += 1
                ia += 1
            while ib < lc:
                scratch[lo] = pool[s + ib]
                lo += 1
                ib += 1
            tmp = work
            work = scratch
            scratch = tmp
            lw = lo
        if lw > 0:
            if used + lw > cap:
                newcap = cap
                while used + lw > newcap:
                    newcap *= 2
                newpool = np.empty(newcap, np.int64)
                newpool[:used] = pool[:used]
                pool = newpool
                cap = newcap
            starts[ncols] = used
            lens[ncols] = lw
            for r in range(lw):
                pool[used + r] = work[r]
            used += lw
            low = work[lw - 1]
            low_to[low] = ncols
            ncols += 1
            pairs_e[npairs] = low
            pairs_t[npairs] = t
            npairs += 1
    return pairs_e[:npairs].copy(), pairs_t[:npairs].copy()


def _reduce_numpy(tri_cols, n_edges):
    stored: dict[int, set] = {}
    pairs_e = []
    pairs_t = []
    for t in range(tri_cols.shape[0]):
        col = {int(tri_cols[t, 0]), int(tri_cols[t, 1]), int(tri_cols[t, 2])}
        while col:
            low = max(col)
            prev = stored.get(low)
            if prev is None:
                break
            col ^= prev
        if col:
            stored[low] = col
            pairs_e.append(low)
            pairs_t.append(t)
    return np.asarray(pairs_e, np.int64), np.asarray(pairs_t, np.int64)


def reduce_triangle_columns(tri_cols: np.ndarray, n_edges: int):
    """Pair each killing triangle with the cycle-creating edge it cancels.

    ``tri_cols``: (M, 3) edge indices per triangle, rows in triangle filtration
    order, entries sorted ascending; edge indices in edge filtration order.
    Returns (edge_idx, tri_idx) arrays of the matched columns.
    """
    tri_cols = np.ascontiguousarray(tri_cols, np.int64)
    if use_numba():
        return _reduce_jit(tri_cols, n_edges)
    return _reduce_numpy(tri_cols, n_edges)


# --------------------------------------------------------------------------
# dynamic-programming alignment over monotone lattice paths
# --------------------------------------------------------------------------


def warp_step_set(max_step: int = 6, slope_max: float = 10.0) -> np.ndarray:
    """Coprime lattice steps (a, b) with slope b/a inside [1/slope_max, slope_max].

    Besides the dense coprime neighbourhood with components up to
    ``max_step``, the set carries the axis-adjacent steps (1, b) and (a, 1)
    out to ``slope_max`` so that sustained slopes up to ``slope_max`` (and
    down to its reciprocal) stay reachable.
    """
    steps = []
    for a in range(1, max_step + 1):
        for b in range(1, max_step + 1):
            if math.gcd(a, b) != 1:
                continue
            slope = b / a
            if slope < 1.0 / slope_max or slope > slope_max:
                continue
            steps.append((a, b))
    for b in range(max_step + 1, int(slope_max) + 1):
        steps.append((1, b))
        steps.append((b, 1))
    return np.asarray(steps, np.int64)


def _dp_impl(q1, q2, steps, h, tie_tol):
    K, T = q1.shape
    S = steps.shape[0]
    INF = np.inf
    cost = np.full((T, T), INF)
    dev = np.full((T, T), INF)
    choice = np.full((T, T), -1, np.int16)
    cost[0, 0] = 0.0
    dev[0, 0] = 0.0
    for i in range(1, T):
        for j in range(1, T):
            best = INF
            bestdev = INF
            bestk = -1
            for s in range(S):
                a = steps[s, 0]
                b = steps[s, 1]
                i0 = i - a
                j0 = j - b
                if i0 < 0 or j0 < 0:
                    continue
                base = cost[i0, j0]
                if base == INF:
                    continue
                sq = math.sqrt(b / a)
                M = a if a >= b else b
                acc = 0.0
                dacc = 0.0
                for m in range(M + 1):
                    wgt = 1.0
                    if m == 0 or m == M:
                        wgt = 0.5
                    tnum = a * m
                    toff = tnum // M
                    trem = tnum - toff * M
                    gi = i0 + toff
                    gnum = b * m
                    goff = gnum // M
                    grem = gnum - goff * M
                    lo = j0 + goff
                    gsum = 0.0
                    if trem == 0 and grem == 0:
                        for k in range(K):
                            d0 = q1[k, gi] - sq * q2[k, lo]
                            gsum += d0 * d0
                    elif trem == 0:
                        wq = grem / M
                        for k in range(K):
                            q2v = (1.0 - wq) * q2[k, lo] + wq * q2[k, lo + 1]
                            d0 = q1[k, gi] - sq * q2v
                            gsum += d0 * d0
                    elif grem == 0:
                        wp = trem / M
                        for k in range(K):
                            q1v = (1.0 - wp) * q1[k, gi] + wp * q1[k, gi + 1]
                            d0 = q1v - sq * q2[k, lo]
                            gsum += d0 * d0
                    else:
                        wp = trem / M
                        wq = grem / M
                        for k in range(K):
                            q1v = (1.0 - wp) * q1[k, gi] + wp * q1[k, gi + 1]
                            q2v = (1.0 - wq) * q2[k, lo] + wq * q2[k, lo + 1]
                            d0 = q1v - sq * q2v
                            gsum += d0 * d0
                    acc += wgt * gsum
                    dacc += wgt * abs((j0 - i0) + (gnum - tnum) / M)
                scale = a / M
                cand = base + acc * h * scale
                cdev = dev[i0, j0] + dacc * h * h * scale
                tol = tie_tol * (1.0 + abs(cand))
                if cand < best - tol:
                    best = cand
                    bestdev = cdev
                    bestk = s
                elif cand <= best + tol and cdev < bestdev - 1e-15:
                    best = cand
                    bestdev = cdev
                    bestk = s
            cost[i, j] = best
            dev[i, j] = bestdev
            choice[i, j] = bestk
    # backtrack
    pi = np.empty(2 * T, np.int64)
    pj = np.empty(2 * T, np.int64)
    cnt = 0
    ci = T - 1
    cj = T - 1
    while True:
        pi[cnt] = ci
        pj[cnt] = cj
        cnt += 1
        if ci == 0 and cj == 0:
            break
        s = choice[ci, cj]
        ci -= steps[s, 0]
        cj -= steps[s, 1]
    path = np.empty((cnt, 2), np.int64)
    for r in range(cnt):
        path[r, 0] = pi[cnt - 1 - r]
        path[r, 1] = pj[cnt - 1 - r]
    return cost[T - 1, T - 1], path


def _dp_numpy(q1, q2, steps, h, tie_tol):
    K, T = q1.shape
    INF = np.inf
    cost = np.full((T, T), INF)
    dev = np.full((T, T), INF)
    choice = np.full((T, T), -1, np.int16)
    cost[0, 0] = 0.0
    dev[0, 0] = 0.0
    jg = np.arange(T)
    for i in range(1, T):
        bestc = np.full(T, INF)
        bestd = np.full(T, INF)
        bestk = np.full(T, -1, np.int16)
        for s in range(steps.shape[0]):
            a = int(steps[s, 0])
            b = int(steps[s, 1])
            i0 = i - a
            if i0 < 0:
                continue
            nj = T - b
            base = cost[i0, :nj]
            valid = np.isfinite(base)
            if not valid.any():
                continue
            sq = math.sqrt(b / a)
            M = max(a, b)
            acc = np.zeros(nj)
            dacc = np.zeros(nj)
            for m in range(M + 1):
                wgt = 0.5 if (m == 0 or m == M) else 1.0
                tnum = a * m
                toff = tnum // M
                trem = tnum - toff * M
                if trem == 0:
                    q1v = q1[:, i0 + toff]
                else:
                    wp = trem / M
                    q1v = (1.0 - wp) * q1[:, i0 + toff] + wp * q1[:, i0 + toff + 1]
                gnum = b * m
                goff = gnum // M
                grem = gnum - goff * M
                if grem == 0:
                    q2m = q2[:, goff : goff + nj]
                else:
                    wq = grem / M
                    q2m = (1.0 - wq) * q2[:, goff : goff + nj] + wq * q2[
                        :, goff + 1 : goff + 1 + nj
                    ]
                dq = q1v[:, None] - sq * q2m
                acc += wgt * np.einsum("kj,kj->j", dq, dq)
                dacc += wgt * np.abs((jg[:nj] - i0) + (gnum - tnum) / M)
            scale = a / M
            cand = base + acc * h * scale
            cdev = dev[i0, :nj] + dacc * h * h * scale
            tol = tie_tol * (1.0 + np.where(valid, np.abs(cand), 0.0))
            cur_c = bestc[b:]
            cur_d = bestd[b:]
            take = valid & (
                (cand < cur_c - tol)
                | ((cand <= cur_c + tol) & (cdev < cur_d - 1e-15))
            )
            cur_c[take] = cand[take]
            cur_d[take] = cdev[take]
            bestk[b:][take] = s
        cost[i] = bestc
        dev[i] = bestd
        choice[i] = bestk
    # backtrack
    nodes = [(T - 1, T - 1)]
    ci, cj = T - 1, T - 1
    while (ci, cj) != (0, 0):
        s = int(choice[ci, cj])
        ci -= int(steps[s, 0])
        cj -= int(steps[s, 1])
        nodes.append((ci, cj))
    nodes.reverse()
    return float(cost[T - 1, T - 1]), np.asarray(nodes, np.int64)


def dp_align(q1: np.ndarray, q2: np.ndarray, steps: np.ndarray, h: float,
             tie_tol: float = 1e-12):
    """Minimise the squared mismatch between q1 and the warped q2 over lattice warps.

    Returns ``(cost, path)`` where ``path`` is the (P, 2) node sequence of the
    optimal monotone lattice path from (0, 0) to (T-1, T-1).  The integrand on
    a step (a, b) is sampled at max(a, b)+1 evenly spaced points along the
    segment (both ``q1`` and ``q2`` linearly interpolated) and summed with
    trapezoid weights, so steep steps cannot alias over narrow features of
    either curve; among equal-cost paths the one with the smallest total
    |gamma(t) - t| is chosen.
    """
    q1 = np.ascontiguousarray(q1, np.float64)
    q2 = np.ascontiguousarray(q2, np.float64)
    steps = np.ascontiguousarray(steps, np.int64)
    if use_numba():
        cost, path = _dp_jit(q1, q2, steps, float(h), float(tie_tol))
        return float(cost), path
    return _dp_numpy(q1, q2, steps, float(h), float(tie_tol))


# --------------------------------------------------------------------------
# jit wrappers
# --------------------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit

    _kruskal_jit = njit(cache=True, nogil=True)(_kruskal_impl)
    _tri_enum_jit = njit(cache=True, nogil=True)(_tri_enum_impl)
    _reduce_jit = njit(cache=True, nogil=True)(_reduce_impl)
    _dp_jit = njit(cache=True, nogil=True)(_dp_impl)
else:  # pragma: no cover
    _kruskal_jit = _kruskal_impl
    _tri_enum_jit = _tri_enum_impl
    _reduce_jit = _reduce_impl
    _dp_jit = _dp_impl


def warm_kernels() -> None:
    """Trigger JIT compilation on tiny inputs (no-op on the numpy backend)."""
    if not use_numba():
        return
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    diff = pts[:, None, :] - pts[None, :, :]
    dm = np.sqrt((diff * diff).sum(-1))
    iu = np.triu_indices(4, 1)
    cond = dm[iu]
    single_linkage_heights(cond, 4)
    tris, _ = enumerate_triangles(dm, 10.0)
    reduce_triangle_columns(np.sort(tris[:, :3], axis=1), 6)
    t = np.linspace(0.0, 1.0, 8)
    q = np.vstack((np.sin(t), np.cos(t)))
    dp_align(q, q, warp_step_set(), 1.0 / 7.0)
