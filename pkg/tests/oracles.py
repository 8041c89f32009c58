"""Independent reference implementations used only by the tests."""
from __future__ import annotations

import itertools

import numpy as np
import scipy.sparse.csgraph as csg


def exhaustive_degree_qp(n, pairs, d, chunk=20000, feas_tol=1e-9):
    """Exact optimum of min sum p^2, 0 <= p <= 1, M p = d by active-set enumeration.

    Every pair is at its lower bound, upper bound or free; for each of the
    3^k patterns the free block takes the minimum-norm solution of the
    equalities (a pseudo-inverse), and feasible candidates are compared.
    """
    pairs = np.asarray(pairs).reshape(-1, 2)
    k = len(pairs)
    M = np.zeros((n, k))
    M[pairs[:, 0], np.arange(k)] = 1.0
    M[pairs[:, 1], np.arange(k)] = 1.0
    d = np.asarray(d, dtype=float)
    best_obj, best_p = np.inf, None
    patterns = np.array(list(itertools.product((0, 1, 2), repeat=k)), dtype=np.int8).reshape(-1, k)
    for lo in range(0, len(patterns), chunk):
        pat = patterns[lo:lo + chunk]
        upper = (pat == 1).astype(float)
        free = (pat == 2).astype(float)
        rhs = d[None, :] - upper @ M.T
        Mf = M[None, :, :] * free[:, None, :]
        pf = np.einsum("bkn,bn->bk", np.linalg.pinv(Mf, rcond=1e-10), rhs)
        p = upper + pf * free
        ok = np.abs(np.einsum("nk,bk->bn", M, p) - d[None, :]).max(axis=1) <= feas_tol
        ok &= (p >= -feas_tol).all(axis=1) & (p <= 1 + feas_tol).all(axis=1)
        if ok.any():
            obj = (p[ok] ** 2).sum(axis=1)
            i = int(np.argmin(obj))
            if obj[i] < best_obj:
                best_obj, best_p = float(obj[i]), p[ok][i]
    return best_obj, best_p


def bfs_distance_counts(g):
    """Exact ``N(h)`` (ordered pairs u != v within distance h) for every h, by all-pairs BFS."""
    dist = csg.shortest_path(g.adjacency(), unweighted=True, directed=False)
    np.fill_diagonal(dist, np.inf)
    finite = dist[np.isfinite(dist)].astype(int)
    if len(finite) == 0:
        return np.zeros(1)
    hist = np.bincount(finite)
    return np.cumsum(hist)


def exact_path_stats(g):
    """(APD, EDiam, CL) from exact distance counts with the library's conventions."""
    N = bfs_distance_counts(g)
    h = np.arange(len(N))
    dN = np.diff(np.r_[0.0, N])
    total = N[-1]
    apd = float((h * dN).sum() / total)
    cl = float(total / (dN[1:] / h[1:]).sum())
    return apd, N, cl


def exact_diameter(g):
    dist = csg.shortest_path(g.adjacency(), unweighted=True, directed=False)
    finite = dist[np.isfinite(dist)]
    return int(finite.max()) if len(finite) else 0
