"""Random-walk edge rewiring: the original trial-and-error RandWalk, the
rejection-free RandWalk-mod, and the matrix form of RandWalk-mod."""
from __future__ import annotations

import logging

import numpy as np
import scipy.sparse as sp

from ..exceptions import BudgetExceededError, ParameterError
from ..graph import Graph, UncertainGraph
from ..rng import check_random_state
from ..walk import DEFAULT_NNZ_BUDGET, build_prw, walk_matrix

__all__ = [
    "randwalk",
    "randwalk_mod",
    "edge_adding_matrix",
    "randwalk_matrix",
    "tv_upper_bound_rw",
]

logger = logging.getLogger(__name__)


def _walk_ends(g: Graph, starts: np.ndarray, hops: int, gen) -> np.ndarray:
    cur = np.asarray(starts, dtype=np.int64).copy()
    deg = g.degrees
    for _ in range(hops):
        step = (gen.random(len(cur)) * deg[cur]).astype(np.int64)
        cur = g.indices[g.indptr[cur] + step]
    return cur


def _slot_probabilities(g: Graph, first_prob: float, degree_one_prob: float) -> np.ndarray:
    """Addition probability for every (u, k-th neighbor) slot in CSR order."""
    deg = g.degrees.astype(float)
    owner_deg = np.repeat(deg, g.degrees)
    rank = np.arange(len(g.indices)) - np.repeat(g.indptr[:-1], g.degrees)
    with np.errstate(divide="ignore", invalid="ignore"):
        rest = (0.5 * owner_deg - first_prob) / (owner_deg - 1.0)
    prob = np.where(rank == 0, first_prob, rest)
    prob = np.where(owner_deg == 1, degree_one_prob, prob)
    return prob


def _check_alpha(g: Graph, alpha: float):
    if not 0 < alpha <= 1:
        raise ParameterError(f"alpha={alpha} must lie in (0, 1]")
    d = g.degrees[g.degrees >= 2].astype(float)
    if len(d):
        rest = (0.5 * d - alpha) / (d - 1.0)
        if rest.min() < 0 or rest.max() > 1:
            bad = int(d[np.argmin(rest)])
            raise ParameterError(f"alpha={alpha} gives probability outside [0, 1] at degree {bad}")


def randwalk(g: Graph, t: int, max_loops: int = 100, rng=None) -> Graph:
    """RandWalk with the trial-and-error loop.

    For every node ``u`` and each neighbor ``v`` (ascending id order) a
    ``t-1`` hop walk from ``v`` proposes an endpoint ``z``; proposals equal to
    ``u`` or already present in the output are redrawn, at most ``max_loops``
    walks in total. The first neighbor's edge is added with probability 1,
    the others with ``(0.5 d_u - 1) / (d_u - 1)``. Output is simple.
    """
    t, max_loops = int(t), int(max_loops)
    if t < 2:
        raise ParameterError("walk length t must be >= 2")
    if max_loops < 1:
        raise ParameterError("max_loops must be >= 1")
    gen = check_random_state(rng)
    n = g.n
    deg = g.degrees
    indptr, indices = g.indptr, g.indices
    hops = t - 1
    added = set()
    out = []
    n_missed = 0
    for u in range(n):
        du = int(deg[u])
        if du == 0:
            continue
        later = (0.5 * du - 1.0) / (du - 1.0) if du > 1 else 0.0
        coins = gen.random(du)
        for count, v in enumerate(indices[indptr[u]:indptr[u + 1]].tolist()):
            z = -1
            ok = False
            for _ in range(max_loops):
                z = v
                for _h in range(hops):
                    dz = int(deg[z])
                    z = int(indices[indptr[z] + int(gen.random() * dz)])
                key = (u, z) if u < z else (z, u)
                if z != u and key not in added:
                    ok = True
                    break
            if not ok:
                n_missed += 1
                continue
            prob = 1.0 if count == 0 else later
            if coins[count] < prob:
                added.add(key)
                out.append(key)
    if n_missed:
        logger.debug("randwalk: %d slot(s) found no valid endpoint within %d walks", n_missed, max_loops)
    return Graph(n, np.asarray(out, dtype=np.int64).reshape(-1, 2))


def randwalk_mod(g: Graph, t: int, alpha: float = 0.5, rng=None) -> Graph:
    """RandWalk-mod: no rejection, first-edge probability ``alpha``.

    Degree-1 nodes add their single edge with probability 0.5; other nodes add
    the first neighbor's edge with ``alpha`` and the rest with
    ``(0.5 d_u - alpha) / (d_u - 1)``. Selfloops and parallel edges are kept,
    so the result is a multigraph.
    """
    t = int(t)
    if t < 2:
        raise ParameterError("walk length t must be >= 2")
    _check_alpha(g, alpha)
    gen = check_random_state(rng)
    owners = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    ends = _walk_ends(g, g.indices, t - 1, gen)
    prob = _slot_probabilities(g, alpha, 0.5)
    keep = gen.random(len(prob)) < prob
    return Graph(g.n, np.column_stack([owners[keep], ends[keep]]), simple=False)


def edge_adding_matrix(g: Graph, alpha: float) -> sp.csr_matrix:
    """``Q``: 0.5 for a degree-1 node's only neighbor, ``alpha`` for the first
    neighbor, ``(0.5 d_i - alpha) / (d_i - 1)`` for the others."""
    _check_alpha(g, alpha)
    prob = _slot_probabilities(g, alpha, 0.5)
    return sp.csr_matrix((prob, g.indices.copy(), g.indptr.copy()), shape=(g.n, g.n))


def randwalk_matrix(g: Graph, t: int, alpha: float = 0.5, *,
                    budget: int = DEFAULT_NNZ_BUDGET) -> UncertainGraph:
    """Expected adjacency of RandWalk-mod as a relaxed uncertain graph.

    Node ``u`` proposes ``(u, z)`` through neighbor ``v`` with probability
    ``Q[u, v] P^(t-1)[v, z]``, so the expected adjacency is ``C + C^T`` with
    ``C = (A o Q) P^(t-1)``. For ``t = 1`` this is ``A o (Q + Q^T)`` and for
    ``alpha = 0.5`` it is ``A P^(t-1)``. Diagonal entries carry expected
    selfloop degree.
    """
    if int(t) < 1:
        raise ParameterError("walk length t must be >= 1")
    Q = edge_adding_matrix(g, alpha)
    C = Q  # A o Q has the support of A
    if t > 1:
        P = build_prw(g).matrix
        deg = g.degrees
        for _ in range(int(t) - 1):
            proj = int(deg[C.indices].sum())
            if proj > budget:
                raise BudgetExceededError(
                    f"walk product would hold up to {proj} non-zeros (budget {budget})")
            C = (C @ P).tocsr()
    M = (C + C.T).tocsr()
    M.sum_duplicates()
    return UncertainGraph.from_matrix(M, allows_selfloops=True)


def tv_upper_bound_rw(g: Graph, t: int, *, budget: int = DEFAULT_NNZ_BUDGET) -> float:
    """``m (K_t - m) / K_t`` with ``K_t`` the non-zero count of ``B^(t)`` (diagonal included)."""
    K = walk_matrix(g, t, budget=budget).nnz
    if K == 0:
        return 0.0
    return g.m * (K - g.m) / K
