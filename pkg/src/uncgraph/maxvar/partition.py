"""Balanced s-way graph partitioning.

A small multilevel scheme: heavy-edge matching to coarsen, recursive spectral
bisection of the coarsest graph, then projection back
with greedy boundary refinement (Kernighan-Lin/Fiduccia-Mattheyses style
single-node moves under a balance constraint). Partitions produced by METIS
can be imported from a text file instead.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import reverse_cuthill_mckee
from scipy.sparse.linalg import ArpackError, eigsh

from ..graph import Graph
from ..rng import check_random_state

__all__ = ["PartitionPlan", "partition_graph", "load_partition", "save_partition"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartitionPlan:
    """Node-to-part assignment with the edges it cuts."""

    parts: np.ndarray
    n_parts: int
    cut_edges: np.ndarray = field(repr=False)

    @classmethod
    def from_assignment(cls, g: Graph, parts, n_parts=None) -> "PartitionPlan":
        parts = np.asarray(parts, dtype=np.int64)
        if len(parts) != g.n:
            raise ValueError(f"partition has {len(parts)} entries for {g.n} nodes")
        if len(parts) and parts.min() < 0:
            raise ValueError("part ids must be non-negative")
        if n_parts is None:
            n_parts = int(parts.max()) + 1 if len(parts) else 1
        elif len(parts) and parts.max() >= n_parts:
            raise ValueError("part id out of range")
        cut = parts[g.edges[:, 0]] != parts[g.edges[:, 1]]
        parts = parts.copy()
        parts.setflags(write=False)
        return cls(parts, int(n_parts), g.edges[cut])

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.parts, minlength=self.n_parts)

    def members(self, k) -> np.ndarray:
        return np.flatnonzero(self.parts == k)

    def imbalance(self) -> float:
        """``max part size / mean part size``."""
        s = self.sizes
        return float(s.max() / s.mean()) if len(s) and s.mean() > 0 else 1.0


def load_partition(path, g: Graph | None = None, n_parts=None):
    """Read one part id per line (METIS ``.part`` format)."""
    parts = np.loadtxt(path, dtype=np.int64, comments="#", ndmin=1)
    if g is None:
        return parts
    return PartitionPlan.from_assignment(g, parts, n_parts)


def save_partition(plan: PartitionPlan, path):
    np.savetxt(path, plan.parts, fmt="%d")


# ---------------------------------------------------------------------------


def _weighted_adjacency(g: Graph) -> sp.csr_matrix:
    A = sp.csr_matrix((np.ones(len(g.indices)), g.indices, g.indptr), shape=(g.n, g.n))
    A.sum_duplicates()
    A.setdiag(0)
    A.eliminate_zeros()
    return A


def _heavy_edge_matching(A: sp.csr_matrix, vw, max_weight, gen, rounds=6):
    """Parallel heavy-edge matching followed by two-hop pairing.

    Each round every free node proposes to its heaviest free neighbor (ties
    broken by fresh noise) and mutual proposals are matched. Nodes still free
    afterwards are paired when they share the same heaviest neighbor, which
    lets the leaves around a hub collapse together.
    """
    n = A.shape[0]
    match = np.full(n, -1, dtype=np.int64)
    indptr = A.indptr
    rows = np.repeat(np.arange(n), np.diff(indptr))
    cols = A.indices
    nonempty = np.flatnonzero(np.diff(indptr) > 0)
    for _ in range(rounds):
        free = match < 0
        ok = free[rows] & free[cols] & (vw[rows] + vw[cols] <= max_weight)
        if not ok.any():
            break
        score = np.where(ok, A.data + gen.random(len(cols)) * 1e-3, -1.0)
        rowmax = np.full(n, -1.0)
        rowmax[nonempty] = np.maximum.reduceat(score, indptr[nonempty])
        best = np.flatnonzero(ok & (score == rowmax[rows]))
        choice = np.full(n, -1, dtype=np.int64)
        choice[rows[best]] = cols[best]
        cand = np.flatnonzero(choice >= 0)
        mutual = cand[choice[choice[cand]] == cand]
        match[mutual] = choice[mutual]
    # two-hop: free nodes grouped by their heaviest neighbor, paired in order
    free = np.flatnonzero(match < 0)
    if len(free) > 1:
        score = A.data + gen.random(len(cols)) * 1e-3
        rowmax = np.full(n, -np.inf)
        rowmax[nonempty] = np.maximum.reduceat(score, indptr[nonempty])
        hub = np.full(n, -1, dtype=np.int64)
        top = np.flatnonzero(score == rowmax[rows])
        hub[rows[top]] = cols[top]
        key = hub[free]
        order = np.lexsort((gen.random(len(free)), vw[free], key))
        f, k = free[order], key[order]
        a, b = f[:-1], f[1:]
        pair = (k[:-1] == k[1:]) & (vw[a] + vw[b] <= max_weight)
        # keep non-overlapping pairs: take every other candidate within a run
        idx = np.flatnonzero(pair)
        run = np.r_[True, idx[1:] != idx[:-1] + 1]
        start = np.maximum.accumulate(np.where(run, idx, 0))
        idx = idx[(idx - start) % 2 == 0]
        match[a[idx]] = b[idx]
        match[b[idx]] = a[idx]
    return match


def _contract(A, vw, match):
    n = A.shape[0]
    leader = np.where((match >= 0) & (match < np.arange(n)), match, np.arange(n))
    uniq, cmap = np.unique(leader, return_inverse=True)
    nc = len(uniq)
    cvw = np.bincount(cmap, weights=vw, minlength=nc)
    coo = A.tocoo()
    Ac = sp.csr_matrix((coo.data, (cmap[coo.row], cmap[coo.col])), shape=(nc, nc))
    Ac.sum_duplicates()
    Ac.setdiag(0)
    Ac.eliminate_zeros()
    return Ac, cvw, cmap


def _fiedler_order(A, gen):
    """Nodes sorted by the second eigenvector of the normalized adjacency.

    Falls back to a reverse Cuthill-McKee order when the eigensolver fails.
    """
    n = A.shape[0]
    deg = np.asarray(A.sum(axis=1)).ravel()
    inv = np.zeros(n)
    inv[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
    N = sp.diags(inv) @ A @ sp.diags(inv)
    try:
        if n <= 2000:
            vals, vecs = np.linalg.eigh(N.toarray())
        else:
            v0 = gen.random(n) + 0.5
            vals, vecs = eigsh(N.tocsr(), k=2, which="LA", v0=v0, tol=1e-6, maxiter=20 * n)
        vec = vecs[:, np.argsort(vals)[-2]] * inv
    except ArpackError:
        return reverse_cuthill_mckee(A.tocsr(), symmetric_mode=True)
    # break ties (isolated nodes, symmetric structure) reproducibly
    return np.lexsort((gen.random(n), vec))


def _initial_split(A, vw, s, gen):
    """Recursive spectral bisection into ``s`` parts with weights proportional to part counts."""
    n = A.shape[0]
    parts = np.zeros(n, dtype=np.int64)
    stack = [(np.arange(n), 0, s)]
    while stack:
        nodes, first, count = stack.pop()
        if count == 1 or len(nodes) == 0:
            parts[nodes] = first
            continue
        left = count // 2
        sub = A[nodes][:, nodes]
        order = nodes[_fiedler_order(sub, gen)] if len(nodes) > 2 else nodes
        cum = np.cumsum(vw[order])
        cut = int(np.searchsorted(cum, cum[-1] * left / count))
        cut = min(max(cut, 1), len(order) - 1)
        stack.append((order[:cut], first, left))
        stack.append((order[cut:], first + left, count - left))
    return parts


def _part_connectivity(A, parts, s):
    n = A.shape[0]
    onehot = sp.csr_matrix((np.ones(n), (np.arange(n), parts)), shape=(n, s))
    return np.asarray((A @ onehot).todense())


def _capacity_filter(group, weight, room):
    """Keep a prefix of each group (already in priority order) whose weight fits ``room[group]``."""
    if len(group) == 0:
        return np.zeros(0, dtype=bool)
    order = np.argsort(group, kind="stable")
    g_sorted = group[order]
    cum = np.cumsum(weight[order])
    starts = np.r_[0, np.flatnonzero(np.diff(g_sorted)) + 1]
    run_id = np.cumsum(np.r_[0, np.diff(g_sorted) != 0])
    offset = np.r_[0.0, cum][starts][run_id]
    fits = (cum - offset) <= room[g_sorted]
    keep = np.zeros(len(group), dtype=bool)
    keep[order] = fits
    return keep


def _refine(A, vw, parts, s, lo, hi, gen, passes=8):
    """Rounds of simultaneous boundary moves with positive gain under the size bounds.

    A round only moves nodes from lower to higher part ids (or the reverse,
    alternating), so two adjacent nodes never swap sides in the same round.
    """
    n = A.shape[0]
    if n == 0:
        return parts
    parts = parts.copy()
    idle = 0
    for it in range(2 * passes):
        pw = np.bincount(parts, weights=vw, minlength=s).astype(float)
        conn = _part_connectivity(A, parts, s)
        own = conn[np.arange(n), parts]
        conn[np.arange(n), parts] = -np.inf
        q = np.argmax(conn, axis=1)
        gain = conn[np.arange(n), q] - own
        upward = it % 2 == 0
        cand = np.flatnonzero((gain > 0) & ((q > parts) if upward else (q < parts)))
        if len(cand):
            cand = cand[np.lexsort((gen.random(len(cand)), -gain[cand]))]
            w = vw[cand]
            ok = _capacity_filter(q[cand], w, hi - pw)
            ok &= _capacity_filter(parts[cand], w, pw - lo)
            cand = cand[ok]
        if len(cand) == 0:
            idle += 1
            if idle >= 2:
                break
            continue
        idle = 0
        parts[cand] = q[cand]
    return parts


def _rebalance(A, vw, parts, s, lo, hi):
    """Move least-damaging nodes out of overweight parts and into underweight ones."""
    parts = parts.copy()
    for _ in range(4 * s):
        pw = np.bincount(parts, weights=vw, minlength=s).astype(float)
        over = pw > hi
        under = pw < lo
        if not over.any() and not under.any():
            break
        if over.any():
            src = int(np.argmax(pw))
            dst = int(np.argmin(np.where(np.arange(s) == src, np.inf, pw)))
        else:
            dst = int(np.argmin(pw))
            src = int(np.argmax(pw))
        members = np.flatnonzero(parts == src)
        conn = _part_connectivity(A[members], parts, s)
        cost = conn[:, src] - conn[:, dst]
        order = members[np.argsort(cost, kind="stable")]
        excess = max(pw[src] - hi, lo - pw[dst], 0.0)
        room = min(pw[src] - lo, hi - pw[dst])
        cum = np.cumsum(vw[order])
        k = int(np.searchsorted(cum, min(excess, room) - 1e-9)) + 1
        k = min(k, int(np.searchsorted(cum, room, side="right")))
        if k <= 0:
            break
        parts[order[:k]] = dst
    return parts


def partition_graph(g: Graph, n_parts: int, rng=None, *, imbalance: float = 0.05,
                    coarsen_to: int | None = None) -> PartitionPlan:
    """Split ``g`` into ``n_parts`` node sets of near-equal size with few cut edges.

    Parameters
    ----------
    g : Graph
    n_parts : int
        Number of parts ``s``; ``1 <= s <= n``.
    rng : seed or generator
        Matching tie-breaks and move order. Same seed, same partition.
    imbalance : float, default=0.05
        Allowed relative deviation of part sizes from ``n / s``.
    """
    s = int(n_parts)
    if s < 1:
        raise ValueError("n_parts must be >= 1")
    if s > g.n:
        raise ValueError(f"cannot split {g.n} nodes into {s} parts")
    if s == 1:
        return PartitionPlan.from_assignment(g, np.zeros(g.n, dtype=np.int64), 1)
    gen = check_random_state(rng)
    A = _weighted_adjacency(g)
    vw = np.ones(g.n)
    avg = g.n / s
    lo = np.floor(avg * (1 - imbalance))
    hi = np.ceil(avg * (1 + imbalance))
    target = coarsen_to or max(30 * s, 300)
    max_weight = max(1.0, imbalance * avg)

    levels = []
    while A.shape[0] > target:
        match = _heavy_edge_matching(A, vw, max_weight, gen)
        Ac, cvw, cmap = _contract(A, vw, match)
        if Ac.shape[0] > 0.95 * A.shape[0]:
            break
        levels.append((A, vw, cmap))
        A, vw = Ac, cvw

    parts = _initial_split(A, vw, s, gen)
    parts = _refine(A, vw, parts, s, lo, hi, gen)
    for A_f, vw_f, cmap in reversed(levels):
        parts = parts[cmap]
        parts = _refine(A_f, vw_f, parts, s, lo, hi, gen)
        A, vw = A_f, vw_f
    parts = _rebalance(A, vw, parts, s, lo, hi)
    plan = PartitionPlan.from_assignment(g, parts, s)
    logger.debug("partition: s=%d cut=%d imbalance=%.3f", s, len(plan.cut_edges), plan.imbalance())
    return plan
