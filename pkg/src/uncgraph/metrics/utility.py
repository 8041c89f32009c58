"""Utility statistics of a (sampled) graph.

Degree statistics count parallel edges with multiplicity and a selfloop as
one edge adding 2 to its node's degree. Triangles and connected triples are
counted on the simple support (selfloops dropped, parallel edges once).
Distance statistics come from an approximate neighbourhood function built on
Flajolet-Martin sketches.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from ..exceptions import EmptyGraphError
from ..graph import Graph
from ..rng import check_random_state

__all__ = [
    "UtilityStats",
    "STAT_NAMES",
    "degree_stats",
    "clustering_coefficient",
    "triangle_count",
    "neighbourhood_function",
    "path_stats_from_counts",
    "anf_stats",
    "diameter_lower_bound",
    "utility_stats",
]

STAT_NAMES = ("S_NE", "S_AD", "S_MD", "S_DV", "S_CC", "S_PL", "S_APD", "S_EDiam", "S_CL", "S_Diam")

FM_PHI = 0.77351


@dataclass
class UtilityStats:
    S_NE: float
    S_AD: float
    S_MD: float
    S_DV: float
    S_CC: float
    S_PL: float
    S_APD: float
    S_EDiam: float
    S_CL: float
    S_Diam: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=float)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_array(cls, values) -> "UtilityStats":
        return cls(*[float(v) for v in values])


def degree_stats(g: Graph) -> tuple[float, float, float, float, float]:
    """``(S_NE, S_AD, S_MD, S_DV, S_PL)``.

    ``S_PL`` is the discrete power-law maximum-likelihood exponent with
    ``d_min = 1``: ``1 + n' / sum(ln(d_i / (d_min - 0.5)))`` over the ``n'``
    nodes with ``d_i >= d_min``.
    """
    if g.n == 0:
        raise EmptyGraphError("degree statistics need at least one node")
    d = g.degrees.astype(float)
    ne = d.sum() / 2.0
    ad = d.mean()
    md = d.max()
    dv = d.var()
    pos = d[d >= 1]
    denom = np.log(pos / 0.5).sum()
    pl = 1.0 + len(pos) / denom if denom > 0 else float("nan")
    return float(ne), float(ad), float(md), float(dv), float(pl)


def _simple_support(g: Graph) -> sp.csr_matrix:
    A = g.adjacency().tocsr(copy=True)
    A.setdiag(0)
    A.eliminate_zeros()
    A.data[:] = 1.0
    return A


def triangle_count(g: Graph) -> int:
    """Triangles of the simple support, via an oriented sparse product."""
    A = _simple_support(g)
    deg = np.diff(A.indptr)
    # orient every edge from lower to higher (degree, id) rank
    rank = np.empty(g.n, dtype=np.int64)
    rank[np.lexsort((np.arange(g.n), deg))] = np.arange(g.n)
    coo = A.tocoo()
    keep = rank[coo.row] < rank[coo.col]
    D = sp.csr_matrix((np.ones(int(keep.sum())), (coo.row[keep], coo.col[keep])), shape=A.shape)
    paths = D @ D
    return int(round(paths.multiply(D).sum()))


def clustering_coefficient(g: Graph) -> float:
    """``3 N_triangles / N_triples``; 0 without connected triples."""
    A = _simple_support(g)
    deg = np.diff(A.indptr).astype(float)
    triples = float((deg * (deg - 1) / 2.0).sum())
    if triples == 0:
        return 0.0
    return 3.0 * triangle_count(g) / triples


# ---------------------------------------------------------------------------
# approximate neighbourhood function


@lru_cache(maxsize=8)
def _fm_expectation_table(cmax: int = 1024, bits: int = 64) -> np.ndarray:
    """``E[R | c]`` for ``c = 0..cmax``, where ``R`` is the lowest unset bit of
    the OR of ``c`` independent geometric bitmasks (``P(bit i) = 2^-(i+1)``).

    With ``P_k(c) = P(bits 0..k-1 all set)``, items hit bit 0 independently with
    probability 1/2 and the rest fall on higher bits with the same law, so
    ``P_k(c) = sum_{j>=1} C(c, j) 2^-c P_{k-1}(c - j)`` and ``E[R] = sum_k P_k``.
    """
    c = np.arange(cmax + 1)
    j = c[:, None] - c[None, :]          # items on bit 0: j = c - c'
    valid = j >= 1
    logw = np.where(valid, gammaln(c[:, None] + 1) - gammaln(np.maximum(j, 0) + 1)
                    - gammaln(c[None, :] + 1) - c[:, None] * math.log(2.0), -np.inf)
    T = np.exp(logw)
    P = np.ones(cmax + 1)
    total = np.zeros(cmax + 1)
    for _ in range(bits):
        P = T @ P
        total += P
        if P.max() < 1e-17:
            break
    return total


def _fm_count(rbar: np.ndarray) -> np.ndarray:
    """Invert the mean lowest-zero-bit ``rbar`` into a set-size estimate."""
    table = _fm_expectation_table()
    out = np.power(2.0, rbar) / FM_PHI
    small = rbar <= table[-1]
    out[small] = np.interp(rbar[small], table, np.arange(len(table), dtype=float))
    return out


def _lowest_zero_bit(x: np.ndarray) -> np.ndarray:
    y = ~x & (x + np.uint64(1))
    # y is a power of two; its log2 is exact in float64 for bit positions < 53
    return np.log2(y.astype(np.float64)).astype(np.int64)


def _propagate(M, indptr, indices, chunk=1 << 20):
    """``M_new[u] = M[u] | OR_{v in N(u)} M[v]``, processed in row blocks."""
    n = len(indptr) - 1
    out = M.copy()
    start = 0
    while start < n:
        # grow the block until it holds about ``chunk`` neighbor slots
        stop = int(np.searchsorted(indptr, indptr[start] + chunk, side="right"))
        stop = min(max(stop - 1, start + 1), n)
        lo, hi = indptr[start], indptr[stop]
        if hi > lo:
            rows = np.arange(start, stop)
            nonempty = rows[indptr[rows + 1] > indptr[rows]]
            gathered = M[indices[lo:hi]]
            red = np.bitwise_or.reduceat(gathered, indptr[nonempty] - lo, axis=0)
            out[nonempty] |= red
        start = stop
    return out


def neighbourhood_function(g: Graph, K: int = 32, r: int = 7, rng=None, *,
                           max_h: int = 10_000, rel_tol: float = 1e-3) -> np.ndarray:
    """Estimated ``N(h)``: ordered pairs ``(u, v)``, ``u != v``, within distance ``h``.

    Index 0 holds ``N(0) = 0``. Iteration stops when ``N(h)`` grows by less
    than ``rel_tol`` relative or no sketch changes.
    """
    n = g.n
    if n == 0:
        return np.zeros(1)
    gen = check_random_state(rng)
    L = min(64, int(math.ceil(math.log2(max(n, 2)))) + int(r))
    bit = np.minimum(gen.geometric(0.5, size=(n, K)) - 1, L - 1).astype(np.uint64)
    M = np.left_shift(np.uint64(1), bit)
    A = _simple_support(g)
    indptr, indices = A.indptr.astype(np.int64), A.indices.astype(np.int64)

    def estimate(M):
        rbar = _lowest_zero_bit(M).mean(axis=1)
        return _fm_count(rbar).sum()

    base = estimate(M)
    counts = [0.0]
    for _ in range(max_h):
        new = _propagate(M, indptr, indices)
        changed = not np.array_equal(new, M)
        M = new
        val = max(estimate(M) - base, counts[-1])
        counts.append(val)
        if not changed:
            counts.pop()
            break
        prev = counts[-2]
        if prev > 0 and (val - prev) < rel_tol * prev:
            break
    return np.asarray(counts, dtype=float)


def path_stats_from_counts(N) -> tuple[float, float, float]:
    """``(APD, EDiam, CL)`` from cumulative pair counts ``N[h]`` with ``N[0] = 0``.

    ``EDiam`` is the 90th percentile distance, linearly interpolated between
    consecutive ``h``; when 90% of pairs are already adjacent it is 1.
    """
    N = np.asarray(N, dtype=float)
    if len(N) < 2 or N[-1] <= 0:
        return 0.0, 0.0, 0.0
    total = N[-1]
    h = np.arange(len(N), dtype=float)
    dN = np.diff(N, prepend=0.0)
    apd = float((h * dN).sum() / total)
    harm = float((dN[1:] / h[1:]).sum())
    cl = total / harm if harm > 0 else 0.0
    target = 0.9 * total
    k = int(np.argmax(N >= target - 1e-9 * total))
    if k <= 1:
        ediam = 1.0
    else:
        step = N[k] - N[k - 1]
        ediam = (k - 1) + ((target - N[k - 1]) / step if step > 0 else 1.0)
    return apd, float(ediam), float(cl)


def anf_stats(g: Graph, K: int = 32, r: int = 7, rng=None) -> tuple[float, float, float]:
    """``(S_APD, S_EDiam, S_CL)`` from the approximate neighbourhood function."""
    return path_stats_from_counts(neighbourhood_function(g, K, r, rng))


def diameter_lower_bound(g: Graph, n_sources: int = 1000, rng=None) -> int:
    """Largest finite BFS distance from ``min(n_sources, n)`` random sources.

    The searches run together: each source owns one bit of a per-node bitset,
    a level ORs neighbor bitsets in, and the bound is the last level at which
    any bitset still changes.
    """
    n = g.n
    if n == 0:
        return 0
    gen = check_random_state(rng)
    k = min(int(n_sources), n)
    sources = np.sort(gen.choice(n, size=k, replace=False)) if k < n else np.arange(n)
    A = _simple_support(g)
    indptr, indices = A.indptr.astype(np.int64), A.indices.astype(np.int64)
    words = (k + 63) // 64
    # bound the bitset table to roughly 64 MB by running source groups in turn
    group = max(1, min(words, int(8e6 // max(n, 1))))
    best = 0
    for w0 in range(0, words, group):
        w1 = min(words, w0 + group)
        V = np.zeros((n, w1 - w0), dtype=np.uint64)
        idx = np.arange(w0 * 64, min(k, w1 * 64))
        np.bitwise_or.at(V, (sources[idx], idx // 64 - w0),
                         np.left_shift(np.uint64(1), (idx % 64).astype(np.uint64)))
        level = 0
        while True:
            new = _propagate(V, indptr, indices)
            if np.array_equal(new, V):
                break
            V = new
            level += 1
        best = max(best, level)
    return best


def utility_stats(g: Graph, rng=None, *, K: int = 32, r: int = 7,
                  n_sources: int = 1000) -> UtilityStats:
    """All ten statistics of ``g``."""
    gen = check_random_state(rng)
    ne, ad, md, dv, pl = degree_stats(g)
    cc = clustering_coefficient(g)
    apd, ediam, cl = anf_stats(g, K, r, gen)
    diam = diameter_lower_bound(g, n_sources, gen)
    return UtilityStats(ne, ad, md, dv, cc, pl, apd, ediam, cl, float(diam))
