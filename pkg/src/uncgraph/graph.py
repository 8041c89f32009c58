"""Deterministic and uncertain graph containers, file I/O and possible worlds."""
from __future__ import annotations

import logging
import os
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import EmptyGraphError, GraphFormatError
from .rng import check_random_state

__all__ = [
    "Graph",
    "UncertainGraph",
    "DegreeDistribution",
    "load_edge_list",
    "save_edge_list",
    "load_uncertain",
    "save_uncertain",
    "sample_world",
    "world_probability",
    "enumerate_worlds",
    "degree_distribution",
    "poisson_binomial_pmf",
    "total_variance",
]

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-12
MAX_ENUMERATION_EDGES = 20


def _canonical(edges):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    return np.column_stack([lo, hi])


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class Graph:
    """Undirected graph on nodes ``0..n-1`` with CSR adjacency.

    Simple graphs (the default) drop selfloops and duplicate edges at
    construction. ``simple=False`` keeps them; a selfloop then appears twice in
    its node's neighbor list and adds 2 to the degree, and parallel edges count
    with multiplicity. The object is immutable.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : array-like of shape (m, 2)
        Endpoint pairs, any orientation.
    simple : bool, default=True
    original_ids : array-like of shape (n,), optional
        Ids the nodes carried in the source file.
    """

    __slots__ = ("n", "edges", "indptr", "indices", "degrees", "simple",
                 "original_ids", "_keys", "dropped")

    def __init__(self, n, edges=(), *, simple=True, original_ids=None):
        n = int(n)
        if n < 0:
            raise ValueError("node count must be non-negative")
        e = _canonical(edges)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint outside 0..n-1")
        dropped = {"selfloops": 0, "duplicates": 0}
        if simple:
            loops = e[:, 0] == e[:, 1]
            dropped["selfloops"] = int(loops.sum())
            e = e[~loops]
            keys = e[:, 0] * n + e[:, 1]
            keys, first = np.unique(keys, return_index=True)
            dropped["duplicates"] = len(e) - len(keys)
            e = e[first]
        else:
            order = np.lexsort((e[:, 1], e[:, 0]))
            e = e[order]
            keys = e[:, 0] * n + e[:, 1]
        self.n = n
        self.simple = bool(simple)
        self.edges = _frozen(e)
        self.dropped = dropped

        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        self.indices = _frozen(dst[order])
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        self.indptr = _frozen(indptr)
        self.degrees = _frozen(counts.astype(np.int64))
        if original_ids is not None:
            original_ids = _frozen(np.asarray(original_ids))
            if len(original_ids) != n:
                raise ValueError("original_ids must have length n")
        self.original_ids = original_ids
        self._keys = _frozen(keys)

    def __setattr__(self, name, value):
        if hasattr(self, "_keys"):
            raise AttributeError("Graph is immutable")
        object.__setattr__(self, name, value)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __repr__(self):
        kind = "" if self.simple else ", multigraph"
        return f"Graph(n={self.n}, m={self.m}{kind})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and self.simple == other.simple
                and np.array_equal(self.edges, other.edges))

    def __hash__(self):
        return hash((self.n, self.m, self._keys[:16].tobytes()))

    def neighbors(self, u) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def has_edges(self, u, v) -> np.ndarray:
        """Vectorized membership test for pairs ``(u[i], v[i])``."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        keys = np.minimum(u, v) * self.n + np.maximum(u, v)
        if len(self._keys) == 0:
            return np.zeros(keys.shape, dtype=bool)
        pos = np.searchsorted(self._keys, keys)
        pos = np.minimum(pos, len(self._keys) - 1)
        return self._keys[pos] == keys

    def has_edge(self, u, v) -> bool:
        return bool(self.has_edges([u], [v])[0])

    @property
    def edge_keys(self) -> np.ndarray:
        """Sorted ``u*n + v`` keys of the canonical (u <= v) edges."""
        return self._keys

    def n_selfloops(self) -> int:
        return int((self.edges[:, 0] == self.edges[:, 1]).sum())

    def simple_degrees(self) -> np.ndarray:
        """Degrees with selfloops excluded (parallel edges still counted)."""
        loops = self.edges[:, 0] == self.edges[:, 1]
        return self.degrees - 2 * np.bincount(self.edges[loops, 0], minlength=self.n)

    def adjacency(self, dtype=float) -> sp.csr_matrix:
        """Sparse symmetric adjacency; multiplicities summed, selfloops give 2."""
        data = np.ones(len(self.indices), dtype=dtype)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def simplified(self) -> "Graph":
        if self.simple:
            return self
        return Graph(self.n, self.edges, simple=True, original_ids=self.original_ids)

    def subgraph(self, nodes) -> tuple["Graph", np.ndarray]:
        """Induced subgraph relabelled to ``0..len(nodes)-1``.

        Returns the subgraph and the array mapping local ids to ids in ``self``.
        """
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        local = np.full(self.n, -1, dtype=np.int64)
        local[nodes] = np.arange(len(nodes))
        a, b = local[self.edges[:, 0]], local[self.edges[:, 1]]
        keep = (a >= 0) & (b >= 0)
        return Graph(len(nodes), np.column_stack([a[keep], b[keep]]), simple=self.simple), nodes

    def to_uncertain(self) -> "UncertainGraph":
        """Deterministic uncertain graph (every edge probability 1).

        Parallel edges become weights above 1 and a selfloop stores 2 on the
        diagonal, so the result is a relaxed uncertain adjacency.
        """
        if self.simple:
            return UncertainGraph(self.n, self.edges[:, 0], self.edges[:, 1],
                                  np.ones(self.m))
        keys, counts = np.unique(self._keys, return_counts=True)
        u, v = keys // self.n, keys % self.n
        w = counts.astype(float)
        w[u == v] *= 2.0
        return UncertainGraph(self.n, u, v, w, allows_selfloops=True)


class UncertainGraph:
    """Undirected graph whose edges carry independent existence probabilities.

    Edges are stored once with ``u <= v``. Entries at or below ``1e-12`` are
    not stored. With ``allows_selfloops=True`` the container holds a relaxed
    uncertain adjacency: diagonal entries are allowed and off-diagonal weights
    may exceed 1 (parallel-edge semantics). A diagonal entry holds the expected
    degree contribution of that node's selfloops, so row sums of the symmetric
    matrix are expected degrees.
    """

    __slots__ = ("n", "u", "v", "p", "allows_selfloops", "_keys")

    def __init__(self, n, u, v, p, *, allows_selfloops=False):
        n = int(n)
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        p = np.asarray(p, dtype=float).ravel()
        if not (len(u) == len(v) == len(p)):
            raise ValueError("u, v and p must have equal length")
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ValueError("edge endpoint outside 0..n-1")
        if np.any(~np.isfinite(p)) or np.any(p < 0):
            raise ValueError("edge probabilities must be finite and non-negative")
        if not allows_selfloops:
            if np.any(p > 1):
                raise ValueError("edge probabilities must lie in [0, 1]")
            if np.any(u == v):
                raise ValueError("selfloops require allows_selfloops=True")
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        keep = p > PROB_FLOOR
        lo, hi, p = lo[keep], hi[keep], p[keep]
        keys = lo * n + hi
        order = np.argsort(keys, kind="stable")
        keys, lo, hi, p = keys[order], lo[order], hi[order], p[order]
        if len(keys) > 1 and np.any(keys[1:] == keys[:-1]):
            raise ValueError("duplicate edge in uncertain graph")
        self.n = n
        self.u, self.v, self.p = _frozen(lo), _frozen(hi), _frozen(p)
        self.allows_selfloops = bool(allows_selfloops)
        self._keys = _frozen(keys)

    @classmethod
    def from_triples(cls, n, triples, **kw):
        t = np.asarray(triples, dtype=float).reshape(-1, 3)
        return cls(n, t[:, 0].astype(np.int64), t[:, 1].astype(np.int64), t[:, 2], **kw)

    @classmethod
    def from_matrix(cls, mat, *, allows_selfloops=None, atol=1e-12):
        """Build from a symmetric (sparse or dense) uncertain adjacency matrix."""
        m = sp.coo_matrix(mat)
        keep = (m.row <= m.col) & (np.abs(m.data) > atol)
        u, v, p = m.row[keep], m.col[keep], m.data[keep]
        if allows_selfloops is None:
            allows_selfloops = bool(np.any(u == v) or np.any(p > 1))
        return cls(m.shape[0], u, v, p, allows_selfloops=allows_selfloops)

    def __setattr__(self, name, value):
        if hasattr(self, "_keys"):
            raise AttributeError("UncertainGraph is immutable")
        object.__setattr__(self, name, value)

    def __len__(self):
        return len(self.p)

    def __repr__(self):
        return f"UncertainGraph(n={self.n}, support={len(self)}, m_expected={self.m_expected:.6g})"

    @property
    def support_size(self) -> int:
        return len(self.p)

    @property
    def m_expected(self) -> float:
        return float(self.p.sum())

    @property
    def edges(self) -> np.ndarray:
        return np.column_stack([self.u, self.v])

    def probability_of(self, u, v) -> np.ndarray:
        """Probabilities of pairs ``(u[i], v[i])``; 0 where not stored."""
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        keys = np.minimum(u, v) * self.n + np.maximum(u, v)
        out = np.zeros(keys.shape)
        if len(self._keys) == 0:
            return out
        pos = np.minimum(np.searchsorted(self._keys, keys), len(self._keys) - 1)
        hit = self._keys[pos] == keys
        out[hit] = self.p[pos[hit]]
        return out

    def expected_degrees(self) -> np.ndarray:
        off = self.u != self.v
        deg = np.bincount(self.u[off], weights=self.p[off], minlength=self.n)
        deg += np.bincount(self.v[off], weights=self.p[off], minlength=self.n)
        deg += np.bincount(self.u[~off], weights=self.p[~off], minlength=self.n)
        return deg

    def incident(self):
        """CSR view ``(indptr, nbr, prob)`` over off-diagonal entries."""
        off = self.u != self.v
        src = np.concatenate([self.u[off], self.v[off]])
        dst = np.concatenate([self.v[off], self.u[off]])
        pr = np.concatenate([self.p[off], self.p[off]])
        order = np.lexsort((dst, src))
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=indptr[1:])
        return indptr, dst[order], pr[order]

    def incident_probabilities(self, node) -> np.ndarray:
        mask = (self.u == node) | (self.v == node)
        mask &= self.u != self.v
        return self.p[mask]

    def to_matrix(self) -> sp.csr_matrix:
        off = self.u != self.v
        rows = np.concatenate([self.u, self.v[off]])
        cols = np.concatenate([self.v, self.u[off]])
        data = np.concatenate([self.p, self.p[off]])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def is_deterministic(self) -> bool:
        return bool(np.all(self.p == 1.0))


@dataclass(frozen=True)
class DegreeDistribution:
    """``probs[d]`` is the probability that ``node`` has degree ``d``."""

    node: int
    probs: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.probs)), self.probs))


# ---------------------------------------------------------------------------
# file formats


def _read_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#") or s.startswith("%"):
                continue
            yield lineno, s.split()


def _header_n(path):
    """Node count from a leading ``# n=...`` comment, if any."""
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if s and not s.startswith("#"):
                return None
            for tok in s[1:].split():
                if tok.startswith("n="):
                    return int(tok[2:])
    return None


def load_edge_list(path, *, compact=True, simple=True) -> Graph:
    """Read a whitespace separated ``u v`` edge list (SNAP style).

    Node ids are compacted to ``0..n-1`` in ascending original-id order; the
    original ids are kept in ``Graph.original_ids``. With ``compact=False`` ids
    are used as given and a ``# n=...`` header (as written by
    :func:`save_edge_list`) fixes the node count. Selfloops and duplicate
    lines are dropped and counted in ``Graph.dropped`` unless ``simple=False``,
    which reads a multigraph as written.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    raw = []
    try:
        # fast path for large clean files
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)  # empty file is reported below
            arr = np.loadtxt(path, dtype=np.int64, comments=("#", "%"), ndmin=2)
        if arr.size and arr.shape[1] != 2:
            raise ValueError
        raw = arr.reshape(-1, 2)
    except ValueError:
        rows = []
        for lineno, tok in _read_lines(path):
            if len(tok) < 2:
                raise GraphFormatError(f"expected two node ids, got {len(tok)} token(s)", path, lineno)
            try:
                rows.append((int(tok[0]), int(tok[1])))
            except ValueError:
                raise GraphFormatError(f"non-integer node id in {' '.join(tok)!r}", path, lineno) from None
            if len(tok) > 2:
                raise GraphFormatError(f"expected two node ids, got {len(tok)} tokens", path, lineno)
        raw = np.asarray(rows, dtype=np.int64).reshape(-1, 2)
    if len(raw) == 0:
        n = None if compact else _header_n(path)
        if n is None:
            raise EmptyGraphError(f"{path}: no edges found")
        return Graph(n, simple=simple)
    if compact:
        ids, inv = np.unique(raw, return_inverse=True)
        edges = inv.reshape(-1, 2)
        g = Graph(len(ids), edges, simple=simple, original_ids=ids)
    else:
        n = max(int(raw.max()) + 1, _header_n(path) or 0)
        g = Graph(n, raw, simple=simple)
    n_drop = g.dropped["selfloops"] + g.dropped["duplicates"]
    if n_drop:
        logger.warning("%s: dropped %d selfloop and %d duplicate line(s)", path,
                       g.dropped["selfloops"], g.dropped["duplicates"])
    return g


def save_edge_list(g: Graph, path, *, original_ids=False):
    e = g.edges
    if original_ids and g.original_ids is not None:
        e = g.original_ids[e]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={g.n} m={g.m}\n")
        np.savetxt(fh, e, fmt="%d")


def save_uncertain(g: UncertainGraph, path):
    """Write ``u v p`` lines with 17 significant digits (lossless)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={g.n} support={len(g)}"
                 f"{' selfloops' if g.allows_selfloops else ''}\n")
        for u, v, p in zip(g.u.tolist(), g.v.tolist(), g.p.tolist()):
            fh.write(f"{u} {v} {p:.17g}\n")


def load_uncertain(path, n=None) -> UncertainGraph:
    n_header = None
    relaxed = False
    us, vs, ps = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                for tok in s[1:].split():
                    if tok.startswith("n="):
                        n_header = int(tok[2:])
                    elif tok == "selfloops":
                        relaxed = True
                continue
            tok = s.split()
            if len(tok) != 3:
                raise GraphFormatError(f"expected 'u v p', got {s!r}", path, lineno)
            try:
                u, v, p = int(tok[0]), int(tok[1]), float(tok[2])
            except ValueError:
                raise GraphFormatError(f"unparsable line {s!r}", path, lineno) from None
            if not relaxed and not (0.0 <= p <= 1.0):
                raise GraphFormatError(f"probability {p} outside [0, 1]", path, lineno)
            if relaxed and p < 0:
                raise GraphFormatError(f"negative weight {p}", path, lineno)
            us.append(u)
            vs.append(v)
            ps.append(p)
    if n is None:
        n = n_header
    if n is None:
        n = (max(max(us), max(vs)) + 1) if us else 0
    return UncertainGraph(n, us, vs, ps, allows_selfloops=relaxed)


# ---------------------------------------------------------------------------
# possible worlds


def _relaxed_weights(g: UncertainGraph) -> np.ndarray:
    """Expected multiplicity of each stored entry (a selfloop adds 2 to the degree)."""
    return np.where(g.u == g.v, g.p / 2.0, g.p)


def sample_world(g: UncertainGraph, rng=None) -> Graph:
    """Draw one possible world; each edge is kept independently with its probability.

    A relaxed graph yields a multigraph: an entry of expected multiplicity
    ``w`` becomes ``floor(w)`` certain copies plus one more with probability
    ``w - floor(w)``. Diagonal entries hold expected degree, so they give
    ``w = p / 2`` selfloops. Expected degrees are preserved exactly.
    """
    gen = check_random_state(rng)
    draws = gen.random(len(g.p))
    if not g.allows_selfloops:
        keep = draws < g.p
        return Graph(g.n, np.column_stack([g.u[keep], g.v[keep]]))
    w = _relaxed_weights(g)
    base = np.floor(w)
    count = (base + (draws < w - base)).astype(np.int64)
    pairs = np.column_stack([np.repeat(g.u, count), np.repeat(g.v, count)])
    return Graph(g.n, pairs, simple=False)


def world_probability(g: UncertainGraph, world: Graph) -> float:
    """Probability of ``world`` under independent edges."""
    if world.n != g.n:
        raise ValueError("world and uncertain graph have different node counts")
    present = np.isin(g._keys, world.edge_keys, assume_unique=True)
    if int(present.sum()) != world.m:
        raise ValueError("world contains an edge that is not in the uncertain graph's support")
    p = g.p
    logp = np.log(p[present]).sum()
    q = 1.0 - p[~present]
    if np.any(q <= 0):
        return 0.0
    return float(np.exp(logp + np.log(q).sum()))


def enumerate_worlds(g: UncertainGraph) -> list[tuple[Graph, float]]:
    """All ``2**support`` possible worlds with their probabilities."""
    k = len(g)
    if k > MAX_ENUMERATION_EDGES:
        raise ValueError(f"refusing to enumerate 2**{k} worlds (limit {MAX_ENUMERATION_EDGES} edges)")
    if g.allows_selfloops:
        raise ValueError("possible worlds are defined for proper uncertain graphs only")
    masks = ((np.arange(2 ** k)[:, None] >> np.arange(k)) & 1).astype(bool)
    probs = np.where(masks, g.p, 1.0 - g.p).prod(axis=1)
    edges = g.edges
    return [(Graph(g.n, edges[mask]), float(pr)) for mask, pr in zip(masks, probs)]


def poisson_binomial_pmf(probs) -> np.ndarray:
    """PMF of a sum of independent Bernoulli variables, by sequential convolution."""
    pmf = np.ones(1)
    for p in np.asarray(probs, dtype=float):
        nxt = np.empty(len(pmf) + 1)
        nxt[:-1] = pmf * (1.0 - p)
        nxt[-1] = 0.0
        nxt[1:] += pmf * p
        pmf = nxt
    return pmf


def degree_distribution(g: UncertainGraph, u: int) -> DegreeDistribution:
    return DegreeDistribution(int(u), poisson_binomial_pmf(g.incident_probabilities(u)))


def total_variance(g) -> float:
    """Sum of ``p (1 - p)`` over stored edges (0 for deterministic graphs).

    For a relaxed graph the sum follows :func:`sample_world`: only the
    fractional part of each expected multiplicity is random, so it is the
    variance of the multiset edit distance.
    """
    if isinstance(g, Graph):
        return 0.0
    p = g.p
    if g.allows_selfloops:
        w = _relaxed_weights(g)
        p = w - np.floor(w)
    return float(np.sum(p * (1.0 - p)))
