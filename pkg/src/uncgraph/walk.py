"""Random-walk transition matrix and the walk products ``A P^(t-1)``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import BudgetExceededError
from .graph import Graph

__all__ = [
    "TransitionMatrix",
    "UncertainAdjacency",
    "build_prw",
    "walk_matrix",
    "limit_entry",
    "selfloop_mass",
    "limit_multiedge_count",
    "analytic_selfloops",
    "zeta",
    "DEFAULT_NNZ_BUDGET",
]

DEFAULT_NNZ_BUDGET = 200_000_000


@dataclass(frozen=True)
class TransitionMatrix:
    """Right-stochastic ``P(i, j) = 1/d_i`` on edges; isolated rows are empty."""

    matrix: sp.csr_matrix

    @property
    def n(self):
        return self.matrix.shape[0]

    def row(self, u):
        lo, hi = self.matrix.indptr[u], self.matrix.indptr[u + 1]
        return self.matrix.indices[lo:hi], self.matrix.data[lo:hi]

    def row_sums(self):
        return np.asarray(self.matrix.sum(axis=1)).ravel()


@dataclass(frozen=True)
class UncertainAdjacency:
    """``B = A P^(t-1)``; symmetric, row sums equal degrees, entries may exceed 1."""

    matrix: sp.csr_matrix
    t: int

    @property
    def nnz(self):
        return self.matrix.nnz

    def row_sums(self):
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def asymmetry(self):
        d = self.matrix - self.matrix.T
        return float(abs(d).max()) if d.nnz else 0.0

    def save(self, path):
        """Dump as ``i j value`` triples."""
        coo = self.matrix.tocoo()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# n={self.matrix.shape[0]} t={self.t} nnz={coo.nnz}\n")
            for i, j, x in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
                fh.write(f"{i} {j} {x:.17g}\n")


def build_prw(g: Graph) -> TransitionMatrix:
    deg = g.degrees.astype(float)
    inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
    data = np.repeat(inv, g.degrees)
    mat = sp.csr_matrix((data, g.indices.copy(), g.indptr.copy()), shape=(g.n, g.n))
    mat.sum_duplicates()
    return TransitionMatrix(mat)


def _projected_nnz(structure: sp.csr_matrix, deg: np.ndarray) -> int:
    # upper bound on nnz(M @ P): each stored (i, k) contributes at most d_k columns
    return int(deg[structure.indices].sum())


def walk_matrix(g: Graph, t: int, *, budget: int = DEFAULT_NNZ_BUDGET,
                prw: TransitionMatrix | None = None) -> UncertainAdjacency:
    """Exact sparse product ``B^(t) = A P_RW^(t-1)``.

    Raises :class:`BudgetExceededError` before any product whose projected
    non-zero count exceeds ``budget``; use the procedural RandWalk schemes
    instead on such graphs.
    """
    t = int(t)
    if t < 1:
        raise ValueError("walk length t must be >= 1")
    A = g.adjacency()
    if A.nnz > budget:
        raise BudgetExceededError(f"adjacency alone has {A.nnz} non-zeros (budget {budget})")
    P = (prw or build_prw(g)).matrix
    deg = g.degrees
    B = A.tocsr()
    for _ in range(t - 1):
        proj = _projected_nnz(B, deg)
        if proj > budget:
            raise BudgetExceededError(
                f"B^(t) would hold up to {proj} non-zeros (budget {budget}); "
                "use the procedural RandWalk-mod sampler for this graph")
        B = (B @ P).tocsr()
        B.sum_duplicates()
        B.sort_indices()
    return UncertainAdjacency(B, t)


def limit_entry(g: Graph, i, j) -> float:
    """``B^inf(i, j) = d_i d_j / 2m``."""
    if g.m == 0:
        raise ValueError("limit undefined for a graph without edges")
    return float(g.degrees[i]) * float(g.degrees[j]) / (2.0 * g.m)


def selfloop_mass(g: Graph) -> float:
    """Trace of ``B^inf``: ``sum_i d_i^2 / 2m``."""
    if g.m == 0:
        raise ValueError("limit undefined for a graph without edges")
    d = g.degrees.astype(float)
    return float(np.dot(d, d) / (2.0 * g.m))


def limit_multiedge_count(g: Graph) -> int:
    """Number of ordered off-diagonal pairs with ``d_i d_j / 2m > 1``."""
    if g.m == 0:
        raise ValueError("limit undefined for a graph without edges")
    d = np.sort(g.degrees.astype(np.int64))
    thresh = 2 * g.m
    # pairs (i, j), i != j, with d_i * d_j > 2m
    total = 0
    for k in np.nonzero(d * d[-1] > thresh)[0]:
        need = thresh // d[k] + 1 if d[k] > 0 else None
        if need is None:
            continue
        cnt = len(d) - np.searchsorted(d, need)
        if d[k] * d[k] > thresh:
            cnt -= 1
        total += cnt
    return int(total)


_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6)


def zeta(s: float, *, terms: int = 1000) -> float:
    """Riemann zeta for real ``s > 1``: partial sum plus Euler-Maclaurin tail."""
    if s <= 1:
        raise ValueError("zeta(s) is defined here only for s > 1")
    N = int(terms)
    k = np.arange(1, N, dtype=float)
    head = float(np.sum(k ** -s))
    # f(x) = x^-s; tail = int_N^inf f + f(N)/2 - sum B_2j/(2j)! f^(2j-1)(N)
    tail = N ** (1 - s) / (s - 1) + 0.5 * N ** -s
    for j, b in enumerate(_BERNOULLI, start=1):
        # f^(2j-1)(N) = -(s)(s+1)...(s+2j-2) N^(-s-2j+1)
        rising = math.prod(s + i for i in range(2 * j - 1))
        deriv = -rising * N ** (-s - 2 * j + 1)
        tail -= b / math.factorial(2 * j) * deriv
    return head + tail


def analytic_selfloops(model: str, param: float) -> float:
    """Expected trace of ``B^inf`` under a random-graph model.

    ``model="powerlaw"`` with exponent ``gamma > 3`` gives
    ``zeta(gamma-2) / zeta(gamma-1)``; ``model="er"`` with mean degree
    ``lambda > 0`` gives ``lambda + 1``.
    """
    if model == "er":
        if param <= 0:
            raise ValueError("ER mean degree must be positive")
        return float(param) + 1.0
    if model == "powerlaw":
        if param <= 3:
            raise ValueError(f"gamma={param}: zeta(gamma-2) needs gamma-2 > 1")
        return zeta(param - 2) / zeta(param - 1)
    raise ValueError(f"unknown model {model!r}")
