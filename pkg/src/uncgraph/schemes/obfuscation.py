"""(k, eps)-obfuscation with a fixed truncated-normal noise level."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from ..generators import uniform_pairs
from ..graph import Graph, UncertainGraph, poisson_binomial_pmf
from ..rng import check_random_state

__all__ = [
    "TruncatedNormal",
    "sample_truncated_normal",
    "truncated_normal_moments",
    "obfuscate_kobf",
    "kobf_epsilon",
    "degree_entropy_columns",
    "epsilon_from_entropies",
    "ColumnEntropy",
    "uncertain_column_entropy",
]


@dataclass(frozen=True)
class TruncatedNormal:
    """Normal(0, sigma) restricted to [0, 1]."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    @property
    def normalizer(self) -> float:
        # 1 / P(0 <= X <= 1) for X ~ N(0, sigma)
        return 1.0 / (0.5 * erf(1.0 / (self.sigma * math.sqrt(2.0))))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        s = self.sigma
        dens = self.normalizer * np.exp(-x * x / (2 * s * s)) / (s * math.sqrt(2 * math.pi))
        return np.where((x >= 0) & (x <= 1), dens, 0.0)


def sample_truncated_normal(d: TruncatedNormal | float, rng=None, size=None):
    """Rejection sampling from Normal(0, sigma) into [0, 1]."""
    if not isinstance(d, TruncatedNormal):
        d = TruncatedNormal(float(d))
    gen = check_random_state(rng)
    n = 1 if size is None else int(np.prod(size))
    accept_rate = 1.0 / d.normalizer
    out = np.empty(0)
    while len(out) < n:
        batch = int((n - len(out)) / accept_rate * 1.2) + 16
        x = gen.normal(0.0, d.sigma, size=batch)
        x = x[(x >= 0.0) & (x <= 1.0)]
        out = np.concatenate([out, x[: n - len(out)]])
    if size is None:
        return float(out[0])
    return out.reshape(size)


def truncated_normal_moments(sigma: float) -> tuple[float, float]:
    """Closed-form ``(E[r], E[r^2])`` for ``r ~ TruncatedNormal(sigma)``."""
    d = TruncatedNormal(sigma)
    c = d.normalizer
    tail = math.exp(-1.0 / (2.0 * sigma * sigma))
    base = c * sigma / math.sqrt(2.0 * math.pi)
    m1 = base * (1.0 - tail)
    m2 = sigma * sigma - base * tail
    return m1, m2


def obfuscate_kobf(g: Graph, sigma: float, n_potential=None, rng=None) -> UncertainGraph:
    """Existing edges get ``1 - r``, ``n_potential`` uniform non-edges get ``r``.

    ``r`` is drawn independently per edge from the truncated normal; the
    default ``n_potential`` is ``m``.
    """
    gen = check_random_state(rng)
    n_potential = g.m if n_potential is None else int(n_potential)
    if n_potential < 0:
        raise ValueError("n_potential must be non-negative")
    non_edges = g.n * (g.n - 1) // 2 - g.m
    if n_potential > non_edges:
        raise ValueError(f"n_potential={n_potential} exceeds the {non_edges} available non-edges")
    pot = uniform_pairs(g.n, n_potential, gen, exclude_keys=g.edge_keys)
    r_exist = sample_truncated_normal(sigma, gen, size=g.m)
    r_pot = sample_truncated_normal(sigma, gen, size=n_potential)
    u = np.concatenate([g.edges[:, 0], pot[:, 0]])
    v = np.concatenate([g.edges[:, 1], pot[:, 1]])
    p = np.concatenate([1.0 - r_exist, r_pot])
    # keep the full support even where a draw lands exactly on 0 or 1
    p = np.clip(p, 2e-12, 1.0)
    return UncertainGraph(g.n, u, v, p)


class ColumnEntropy:
    """Streaming entropy of degree columns normalized over nodes.

    Feeding node degree distributions one at a time keeps memory at one
    vector per degree value: with ``S_d = sum_v x_vd`` and
    ``T_d = sum_v x_vd log2 x_vd``, column ``d`` has entropy
    ``log2 S_d - T_d / S_d``.
    """

    def __init__(self, width=1):
        self.S = np.zeros(width)
        self.T = np.zeros(width)

    def _grow(self, width):
        if width > len(self.S):
            pad = width - len(self.S)
            self.S = np.concatenate([self.S, np.zeros(pad)])
            self.T = np.concatenate([self.T, np.zeros(pad)])

    def add(self, pmf):
        pmf = np.asarray(pmf, dtype=float)
        self._grow(len(pmf))
        pos = pmf > 0
        self.S[: len(pmf)] += pmf
        self.T[: len(pmf)][pos] += pmf[pos] * np.log2(pmf[pos])

    def add_counts(self, degrees, weights):
        """Bulk add of sparse entries ``x[v, degrees[i]] = weights[i]``, one per (node, degree)."""
        degrees = np.asarray(degrees, dtype=np.int64)
        weights = np.asarray(weights, dtype=float)
        if len(degrees) == 0:
            return
        self._grow(int(degrees.max()) + 1)
        np.add.at(self.S, degrees, weights)
        pos = weights > 0
        np.add.at(self.T, degrees[pos], weights[pos] * np.log2(weights[pos]))

    def entropies(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(self.S > 0, self.S, 1.0)
            h = np.where(self.S > 0, np.log2(s) - self.T / s, 0.0)
        return np.maximum(h, 0.0)


def degree_entropy_columns(dists) -> np.ndarray:
    """Entropy (bits) of each column of ``dists[v, d]`` after normalizing it over nodes."""
    acc = ColumnEntropy()
    for row in np.atleast_2d(np.asarray(dists, dtype=float)):
        acc.add(row)
    return acc.entropies()


def epsilon_from_entropies(h, true_degrees, k) -> float:
    """Fraction of nodes whose true-degree column has entropy below ``log2 k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    true_degrees = np.asarray(true_degrees, dtype=np.int64)
    if len(true_degrees) == 0:
        return 0.0
    h = np.asarray(h)
    inside = true_degrees < len(h)
    h_node = np.zeros(len(true_degrees))
    h_node[inside] = h[true_degrees[inside]]
    # slack so exact powers of two (k identical nodes) count as obfuscated
    ok = h_node >= math.log2(k) - 1e-9
    return float(1.0 - ok.mean())


def uncertain_column_entropy(g: UncertainGraph) -> ColumnEntropy:
    indptr, _, prob = g.incident()
    acc = ColumnEntropy(int(np.diff(indptr).max()) + 1 if g.n else 1)
    for u in range(g.n):
        acc.add(poisson_binomial_pmf(prob[indptr[u]:indptr[u + 1]]))
    return acc


def kobf_epsilon(g: UncertainGraph, k, true_degrees=None) -> float:
    """Smallest ``eps`` such that ``g`` k-obfuscates ``(1 - eps) n`` nodes by degree.

    ``true_degrees`` are the node degrees in the original graph; when omitted
    the rounded expected degrees stand in for them.
    """
    if true_degrees is None:
        true_degrees = np.rint(g.expected_degrees()).astype(np.int64)
    return epsilon_from_entropies(uncertain_column_entropy(g).entropies(), true_degrees, k)
