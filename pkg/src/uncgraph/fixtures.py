"""Small worked examples used by the self-checks and the test suite."""
from __future__ import annotations

import numpy as np

from .graph import Graph, UncertainGraph

__all__ = [
    "toy_uncertain",
    "TOY_TRUE_DEGREES",
    "TOY_DEGREE_TABLE",
    "TOY_COLUMN_ENTROPY",
    "toy_signatures",
    "square_cycle",
]

# The reference example gives only v1's incident probabilities (0.8, 0.3, 0.9).
# The remaining edges were solved from the per-node degree distributions.
_TOY_EDGES = [(0, 2, 0.8), (0, 1, 0.3), (0, 3, 0.9), (1, 2, 0.7), (2, 3, 0.4)]

#: True degrees of v1..v4 in the underlying deterministic graph.
TOY_TRUE_DEGREES = np.array([2, 1, 2, 1])

#: Reference degree distributions of v1..v4 (columns d = 0..3), 3 decimals.
TOY_DEGREE_TABLE = np.array([
    [0.014, 0.188, 0.582, 0.216],
    [0.210, 0.580, 0.210, 0.000],
    [0.036, 0.252, 0.488, 0.224],
    [0.060, 0.580, 0.360, 0.000],
])

#: Reference entropies (bits) of the node-normalized columns d = 0..3.
TOY_COLUMN_ENTROPY = np.array([1.40, 1.84, 1.91, 0.99])


def toy_uncertain() -> UncertainGraph:
    """Four-node uncertain graph with five probabilistic edges."""
    return UncertainGraph.from_triples(4, _TOY_EDGES)


def toy_signatures():
    """``(sig_true, sig_out)`` for eight nodes.

    True classes are {1,2,3}, {4,5}, {6,7,8}. Output classes are {1,2,6},
    {4,7}, {3,8}, {5}. The output score is 5/3 and the true graph scores 3.
    """
    sig_true = [1, 1, 1, 2, 2, 3, 3, 3]
    sig_out = [1, 1, 3, 2, 4, 1, 2, 3]
    return sig_true, sig_out


def square_cycle():
    """4-cycle with both diagonals as potential edges.

    Returns ``(graph, pairs, degrees)``; the degree QP optimum puts 2/3 on
    all six pairs.
    """
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    pairs = np.vstack([g.edges, [[0, 2], [1, 3]]])
    return g, pairs, g.degrees.astype(float)
