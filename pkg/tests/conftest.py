import numpy as np
import pytest

from uncgraph import Graph


def random_simple_graph(rng, n, p, min_degree=0):
    """G(n, p) drawn with a numpy generator, resampled until ``min_degree`` holds."""
    while True:
        iu, iv = np.triu_indices(n, 1)
        keep = rng.random(len(iu)) < p
        g = Graph(n, np.column_stack([iu[keep], iv[keep]]))
        if g.degrees.min() >= min_degree:
            return g


@pytest.fixture
def path5():
    return Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])


@pytest.fixture
def triangle_tail():
    # triangle 0-1-2 plus a pendant edge 2-3
    return Graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])


@pytest.fixture
def karate():
    nx = pytest.importorskip("networkx")
    return nx.karate_club_graph()
