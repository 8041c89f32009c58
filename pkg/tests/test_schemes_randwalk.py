import numpy as np
import pytest

from uncgraph import Graph
from uncgraph.exceptions import ParameterError
from uncgraph.graph import sample_world, total_variance
from uncgraph.rng import RngStream
from uncgraph.schemes.randwalk import (
    edge_adding_matrix,
    randwalk,
    randwalk_matrix,
    randwalk_mod,
    tv_upper_bound_rw,
)
from uncgraph.walk import walk_matrix

from conftest import random_simple_graph


@pytest.fixture
def small():
    # mixed degrees 1..4 and an odd cycle so walks reach every node parity
    return Graph(7, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (5, 6), (1, 4)])


def _mc_adjacency(g, t, alpha, n_runs, seed):
    gen = np.random.default_rng(seed)
    acc = np.zeros((n_runs, g.n, g.n))
    for i in range(n_runs):
        acc[i] = randwalk_mod(g, t, alpha, gen).adjacency().toarray()
    return acc.mean(axis=0), acc.std(axis=0) / np.sqrt(n_runs)


@pytest.mark.parametrize("t,alpha", [(2, 0.5), (2, 0.9), (3, 0.3), (4, 0.9)])
def test_expected_matrix_matches_procedure(small, t, alpha):
    mean, se = _mc_adjacency(small, t, alpha, 10_000, seed=t * 10 + int(alpha * 10))
    M = randwalk_matrix(small, t, alpha).to_matrix().toarray()
    # five standard errors per entry, plus a floor for entries that are always 0
    assert np.all(np.abs(mean - M) <= 5 * se + 2e-3)


def test_matrix_special_cases(small):
    # alpha = 0.5: A P^(t-1)
    for t in (2, 3):
        M = randwalk_matrix(small, t, 0.5).to_matrix().toarray()
        np.testing.assert_allclose(M, walk_matrix(small, t).matrix.toarray(), atol=1e-12)
    # t = 1: A o (Q + Q^T)
    Q = edge_adding_matrix(small, 0.8).toarray()
    M1 = randwalk_matrix(small, 1, 0.8).to_matrix().toarray()
    np.testing.assert_allclose(M1, Q + Q.T, atol=1e-12)


def test_expected_degrees_preserved_only_at_half(small):
    g = small
    for t in (2, 3, 5):
        d = randwalk_matrix(g, t, 0.5).expected_degrees()
        np.testing.assert_allclose(d, g.degrees, atol=1e-10)
    d = randwalk_matrix(g, 3, 0.9).expected_degrees()
    assert np.abs(d - g.degrees).max() > 0.05


def test_edge_adding_matrix_rows(small):
    Q = edge_adding_matrix(small, 0.7).toarray()
    deg = small.degrees
    # each row adds half of the node's degree in expectation
    np.testing.assert_allclose(Q.sum(axis=1), 0.5 * deg)
    first = small.indices[small.indptr[:-1]]
    for u in np.flatnonzero(deg >= 2):
        assert Q[u, first[u]] == pytest.approx(0.7)
    assert Q[6, 5] == 0.5  # degree-1 node


def test_alpha_range_checked():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    with pytest.raises(ParameterError):
        edge_adding_matrix(g, 0.0)
    with pytest.raises(ParameterError):
        randwalk_mod(g, 2, 1.1, 0)
    star = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    # hub of degree 4: (2 - alpha) / 3 stays in [0, 1] for alpha in (0, 1]
    edge_adding_matrix(star, 1.0)
    with pytest.raises(ParameterError):
        randwalk_mod(g, 1, 0.5, 0)


def test_randwalk_mod_output_and_reproducibility(small):
    a = randwalk_mod(small, 3, 0.5, RngStream(4))
    b = randwalk_mod(small, 3, 0.5, RngStream(4))
    assert not a.simple
    assert a == b
    assert a.m <= small.m * 2


def test_randwalk_output_is_simple(small):
    rng = np.random.default_rng(0)
    for _ in range(50):
        out = randwalk(small, 3, 100, rng)
        assert out.simple and out.n_selfloops() == 0
        assert len(np.unique(out.edge_keys)) == out.m
    assert randwalk(small, 2, 10, 7) == randwalk(small, 2, 10, 7)
    with pytest.raises(ParameterError):
        randwalk(small, 1)


def test_randwalk_edge_count_near_m():
    rng = np.random.default_rng(1)
    g = random_simple_graph(rng, 200, 0.05, min_degree=2)
    counts = [randwalk(g, 2, 100, rng).m for _ in range(10)]
    # first slot always fires, the others at (0.5 d - 1)/(d - 1): about m in total
    assert np.mean(counts) == pytest.approx(g.m, rel=0.1)


def test_tv_bound_holds_for_matrix_form():
    rng = np.random.default_rng(2)
    for _ in range(5):
        g = random_simple_graph(rng, 25, 0.2, min_degree=2)
        for t in (2, 3, 4):
            tv = total_variance(randwalk_matrix(g, t, 0.5))
            bound = tv_upper_bound_rw(g, t)
            assert 0 <= tv <= bound + 1e-9


def test_world_sampling_from_matrix_preserves_degrees_on_average(small):
    ug = randwalk_matrix(small, 2, 0.5)
    gen = np.random.default_rng(3)
    d = np.mean([sample_world(ug, gen).degrees for _ in range(20_000)], axis=0)
    np.testing.assert_allclose(d, small.degrees, atol=0.05)
