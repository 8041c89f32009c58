import numpy as np
import pytest

from uncgraph import Graph, UncertainGraph
from uncgraph.exceptions import ParameterError
from uncgraph.generators import generate_er
from uncgraph.maxvar.partition import PartitionPlan
from uncgraph.rng import RngStream
from uncgraph.schemes.mixture import mixture, partition_combinator
from uncgraph.schemes.obfuscation import obfuscate_kobf
from uncgraph.schemes.randwalk import randwalk_mod
from uncgraph.schemes.switch import apply_switch, edge_switch, switch_is_valid


def test_switch_validity_rules():
    g = Graph(4, [(0, 1), (2, 3)])
    keys = set(g.edge_keys.tolist())
    assert switch_is_valid(keys, 4, 0, 1, 2, 3)
    assert not switch_is_valid(keys, 4, 0, 1, 1, 3)  # shared endpoint
    g2 = Graph(4, [(0, 1), (2, 3), (0, 3)])
    keys2 = set(g2.edge_keys.tolist())
    assert not switch_is_valid(keys2, 4, 0, 1, 2, 3)  # (0, 3) already present
    g3 = Graph(4, [(0, 1), (2, 3), (0, 2)])
    keys3 = set(g3.edge_keys.tolist())
    assert switch_is_valid(keys3, 4, 0, 1, 2, 3)
    assert not switch_is_valid(keys3, 4, 0, 1, 2, 3, strict=True)


def test_apply_switch():
    g = Graph(4, [(0, 1), (2, 3)])
    out = apply_switch(g, 0, 1)
    assert out == Graph(4, [(0, 3), (1, 2)])
    assert apply_switch(g, 0, 1, flip=True) == Graph(4, [(0, 2), (1, 3)])
    with pytest.raises(ValueError):
        apply_switch(Graph(3, [(0, 1), (1, 2)]), 0, 1)


def test_edge_switch_preserves_degrees():
    g = generate_er(500, 6.0, RngStream(0))
    out, done = edge_switch(g, 2000, RngStream(1), return_count=True)
    assert done == 2000
    np.testing.assert_array_equal(out.degrees, g.degrees)
    assert out.simple and len(np.unique(out.edge_keys)) == out.m
    assert out.n_selfloops() == 0
    assert len(np.setdiff1d(out.edge_keys, g.edge_keys)) > 0.5 * g.m
    assert edge_switch(g, 50, 3) == edge_switch(g, 50, 3)


def test_edge_switch_stops_when_stuck(caplog):
    # K4 has no valid switch
    k4 = Graph(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    out, done = edge_switch(k4, 5, 0, return_count=True)
    assert done == 0 and out == k4
    assert "stopped" in caplog.text
    assert edge_switch(k4, 0, 0) == k4
    with pytest.raises(ParameterError):
        edge_switch(k4, -1)


def test_mixture_values():
    g0 = Graph(4, [(0, 1), (1, 2)])
    g = Graph(4, [(1, 2), (2, 3)])
    ug = mixture(g0, g, 0.3)
    assert ug.probability_of(1, 2) == pytest.approx(1.0)
    assert ug.probability_of(0, 1) == pytest.approx(0.7)
    assert ug.probability_of(2, 3) == pytest.approx(0.3)
    np.testing.assert_allclose(ug.expected_degrees(), [0.7, 1.7, 1.3, 0.3])
    assert mixture(g0, g, 0.0).is_deterministic()
    with pytest.raises(ParameterError):
        mixture(g0, g, 1.5)
    with pytest.raises(ValueError):
        mixture(g0, Graph(5, []), 0.5)


def test_mixture_with_multigraph_is_relaxed():
    g0 = generate_er(60, 4.0, RngStream(2))
    g = randwalk_mod(g0, 2, 0.5, RngStream(3))
    ug = mixture(g0, g, 0.5)
    assert ug.allows_selfloops
    exp = 0.5 * g0.degrees + 0.5 * g.degrees
    np.testing.assert_allclose(ug.expected_degrees(), exp)


def test_mixture_with_uncertain_input():
    g0 = generate_er(80, 4.0, RngStream(4))
    ug = obfuscate_kobf(g0, 0.1, None, RngStream(5))
    mix = mixture(g0, ug, 0.25)
    np.testing.assert_allclose(mix.expected_degrees(),
                               0.75 * g0.degrees + 0.25 * ug.expected_degrees())


def test_partition_combinator_single_part_is_plain_call():
    g0 = generate_er(100, 4.0, RngStream(6))

    def inner(g, rng):
        return obfuscate_kobf(g, 0.1, None, rng)

    a = partition_combinator(g0, inner, 1, RngStream(7).generator())
    b = inner(g0, RngStream(7).generator())
    np.testing.assert_array_equal(a.p, b.p)


def test_partition_combinator_keeps_cut_edges():
    g0 = generate_er(120, 4.0, RngStream(8))
    assign = np.arange(g0.n) % 3
    plan = PartitionPlan.from_assignment(g0, assign, 3)

    def inner(g, rng):
        return obfuscate_kobf(g, 0.1, None, rng)

    ug = partition_combinator(g0, inner, 3, 9, partition=assign)
    cut = plan.cut_edges
    np.testing.assert_array_equal(ug.probability_of(cut[:, 0], cut[:, 1]), 1.0)
    # no uncertain pair crosses parts
    uncertain = ug.p < 1
    assert np.all(assign[ug.u[uncertain]] == assign[ug.v[uncertain]])
    # reproducible from an integer seed
    again = partition_combinator(g0, inner, 3, 9, partition=plan)
    np.testing.assert_array_equal(again.p, ug.p)
    assert isinstance(again, UncertainGraph)
    with pytest.raises(ParameterError):
        partition_combinator(g0, inner, 0)
