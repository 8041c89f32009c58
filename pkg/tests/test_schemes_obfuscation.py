import math

import numpy as np
import pytest
from scipy import integrate

from uncgraph.fixtures import TOY_COLUMN_ENTROPY, TOY_DEGREE_TABLE, TOY_TRUE_DEGREES, toy_uncertain
from uncgraph.generators import generate_er
from uncgraph.graph import degree_distribution, total_variance
from uncgraph.rng import RngStream
from uncgraph.schemes.obfuscation import (
    ColumnEntropy,
    TruncatedNormal,
    degree_entropy_columns,
    epsilon_from_entropies,
    kobf_epsilon,
    obfuscate_kobf,
    sample_truncated_normal,
    truncated_normal_moments,
)

# Frozen from adaptive quadrature of the normalized density on [0, 1].
QUAD_MEAN_SIGMA_001 = 0.0079788
QUAD_GAP_SIGMA_01 = 0.06979  # E[r] - E[r^2] at sigma = 0.1


def _quad_moments(sigma):
    d = TruncatedNormal(sigma)
    pts = [0.0, min(1.0, 10 * sigma), 1.0]
    m = [sum(integrate.quad(lambda x, k=k: x ** k * float(d.pdf(x)), a, b, epsabs=1e-14)[0]
             for a, b in zip(pts[:-1], pts[1:])) for k in (0, 1, 2)]
    return m


@pytest.mark.parametrize("sigma", [0.01, 0.1, 0.3, 1.0, 3.0])
def test_density_integrates_to_one_and_moments_match_quadrature(sigma):
    mass, m1, m2 = _quad_moments(sigma)
    assert mass == pytest.approx(1.0, abs=1e-9)
    c1, c2 = truncated_normal_moments(sigma)
    assert c1 == pytest.approx(m1, rel=1e-8)
    assert c2 == pytest.approx(m2, rel=1e-8)


def test_frozen_moment_values():
    m1, _ = truncated_normal_moments(0.01)
    assert m1 == pytest.approx(QUAD_MEAN_SIGMA_001, abs=5e-8)
    m1, m2 = truncated_normal_moments(0.1)
    assert m1 - m2 == pytest.approx(QUAD_GAP_SIGMA_01, abs=5e-6)


def test_normalizer_near_two_for_small_sigma():
    assert TruncatedNormal(0.01).normalizer == pytest.approx(2.0)
    with pytest.raises(ValueError):
        TruncatedNormal(0.0)


def test_sampler_moments():
    x = sample_truncated_normal(0.1, np.random.default_rng(0), size=200_000)
    assert x.min() >= 0 and x.max() <= 1
    m1, m2 = truncated_normal_moments(0.1)
    se = x.std() / math.sqrt(len(x))
    assert abs(x.mean() - m1) < 5 * se
    assert isinstance(sample_truncated_normal(0.1, 1), float)
    assert sample_truncated_normal(0.5, 2, size=(3, 4)).shape == (3, 4)


def test_kobf_structure():
    g = generate_er(300, 4.0, RngStream(1))
    ug = obfuscate_kobf(g, 0.05, None, RngStream(2))
    assert ug.support_size == 2 * g.m
    p_exist = ug.probability_of(g.edges[:, 0], g.edges[:, 1])
    assert p_exist.min() >= 0 and p_exist.min() > 0.5
    pairs = {tuple(e) for e in ug.edges.tolist()}
    assert len(pairs) == ug.support_size
    assert pairs >= {tuple(e) for e in g.edges.tolist()}
    pot = ug.p[~g.has_edges(ug.edges[:, 0], ug.edges[:, 1])]
    assert len(pot) == g.m and pot.max() < 0.5


def test_kobf_tv_matches_moments():
    g = generate_er(3000, 5.0, RngStream(3))
    m1, m2 = truncated_normal_moments(0.1)
    tv = total_variance(obfuscate_kobf(g, 0.1, None, RngStream(4)))
    assert tv == pytest.approx(2 * g.m * (m1 - m2), rel=0.03)


def test_kobf_reproducible_and_bounds():
    g = generate_er(100, 3.0, RngStream(5))
    a = obfuscate_kobf(g, 0.1, 50, 9)
    b = obfuscate_kobf(g, 0.1, 50, 9)
    np.testing.assert_array_equal(a.p, b.p)
    with pytest.raises(ValueError):
        obfuscate_kobf(g, 0.1, 10**9, 0)


def test_worked_example_degree_table_and_entropy():
    ug = toy_uncertain()
    table = np.array([np.pad(degree_distribution(ug, u).probs, (0, 4))[:4] for u in range(4)])
    np.testing.assert_allclose(table, TOY_DEGREE_TABLE, atol=5e-4)
    h = degree_entropy_columns(table)
    np.testing.assert_allclose(h, TOY_COLUMN_ENTROPY, atol=0.01)
    assert kobf_epsilon(ug, 3, TOY_TRUE_DEGREES) == 0.0
    # columns reach at most log2(4) = 2 bits, so k = 5 is impossible
    assert kobf_epsilon(ug, 5, TOY_TRUE_DEGREES) == 1.0


def test_column_entropy_streaming_equals_batch():
    rng = np.random.default_rng(0)
    rows = rng.dirichlet(np.ones(6), size=40)
    acc = ColumnEntropy()
    for r in rows:
        acc.add(r)
    nodes, cols = np.nonzero(rows)
    acc2 = ColumnEntropy()
    acc2.add_counts(cols, rows[nodes, cols])
    np.testing.assert_allclose(acc.entropies(), acc2.entropies(), atol=1e-12)
    # uniform column over 40 nodes
    np.testing.assert_allclose(degree_entropy_columns(np.ones((40, 1))), [math.log2(40)])


def test_epsilon_exact_power_of_two():
    # four identical nodes give exactly 2 bits: k = 4 obfuscates them all
    assert epsilon_from_entropies([2.0], [0, 0, 0, 0], 4) == 0.0
    assert epsilon_from_entropies([2.0, 0.5], [0, 1], 4) == 0.5
    # a degree outside the table has zero entropy
    assert epsilon_from_entropies([3.0], [5], 2) == 1.0
    with pytest.raises(ValueError):
        epsilon_from_entropies([1.0], [0], 0)
