import numpy as np
import pytest

from comcent.community import modular_split
from comcent.lfr import (LfrError, LfrParams, generate, generate_detailed,
                         sample_community_sizes, sample_powerlaw_degrees, solve_k_min)
from comcent.partition import mixing_parameter


def test_params_validation():
    with pytest.raises(ValueError):
        LfrParams(mu=1.5)
    with pytest.raises(ValueError):
        LfrParams(gamma=1.0)
    with pytest.raises(ValueError):
        LfrParams(min_community=10, max_community=5)
    with pytest.raises(ValueError):
        LfrParams(avg_degree=30, max_degree=27)


def test_k_min_solves_mean():
    from comcent.lfr import _mean_for
    k = solve_k_min(8, 27, 2.7)
    assert abs(_mean_for(k, 27, 2.7) - 8) < 0.05


def test_degree_sequence_mean_and_parity():
    for seed in range(5):
        deg = sample_powerlaw_degrees(LfrParams(n=2500, seed=seed))
        assert abs(deg.mean() - 8) <= 0.5
        assert deg.sum() % 2 == 0
        assert deg.max() <= 27


def test_single_support_degrees():
    deg = sample_powerlaw_degrees(LfrParams(n=100, avg_degree=6, max_degree=6, seed=1))
    assert np.all(deg == 6)


def test_community_sizes_sum_and_bounds():
    for seed in range(20):
        p = LfrParams(n=1000, seed=seed)
        sizes = sample_community_sizes(p)
        assert sum(sizes) == 1000
        assert min(sizes) >= 4 and max(sizes) <= 250


def test_equal_size_communities():
    sizes = sample_community_sizes(LfrParams(n=120, min_community=10, max_community=10,
                                             avg_degree=4, max_degree=8))
    assert sizes == [10] * 12


def test_community_sizes_infeasible():
    with pytest.raises(LfrError):
        sample_community_sizes(LfrParams(n=10, min_community=20, max_community=30,
                                         avg_degree=2, max_degree=5))


def test_theta_controls_small_community_share():
    # a steeper exponent puts more mass on the minimum size
    def share(theta, seed):
        s = np.array(sample_community_sizes(LfrParams(n=2500, theta=theta, seed=seed)))
        return np.mean(s == 4)
    steep = np.array([share(3.0, s) for s in range(20)])
    flat = np.array([share(2.0, s) for s in range(20)])
    assert steep.mean() > flat.mean()
    assert np.mean(steep > flat) >= 0.8


def test_generate_basic_properties():
    params = LfrParams(n=1000, mu=0.2, seed=3)
    res = generate_detailed(params)
    g, p = res.graph, res.partition
    assert g.n == 1000
    assert len(set(g.edges)) == g.m and all(u < v for u, v in g.edges)
    assert p.sizes.min() >= 4 and p.sizes.max() <= 250
    assert abs(mixing_parameter(g, p) - 0.2) <= 0.03
    within = np.abs(g.degree - res.target_degree) <= 2
    assert within.mean() >= 0.95
    prov = res.provenance(params)
    assert prov["params"]["mu"] == 0.2 and prov["communities"] == p.count


def test_table_one_mu_low():
    g, p = generate(LfrParams(mu=0.05, seed=0))
    assert 0.02 <= mixing_parameter(g, p) <= 0.08


def test_mu_one_local_graph_edgeless():
    g, p = generate(LfrParams(n=500, mu=1.0, seed=2))
    assert p.count >= 2
    assert modular_split(g, p).local_graph.m == 0


def test_deterministic():
    a, pa = generate(LfrParams(n=600, mu=0.3, seed=9))
    b, pb = generate(LfrParams(n=600, mu=0.3, seed=9))
    assert a.edges == b.edges and pa == pb
    c, _ = generate(LfrParams(n=600, mu=0.3, seed=10))
    assert c.edges != a.edges
