import numpy as np
import pytest

from entgensim.schemes import (GlobalPartnerTable, NeighborDistribution,
                               SchemeConfig, UsageRecord, adapt,
                               choose_global_partner, choose_partner,
                               init_uniform, multi_hop_success_probability)
from entgensim.topology import Topology, make_bottleneck


def star(leaves=4, m=5):
    return Topology(leaves + 1, [(0, i) for i in range(1, leaves + 1)], m)


def usage(owner, s=(), v=()):
    return UsageRecord(owner, frozenset(s), frozenset(v))


def test_init_uniform():
    topo = make_bottleneck()
    d4 = init_uniform(3, topo)
    assert all(abs(p - 0.25) < 1e-15 for p in d4.probs)
    d1 = init_uniform(0, topo)
    assert d1.probs == [1.0]
    topo3 = star(3)
    d3 = init_uniform(0, topo3)
    assert abs(sum(d3.probs) - 1.0) < 1e-15


def test_adapt_worked_example():
    # degree 4, uniform start, one consumed pre-generated link, one on-demand
    a, b, c, d = 1, 2, 3, 4
    dist = NeighborDistribution(0, (a, b, c, d), [0.25] * 4)
    out = adapt(dist, usage(0, s={a}, v={b}), alpha=0.2)
    got = out.as_dict()
    assert got[a] == pytest.approx(0.25, abs=1e-15)
    assert got[b] == pytest.approx(0.35, abs=1e-12)
    assert got[c] == pytest.approx(0.20, abs=1e-12)
    assert got[d] == pytest.approx(0.20, abs=1e-12)


def test_adapt_alpha_zero_with_full_coverage():
    dist = NeighborDistribution(0, (1, 2, 3), [0.5, 0.3, 0.2])
    out = adapt(dist, usage(0, s={1, 2}, v={3}), alpha=0.0)
    assert out.probs == pytest.approx(dist.probs, abs=1e-12)


def test_adapt_alpha_zero_never_gains_on_v():
    dist = NeighborDistribution(0, (1, 2, 3, 4), [0.4, 0.3, 0.2, 0.1])
    out = adapt(dist, usage(0, s={1}, v={2}), alpha=0.0)
    assert out.probability(2) == pytest.approx(0.3, abs=1e-15)


def test_adapt_full_coverage_is_identity():
    dist = NeighborDistribution(0, (1, 2, 3), [0.6, 0.3, 0.1])
    out = adapt(dist, usage(0, s={1, 3}, v={2}), alpha=0.7)
    assert out.probs == pytest.approx(dist.probs, abs=1e-12)


def test_adapt_empty_v_equalizes_unused():
    # formula applied literally: the unused neighbors share the non-S mass
    dist = NeighborDistribution(0, (1, 2, 3), [0.5, 0.4, 0.1])
    out = adapt(dist, usage(0, s={1}), alpha=0.3)
    assert out.probability(1) == 0.5
    assert out.probability(2) == pytest.approx(0.25, abs=1e-12)
    assert out.probability(3) == pytest.approx(0.25, abs=1e-12)


def test_adapt_rejects_bad_usage():
    dist = NeighborDistribution(0, (1, 2), [0.5, 0.5])
    with pytest.raises(ValueError, match="disjoint"):
        adapt(dist, UsageRecord(0, frozenset({1}), frozenset({1})), 0.1)
    with pytest.raises(ValueError, match="neighbors"):
        adapt(dist, usage(0, s={9}), 0.1)
    with pytest.raises(ValueError, match="alpha"):
        adapt(dist, usage(0), 1.5)


def test_choose_partner_degenerate():
    dist = NeighborDistribution(0, (4,), [1.0])
    rng = np.random.default_rng(0)
    assert all(choose_partner(dist, rng) == 4 for _ in range(10))


def test_choose_partner_frequencies():
    rng = np.random.default_rng(5)
    n = 10**6
    uniform = NeighborDistribution(0, (1, 2, 3, 4), [0.25] * 4)
    counts = np.zeros(5)
    for _ in range(n):
        counts[uniform.sample(rng)] += 1
    assert np.allclose(counts[1:] / n, 0.25, atol=0.002)

    skewed = NeighborDistribution(0, (1, 2, 3, 4), [0.35, 0.25, 0.2, 0.2])
    counts = np.zeros(5)
    for _ in range(n):
        counts[skewed.sample(rng)] += 1
    for k, p in zip((1, 2, 3, 4), (0.35, 0.25, 0.2, 0.2)):
        assert abs(counts[k] / n - p) < 0.002


def test_global_uniform_frequencies():
    topo = make_bottleneck()
    table = GlobalPartnerTable(topo, SchemeConfig("uniform_global"))
    rng = np.random.default_rng(11)
    n = 2 * 10**5
    counts = np.zeros(8)
    for _ in range(n):
        counts[table.choose(0, rng)] += 1
    assert counts[0] == 0
    assert np.allclose(counts[1:] / n, 1 / 7, atol=0.005)


def test_power_law_weight_ratio():
    # neighbor at distance 1 vs node at distance 2 with exponent 2 -> 4:1
    topo = Topology(3, [(0, 1), (1, 2)], 5)
    table = GlobalPartnerTable(topo, SchemeConfig("power_law_global",
                                                  power_law_exponent=2.0))
    assert table.weight(0, 1) / table.weight(0, 2) == pytest.approx(4.0)


def test_two_node_network_always_picks_the_other():
    topo = Topology(2, [(0, 1)], 5)
    rng = np.random.default_rng(3)
    for kind in ("uniform_global", "power_law_global"):
        assert choose_global_partner(0, topo, SchemeConfig(kind), rng) == 1


def test_multi_hop_success_probability():
    topo = Topology(4, [(0, 1), (1, 2), (2, 3)], 5)
    assert multi_hop_success_probability([0, 1], 0.01, topo) == 0.01
    assert multi_hop_success_probability([0, 1, 2, 3], 0.1, topo) == pytest.approx(0.001)
    assert multi_hop_success_probability([0, 1, 2], 1.0, topo) == 1.0
    with pytest.raises(ValueError, match="broken chain"):
        multi_hop_success_probability([0, 2, 3], 0.1, topo)
    with pytest.raises(ValueError, match="at least one edge"):
        multi_hop_success_probability([0], 0.1)


def test_scheme_config_validation():
    with pytest.raises(ValueError):
        SchemeConfig("nope").validate()
    with pytest.raises(ValueError):
        SchemeConfig("adaptive", alpha=1.2).validate()
    with pytest.raises(ValueError):
        SchemeConfig("power_law_global", power_law_exponent=0).validate()
