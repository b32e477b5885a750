"""Property suites for the adaptive update and the simulation state."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entgensim.schemes import NeighborDistribution, UsageRecord, adapt
from entgensim.topology import Topology
from entgensim.netstate import NetworkState


@st.composite
def dist_and_usage(draw):
    d = draw(st.integers(min_value=1, max_value=6))
    neighbors = tuple(range(1, d + 1))
    raw = draw(st.lists(st.floats(min_value=0.01, max_value=1.0),
                        min_size=d, max_size=d))
    total = sum(raw)
    probs = [x / total for x in raw]
    flags = draw(st.lists(st.sampled_from(["s", "v", "-"]), min_size=d,
                          max_size=d))
    s = frozenset(n for n, f in zip(neighbors, flags) if f == "s")
    v = frozenset(n for n, f in zip(neighbors, flags) if f == "v")
    alpha = draw(st.floats(min_value=0.0, max_value=1.0))
    return NeighborDistribution(0, neighbors, probs), UsageRecord(0, s, v), alpha


@given(dist_and_usage())
@settings(max_examples=300, deadline=None)
def test_adapt_keeps_normalization_and_bounds(case):
    dist, usage, alpha = case
    out = adapt(dist, usage, alpha)
    assert abs(sum(out.probs) - 1.0) <= 1e-9
    assert all(0.0 <= p <= 1.0 + 1e-12 for p in out.probs)


@given(dist_and_usage())
@settings(max_examples=300, deadline=None)
def test_adapt_is_stable_on_s(case):
    dist, usage, alpha = case
    out = adapt(dist, usage, alpha)
    for i in usage.pregenerated:
        assert abs(out.probability(i) - dist.probability(i)) <= 1e-15


@given(dist_and_usage())
@settings(max_examples=300, deadline=None)
def test_adapt_reinforces_v(case):
    dist, usage, alpha = case
    covered = sum(dist.probability(j)
                  for j in usage.pregenerated | usage.on_demand)
    out = adapt(dist, usage, alpha)
    # strict gain only when the increment is large enough to be representable
    if alpha >= 1e-6 and covered < 1.0 - 1e-6:
        for i in usage.on_demand:
            assert out.probability(i) > dist.probability(i)


@given(dist_and_usage())
@settings(max_examples=300, deadline=None)
def test_adapt_fixed_point_on_full_coverage(case):
    dist, usage, alpha = case
    if usage.pregenerated | usage.on_demand == set(dist.neighbors):
        out = adapt(dist, usage, alpha)
        assert out.probs == [pytest.approx(p, abs=1e-9) for p in dist.probs]


def test_normalization_survives_long_adapt_sequences():
    # 10^4 random updates; drift must stay within 1e-9
    rng = np.random.default_rng(12)
    neighbors = (1, 2, 3, 4)
    dist = NeighborDistribution(0, neighbors, [0.25] * 4)
    for _ in range(10**4):
        labels = rng.integers(0, 3, size=4)
        s = frozenset(n for n, f in zip(neighbors, labels) if f == 0)
        v = frozenset(n for n, f in zip(neighbors, labels) if f == 1)
        alpha = float(rng.random())
        dist = adapt(dist, UsageRecord(0, s, v), alpha)
        assert abs(sum(dist.probs) - 1.0) <= 1e-9
        assert all(0.0 <= p <= 1.0 for p in dist.probs)


def test_expiration_completeness_property():
    rng = np.random.default_rng(5)
    topo = Topology(4, [(0, 1), (1, 2), (2, 3), (3, 0)], 4)

    class R:
        def random(self):
            return 0.0

    state = NetworkState(topo, tau_m=17)
    t = 0
    for _ in range(500):
        t += int(rng.integers(0, 5))
        state.expire(t)
        for lk in state.links.values():
            assert t - lk.created_at < 17
        a, b = topo.edges[rng.integers(len(topo.edges))]
        if state.free[a] and state.free[b]:
            state.try_generate(a, b, 1.0, R())
        state.check_invariants()
