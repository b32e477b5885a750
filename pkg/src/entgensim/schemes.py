"""Partner-selection policies for continuous entanglement generation.

The adaptive policy keeps a per-node probability distribution over direct
neighbors and reinforces partners whose links had to be created on demand.
The two comparison policies pick partners from the whole network with a
static distribution (uniform, or decaying with hop distance).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate

from .topology import Topology

SCHEME_KINDS = ("adaptive", "uniform_global", "power_law_global")


@dataclass
class SchemeConfig:
    kind: str = "adaptive"
    alpha: float = 0.1
    power_law_exponent: float = 2.0

    def validate(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if self.power_law_exponent <= 0:
            raise ValueError("power_law_exponent must be > 0")


class NeighborDistribution:
    """Probability of picking each neighbor of `owner` for a generation attempt."""

    __slots__ = ("owner", "neighbors", "probs", "_cum")

    def __init__(self, owner: int, neighbors: tuple[int, ...], probs: list[float]):
        if len(neighbors) != len(probs) or not neighbors:
            raise ValueError("probs must align with a non-empty neighbor set")
        total = sum(probs)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if any(p < 0 or p > 1 for p in probs):
            raise ValueError("probabilities must lie in [0, 1]")
        self.owner = owner
        self.neighbors = neighbors
        self.probs = list(probs)
        self._cum = list(accumulate(probs))
        self._cum[-1] = 1.0

    def probability(self, neighbor: int) -> float:
        return self.probs[self.neighbors.index(neighbor)]

    def sample(self, rng) -> int:
        return self.neighbors[bisect_right(self._cum, rng.random())]

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.neighbors, self.probs))


@dataclass(frozen=True)
class UsageRecord:
    """Which of a node's route-adjacent links were pre-generated (S) vs made
    on demand (V) while servicing a request."""
    owner: int
    pregenerated: frozenset[int]
    on_demand: frozenset[int]

    def __post_init__(self):
        if self.pregenerated & self.on_demand:
            raise ValueError("S and V must be disjoint")


def init_uniform(owner: int, topology: Topology) -> NeighborDistribution:
    nbrs = topology.neighbors(owner)
    if not nbrs:
        raise ValueError(f"node {owner} is isolated")
    d = len(nbrs)
    return NeighborDistribution(owner, nbrs, [1.0 / d] * d)


def adapt(dist: NeighborDistribution, usage: UsageRecord,
          alpha: float) -> NeighborDistribution:
    """One reinforcement update after a serviced request.

    Consumed pre-generated partners (S) keep their probability; on-demand
    partners (V) gain alpha/|V| of the mass not already on S and V; the
    remaining mass is spread uniformly over unused neighbors.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must be in [0, 1]")
    s, v = usage.pregenerated, usage.on_demand
    nbrs = dist.neighbors
    nbr_set = set(nbrs)
    if not (s | v) <= nbr_set:
        raise ValueError("usage sets must be subsets of the owner's neighbors")

    old = dist.as_dict()
    covered = sum(old[j] for j in s | v)
    new = {}
    for i in s:
        new[i] = old[i]
    if v:
        gain = (alpha / len(v)) * (1.0 - covered)
        for i in v:
            new[i] = old[i] + gain
    rest = [i for i in nbrs if i not in new]
    if rest:
        share = (1.0 - sum(new.values())) / len(rest)
        for i in rest:
            new[i] = share

    probs = [new[i] for i in nbrs]
    # Eq-level algebra keeps these in [0,1] for alpha in [0,1]; the clamp only
    # guards floating error.
    if any(p < -1e-12 for p in probs):
        raise AssertionError("adapt produced a materially negative probability")
    probs = [max(p, 0.0) for p in probs]
    total = sum(probs)
    if abs(total - 1.0) > 1e-12:
        probs = [p / total for p in probs]
    return NeighborDistribution(dist.owner, nbrs, probs)


def choose_partner(dist: NeighborDistribution, rng) -> int:
    return dist.sample(rng)


class GlobalPartnerTable:
    """Precomputed sampling tables and hop distances for the global schemes."""

    def __init__(self, topology: Topology, config: SchemeConfig):
        config.validate()
        if topology.n_nodes < 2:
            raise ValueError("global schemes need at least 2 nodes")
        self.topology = topology
        self.config = config
        self.hops = topology.hop_distances()
        self._targets: list[tuple[int, ...]] = []
        self._cums: list[list[float]] = []
        for n in range(topology.n_nodes):
            others = tuple(k for k in range(topology.n_nodes) if k != n)
            if config.kind == "power_law_global":
                weights = [self.hops[n][k] ** -config.power_law_exponent
                           for k in others]
            else:
                weights = [1.0] * len(others)
            total = sum(weights)
            cum = list(accumulate(w / total for w in weights))
            cum[-1] = 1.0
            self._targets.append(others)
            self._cums.append(cum)

    def choose(self, owner: int, rng) -> int:
        return self._targets[owner][bisect_right(self._cums[owner], rng.random())]

    def weight(self, owner: int, target: int) -> float:
        idx = self._targets[owner].index(target)
        cum = self._cums[owner]
        prev = cum[idx - 1] if idx else 0.0
        return cum[idx] - prev


def choose_global_partner(owner: int, topology: Topology, config: SchemeConfig,
                          rng, table: GlobalPartnerTable | None = None) -> int:
    if table is None:
        table = GlobalPartnerTable(topology, config)
    return table.choose(owner, rng)


def multi_hop_success_probability(path, p_e: float,
                                  topology: Topology | None = None) -> float:
    """All elementary links along the chain must form in the same step."""
    if len(path) < 2:
        raise ValueError("path needs at least one edge")
    if topology is not None:
        for u, v in zip(path, path[1:]):
            if not topology.is_edge(u, v):
                raise ValueError(f"broken chain: ({u},{v}) is not an edge")
    return p_e ** (len(path) - 1)
