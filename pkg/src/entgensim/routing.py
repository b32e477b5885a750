"""Link-preferring shortest-path route selection and service planning."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .netstate import NetworkState

# Integer edge costs keep tie-breaking exact: an edge already carrying a live
# link costs 1/1000 of a bare edge.
_COST_LINKED = 1
_COST_BARE = 1000


@dataclass(frozen=True)
class Route:
    """A fixed path plus which of its edges held live links at decision time."""
    path: tuple[int, ...]
    have: frozenset[tuple[int, int]]
    need: frozenset[tuple[int, int]]

    @property
    def hops(self) -> int:
        return len(self.path) - 1


def _edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def find_route(state: NetworkState, a: int, b: int) -> Route:
    """Cheapest path from a to b preferring edges with existing links.

    Ties break by fewer hops, then by lexicographically smallest node
    sequence, so identical state always yields an identical route.
    """
    if a == b:
        raise ValueError("route endpoints must differ")
    topo = state.topology
    costs = {}
    for u, v in topo.edges:
        linked = state.find_link(u, v) is not None
        costs[(u, v)] = _COST_LINKED if linked else _COST_BARE

    best: dict[int, tuple[int, int, tuple[int, ...]]] = {}
    heap = [(0, 0, (a,))]
    while heap:
        cost, hops, path = heapq.heappop(heap)
        node = path[-1]
        if node in best:
            continue
        best[node] = (cost, hops, path)
        if node == b:
            break
        for k in topo.neighbors(node):
            if k in path:
                continue
            if k in best:
                continue
            heapq.heappush(heap, (cost + costs[_edge(node, k)], hops + 1, path + (k,)))

    path = best[b][2]
    have, need = set(), set()
    for u, v in zip(path, path[1:]):
        e = _edge(u, v)
        if state.find_link(u, v) is not None:
            have.add(e)
        else:
            need.add(e)
    return Route(path, frozenset(have), frozenset(need))


def service_plan(route: Route) -> list[tuple]:
    """Ordered actions to serve a route: fill deficits, then collapse the
    chain left to right (h-1 swaps for h hops)."""
    plan: list[tuple] = [("generate", e) for e in sorted(route.need)]
    plan.extend(("swap", via) for via in route.path[1:-1])
    return plan
