"""Network graphs, per-node memory capacities, and traffic matrices."""

from __future__ import annotations

import json
from collections import deque
from typing import Iterable, Mapping, Sequence, Union

import networkx as nx
import numpy as np


def _normalize_edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class Topology:
    """Immutable undirected graph with a memory count per node.

    Validated on construction: no self-loops, no duplicate edges, node ids in
    range, every memory count >= 1, and the graph connected (every request must
    be routable).
    """

    def __init__(self, n_nodes: int, edges: Iterable[tuple[int, int]],
                 memories: Union[int, Sequence[int]]):
        if n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        self.n_nodes = int(n_nodes)

        seen = set()
        for a, b in edges:
            if not (0 <= a < n_nodes and 0 <= b < n_nodes):
                raise ValueError(f"edge ({a},{b}) references node out of range")
            if a == b:
                raise ValueError(f"self-loop on node {a}")
            e = _normalize_edge(a, b)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        self.edges = tuple(sorted(seen))

        if isinstance(memories, int):
            mem = (memories,) * n_nodes
        else:
            mem = tuple(int(m) for m in memories)
            if len(mem) != n_nodes:
                raise ValueError("memories length must equal n_nodes")
        if any(m < 1 for m in mem):
            raise ValueError("every memory count must be >= 1")
        self.memories = mem

        adj: list[list[int]] = [[] for _ in range(n_nodes)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        self._adj = tuple(tuple(sorted(ns)) for ns in adj)
        self._edge_set = frozenset(self.edges)

        if not self._connected():
            raise ValueError("graph is not connected")

    def _connected(self) -> bool:
        if self.n_nodes == 1:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            n = queue.popleft()
            for k in self._adj[n]:
                if k not in seen:
                    seen.add(k)
                    queue.append(k)
        return len(seen) == self.n_nodes

    def neighbors(self, n: int) -> tuple[int, ...]:
        return self._adj[n]

    def degree(self, n: int) -> int:
        return len(self._adj[n])

    def is_edge(self, a: int, b: int) -> bool:
        return _normalize_edge(a, b) in self._edge_set

    def hop_distances(self) -> list[list[int]]:
        """All-pairs unweighted shortest-path hop counts (BFS per node)."""
        out = []
        for src in range(self.n_nodes):
            dist = [-1] * self.n_nodes
            dist[src] = 0
            queue = deque([src])
            while queue:
                n = queue.popleft()
                for k in self._adj[n]:
                    if dist[k] < 0:
                        dist[k] = dist[n] + 1
                        queue.append(k)
            out.append(dist)
        return out

    def to_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "edges": [list(e) for e in self.edges],
            "memories": list(self.memories),
        }

    def __eq__(self, other) -> bool:
        return (isinstance(other, Topology)
                and self.n_nodes == other.n_nodes
                and self.edges == other.edges
                and self.memories == other.memories)

    def __hash__(self) -> int:
        return hash((self.n_nodes, self.edges, self.memories))

    def __repr__(self) -> str:
        return f"Topology(n_nodes={self.n_nodes}, edges={len(self.edges)})"


class TrafficMatrix:
    """Pairwise request weights, interpreted symmetrically (pairs unordered)."""

    def __init__(self, matrix):
        t = np.asarray(matrix, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("traffic matrix must be square")
        if np.any(np.diag(t) != 0):
            raise ValueError("traffic matrix diagonal must be zero")
        if np.any(t < 0):
            raise ValueError("traffic weights must be >= 0")
        if not np.any(t > 0):
            raise ValueError("traffic matrix needs at least one positive entry")
        self.matrix = t
        self.n_nodes = t.shape[0]

    def pairs_and_weights(self) -> tuple[list[tuple[int, int]], list[float]]:
        """Unordered pairs with positive combined weight, plus those weights."""
        pairs, weights = [], []
        t = self.matrix
        for a in range(self.n_nodes):
            for b in range(a + 1, self.n_nodes):
                w = t[a, b] + t[b, a]
                if w > 0:
                    pairs.append((a, b))
                    weights.append(w)
        return pairs, weights

    def to_entries(self) -> list[list]:
        pairs, weights = self.pairs_and_weights()
        return [[a, b, w] for (a, b), w in zip(pairs, weights)]

    @classmethod
    def from_entries(cls, n_nodes: int, entries: Iterable[Sequence]) -> "TrafficMatrix":
        t = np.zeros((n_nodes, n_nodes))
        for a, b, w in entries:
            t[int(a), int(b)] = float(w)
            t[int(b), int(a)] = float(w)
        return cls(t)


def load_topology(document: Union[str, Mapping]) -> Topology:
    """Build a validated Topology from a config document (path or dict)."""
    doc = _read_document(document)
    return Topology(doc["n_nodes"], [tuple(e) for e in doc["edges"]], doc["memories"])


def load_document(document: Union[str, Mapping]):
    """Load a topology document, returning (Topology, TrafficMatrix or None)."""
    doc = _read_document(document)
    topo = Topology(doc["n_nodes"], [tuple(e) for e in doc["edges"]], doc["memories"])
    traffic = None
    if doc.get("traffic"):
        traffic = TrafficMatrix.from_entries(topo.n_nodes, doc["traffic"])
    return topo, traffic


def emit(topology: Topology, traffic: TrafficMatrix | None = None) -> dict:
    """Inverse of load_document; load_topology(emit(t)) round-trips."""
    doc = topology.to_dict()
    if traffic is not None:
        doc["traffic"] = traffic.to_entries()
    return doc


def _read_document(document: Union[str, Mapping]) -> Mapping:
    if isinstance(document, Mapping):
        return document
    with open(document) as f:
        return json.load(f)


def make_bottleneck(memories: Union[int, Sequence[int]] = 5) -> Topology:
    """8-node dumbbell: nodes 0-2 hang off node 3, nodes 5-7 off node 4."""
    edges = [(0, 3), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6), (4, 7)]
    return Topology(8, edges, memories)


def make_bottleneck_traffic() -> TrafficMatrix:
    """Requests only cross the bottleneck, equal weight on all 9 pairs."""
    t = np.zeros((8, 8))
    for a in (0, 1, 2):
        for b in (5, 6, 7):
            t[a, b] = t[b, a] = 1.0
    return TrafficMatrix(t)


def make_as_like(n: int, seed: int, memories: Union[int, Sequence[int]] = 5) -> Topology:
    """Seeded scale-free-ish graph mimicking internet AS connectivity."""
    if n < 4:
        raise ValueError("n must be >= 4")
    g = nx.barabasi_albert_graph(n, 2, seed=seed)
    return Topology(n, sorted(tuple(sorted(e)) for e in g.edges()), memories)
