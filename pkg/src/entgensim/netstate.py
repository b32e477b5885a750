"""Mutable simulation state: memory slots, live links, expiration.

Monogamy (one live link per slot) and slot conservation are structural here:
a link owns exactly one slot at each of its two span nodes, and slots point
back at the link occupying them.
"""

from __future__ import annotations

import heapq

from .topology import Topology


class EntanglementLink:
    __slots__ = ("id", "span", "slot_a", "slot_b", "created_at")

    def __init__(self, link_id: int, span: tuple[int, int],
                 slot_a: int, slot_b: int, created_at: int):
        self.id = link_id
        self.span = span            # (a, b) with a < b
        self.slot_a = slot_a        # slot index at span[0]
        self.slot_b = slot_b        # slot index at span[1]
        self.created_at = created_at


class NetworkState:
    """Single-owner, single-threaded state for one trial."""

    def __init__(self, topology: Topology, tau_m: int):
        if tau_m < 1:
            raise ValueError("tau_m must be >= 1")
        self.topology = topology
        self.tau_m = tau_m
        self.clock = 0
        self.free = list(topology.memories)
        self.slots: list[list[int | None]] = [[None] * m for m in topology.memories]
        self.links: dict[int, EntanglementLink] = {}
        self._by_span: dict[tuple[int, int], list[int]] = {}
        self._expiry: list[tuple[int, int]] = []   # (created_at, link_id) heap
        self._next_id = 0

    # -- queries ---------------------------------------------------------

    def free_slots(self, n: int) -> int:
        return self.free[n]

    def find_link(self, a: int, b: int) -> int | None:
        """Oldest live link spanning {a, b}, or None."""
        span = (a, b) if a < b else (b, a)
        ids = self._by_span.get(span)
        if not ids:
            return None
        return min(ids, key=lambda i: (self.links[i].created_at, i))

    def links_at(self, n: int) -> list[int]:
        return [lk.id for lk in self.links.values() if n in lk.span]

    def snapshot(self) -> dict:
        """One trace record: live link spans and free-slot counts."""
        return {
            "t": self.clock,
            "links": sorted(list(lk.span) for lk in self.links.values()),
            "free": list(self.free),
        }

    # -- mutation --------------------------------------------------------

    def expire(self, t: int) -> int:
        """Drop every link of age >= tau_m, freeing its slots."""
        if t < self.clock:
            raise ValueError("time must not move backwards")
        self.clock = t
        cutoff = t - self.tau_m
        removed = 0
        heap = self._expiry
        while heap and heap[0][0] <= cutoff:
            created, link_id = heapq.heappop(heap)
            lk = self.links.get(link_id)
            if lk is not None and lk.created_at == created:
                self._remove(lk)
                removed += 1
        return removed

    def try_generate(self, a: int, b: int, p_e: float, rng) -> int | None:
        """One elementary generation attempt on edge (a, b)."""
        if not self.topology.is_edge(a, b):
            raise ValueError(f"({a},{b}) is not an edge of the topology")
        return self.attempt_span(a, b, p_e, rng)

    def attempt_span(self, a: int, b: int, success_prob: float, rng) -> int | None:
        """Attempt a link spanning (a, b); global schemes use multi-hop odds.

        Both endpoints must hold a free slot; violating that signals a
        scheduling bug in the caller.
        """
        if self.free[a] < 1 or self.free[b] < 1:
            raise ValueError(f"no free slot for attempt on ({a},{b})")
        if rng.random() < success_prob:
            return self._create(a, b, self.clock)
        return None

    def try_swap(self, left: int, right: int, via: int, p_s: float, rng) -> int | None:
        """Consume two links meeting at `via`; with probability p_s produce
        one link joining their far ends (age = older input's)."""
        lk_l = self.links.get(left)
        lk_r = self.links.get(right)
        if lk_l is None or lk_r is None:
            raise ValueError("swap input link is not live")
        if via not in lk_l.span or via not in lk_r.span:
            raise ValueError(f"links do not meet at node {via}")
        far_l, slot_l = self._far_end(lk_l, via)
        far_r, slot_r = self._far_end(lk_r, via)
        if far_l == far_r:
            raise ValueError("swap inputs span the same outer node")
        created = min(lk_l.created_at, lk_r.created_at)
        self._remove(lk_l)
        self._remove(lk_r)
        if rng.random() < p_s:
            return self._create(far_l, far_r, created,
                                slot_hint={far_l: slot_l, far_r: slot_r})
        return None

    def discard(self, link_id: int) -> None:
        """Remove a live link (consumption or overwrite), freeing its slots."""
        lk = self.links.get(link_id)
        if lk is None:
            raise ValueError(f"link {link_id} is not live")
        self._remove(lk)

    # -- internals -------------------------------------------------------

    def _far_end(self, lk: EntanglementLink, via: int) -> tuple[int, int]:
        if lk.span[0] == via:
            return lk.span[1], lk.slot_b
        return lk.span[0], lk.slot_a

    def _create(self, a: int, b: int, created_at: int,
                slot_hint: dict[int, int] | None = None) -> int:
        span = (a, b) if a < b else (b, a)
        slot_a = self._take_slot(span[0], slot_hint)
        slot_b = self._take_slot(span[1], slot_hint)
        link_id = self._next_id
        self._next_id += 1
        lk = EntanglementLink(link_id, span, slot_a, slot_b, created_at)
        self.links[link_id] = lk
        self.slots[span[0]][slot_a] = link_id
        self.slots[span[1]][slot_b] = link_id
        self._by_span.setdefault(span, []).append(link_id)
        heapq.heappush(self._expiry, (created_at, link_id))
        return link_id

    def _take_slot(self, n: int, slot_hint: dict[int, int] | None) -> int:
        if slot_hint is not None and n in slot_hint:
            idx = slot_hint[n]
            if self.slots[n][idx] is not None:
                raise RuntimeError("hinted slot is occupied")
        else:
            # lowest free index, for determinism
            idx = self.slots[n].index(None)
        self.free[n] -= 1
        return idx

    def _remove(self, lk: EntanglementLink) -> None:
        a, b = lk.span
        self.slots[a][lk.slot_a] = None
        self.slots[b][lk.slot_b] = None
        self.free[a] += 1
        self.free[b] += 1
        del self.links[lk.id]
        ids = self._by_span[lk.span]
        ids.remove(lk.id)
        if not ids:
            del self._by_span[lk.span]

    def check_invariants(self) -> None:
        """Exhaustive consistency check for debug runs and tests."""
        occupied = {n: 0 for n in range(self.topology.n_nodes)}
        slot_refs = set()
        for lk in self.links.values():
            a, b = lk.span
            assert self.slots[a][lk.slot_a] == lk.id
            assert self.slots[b][lk.slot_b] == lk.id
            for key in ((a, lk.slot_a), (b, lk.slot_b)):
                assert key not in slot_refs, "monogamy violated"
                slot_refs.add(key)
            occupied[a] += 1
            occupied[b] += 1
            assert self.clock - lk.created_at < self.tau_m, "stale link survived expire"
        for n in range(self.topology.n_nodes):
            m = self.topology.memories[n]
            used = sum(1 for s in self.slots[n] if s is not None)
            assert used == occupied[n]
            assert self.free[n] + used == m, "slot conservation violated"
