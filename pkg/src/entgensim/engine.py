"""The discrete time-step simulation loop and trial orchestration.

Per step: expire stale links, service the active request (on-demand
generation, then batched swaps), let every idle node make one continuous
generation attempt, then activate the next request when due.
"""

from __future__ import annotations

import concurrent.futures
from bisect import bisect_right
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics
from .netstate import NetworkState
from .routing import Route, find_route
from .schemes import (GlobalPartnerTable, SchemeConfig, UsageRecord, adapt,
                      init_uniform)
from .topology import Topology, TrafficMatrix


@dataclass
class SimConfig:
    tau_m: int = 1000
    p_e: float = 0.01
    p_s: float = 1.0
    queue_interval: int = 500
    queue_len: int = 100
    alpha: float = 0.1
    scheme: str = "adaptive"
    power_law_exponent: float = 2.0
    trials: int = 100
    seed: int = 0
    step_cap: int = 1_000_000

    def validate(self) -> None:
        for name in ("p_e", "p_s"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.queue_interval < 1:
            raise ValueError("queue_interval must be >= 1")
        if self.queue_len < 1:
            raise ValueError("queue_len must be >= 1")
        if self.tau_m < 1:
            raise ValueError("tau_m must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.scheme_config().validate()

    def scheme_config(self) -> SchemeConfig:
        return SchemeConfig(self.scheme, self.alpha, self.power_law_exponent)

    def to_dict(self) -> dict:
        return {
            "tau_m": self.tau_m, "p_e": self.p_e, "p_s": self.p_s,
            "queue_interval": self.queue_interval, "queue_len": self.queue_len,
            "alpha": self.alpha, "scheme": self.scheme,
            "power_law_exponent": self.power_law_exponent,
            "trials": self.trials, "seed": self.seed, "step_cap": self.step_cap,
        }


@dataclass
class Request:
    pair: tuple[int, int]
    scheduled_at: int
    submitted_at: int | None = None
    completed_at: int | None = None
    route: Route | None = None


@dataclass
class TrialResult:
    latencies: list[int]
    requests: list[Request] = field(default_factory=list)


class StepCapExceeded(RuntimeError):
    """A trial hit the step cap with requests still unserved."""

    def __init__(self, partial: TrialResult):
        super().__init__(f"step cap hit after {len(partial.latencies)} requests")
        self.partial = partial


class _Uniforms:
    """Buffered uniform draws from one numpy Generator stream."""

    __slots__ = ("_gen", "_buf", "_i", "_n")

    def __init__(self, gen: np.random.Generator, size: int = 65536):
        self._gen = gen
        self._buf = gen.random(size).tolist()
        self._n = size
        self._i = 0

    def random(self) -> float:
        i = self._i
        if i == self._n:
            self._buf = self._gen.random(self._n).tolist()
            i = 0
        self._i = i + 1
        return self._buf[i]


def build_queue(traffic: TrafficMatrix, r: int, queue_interval: int,
                rng) -> list[Request]:
    """r requests with pairs drawn from the traffic weights; request n is
    scheduled at (n+1) * queue_interval, the first interval being the initial
    generation period."""
    pairs, weights = traffic.pairs_and_weights()
    total = sum(weights)
    cum = []
    acc = 0.0
    for w in weights:
        acc += w / total
        cum.append(acc)
    cum[-1] = 1.0
    out = []
    for n in range(r):
        pair = pairs[bisect_right(cum, rng.random())]
        out.append(Request(pair, scheduled_at=queue_interval * (n + 1)))
    return out


def _usage_sets(node: int, have, need):
    s = set()
    v = set()
    for u, w in have:
        if u == node:
            s.add(w)
        elif w == node:
            s.add(u)
    for u, w in need:
        if u == node:
            v.add(w)
        elif w == node:
            v.add(u)
    return frozenset(s), frozenset(v)


class _Trial:
    """One simulation trial; owns all mutable state."""

    def __init__(self, config: SimConfig, topology: Topology,
                 traffic: TrafficMatrix, trial_seed, trace=None,
                 check_invariants: bool = False):
        self.config = config
        self.topology = topology
        gen = np.random.default_rng(trial_seed)
        self.u = _Uniforms(gen)
        self.state = NetworkState(topology, config.tau_m)
        self.queue = build_queue(traffic, config.queue_len,
                                 config.queue_interval, self.u)
        self.trace = trace
        self.check = check_invariants

        self.adaptive = config.scheme == "adaptive"
        if self.adaptive:
            self.dists = [init_uniform(n, topology)
                          for n in range(topology.n_nodes)]
            self.table = None
        else:
            self.dists = None
            self.table = GlobalPartnerTable(topology, config.scheme_config())
            hops = self.table.hops
            p_e = config.p_e
            self.span_prob = [[p_e ** h if h > 0 else 0.0 for h in row]
                              for row in hops]

    # -- continuous generation ------------------------------------------

    def generation_sweep(self, busy: frozenset[int]) -> list[tuple[int, int]]:
        """One attempt per idle node with a free slot. Each pick is an
        independent attempt, so mutual picks can form two links (matching the
        per-edge rate p_e(1/d_n + 1/d_k))."""
        state = self.state
        free = state.free
        u = self.u
        p_e = self.config.p_e
        created = []
        if self.adaptive:
            dists = self.dists
            for n in range(self.topology.n_nodes):
                if free[n] == 0 or n in busy:
                    continue
                k = dists[n].sample(u)
                if free[k] == 0 or k in busy:
                    continue
                if u.random() < p_e:
                    state._create(n, k, state.clock)
                    created.append((n, k) if n < k else (k, n))
        else:
            table = self.table
            span_prob = self.span_prob
            for n in range(self.topology.n_nodes):
                if free[n] == 0 or n in busy:
                    continue
                k = table.choose(n, u)
                if free[k] == 0 or k in busy:
                    continue
                if u.random() < span_prob[n][k]:
                    state._create(n, k, state.clock)
                    created.append((n, k) if n < k else (k, n))
        return created

    # -- request servicing ----------------------------------------------

    def _coverage(self, path):
        """Greedy left-to-right chain of live links covering the path, plus
        the elementary edges of the uncovered stretches."""
        state = self.state
        chain = []
        missing = []
        i = 0
        h = len(path) - 1
        while i < h:
            hit = None
            for j in range(h, i, -1):
                lid = state.find_link(path[i], path[j])
                if lid is not None:
                    hit = (lid, j)
                    break
            if hit is not None:
                chain.append(hit[0])
                i = hit[1]
            else:
                missing.append((path[i], path[i + 1]))
                i += 1
        return chain, missing

    def _free_slot_for(self, node: int, protected: set[int]) -> bool:
        """Overwrite: discard the node's oldest live link the route does not
        depend on, freeing a slot for an on-demand attempt."""
        state = self.state
        victims = [lk for lk in state.links.values()
                   if node in lk.span and lk.id not in protected]
        if not victims:
            return False
        oldest = min(victims, key=lambda lk: (lk.created_at, lk.id))
        state.discard(oldest.id)
        return True

    def _swap_batch(self, chain) -> None:
        """All non-conflicting swaps of the chain, left-to-right pairing."""
        state = self.state
        p_s = self.config.p_s
        u = self.u
        for i in range(0, len(chain) - 1, 2):
            left = state.links[chain[i]]
            right = state.links[chain[i + 1]]
            via = left.span[0] if left.span[0] in right.span else left.span[1]
            state.try_swap(chain[i], chain[i + 1], via, p_s, u)

    def service_step(self, req: Request) -> bool:
        """One step of servicing; returns True on completion."""
        path = req.route.path
        chain, missing = self._coverage(path)
        if missing:
            protected = set(chain)
            state = self.state
            u = self.u
            p_e = self.config.p_e
            for a, b in missing:
                if state.free[a] == 0 and not self._free_slot_for(a, protected):
                    continue
                if state.free[b] == 0 and not self._free_slot_for(b, protected):
                    continue
                if u.random() < p_e:
                    # protect the fresh link from overwrites for later edges
                    protected.add(state._create(a, b, state.clock))
            # generation completing this step; swaps begin next step
            return False
        if len(chain) == 1:
            self.state.discard(chain[0])
            return True
        self._swap_batch(chain)
        # consume in the same step as the last successful swap
        chain, missing = self._coverage(path)
        if not missing and len(chain) == 1:
            self.state.discard(chain[0])
            return True
        return False

    def _collapse_now(self, req: Request) -> bool:
        """Deterministic same-step collapse for fully pre-generated routes."""
        path = req.route.path
        while True:
            chain, missing = self._coverage(path)
            if missing:
                return False
            if len(chain) == 1:
                self.state.discard(chain[0])
                return True
            self._swap_batch(chain)

    def _complete(self, req: Request, t: int, latencies: list[int]) -> None:
        req.completed_at = t
        latencies.append(t - req.submitted_at)
        if self.adaptive:
            have, need = req.route.have, req.route.need
            for node in req.route.path:
                s, v = _usage_sets(node, have, need)
                rec = UsageRecord(node, s, v)
                self.dists[node] = adapt(self.dists[node], rec,
                                         self.config.alpha)

    # -- main loop -------------------------------------------------------

    def run(self) -> TrialResult:
        config = self.config
        state = self.state
        queue = self.queue
        r = config.queue_len
        latencies: list[int] = []
        served: list[Request] = []
        active: Request | None = None
        qi = 0
        t = 0
        deterministic_swaps = config.p_s == 1.0
        while len(latencies) < r:
            if t > config.step_cap:
                raise StepCapExceeded(TrialResult(latencies, served))
            state.expire(t)
            if active is not None:
                if self.service_step(active):
                    self._complete(active, t, latencies)
                    served.append(active)
                    active = None
            busy = frozenset(active.route.path) if active is not None else frozenset()
            self.generation_sweep(busy)
            while active is None and qi < r and t >= queue[qi].scheduled_at:
                req = queue[qi]
                qi += 1
                req.submitted_at = t
                req.route = find_route(state, *req.pair)
                if not req.route.need and (deterministic_swaps
                                           or req.route.hops == 1):
                    if self._collapse_now(req):
                        self._complete(req, t, latencies)
                        served.append(req)
                        continue
                active = req
            if self.trace is not None:
                self.trace(state.snapshot())
            if self.check:
                state.check_invariants()
            t += 1
        return TrialResult(latencies, served)


def run_trial(config: SimConfig, topology: Topology, traffic: TrafficMatrix,
              trial_seed, trace=None, check_invariants: bool = False) -> TrialResult:
    config.validate()
    return _Trial(config, topology, traffic, trial_seed, trace,
                  check_invariants).run()


def _trial_seeds(master_seed: int, n_trials: int):
    return np.random.SeedSequence(master_seed).spawn(n_trials)


def _run_one(args):
    config, topology, traffic, seed = args
    return run_trial(config, topology, traffic, seed)


def run_experiment(config: SimConfig, topology: Topology,
                   traffic: TrafficMatrix, jobs: int = 1,
                   label: str = "") -> metrics.LatencySeries:
    """N_T independent trials; per-index mean and nearest-rank p95, with
    window-3 smoothed variants. Results do not depend on the job count."""
    config.validate()
    seeds = _trial_seeds(config.seed, config.trials)
    if jobs > 1:
        work = [(config, topology, traffic, s) for s in seeds]
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))
    else:
        results = [run_trial(config, topology, traffic, s) for s in seeds]
    table = np.array([res.latencies for res in results], dtype=float)
    return metrics.LatencySeries.from_trials(
        table, metadata={
            "label": label,
            "scheme": config.scheme,
            "master_seed": config.seed,
            "config": config.to_dict(),
        })
