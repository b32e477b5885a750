"""Deterministic time-step simulator for continuous entanglement generation
in small quantum networks, with an adaptive partner-selection scheme."""

from .engine import (Request, SimConfig, StepCapExceeded, TrialResult,
                     build_queue, run_experiment, run_trial)
from .metrics import (LatencySeries, expected_links_over_interval,
                      expected_node_links_per_step,
                      expected_pair_links_per_step, moving_average)
from .netstate import NetworkState
from .routing import Route, find_route, service_plan
from .schemes import (NeighborDistribution, SchemeConfig, UsageRecord, adapt,
                      choose_global_partner, choose_partner, init_uniform,
                      multi_hop_success_probability)
from .topology import (Topology, TrafficMatrix, emit, load_document,
                       load_topology, make_as_like, make_bottleneck,
                       make_bottleneck_traffic)

__all__ = [
    "Request", "SimConfig", "StepCapExceeded", "TrialResult", "build_queue",
    "run_experiment", "run_trial", "LatencySeries",
    "expected_links_over_interval", "expected_node_links_per_step",
    "expected_pair_links_per_step", "moving_average", "NetworkState", "Route",
    "find_route", "service_plan", "NeighborDistribution", "SchemeConfig",
    "UsageRecord", "adapt", "choose_global_partner", "choose_partner",
    "init_uniform", "multi_hop_success_probability", "Topology",
    "TrafficMatrix", "emit", "load_document", "load_topology", "make_as_like",
    "make_bottleneck", "make_bottleneck_traffic",
]

__version__ = "0.1.0"
