"""Built-in experiment catalog reproducing the headline latency figures at
desk scale."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from importlib import resources

from .engine import SimConfig
from .topology import Topology, TrafficMatrix, load_document

UNEQUAL_BOTTLENECK_MEMORIES = (5, 5, 5, 30, 30, 5, 5, 5)
ALPHA_SWEEP_GRID = (0.0, 0.01, 0.05, 0.1, 0.15, 0.2)


@dataclass
class Variant:
    label: str
    topology: Topology
    traffic: TrafficMatrix
    config: SimConfig


@dataclass
class Preset:
    name: str
    description: str
    variants: list[Variant]


def reference_document(name: str) -> dict:
    """Shipped topology/traffic documents: 'bottleneck8' or 'asnet10'."""
    path = resources.files("entgensim.data") / f"{name}.json"
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise KeyError(f"no reference document named {name!r}") from None


def reference_network(name: str) -> tuple[Topology, TrafficMatrix]:
    topo, traffic = load_document(reference_document(name))
    if traffic is None:
        raise ValueError(f"reference document {name} has no traffic")
    return topo, traffic


def _asnet10_alpha_sweep() -> Preset:
    topo, traffic = reference_network("asnet10")
    base = SimConfig(scheme="adaptive")
    variants = [
        Variant(f"alpha_{alpha:g}", topo, traffic, replace(base, alpha=alpha))
        for alpha in ALPHA_SWEEP_GRID
    ]
    return Preset("asnet10_alpha_sweep",
                  "adaptive-weight sweep on the 10-node AS-like network,"
                  " fixed max-distance request pair", variants)


def _asnet10_scheme_compare() -> Preset:
    topo, traffic = reference_network("asnet10")
    base = SimConfig()
    variants = [
        Variant("adaptive_alpha_0.1", topo, traffic,
                replace(base, scheme="adaptive", alpha=0.1)),
        Variant("power_law", topo, traffic,
                replace(base, scheme="power_law_global")),
        Variant("uniform", topo, traffic,
                replace(base, scheme="uniform_global")),
    ]
    return Preset("asnet10_scheme_compare",
                  "adaptive (alpha=0.1) vs power-law vs uniform continuous"
                  " generation", variants)


_BOTTLENECK_REGIMES = ((1000, 0.01), (100, 0.01), (1000, 0.1))


def _bottleneck_equal_memory() -> Preset:
    topo5, traffic = reference_network("bottleneck8")
    variants = []
    for m in (5, 30):
        topo = Topology(8, topo5.edges, m)
        for tau_m, p_e in _BOTTLENECK_REGIMES:
            for alpha in (0.0, 0.05):
                label = f"m{m}_tau{tau_m}_pe{p_e:g}_alpha{alpha:g}"
                cfg = SimConfig(tau_m=tau_m, p_e=p_e, queue_interval=200,
                                alpha=alpha, scheme="adaptive")
                variants.append(Variant(label, topo, traffic, cfg))
    return Preset("bottleneck_equal_memory",
                  "8-node bottleneck, equal per-node memories, random"
                  " cross-bottleneck requests", variants)


def _bottleneck_alloc() -> Preset:
    topo_ref, traffic = reference_network("bottleneck8")
    allocations = (("unequal_5_30", UNEQUAL_BOTTLENECK_MEMORIES),
                   ("equal_30", 30))
    variants = []
    for alloc_name, memories in allocations:
        topo = Topology(8, topo_ref.edges, memories)
        for tau_m, p_e in _BOTTLENECK_REGIMES:
            for alpha in (0.0, 0.05):
                label = f"{alloc_name}_tau{tau_m}_pe{p_e:g}_alpha{alpha:g}"
                cfg = SimConfig(tau_m=tau_m, p_e=p_e, queue_interval=200,
                                alpha=alpha, scheme="adaptive")
                variants.append(Variant(label, topo, traffic, cfg))
    return Preset("bottleneck_alloc",
                  "8-node bottleneck, degree-weighted vs equal memory"
                  " allocation", variants)


_BUILDERS = {
    "asnet10_alpha_sweep": _asnet10_alpha_sweep,
    "asnet10_scheme_compare": _asnet10_scheme_compare,
    "bottleneck_equal_memory": _bottleneck_equal_memory,
    "bottleneck_alloc": _bottleneck_alloc,
}


def preset_names() -> list[str]:
    return sorted(_BUILDERS)


def get_preset(name: str) -> Preset:
    key = name.removeprefix("presets/")
    if key not in _BUILDERS:
        raise KeyError(f"unknown preset {name!r}; available: {preset_names()}")
    return _BUILDERS[key]()
