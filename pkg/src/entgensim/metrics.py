"""Latency aggregation, smoothing, closed-form link-rate formulas, and
result-file serialization."""

from __future__ import annotations

import csv
import json
import math
import subprocess
from dataclasses import dataclass, field

import numpy as np

from .topology import Topology

CSV_COLUMNS = ("request_index", "latency_avg", "latency_p95",
               "latency_avg_smooth", "latency_p95_smooth")


def moving_average(series, window: int = 3) -> list[float]:
    """Centered moving mean; at the ends the window truncates to the points
    that exist."""
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1")
    vals = list(series)
    if not vals:
        raise ValueError("series must be non-empty")
    half = window // 2
    out = []
    for i in range(len(vals)):
        lo = max(0, i - half)
        hi = min(len(vals), i + half + 1)
        out.append(sum(vals[lo:hi]) / (hi - lo))
    return out


def nearest_rank_p95(values) -> float:
    """Value at order statistic ceil(0.95 * n), 1-based."""
    vals = sorted(values)
    if not vals:
        raise ValueError("no values")
    rank = math.ceil(0.95 * len(vals))
    return vals[rank - 1]


def expected_pair_links_per_step(topology: Topology, n: int, k: int,
                                 p_e: float) -> float:
    """Expected links formed on edge (n, k) in one step of uniform continuous
    generation: p_e (d_n + d_k) / (d_n d_k)."""
    if not topology.is_edge(n, k):
        raise ValueError(f"({n},{k}) is not an edge")
    dn, dk = topology.degree(n), topology.degree(k)
    return p_e * (dn + dk) / (dn * dk)


def expected_node_links_per_step(topology: Topology, n: int, p_e: float) -> float:
    """Expected links node n gains per step: its own attempt plus every
    neighbor's chance of picking it: p_e (1 + sum 1/d_k)."""
    if topology.degree(n) < 1:
        raise ValueError(f"node {n} is isolated")
    return p_e * (1.0 + sum(1.0 / topology.degree(k)
                            for k in topology.neighbors(n)))


def expected_links_over_interval(topology: Topology, n: int, k: int, p_e: float,
                                 m: int, delta_t: int) -> float:
    """Expected links shared with the specific neighbor k after delta_t steps,
    capped by the time m memories take to fill."""
    if delta_t < 1:
        raise ValueError("delta_t must be >= 1")
    per_step = expected_pair_links_per_step(topology, n, k, p_e)
    rate = expected_node_links_per_step(topology, n, p_e)
    if rate == 0.0:
        return 0.0
    return per_step * min(delta_t, m / rate)


@dataclass
class LatencySeries:
    """Per-request-index latency statistics aggregated over trials."""

    avg: list[float]
    p95: list[float]
    avg_smooth: list[float]
    p95_smooth: list[float]
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_trials(cls, table: np.ndarray, metadata: dict | None = None,
                    window: int = 3) -> "LatencySeries":
        """table: trials x request-index latency matrix."""
        avg = [float(x) for x in table.mean(axis=0)]
        p95 = [nearest_rank_p95(table[:, i]) for i in range(table.shape[1])]
        return cls(avg, p95, moving_average(avg, window),
                   moving_average(p95, window), dict(metadata or {}))

    def __len__(self) -> int:
        return len(self.avg)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_COLUMNS)
            for i in range(len(self.avg)):
                writer.writerow([i, _fmt(self.avg[i]), _fmt(self.p95[i]),
                                 _fmt(self.avg_smooth[i]),
                                 _fmt(self.p95_smooth[i])])

    @classmethod
    def read_csv(cls, path, metadata: dict | None = None) -> "LatencySeries":
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader)
            if tuple(header) != CSV_COLUMNS:
                raise ValueError(f"unexpected CSV header {header}")
            cols = {name: [] for name in CSV_COLUMNS[1:]}
            for row in reader:
                for name, cell in zip(CSV_COLUMNS[1:], row[1:]):
                    cols[name].append(float(cell))
        return cls(cols["latency_avg"], cols["latency_p95"],
                   cols["latency_avg_smooth"], cols["latency_p95_smooth"],
                   dict(metadata or {}))

    def write_metadata(self, path) -> None:
        meta = dict(self.metadata)
        meta.setdefault("build", _git_describe())
        with open(path, "w") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
            f.write("\n")


def _fmt(x: float) -> str:
    return format(x, ".10g")


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5)
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"
