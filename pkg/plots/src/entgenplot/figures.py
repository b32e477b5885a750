"""Latency-vs-request-index figures from experiment result CSV files.

The input contract is the simulator's result format: one row per request
index with columns `request_index`, `latency_avg`, `latency_p95`,
`latency_avg_smooth`, `latency_p95_smooth`. Each figure draws the smoothed
mean latency as a line per input file and the raw 95th percentile as a
shaded band above it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

REQUIRED_COLUMNS = ("request_index", "latency_avg", "latency_p95",
                    "latency_avg_smooth", "latency_p95_smooth")

_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red", "tab:purple",
           "tab:brown", "tab:pink", "tab:gray")


@dataclass
class SeriesData:
    label: str
    index: list[int]
    avg_smooth: list[float]
    p95: list[float]

    def __len__(self) -> int:
        return len(self.index)


@dataclass
class FigureSpec:
    """One figure: a list of result CSVs with legend labels and an output
    image path. Inputs with different lengths are truncated to the
    shortest request-index domain."""

    inputs: list[Path]
    labels: list[str]
    out: Path
    title: str = ""

    def __post_init__(self):
        self.inputs = [Path(p) for p in self.inputs]
        self.out = Path(self.out)
        if not self.inputs:
            raise ValueError("figure needs at least one input CSV")
        if len(self.labels) != len(self.inputs):
            raise ValueError(
                f"{len(self.inputs)} inputs but {len(self.labels)} labels")

    @classmethod
    def from_document(cls, doc: dict, base: Path | None = None) -> "FigureSpec":
        base = base or Path(".")
        try:
            inputs = [base / p for p in doc["inputs"]]
            labels = list(doc["labels"])
            out = base / doc["out"]
        except KeyError as exc:
            raise ValueError(f"figure spec is missing the {exc} field") from exc
        return cls(inputs, labels, out, doc.get("title", ""))


def load_series(path: Path, label: str) -> SeriesData:
    path = Path(path)
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise ValueError(f"{path}: missing column {column!r}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return SeriesData(
        label,
        [int(r["request_index"]) for r in rows],
        [float(r["latency_avg_smooth"]) for r in rows],
        [float(r["latency_p95"]) for r in rows],
    )


def build_figure(spec: FigureSpec) -> "plt.Figure":
    """Assemble the figure without writing it; render() saves the result."""
    series = [load_series(p, label)
              for p, label in zip(spec.inputs, spec.labels)]
    n = min(len(s) for s in series)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for s, color in zip(series, _COLORS):
        x = s.index[:n]
        ax.plot(x, s.avg_smooth[:n], color=color, label=s.label)
        ax.fill_between(x, s.avg_smooth[:n], s.p95[:n], color=color,
                        alpha=0.2, linewidth=0)
    ax.set_xlabel("request index")
    ax.set_ylabel("latency (time steps)")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Write the figure image; byte-identical for identical inputs."""
    fig = build_figure(spec)
    spec.out.parent.mkdir(parents=True, exist_ok=True)
    try:
        # strip the library version stamp so output depends only on inputs
        fig.savefig(spec.out, dpi=100, metadata={"Software": None})
    finally:
        plt.close(fig)
    return spec.out
