"""Experiment driver: run presets or config files, list the catalog,
validate configs."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import presets as preset_catalog
from .engine import SimConfig, StepCapExceeded, run_experiment, run_trial
from .metrics import LatencySeries
from .presets import Preset, Variant, get_preset, reference_document
from .topology import TrafficMatrix, load_document

EXIT_CONFIG = 2
EXIT_STEP_CAP = 3


class ConfigError(Exception):
    pass


def _load_run_spec(arg: str) -> Preset:
    """A run target is either a catalog preset name or a config-file path."""
    name = arg.removeprefix("presets/")
    if name in preset_catalog.preset_names() and not Path(arg).exists():
        return get_preset(name)
    path = Path(arg)
    if not path.exists():
        raise ConfigError(f"no such config file or preset: {arg}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config {arg}: {exc}") from exc
    return _preset_from_config(doc, default_name=path.stem)


def _preset_from_config(doc: dict, default_name: str) -> Preset:
    try:
        topo_field = doc["topology"]
    except KeyError:
        raise ConfigError("config is missing the 'topology' field")
    if isinstance(topo_field, str):
        try:
            topo_doc = reference_document(topo_field)
        except KeyError:
            if not Path(topo_field).exists():
                raise ConfigError(f"unknown topology {topo_field!r}")
            topo_doc = json.loads(Path(topo_field).read_text())
    else:
        topo_doc = topo_field
    try:
        topology, traffic = load_document(topo_doc)
        if "traffic" in doc:
            traffic = TrafficMatrix.from_entries(topology.n_nodes, doc["traffic"])
        if traffic is None:
            raise ConfigError("no traffic matrix in config or topology document")
        base = SimConfig(**doc.get("sim", {}))
        base.validate()
        variants = []
        for vdoc in doc.get("variants", [{"label": default_name}]):
            cfg = replace(base, **vdoc.get("sim", {}))
            cfg.validate()
            vtopo = topology
            if "memories" in vdoc:
                from .topology import Topology
                vtopo = Topology(topology.n_nodes, topology.edges,
                                 vdoc["memories"])
            variants.append(Variant(vdoc.get("label", default_name), vtopo,
                                    traffic, cfg))
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    return Preset(doc.get("name", default_name), doc.get("description", ""),
                  variants)


def _run(args) -> int:
    try:
        preset = _load_run_spec(args.target)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    exit_code = 0
    for variant in preset.variants:
        config = variant.config
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.trials is not None:
            config = replace(config, trials=args.trials)
        csv_path = out_dir / f"{variant.label}.csv"
        meta_path = out_dir / f"{variant.label}.meta.json"
        if not args.force and (csv_path.exists() or meta_path.exists()):
            print(f"error: {csv_path} exists (use --force)", file=sys.stderr)
            return EXIT_CONFIG
        partial = False
        try:
            series = _run_variant(config, variant, args)
        except StepCapExceeded as exc:
            print(f"warning: {variant.label} hit the step cap; results are"
                  " partial", file=sys.stderr)
            partial = True
            exit_code = EXIT_STEP_CAP
            series = _pad_partial(exc, config, variant)
        series.metadata["partial"] = partial
        series.write_csv(csv_path)
        series.write_metadata(meta_path)
        print(f"{variant.label}: wrote {csv_path}")
    return exit_code


def _run_variant(config, variant, args) -> LatencySeries:
    if args.trace:
        trace_path = Path(args.out_dir) / f"{variant.label}.trace.jsonl"
        seeds = np.random.SeedSequence(config.seed).spawn(1)
        with open(trace_path, "w") as f:
            def emit(record):
                f.write(json.dumps(record) + "\n")
            run_trial(config, variant.topology, variant.traffic, seeds[0],
                      trace=emit)
    return run_experiment(config, variant.topology, variant.traffic,
                          jobs=args.jobs, label=variant.label)


def _pad_partial(exc: StepCapExceeded, config, variant) -> LatencySeries:
    meta = {"label": variant.label, "scheme": config.scheme,
            "master_seed": config.seed, "config": config.to_dict()}
    done = exc.partial.latencies
    if not done:
        return LatencySeries([], [], [], [], meta)
    return LatencySeries.from_trials(np.array([done], dtype=float),
                                     metadata=meta)


def _presets(_args) -> int:
    for name in preset_catalog.preset_names():
        preset = get_preset(name)
        print(f"{preset.name}: {preset.description}")
        for variant in preset.variants:
            print(f"  - {variant.label}")
    return 0


def _validate(args) -> int:
    try:
        preset = _load_run_spec(args.target)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"ok: {len(preset.variants)} variant(s)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entgensim",
        description="Latency experiments for continuous entanglement"
                    " generation schemes")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a preset or config file")
    run_p.add_argument("target", help="preset name (see `presets`) or config"
                                      " file path")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--trials", type=int, default=None)
    run_p.add_argument("--out-dir", default="out")
    run_p.add_argument("--jobs", type=int, default=1)
    run_p.add_argument("--trace", action="store_true",
                       help="also write a per-step state trace for one trial")
    run_p.add_argument("--force", action="store_true",
                       help="overwrite existing result files")
    run_p.set_defaults(func=_run)

    presets_p = sub.add_parser("presets", help="list the preset catalog")
    presets_p.set_defaults(func=_presets)

    val_p = sub.add_parser("validate", help="validate a config file")
    val_p.add_argument("target")
    val_p.set_defaults(func=_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
