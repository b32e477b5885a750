"""Batch figure rendering from result CSVs or a JSON figure spec."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .figures import FigureSpec, render

EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entgenplot",
        description="Render latency experiment CSVs into figures")
    parser.add_argument("csvs", nargs="*", help="result CSV files")
    parser.add_argument("--spec", help="JSON figure spec (inputs, labels,"
                                       " out, optional title)")
    parser.add_argument("--labels", nargs="*", default=None)
    parser.add_argument("--out", help="output image path")
    parser.add_argument("--title", default="")
    return parser


def _spec_from_args(args) -> FigureSpec:
    if args.spec:
        if args.csvs or args.labels or args.out:
            raise ValueError("--spec cannot be combined with positional"
                             " CSVs, --labels, or --out")
        path = Path(args.spec)
        try:
            doc = json.loads(path.read_text())
        except FileNotFoundError:
            raise ValueError(f"no such spec file: {path}")
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed spec {path}: {exc}") from exc
        return FigureSpec.from_document(doc, base=path.parent)
    if not args.csvs:
        raise ValueError("give CSV files or --spec")
    if not args.out:
        raise ValueError("--out is required without --spec")
    labels = args.labels or [Path(p).stem for p in args.csvs]
    return FigureSpec([Path(p) for p in args.csvs], labels, Path(args.out),
                      args.title)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
        out = render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
