"""Command line front end: `plot <kind> <csv...> -o <png>` or `plot --spec <file>`."""

from __future__ import annotations

import argparse
import sys

import yaml

from .io import SchemaError
from .render import KINDS, PlotSpec, render

_SPEC_KEYS = {"kind", "inputs", "out", "labels", "log_y", "title"}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render a comparison figure from sweep CSV logs.",
    )
    parser.add_argument("kind", nargs="?",
                        help=f"plot kind: {', '.join(sorted(KINDS))}")
    parser.add_argument("csvs", nargs="*", help="input sweep CSV files")
    parser.add_argument("-o", "--out", help="output PNG path")
    parser.add_argument("--spec", help="YAML plot spec file instead of "
                                       "positional arguments")
    parser.add_argument("--label", action="append", default=[],
                        help="series label prefix, one per input; repeatable")
    parser.add_argument("--log-y", action="store_true",
                        help="log-scale the y axis")
    parser.add_argument("--title", default="", help="figure title")
    return parser


def _spec_from_file(path: str) -> PlotSpec:
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: plot spec must be a mapping")
    unknown = sorted(set(doc) - _SPEC_KEYS)
    if unknown:
        raise ValueError(f"{path}: unknown spec key(s) {', '.join(unknown)}")
    return PlotSpec(
        kind=str(doc.get("kind", "")),
        inputs=tuple(doc.get("inputs") or ()),
        out=str(doc.get("out", "")),
        labels=tuple(doc.get("labels") or ()),
        log_y=bool(doc.get("log_y", False)),
        title=str(doc.get("title", "")),
    )


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.spec is not None:
            if args.kind or args.csvs or args.out:
                print("error: --spec replaces the positional arguments",
                      file=sys.stderr)
                return 2
            spec = _spec_from_file(args.spec)
        else:
            if not args.kind or not args.csvs or not args.out:
                print("error: need <kind> <csv...> -o <png> (or --spec)",
                      file=sys.stderr)
                return 2
            spec = PlotSpec(kind=args.kind, inputs=tuple(args.csvs),
                            out=args.out, labels=tuple(args.label),
                            log_y=args.log_y, title=args.title)
    except (OSError, ValueError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    issues = spec.problems()
    if issues:
        print("error: invalid plot spec:", file=sys.stderr)
        for issue in issues:
            print(f"  {issue}", file=sys.stderr)
        return 2
    try:
        out = render(spec)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
