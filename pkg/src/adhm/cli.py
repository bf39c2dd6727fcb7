"""Command-line front end.

Subcommands: ``run`` (one trial, printed in full), ``sweep`` (the Monte Carlo
grid with CSV/JSON outputs), ``verify`` (randomized numeric checks),
``analyze`` (summaries of result CSVs), and ``presets`` (list or export the
built-in configs). Exit codes: 0 success, 1 runtime or verification failure,
2 usage or config errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from collections import defaultdict
from pathlib import Path

from .config import (ConfigError, apply_overrides, config_from_dict,
                     preset_summary, resolve_config_doc, write_presets,
                     PRESETS)
from .harness import run_sweep, run_trial, trial_seeds
from .verify import SUITES, run_verification

log = logging.getLogger("adhm")


def _add_config_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", required=True,
                     help="config file path or preset name")
    sub.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="PATH=VALUE",
                     help="override a config field (dotted path, YAML value); "
                          "repeatable")
    sub.add_argument("--seed", type=int, default=None,
                     help="replace the config's base_seed")


def _load_config(args):
    doc = resolve_config_doc(args.config)
    if args.overrides:
        doc = apply_overrides(doc, args.overrides)
    if args.seed is not None:
        doc["base_seed"] = args.seed
    return config_from_dict(doc)


def _cmd_run(args) -> int:
    config = _load_config(args)
    if args.policy is None:
        spec = config.policies[0]
    else:
        by_id = {s.policy_id: s for s in config.policies}
        if args.policy not in by_id:
            raise ConfigError([f"--policy: no policy {args.policy!r} in the "
                               f"config (have: {', '.join(by_id)})"])
        spec = by_id[args.policy]
    if args.neg_log_c is None:
        c_index = 0
    else:
        target = math.exp(-args.neg_log_c)
        matches = [i for i, c in enumerate(config.c_grid)
                   if abs(-math.log(c) - args.neg_log_c) < 1e-9]
        if not matches:
            grid = ", ".join(f"{-math.log(c):g}" for c in config.c_grid)
            raise ConfigError([f"--neg-log-c: {args.neg_log_c:g} is not on the "
                               f"config grid ({grid}); adjust c_grid with --set"])
        c_index = matches[0]
        del target
    c = config.c_grid[c_index]
    outcome = run_trial(config, spec, c, c_index, args.trial)
    world_seed, policy_seed = trial_seeds(config.base_seed, spec.policy_id,
                                          c_index, args.trial)
    doc = {
        "policy": outcome.policy,
        "c": outcome.c,
        "neg_log_c": -math.log(outcome.c),
        "trial": outcome.trial,
        "m_star": outcome.m_star,
        "declared": outcome.declared,
        "correct": outcome.correct,
        "tau": outcome.tau,
        "samples": outcome.samples,
        "idle": outcome.idle,
        "censored": outcome.censored,
        "clamp_events": outcome.clamp_events,
        "world_seed": world_seed,
        "policy_seed": policy_seed,
    }
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args)
    result = run_sweep(config, workers=args.workers, out_dir=args.out,
                       progress=log.info)
    widths = f"{'policy':>12} {'-log c':>7} {'delay':>9} {'error':>9} {'risk':>10}"
    print(widths)
    for row in result.rows:
        print(f"{row.policy:>12} {row.neg_log_c:>7.3g} {row.avg_delay:>9.3f} "
              f"{row.error_rate:>9.5f} {row.bayes_risk:>10.3g}")
    if result.csv_path is not None:
        print(f"wrote {result.csv_path} and {result.summary_path}")
    censored = [r for r in result.rows if r.censored_frac > 0]
    if censored:
        log.warning("%d row(s) contain horizon-censored trials", len(censored))
    return 0


def _cmd_verify(args) -> int:
    results = run_verification(only=args.only or None, tol=args.tol)
    failed = False
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.detail}")
        if not res.passed:
            failed = True
            if res.worst is not None:
                print(f"     failing instance: {json.dumps(res.worst)}")
    return 1 if failed else 0


def _read_rows(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for raw in reader:
            row = dict(raw)
            for key in ("c", "neg_log_c", "avg_delay", "error_rate",
                        "bayes_risk", "avg_samples", "avg_idle",
                        "censored_frac"):
                if key in row and row[key] not in (None, ""):
                    row[key] = float(row[key])
            rows.append(row)
    return rows


def _cmd_analyze(args) -> int:
    import numpy as np

    status = 0
    for path in args.csv:
        if not path.exists():
            raise ConfigError([f"analyze: no such file {path}"])
        rows = _read_rows(path)
        if not rows:
            print(f"{path}: empty")
            status = 1
            continue
        print(f"{path}:")
        grouped = defaultdict(list)
        for row in rows:
            grouped[row["policy"]].append(row)
        for policy, prows in grouped.items():
            prows.sort(key=lambda r: r["neg_log_c"])
            print(f"  {policy}: {len(prows)} grid point(s)")
            for r in prows:
                print(f"    -log c={r['neg_log_c']:>6.3g}  "
                      f"delay={r['avg_delay']:>9.3f}  "
                      f"error={r['error_rate']:>9.5f}  "
                      f"risk={r['bayes_risk']:>10.4g}")
            if len(prows) >= 2:
                xs = np.array([r["neg_log_c"] for r in prows])
                ys = np.array([r["avg_delay"] for r in prows])
                slope = float(np.polyfit(xs, ys, 1)[0])
                rate = 1.0 / slope if slope > 0 else math.inf
                print(f"    delay slope {slope:.4f} steps per nat "
                      f"(implied rate {rate:.4f})")
    return status


def _cmd_presets(args) -> int:
    if args.write_dir is not None:
        written = write_presets(args.write_dir)
        for path in written:
            print(path)
        return 0
    for name in sorted(PRESETS):
        print(preset_summary(name))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adhm",
        description="Sequential search for a hidden-Markov-modulated anomaly.")
    parser.add_argument("--log-level", default="info",
                        choices=["debug", "info", "warning", "error"])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single trial and print it")
    _add_config_args(p_run)
    p_run.add_argument("--policy", default=None,
                       help="policy id from the config (default: first)")
    p_run.add_argument("--neg-log-c", type=float, default=None,
                       help="grid point to run (default: first)")
    p_run.add_argument("--trial", type=int, default=0,
                       help="trial index (default 0)")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the Monte Carlo grid")
    _add_config_args(p_sweep)
    p_sweep.add_argument("--out", default="runs",
                         help="output directory for CSV and summary JSON "
                              "(default: runs)")
    p_sweep.add_argument("--workers", type=int,
                         default=int(os.environ.get("AHT_WORKERS", "1")),
                         help="worker processes (default: $AHT_WORKERS or 1)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run numeric self-checks")
    p_verify.add_argument("--only", action="append", choices=sorted(SUITES),
                          help="run just this suite; repeatable")
    p_verify.add_argument("--tol", type=float, default=1e-6,
                          help="tolerance for the inequality margins")
    p_verify.set_defaults(func=_cmd_verify)

    p_analyze = sub.add_parser("analyze", help="summarize result CSVs")
    p_analyze.add_argument("csv", nargs="+", type=Path)
    p_analyze.set_defaults(func=_cmd_analyze)

    p_presets = sub.add_parser("presets", help="list or export presets")
    p_presets.add_argument("--write-dir", default=None,
                           help="write each preset as YAML into this directory")
    p_presets.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(),
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        if log.isEnabledFor(logging.DEBUG):
            log.exception("command failed")
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
