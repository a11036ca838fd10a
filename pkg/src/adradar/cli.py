"""Command-line front-end: ``adradar --experiment NAME [--config PATH] [--out DIR]``.

Only the output directory may come from the environment
(``ADRADAR_OUTPUT_DIR``); every model parameter lives in the config file.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

from . import experiments
from .config import ConfigError, build_experiment, load_config

SCHEMA_VERSION = 1
OUTPUT_ENV = "ADRADAR_OUTPUT_DIR"


def _parser():
    p = argparse.ArgumentParser(prog="adradar", description=__doc__.splitlines()[0])
    p.add_argument("--config", metavar="PATH", help="INI config file (default: bundled default.ini)")
    p.add_argument("--experiment", required=True, choices=experiments.EXPERIMENTS)
    p.add_argument("--out", metavar="DIR", help=f"output directory (default: ${OUTPUT_ENV} or ./results)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, help="Monte Carlo trials (default: [scenario] trials)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for Monte Carlo trials")
    return p


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, str):
        return x
    s = experiments.fmt(x)
    try:
        return int(s)
    except ValueError:
        return float(s) if s not in ("inf", "-inf", "nan") else s


def write_outputs(out_dir, name, seed, trials, tables, summary):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for fname in sorted(tables):
        header, rows = tables[fname]
        path = out_dir / fname
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([experiments.fmt(v) for v in row])
        written.append(fname)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "experiment": name,
        "seed": seed,
        "trials": trials,
        "files": written,
        "results": _jsonable(summary),
    }
    path = out_dir / "summary.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return written + ["summary.json"]


def main(argv=None):
    args = _parser().parse_args(argv)
    out = args.out or os.environ.get(OUTPUT_ENV) or "results"
    try:
        raw = load_config(args.config)
        exp = build_experiment(raw)
        trials = raw["scenario"]["trials"] if args.trials is None else args.trials
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        tables, summary = experiments.run(args.experiment, exp, args.seed, trials, args.jobs)
        files = write_outputs(out, args.experiment, args.seed, trials, tables, summary)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"adradar: error: {exc}", file=sys.stderr)
        return 2
    for f in files:
        print(Path(out) / f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
