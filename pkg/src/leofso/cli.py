"""Command-line interface: ``leofso <verb> [--config PATH] [--out DIR] ...``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .config import config_hash, load_config
from .errors import ConfigError, NumericError
from .experiments import (ETA_COLUMNS, MC_COLUMNS, OUTAGE_COLUMNS, STATS_COLUMNS, calibrate_threshold,
                          run_eta_sweep, run_mc_experiment, run_outage_experiment, run_stats_experiment,
                          write_csv, write_manifest)
from .validation import run_validation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4

log = logging.getLogger("leofso")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", type=Path, default=None, help="scenario YAML (default: bundled reference scenario)")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed override")
    p.add_argument("--mc-samples", type=int, default=None, help="Monte Carlo sample count override")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="leofso", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)
    sub.add_parser("stats", parents=[common], help="state-averaged second-order statistics vs elevation")
    o = sub.add_parser("outage", parents=[common], help="outage vs elevation at the calibrated threshold")
    o.add_argument("--with-mc", action="store_true", help="fill Monte Carlo columns on the MC grid")
    e = sub.add_parser("eta-sweep", parents=[common], help="outage vs residual angular correction factor")
    e.add_argument("--elevations", type=float, nargs="+", default=None, help="elevations in degrees")
    e.add_argument("--eta", type=float, nargs="+", default=None, help="eta_tt values in (0, 1]")
    sub.add_parser("calibrate", parents=[common], help="solve for the outage threshold power")
    m = sub.add_parser("mc", parents=[common], help="Monte Carlo outage on the MC elevation grid")
    m.add_argument("--workers", type=int, default=1)
    v = sub.add_parser("validate", parents=[common], help="compare against the reference numbers")
    v.add_argument("--no-mc", action="store_true", help="skip the Monte Carlo criterion")
    return parser


def _run(args) -> int:
    cfg = load_config(args.config).with_overrides(seed=args.seed, mc_samples=args.mc_samples)
    out = args.out
    if args.cmd == "stats":
        path = write_csv(run_stats_experiment(cfg), out / "stats.csv", STATS_COLUMNS)
        write_manifest(cfg, out, "stats", [path])
        print(path)
        return EXIT_OK

    cal = calibrate_threshold(cfg)
    if args.cmd == "calibrate":
        result = {"p_th_w": cal.p_th, "nu_ref": cal.nu_ref, "ref_elevation_deg": math.degrees(cal.ref_elevation),
                  "target_outage": cal.target, "achieved_outage": cal.achieved, "config_hash": config_hash(cfg)}
        out.mkdir(parents=True, exist_ok=True)
        (out / "calibration.json").write_text(json.dumps(result, indent=2))
        write_manifest(cfg, out, "calibrate", [out / "calibration.json"], cal)
        print(json.dumps(result, indent=2))
        return EXIT_OK
    if args.cmd == "outage":
        path = write_csv(run_outage_experiment(cfg, cal, with_mc=args.with_mc), out / "outage.csv", OUTAGE_COLUMNS)
        write_manifest(cfg, out, "outage", [path], cal)
        print(path)
        return EXIT_OK
    if args.cmd == "eta-sweep":
        elevations = None if args.elevations is None else [math.radians(d) for d in args.elevations]
        if args.eta is not None and any(not 0 < e <= 1 for e in args.eta):
            raise ConfigError("eta values must lie in (0, 1]")
        rows = run_eta_sweep(cfg, cal, elevations=elevations, eta_grid=args.eta)
        path = write_csv(rows, out / "eta_sweep.csv", ETA_COLUMNS)
        write_manifest(cfg, out, "eta-sweep", [path], cal)
        print(path)
        return EXIT_OK
    if args.cmd == "mc":
        path = write_csv(run_mc_experiment(cfg, cal, workers=args.workers), out / "mc.csv", MC_COLUMNS)
        write_manifest(cfg, out, "mc", [path], cal)
        print(path)
        return EXIT_OK
    if args.cmd == "validate":
        checks = run_validation(cfg, include_mc=not args.no_mc)
        for c in checks:
            print(c.line())
        hard_fail = [c for c in checks if not c.passed and not c.soft]
        print(f"{len(checks) - len(hard_fail)}/{len(checks)} checks passed or soft")
        return EXIT_VALIDATION if hard_fail else EXIT_OK
    raise AssertionError(args.cmd)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
