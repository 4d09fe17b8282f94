"""State-averaged scintillation index and mean-square AoA versus elevation.

Writes stats.csv (one row per elevation and case) plus a manifest.
"""
import argparse
from pathlib import Path

from leofso.config import load_config
from leofso.experiments import STATS_COLUMNS, run_stats_experiment, write_csv, write_manifest


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--out", type=Path, default=Path("results/fig2"))
    args = ap.parse_args()
    cfg = load_config(args.config)
    rows = run_stats_experiment(cfg)
    path = write_csv(rows, args.out / "stats.csv", STATS_COLUMNS)
    write_manifest(cfg, args.out, "stats", [path])
    at25 = [r for r in rows if abs(r["elevation_deg"] - 25.0) < 1e-9]
    for r in at25:
        print(f"25 deg {r['case']:<12} sigma_a2={r['sigma_a2_avg']:.4g} beta_rms2={r['beta_rms2_avg']:.4g}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
