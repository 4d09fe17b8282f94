"""Outage versus residual angular correction factor eta_tt at fixed elevations.

Also reports, per elevation, the eta_tt values where the FA-dominant case
exceeds the BL-dominant case.
"""
import argparse
from pathlib import Path

from leofso.config import load_config
from leofso.experiments import ETA_COLUMNS, calibrate_threshold, run_eta_sweep, write_csv, write_manifest


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--out", type=Path, default=Path("results/fig4"))
    args = ap.parse_args()
    cfg = load_config(args.config)
    cal = calibrate_threshold(cfg)
    rows = run_eta_sweep(cfg, cal)
    path = write_csv(rows, args.out / "eta_sweep.csv", ETA_COLUMNS)
    write_manifest(cfg, args.out, "eta-sweep", [path], cal)
    table = {(round(r["elevation_deg"], 6), r["eta_tt"], r["model"]): r["p_out"] for r in rows}
    for deg in sorted({k[0] for k in table}):
        flips = [eta for (d, eta, m) in table if d == deg and m == "fa_dominant"
                 and table[(d, eta, "fa_dominant")] > table[(d, eta, "bl_dominant")]]
        print(f"{deg:g} deg: FA-dominant above BL-dominant at eta_tt = {sorted(flips) or 'none'}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
