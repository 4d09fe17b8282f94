"""Experiment drivers: threshold calibration and the three result tables.

All tables are lists of dicts (one per CSV row) in deterministic order:
elevation first, then model/case in config order.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import optimize

from . import __version__
from .config import ScenarioConfig, config_hash, config_to_dict
from .errors import ConfigError
from .fading import FadingParams, StateModel, state_params
from .linkbudget import LinkConfig, large_scale_gain
from .montecarlo import SweepPoint, mc_sweep
from .outage import outage_for_states, outage_product_of_marginals
from .turbulence import KernelContext, TurbulenceProfile, stats_matrix

BASELINE = "baseline"


@lru_cache(maxsize=8192)
def _matrix(link: LinkConfig, profile: TurbulenceProfile, elevation: float, rtol: float) -> tuple:
    m = stats_matrix(profile, KernelContext.from_link(link, elevation), rtol)
    return tuple(map(tuple, m))


def matrix_at(cfg: ScenarioConfig, elevation: float) -> np.ndarray:
    """FA/BL statistics matrix at ``elevation`` (cached per config and angle)."""
    return np.array(_matrix(cfg.link, cfg.turbulence, float(elevation), cfg.quad_rtol))


def _case(cfg: ScenarioConfig, name: str) -> StateModel:
    try:
        return cfg.cases[name]
    except KeyError:
        raise ConfigError(f"unknown case {name!r}; configured cases: {sorted(cfg.cases)}") from None


def case_params(cfg: ScenarioConfig, name: str, elevation: float,
                eta_tt: float | None = None) -> tuple[StateModel, list[FadingParams]]:
    states = StateModel.single() if name == BASELINE else _case(cfg, name)
    eta = cfg.eta_tt if eta_tt is None else eta_tt
    return states, state_params(matrix_at(cfg, elevation), states, cfg.link, eta)


def state_averaged_stats(cfg: ScenarioConfig, name: str, elevation: float) -> np.ndarray:
    """sum_s pi_s z_s for one case, as (sigma_a^2, beta_rms^2)."""
    states = _case(cfg, name)
    m = matrix_at(cfg, elevation)
    zs = np.array([m @ np.asarray(chi) for chi in states.scales])
    return np.asarray(states.probs) @ zs


def outage_at(cfg: ScenarioConfig, model: str, elevation: float, nu: float, eta_tt: float | None = None) -> float:
    """Analytic outage of ``model`` (a case name or ``"baseline"``)."""
    if model == BASELINE and cfg.calibration.baseline_mode == "mixture":
        states, params = case_params(cfg, cfg.calibration.baseline_case, elevation, eta_tt)
        return outage_product_of_marginals(states, params, nu)
    states, params = case_params(cfg, model, elevation, eta_tt)
    return outage_for_states(states, params, nu)


@dataclass(frozen=True)
class ThresholdCalibration:
    nu_ref: float
    p_th: float
    ref_elevation: float
    target: float
    achieved: float

    def nu(self, link: LinkConfig, elevation: float) -> float:
        return self.p_th / (link.tx_power * large_scale_gain(link, elevation))


def calibrate_threshold(cfg: ScenarioConfig) -> ThresholdCalibration:
    """Threshold power at which the baseline hits the target outage at the reference elevation.

    The baseline outage is strictly increasing in nu, so the root of
    ln P(nu) = ln target in ln nu is unique once bracketed.
    """
    cal = cfg.calibration
    target = cal.target_outage
    if not 0 < target < 1:
        raise ConfigError(f"target outage {target!r} cannot be bracketed; it must lie in (0, 1)")
    eps = cal.ref_elevation

    def f(log_nu):
        p = outage_at(cfg, BASELINE, eps, math.exp(log_nu), cal.eta_tt_ref)
        return math.log(max(p, 1e-300)) - math.log(target)

    lo, hi = -1.0, 1.0
    for _ in range(200):
        if f(lo) < 0:
            break
        lo -= 2.0
    else:
        raise ConfigError("could not bracket the calibration threshold from below")
    for _ in range(200):
        if f(hi) > 0:
            break
        hi += 2.0
        if hi > 700:
            raise ConfigError(f"target outage {target} is unreachable; threshold bracketing failed")
    else:
        raise ConfigError("could not bracket the calibration threshold from above")
    log_nu = optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    nu = math.exp(log_nu)
    achieved = outage_at(cfg, BASELINE, eps, nu, cal.eta_tt_ref)
    p_th = nu * cfg.link.tx_power * large_scale_gain(cfg.link, eps)
    return ThresholdCalibration(nu_ref=nu, p_th=p_th, ref_elevation=eps, target=target, achieved=achieved)


def run_stats_experiment(cfg: ScenarioConfig, elevations: Iterable[float] | None = None) -> list[dict]:
    """State-averaged scintillation index and mean-square AoA per case and elevation."""
    elevations = cfg.elevation_grid.radians() if elevations is None else elevations
    rows = []
    for eps in elevations:
        for name in cfg.cases:
            sig, beta = state_averaged_stats(cfg, name, eps)
            rows.append({"elevation_deg": math.degrees(eps), "case": name,
                         "sigma_a2_avg": sig, "beta_rms2_avg": beta})
    return rows


def models(cfg: ScenarioConfig) -> list[str]:
    return [BASELINE] + list(cfg.cases)


def run_outage_experiment(cfg: ScenarioConfig, calibration: ThresholdCalibration | None = None,
                          elevations: Iterable[float] | None = None, with_mc: bool = False) -> list[dict]:
    """Outage versus elevation for the baseline and every case at the calibrated threshold.

    With ``with_mc`` the Monte Carlo columns are filled at elevations on the
    configured MC grid.
    """
    calibration = calibration or calibrate_threshold(cfg)
    elevations = cfg.elevation_grid.radians() if elevations is None else elevations
    mc_rows = {}
    if with_mc:
        for row in run_mc_experiment(cfg, calibration):
            mc_rows[(round(row["elevation_deg"], 8), row["model"])] = row
    rows = []
    for eps in elevations:
        nu = calibration.nu(cfg.link, eps)
        for model in models(cfg):
            p = outage_at(cfg, model, eps, nu)
            mc = mc_rows.get((round(math.degrees(eps), 8), model))
            rows.append({
                "elevation_deg": math.degrees(eps), "model": model, "p_out": p,
                "p_out_mc": mc["p_out_mc"] if mc else None,
                "mc_stderr": mc["mc_stderr"] if mc else None,
                "resolvable_flag": mc["resolvable_flag"] if mc else None,
                "log10_p_out": math.log10(p) if p > 0 else -math.inf,
            })
    return rows


def run_eta_sweep(cfg: ScenarioConfig, calibration: ThresholdCalibration | None = None,
                  elevations: Sequence[float] | None = None, eta_grid: Sequence[float] | None = None,
                  cases: Sequence[str] | None = None) -> list[dict]:
    """Outage versus residual angular correction factor at fixed threshold."""
    calibration = calibration or calibrate_threshold(cfg)
    elevations = cfg.eta_sweep.elevations if elevations is None else elevations
    eta_grid = cfg.eta_sweep.eta_grid if eta_grid is None else eta_grid
    names = [BASELINE] + [c for c in (cases or ("bl_dominant", "fa_dominant")) if c in cfg.cases]
    rows = []
    for eps in elevations:
        nu = calibration.nu(cfg.link, eps)
        for eta in eta_grid:
            for model in names:
                rows.append({"elevation_deg": math.degrees(eps), "eta_tt": eta, "model": model,
                             "p_out": outage_at(cfg, model, eps, nu, eta)})
    return rows


def run_mc_experiment(cfg: ScenarioConfig, calibration: ThresholdCalibration | None = None,
                      elevations: Iterable[float] | None = None, workers: int = 1) -> list[dict]:
    """Monte Carlo outage for every model on the MC elevation grid."""
    calibration = calibration or calibrate_threshold(cfg)
    elevations = cfg.mc.grid.radians() if elevations is None else elevations
    if cfg.calibration.baseline_mode == "mixture":
        raise ConfigError("Monte Carlo of the mixture-marginal baseline is not supported")
    points = []
    for eps in elevations:
        nu = calibration.nu(cfg.link, eps)
        for model in models(cfg):
            states, params = case_params(cfg, model, eps)
            points.append(SweepPoint(label=model, elevation=eps, states=states, params=tuple(params), nu=nu,
                                     analytic=outage_for_states(states, params, nu)))
    rows = []
    for r in mc_sweep(points, n=cfg.mc.n, seed=cfg.mc.seed, angular=cfg.mc.angular, workers=workers):
        rows.append({
            "elevation_deg": math.degrees(r.point.elevation), "model": r.point.label,
            "p_out": r.point.analytic, "p_out_mc": r.result.estimate, "mc_stderr": r.result.stderr,
            "resolvable_flag": int(r.resolvable), "rel_error": r.rel_error, "z_score": r.within,
            "stream": r.result.stream,
        })
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.9e}"
    return str(value)


def write_csv(rows: Sequence[dict], path: str | Path, columns: Sequence[str] | None = None) -> Path:
    """Write rows with a header; floats in scientific notation, 10 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = list(columns or (rows[0].keys() if rows else []))
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c)) for c in columns])
    return path


def write_manifest(cfg: ScenarioConfig, out_dir: str | Path, command: str, outputs: Sequence[str | Path],
                   calibration: ThresholdCalibration | None = None, extra: dict | None = None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "tool": "leofso",
        "version": __version__,
        "command": command,
        "config_hash": config_hash(cfg),
        "seed": cfg.mc.seed,
        "mc_samples": cfg.mc.n,
        "config": config_to_dict(cfg),
        "outputs": [Path(p).name for p in outputs],
    }
    if calibration is not None:
        manifest["calibration"] = {"nu_ref": calibration.nu_ref, "p_th_w": calibration.p_th,
                                   "ref_elevation_rad": calibration.ref_elevation,
                                   "target": calibration.target, "achieved": calibration.achieved}
    if extra:
        manifest.update(extra)
    path = out_dir / f"manifest_{command}.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return path


STATS_COLUMNS = ("elevation_deg", "case", "sigma_a2_avg", "beta_rms2_avg")
OUTAGE_COLUMNS = ("elevation_deg", "model", "p_out", "p_out_mc", "mc_stderr", "resolvable_flag", "log10_p_out")
ETA_COLUMNS = ("elevation_deg", "eta_tt", "model", "p_out")
MC_COLUMNS = ("elevation_deg", "model", "p_out", "p_out_mc", "mc_stderr", "resolvable_flag", "rel_error",
              "z_score", "stream")
