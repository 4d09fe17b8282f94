"""Scenario configuration: dataclasses plus the YAML loader.

Config files use SI units with the unit in the key name; angles are given
in degrees (``*_deg``) or radians (``*_rad``) and stored as radians.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError
from .fading import StateModel
from .linkbudget import LinkConfig
from .turbulence import DEFAULT_RTOL, TurbulenceProfile

BASELINE_MODES = ("single", "mixture")


@dataclass(frozen=True)
class Calibration:
    target_outage: float = 1e-2
    ref_elevation: float = math.radians(25.0)
    baseline_mode: str = "single"
    # eta_tt used while solving for the threshold
    eta_tt_ref: float = 1.0
    # case whose mixture marginals define the "mixture" baseline
    baseline_case: str = "nominal"

    def __post_init__(self):
        if self.baseline_mode not in BASELINE_MODES:
            raise ConfigError(f"baseline_mode must be one of {BASELINE_MODES}, got {self.baseline_mode!r}")
        if not 0 < self.ref_elevation <= math.pi / 2:
            raise ConfigError("calibration reference elevation must lie in (0, 90] degrees")
        if not 0 < self.eta_tt_ref <= 1:
            raise ConfigError("calibration eta_tt_ref must lie in (0, 1]")


@dataclass(frozen=True)
class ElevationGrid:
    """Inclusive grid [lo, hi] with spacing ``step`` (radians)."""

    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not 0 < self.lo <= self.hi <= math.pi / 2 + 1e-12 or not self.step > 0:
            raise ConfigError("elevation grid must satisfy 0 < min <= max <= 90 deg and step > 0")

    @classmethod
    def from_degrees(cls, lo: float, hi: float, step: float) -> "ElevationGrid":
        return cls(math.radians(lo), math.radians(hi), math.radians(step))

    def degrees(self) -> np.ndarray:
        lo, hi, step = (math.degrees(v) for v in (self.lo, self.hi, self.step))
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return np.round(lo + step * np.arange(count), 10)

    def radians(self) -> np.ndarray:
        return np.minimum(np.radians(self.degrees()), math.pi / 2)


@dataclass(frozen=True)
class MonteCarloConfig:
    n: int = 1_000_000
    seed: int = 20240601
    grid: ElevationGrid = field(default_factory=lambda: ElevationGrid.from_degrees(20.0, 35.0, 1.0))
    angular: str = "gaussian"

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("Monte Carlo sample count must be positive")


@dataclass(frozen=True)
class EtaSweep:
    elevations: tuple[float, ...] = tuple(math.radians(d) for d in (25.0, 40.0, 55.0, 70.0))
    eta_grid: tuple[float, ...] = tuple(np.round(np.linspace(0.05, 1.0, 20), 10))

    def __post_init__(self):
        if any(not 0 < e <= 1 for e in self.eta_grid):
            raise ConfigError("eta_tt values must lie in (0, 1]")


@dataclass(frozen=True)
class ScenarioConfig:
    link: LinkConfig = field(default_factory=LinkConfig)
    turbulence: TurbulenceProfile = field(default_factory=TurbulenceProfile)
    cases: dict = field(default_factory=dict)
    eta_tt: float = 1.0
    calibration: Calibration = field(default_factory=Calibration)
    elevation_grid: ElevationGrid = field(default_factory=lambda: ElevationGrid.from_degrees(20.0, 90.0, 1.0))
    mc: MonteCarloConfig = field(default_factory=MonteCarloConfig)
    eta_sweep: EtaSweep = field(default_factory=EtaSweep)
    quad_rtol: float = DEFAULT_RTOL

    def __post_init__(self):
        if not 0 < self.eta_tt <= 1:
            raise ConfigError("eta_tt must lie in (0, 1]")
        if (self.turbulence.ogs_altitude, self.turbulence.sat_altitude) != (
                self.link.ogs_altitude, self.link.sat_altitude):
            raise ConfigError("turbulence profile altitudes must match the link geometry")
        for name, sm in self.cases.items():
            if not isinstance(sm, StateModel):
                raise ConfigError(f"case {name!r} is not a StateModel")

    def with_overrides(self, seed: int | None = None, mc_samples: int | None = None) -> "ScenarioConfig":
        from dataclasses import replace
        mc = self.mc
        if seed is not None:
            mc = replace(mc, seed=seed)
        if mc_samples is not None:
            mc = replace(mc, n=mc_samples)
        return replace(self, mc=mc)


_LINK_KEYS = {
    "earth_radius_m": "earth_radius",
    "sat_altitude_m": "sat_altitude",
    "ogs_altitude_m": "ogs_altitude",
    "wavelength_m": "wavelength",
    "tx_power_w": "tx_power",
    "tx_aperture_m": "tx_aperture",
    "rx_aperture_m": "rx_aperture",
    "tx_efficiency": "tx_efficiency",
    "rx_efficiency": "rx_efficiency",
    "visibility_m": "visibility",
    "kruse_exponent": "kruse_exponent",
    "bl_scale_height_m": "bl_scale_height",
    "abs_transmittance": "abs_transmittance",
    "fov_angle_rad": "fov_angle",
    "jitter_std_rad": "jitter_std",
}


def _num(section: str, key: str, value) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}") from None


def _take(section: str, data: dict, allowed: set[str]) -> dict:
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {section!r}: {sorted(unknown)}")
    return data


def _angle(section: str, data: dict, stem: str, default: float | None = None) -> float | None:
    """Read ``<stem>_deg`` or ``<stem>_rad`` and return radians."""
    deg, rad = f"{stem}_deg", f"{stem}_rad"
    if deg in data and rad in data:
        raise ConfigError(f"give either {section}.{deg} or {section}.{rad}, not both")
    if deg in data:
        return math.radians(_num(section, deg, data[deg]))
    if rad in data:
        return _num(section, rad, data[rad])
    return default


def _angles(section: str, data: dict, stem: str) -> tuple[float, ...] | None:
    deg, rad = f"{stem}_deg", f"{stem}_rad"
    if deg in data and rad in data:
        raise ConfigError(f"give either {section}.{deg} or {section}.{rad}, not both")
    if deg in data:
        return tuple(math.radians(_num(section, deg, v)) for v in data[deg])
    if rad in data:
        return tuple(_num(section, rad, v) for v in data[rad])
    return None


def _parse_link(data: dict) -> LinkConfig:
    allowed = set(_LINK_KEYS) | {"abs_optical_depth", "min_elevation_deg", "min_elevation_rad"}
    data = _take("link", data, allowed)
    kwargs = {_LINK_KEYS[k]: _num("link", k, v) for k, v in data.items() if k in _LINK_KEYS}
    if "abs_optical_depth" in data:
        if "abs_transmittance" in data:
            raise ConfigError("give either link.abs_transmittance or link.abs_optical_depth, not both")
        kwargs["abs_transmittance"] = math.exp(-_num("link", "abs_optical_depth", data["abs_optical_depth"]))
    min_elevation = _angle("link", data, "min_elevation")
    if min_elevation is not None:
        kwargs["min_elevation"] = min_elevation
    return LinkConfig(**kwargs)


def _parse_case(name: str, data: dict) -> StateModel:
    data = _take(f"cases.{name}", data, {"probs", "chi_fa", "chi_bl"})
    try:
        probs = [float(p) for p in data["probs"]]
        fa = [float(c) for c in data["chi_fa"]]
        bl = [float(c) for c in data["chi_bl"]]
    except KeyError as exc:
        raise ConfigError(f"case {name!r} is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError):
        raise ConfigError(f"case {name!r}: probs/chi_fa/chi_bl must be lists of numbers") from None
    if not len(probs) == len(fa) == len(bl):
        raise ConfigError(f"case {name!r}: probs, chi_fa and chi_bl must have equal length")
    return StateModel(tuple(probs), tuple(zip(fa, bl)))


def _parse_grid(section: str, data: dict) -> ElevationGrid:
    stems = ("min", "max", "step")
    data = _take(section, data, {f"{s}_{u}" for s in stems for u in ("deg", "rad")})
    values = [_angle(section, data, s) for s in stems]
    if any(v is None for v in values):
        raise ConfigError(f"{section} needs min, max and step")
    return ElevationGrid(*values)


def config_from_dict(raw: dict) -> ScenarioConfig:
    """Build a :class:`ScenarioConfig` from a parsed config document."""
    raw = _take("<root>", raw or {}, {"link", "turbulence", "cases", "eta_tt", "calibration",
                                      "elevation_grid", "mc", "eta_sweep", "quadrature"})
    link = _parse_link(raw.get("link", {}))
    turb = _take("turbulence", raw.get("turbulence", {}), {"wind_rms_mps", "ground_cn2"})
    profile = TurbulenceProfile.from_link(link, wind_rms=_num("turbulence", "wind_rms_mps", turb.get("wind_rms_mps", 21.0)),
                                          ground_cn2=_num("turbulence", "ground_cn2", turb.get("ground_cn2", 1.7e-14)))
    cases = {str(k): _parse_case(str(k), v) for k, v in (raw.get("cases") or {}).items()}

    cal = _take("calibration", raw.get("calibration", {}),
                {"target_outage", "ref_elevation_deg", "ref_elevation_rad", "baseline_mode", "eta_tt_ref",
                 "baseline_case"})
    calibration = Calibration(
        target_outage=_num("calibration", "target_outage", cal.get("target_outage", 1e-2)),
        ref_elevation=_angle("calibration", cal, "ref_elevation", math.radians(25.0)),
        baseline_mode=str(cal.get("baseline_mode", "single")),
        eta_tt_ref=_num("calibration", "eta_tt_ref", cal.get("eta_tt_ref", 1.0)),
        baseline_case=str(cal.get("baseline_case", "nominal")),
    )

    kwargs = {}
    if "elevation_grid" in raw:
        kwargs["elevation_grid"] = _parse_grid("elevation_grid", raw["elevation_grid"])
    if "mc" in raw:
        mc = _take("mc", raw["mc"], {"n", "seed", "grid", "angular"})
        mc_kwargs = {}
        if "n" in mc:
            mc_kwargs["n"] = int(_num("mc", "n", mc["n"]))
        if "seed" in mc:
            mc_kwargs["seed"] = int(mc["seed"])
        if "grid" in mc:
            mc_kwargs["grid"] = _parse_grid("mc.grid", mc["grid"])
        if "angular" in mc:
            mc_kwargs["angular"] = str(mc["angular"])
        kwargs["mc"] = MonteCarloConfig(**mc_kwargs)
    if "eta_sweep" in raw:
        es = _take("eta_sweep", raw["eta_sweep"], {"elevations_deg", "elevations_rad", "eta_grid"})
        es_kwargs = {}
        elevations = _angles("eta_sweep", es, "elevations")
        if elevations is not None:
            es_kwargs["elevations"] = elevations
        if "eta_grid" in es:
            es_kwargs["eta_grid"] = tuple(float(e) for e in es["eta_grid"])
        kwargs["eta_sweep"] = EtaSweep(**es_kwargs)
    if "quadrature" in raw:
        quad = _take("quadrature", raw["quadrature"], {"rtol"})
        kwargs["quad_rtol"] = _num("quadrature", "rtol", quad.get("rtol", DEFAULT_RTOL))
    return ScenarioConfig(link=link, turbulence=profile, cases=cases,
                          eta_tt=_num("<root>", "eta_tt", raw.get("eta_tt", 1.0)),
                          calibration=calibration, **kwargs)


def load_config(path: str | Path | None = None) -> ScenarioConfig:
    """Load a YAML scenario file; ``None`` loads the bundled reference scenario."""
    if path is None:
        text = resources.files("leofso").joinpath("data/reference.yaml").read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    return config_from_dict(raw)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Canonical plain-data view in the config-file schema (angles in radians).

    ``config_from_dict(config_to_dict(cfg)) == cfg``; also used for hashing
    and manifests.
    """
    link = cfg.link
    link_out = {key: float(getattr(link, attr)) for key, attr in _LINK_KEYS.items()}
    link_out["min_elevation_rad"] = link.min_elevation

    def grid(g: ElevationGrid) -> dict:
        return {"min_rad": g.lo, "max_rad": g.hi, "step_rad": g.step}

    return {
        "link": link_out,
        "turbulence": {"wind_rms_mps": cfg.turbulence.wind_rms, "ground_cn2": cfg.turbulence.ground_cn2},
        "cases": {name: {"probs": list(sm.probs), "chi_fa": [s[0] for s in sm.scales],
                         "chi_bl": [s[1] for s in sm.scales]}
                  for name, sm in cfg.cases.items()},
        "eta_tt": cfg.eta_tt,
        "calibration": {
            "target_outage": cfg.calibration.target_outage,
            "ref_elevation_rad": cfg.calibration.ref_elevation,
            "baseline_mode": cfg.calibration.baseline_mode,
            "eta_tt_ref": cfg.calibration.eta_tt_ref,
            "baseline_case": cfg.calibration.baseline_case,
        },
        "elevation_grid": grid(cfg.elevation_grid),
        "mc": {"n": cfg.mc.n, "seed": cfg.mc.seed, "angular": cfg.mc.angular, "grid": grid(cfg.mc.grid)},
        "eta_sweep": {"elevations_rad": list(cfg.eta_sweep.elevations), "eta_grid": list(cfg.eta_sweep.eta_grid)},
        "quadrature": {"rtol": cfg.quad_rtol},
    }


def config_hash(cfg: ScenarioConfig) -> str:
    blob = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
