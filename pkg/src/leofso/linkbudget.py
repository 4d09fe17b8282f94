"""Deterministic large-scale gain of a LEO-to-ground optical downlink.

Angles are radians throughout; conversion from degrees happens only when a
config file or the command line is parsed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError

REFERENCE_WAVELENGTH = 550e-9
KRUSE_CONSTANT = 3.912


@dataclass(frozen=True)
class LinkConfig:
    """System and geometry parameters of the downlink (SI units, radians)."""

    earth_radius: float = 6371e3
    sat_altitude: float = 550e3
    ogs_altitude: float = 20.0
    wavelength: float = 1550e-9
    tx_power: float = 2.0
    tx_aperture: float = 0.10
    rx_aperture: float = 0.30
    tx_efficiency: float = 0.8
    rx_efficiency: float = 0.8
    visibility: float = 15e3
    kruse_exponent: float = 1.3
    bl_scale_height: float = 2e3
    abs_transmittance: float = math.exp(-0.05)
    min_elevation: float = math.radians(20.0)
    fov_angle: float = 20e-6
    jitter_std: float = 2e-6
    tau0: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lengths = ("earth_radius", "sat_altitude", "wavelength", "tx_aperture", "rx_aperture",
                   "visibility", "bl_scale_height")
        for name in lengths:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.ogs_altitude >= 0:
            raise ConfigError("ogs_altitude must be non-negative")
        if not self.sat_altitude > self.ogs_altitude:
            raise ConfigError("sat_altitude must exceed ogs_altitude")
        for name in ("tx_efficiency", "rx_efficiency", "abs_transmittance"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ConfigError(f"{name} must lie in (0, 1], got {v!r}")
        if not self.tx_power > 0:
            raise ConfigError("tx_power must be positive")
        if not 0 < self.min_elevation <= math.pi / 2:
            raise ConfigError("min_elevation must lie in (0, pi/2]")
        if not self.fov_angle > 0 or not self.jitter_std >= 0:
            raise ConfigError("fov_angle must be positive and jitter_std non-negative")
        object.__setattr__(self, "tau0", _zenith_optical_depth(self))

    @property
    def delta_h(self) -> float:
        return self.sat_altitude - self.ogs_altitude

    @property
    def theta_eq2(self) -> float:
        """Squared effective angular acceptance: FOV plus diffraction spread."""
        return self.fov_angle ** 2 + (self.wavelength / self.rx_aperture) ** 2


def _check_elevation(elevation: float) -> None:
    if not 0 < elevation <= math.pi / 2 + 1e-15:
        raise DomainError(f"elevation must lie in (0, pi/2] radians, got {elevation!r}")


def _zenith_optical_depth(cfg: LinkConfig) -> float:
    tau_abs = -math.log(cfg.abs_transmittance)
    tau_scat = (KRUSE_CONSTANT / cfg.visibility) * (cfg.wavelength / REFERENCE_WAVELENGTH) ** (
        -cfg.kruse_exponent
    ) * cfg.bl_scale_height
    return tau_abs + tau_scat


def zenith_optical_depth(cfg: LinkConfig) -> float:
    """Absorption plus Kruse scattering depth at zenith.

    Visibility and boundary-layer scale height are both in meters, so the
    scattering term is dimensionless.
    """
    return cfg.tau0


def slant_range(cfg: LinkConfig, elevation: float) -> float:
    """Satellite-to-OGS distance over a spherical Earth, in meters."""
    if not 0 <= elevation <= math.pi / 2 + 1e-15:
        raise DomainError(f"elevation must lie in [0, pi/2] radians, got {elevation!r}")
    r_sat = cfg.earth_radius + cfg.sat_altitude
    r_ogs = cfg.earth_radius + cfg.ogs_altitude
    s, c = math.sin(elevation), math.cos(elevation)
    root = math.sqrt(r_sat * r_sat - (r_ogs * c) ** 2)
    # rationalized form of root - r_ogs*s; avoids cancellation near zenith
    return (r_sat * r_sat - r_ogs * r_ogs) / (root + r_ogs * s)


def atmospheric_transmittance(cfg: LinkConfig, elevation: float) -> float:
    """exp(-tau0 csc(elevation)), the plane-parallel slant extinction."""
    _check_elevation(elevation)
    return math.exp(-cfg.tau0 / math.sin(elevation))


def large_scale_gain(cfg: LinkConfig, elevation: float) -> float:
    """Optical system gain times free-space loss times extinction."""
    _check_elevation(elevation)
    g_t = (math.pi * cfg.tx_aperture / cfg.wavelength) ** 2
    g_r = (math.pi * cfg.rx_aperture / cfg.wavelength) ** 2
    fspl = (cfg.wavelength / (4.0 * math.pi * slant_range(cfg, elevation))) ** 2
    return cfg.tx_efficiency * cfg.rx_efficiency * g_t * g_r * fspl * atmospheric_transmittance(cfg, elevation)


def normalized_threshold(cfg: LinkConfig, p_th: float, elevation: float) -> float:
    """Receiver threshold power divided by the mean received power."""
    if not p_th > 0:
        raise DomainError(f"threshold power must be positive, got {p_th!r}")
    return p_th / (cfg.tx_power * large_scale_gain(cfg, elevation))
