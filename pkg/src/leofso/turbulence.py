"""Layered Hufnagel-Valley turbulence and its second-order statistics.

The C_n^2 profile is split into a free-atmosphere part (the two kilometer
scale terms) and a boundary-layer part (the A_0 term that decays over
100 m above the ground station).  Projecting each part onto the
scintillation and angle-of-arrival kernels gives the columns of the 2x2
statistics matrix used by the state model.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .errors import ConfigError, NumericError
from .linkbudget import LinkConfig

SCINT_KERNEL_CONST = 8.70
AOA_KERNEL_CONST = 2.91
DEFAULT_RTOL = 1e-8


class Component(str, enum.Enum):
    FA = "FA"
    BL = "BL"


@dataclass(frozen=True)
class TurbulenceProfile:
    """HV profile with independent multipliers on its FA and BL parts.

    ``fa_scale`` and ``bl_scale`` default to 1 (the plain HV profile); a
    state-conditioned profile is obtained with :meth:`scaled`.
    """

    wind_rms: float = 21.0
    ground_cn2: float = 1.7e-14
    ogs_altitude: float = 20.0
    sat_altitude: float = 550e3
    fa_scale: float = 1.0
    bl_scale: float = 1.0

    def __post_init__(self):
        if not self.wind_rms > 0 or not self.ground_cn2 > 0:
            raise ConfigError("wind_rms and ground_cn2 must be positive")
        if not self.sat_altitude > self.ogs_altitude >= 0:
            raise ConfigError("require sat_altitude > ogs_altitude >= 0")
        if not self.fa_scale >= 0 or not self.bl_scale >= 0:
            raise ConfigError("profile scale factors must be non-negative")

    @classmethod
    def from_link(cls, cfg: LinkConfig, wind_rms: float = 21.0, ground_cn2: float = 1.7e-14):
        return cls(wind_rms=wind_rms, ground_cn2=ground_cn2,
                   ogs_altitude=cfg.ogs_altitude, sat_altitude=cfg.sat_altitude)

    def scaled(self, fa: float, bl: float) -> "TurbulenceProfile":
        """Profile chi_FA * C_FA + chi_BL * C_BL (multipliers compose)."""
        return replace(self, fa_scale=self.fa_scale * fa, bl_scale=self.bl_scale * bl)

    def cn2_fa(self, h):
        return cn2_fa(self, h)

    def cn2_bl(self, h):
        return cn2_bl(self, h)

    def cn2(self, h):
        return cn2_fa(self, h) + cn2_bl(self, h)


def cn2_fa(profile: TurbulenceProfile, h):
    """Free-atmosphere part: the wind-driven bump near 10 km plus the 1.5 km decay term."""
    h = np.asarray(h, dtype=float)
    wind = 0.00594 * (profile.wind_rms / 27.0) ** 2 * (1e-5 * h) ** 10 * np.exp(-h / 1000.0)
    out = profile.fa_scale * (wind + 2.7e-16 * np.exp(-h / 1500.0))
    return out if out.ndim else float(out)


def cn2_bl(profile: TurbulenceProfile, h):
    """Boundary-layer part A_0 exp(-(h - h_0)/100)."""
    h = np.asarray(h, dtype=float)
    out = profile.bl_scale * profile.ground_cn2 * np.exp(-(h - profile.ogs_altitude) / 100.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class KernelContext:
    """Geometry entering the scintillation and AoA kernels at one elevation."""

    wavenumber: float
    delta_h: float
    rx_aperture: float
    elevation: float
    ogs_altitude: float = 0.0

    def __post_init__(self):
        if not self.delta_h > 0 or not self.rx_aperture > 0 or not self.wavenumber > 0:
            raise ConfigError("kernel context requires positive wavenumber, delta_h and rx_aperture")
        if not 0 < self.elevation <= math.pi / 2 + 1e-15:
            raise ConfigError("elevation must lie in (0, pi/2]")

    @classmethod
    def from_link(cls, cfg: LinkConfig, elevation: float) -> "KernelContext":
        return cls(wavenumber=2.0 * math.pi / cfg.wavelength, delta_h=cfg.delta_h,
                   rx_aperture=cfg.rx_aperture, elevation=elevation, ogs_altitude=cfg.ogs_altitude)

    @property
    def csc(self) -> float:
        return 1.0 / math.sin(self.elevation)

    @property
    def alpha(self) -> float:
        return self.wavenumber * self.rx_aperture ** 2 / (16.0 * self.delta_h * self.csc)

    def xi(self, h):
        return (np.asarray(h, dtype=float) - self.ogs_altitude) / self.delta_h


def _re_pow56_minus_one(t):
    """Re{(1 + i t)^(5/6)} - 1 for t >= 0, without cancellation at small t."""
    theta = (5.0 / 6.0) * np.arctan(t)
    amp_m1 = np.expm1((5.0 / 12.0) * np.log1p(t * t))
    return amp_m1 * np.cos(theta) - 2.0 * np.sin(0.5 * theta) ** 2


def scint_kernel(ctx: KernelContext, h):
    """Aperture-averaged scintillation weight K_a(h).

    Re{(alpha + i xi)^(5/6) - alpha^(5/6)} is written as
    alpha^(5/6) [Re{(1 + i xi/alpha)^(5/6)} - 1] and evaluated in polar form
    (principal branch, argument in [0, pi/2)).
    """
    alpha = ctx.alpha
    t = ctx.xi(h) / alpha
    pref = SCINT_KERNEL_CONST * ctx.wavenumber ** (7 / 6) * ctx.delta_h ** (5 / 6) * ctx.csc ** (11 / 6)
    out = pref * alpha ** (5 / 6) * _re_pow56_minus_one(t)
    return out if np.ndim(out) else float(out)


def aoa_kernel(ctx: KernelContext) -> float:
    """Angle-of-arrival weight; independent of altitude."""
    return AOA_KERNEL_CONST * ctx.rx_aperture ** (-1 / 3) * ctx.csc


def kernel_asymptotic_coeff(ctx: KernelContext) -> float:
    """Coefficient C_a with K_a(h) ~ C_a (h - h_0)^2 as h -> h_0."""
    return (29.0 / 48.0) * ctx.wavenumber ** (7 / 6) * ctx.csc ** (11 / 6) * ctx.alpha ** (-7 / 6) \
        * ctx.delta_h ** (-7 / 6)


@dataclass(frozen=True)
class SecondOrderStats:
    """Scintillation index and mean-square AoA fluctuation (rad^2)."""

    sigma_a2: float
    beta_rms2: float

    def __post_init__(self):
        if self.sigma_a2 < 0 or self.beta_rms2 < 0:
            raise ConfigError("second-order statistics must be non-negative")

    def __add__(self, other: "SecondOrderStats") -> "SecondOrderStats":
        return SecondOrderStats(self.sigma_a2 + other.sigma_a2, self.beta_rms2 + other.beta_rms2)

    def scale(self, c: float) -> "SecondOrderStats":
        return SecondOrderStats(c * self.sigma_a2, c * self.beta_rms2)

    def as_array(self) -> np.ndarray:
        return np.array([self.sigma_a2, self.beta_rms2])


@dataclass(frozen=True)
class QuadResult:
    value: float
    abserr: float


def _breakpoints(h0: float, hs: float) -> list[float]:
    # BL decays over 100 m, FA bump peaks near 10 km; the tail to h_s is cheap
    marks = [h0 + 100.0, h0 + 1000.0, 5e3, 10e3, 20e3, 40e3, 100e3]
    return [h0] + [m for m in marks if h0 < m < hs] + [hs]


def integrate_profile(func, h0: float, hs: float, rtol: float = DEFAULT_RTOL) -> QuadResult:
    """Integrate ``func`` over [h0, hs] piecewise with adaptive Gauss-Kronrod.

    Raises :class:`NumericError` (with estimate and error bound) when any
    piece fails to reach ``rtol``.
    """
    pts = _breakpoints(h0, hs)
    total = 0.0
    err = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, abserr, info, *msg = integrate.quad(func, a, b, epsabs=0.0, epsrel=rtol, limit=400,
                                                 full_output=1)
        total += val
        err += abserr
        if msg:
            raise NumericError(f"quadrature on [{a:g}, {b:g}] did not converge: {msg[0]}",
                               estimate=total, error_bound=err)
    if err > rtol * abs(total) * 10 and err > 0:
        raise NumericError("quadrature error bound exceeds tolerance", estimate=total, error_bound=err)
    return QuadResult(total, err)


def component_stats(profile: TurbulenceProfile, ctx: KernelContext, component: Component | str,
                    rtol: float = DEFAULT_RTOL, return_error: bool = False):
    """Second-order statistics contributed by one profile component.

    With ``return_error=True`` also returns the pair of quadrature error
    bounds ``(sigma_err, beta_err)``.
    """
    component = Component(component)
    # integrate the unit-scale part and rescale: keeps tiny multipliers out of the quadrature
    unit = replace(profile, fa_scale=1.0, bl_scale=1.0)
    scale = profile.fa_scale if component is Component.FA else profile.bl_scale
    cn2 = unit.cn2_fa if component is Component.FA else unit.cn2_bl
    h0 = ctx.ogs_altitude
    hs = h0 + ctx.delta_h
    sig = integrate_profile(lambda h: scint_kernel(ctx, h) * cn2(h), h0, hs, rtol)
    k_beta = aoa_kernel(ctx)
    beta = integrate_profile(lambda h: k_beta * cn2(h), h0, hs, rtol)
    stats = SecondOrderStats(scale * sig.value, scale * beta.value)
    if return_error:
        return stats, (scale * sig.abserr, scale * beta.abserr)
    return stats


def stats_matrix(profile: TurbulenceProfile, ctx: KernelContext, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """2x2 matrix M: rows (sigma_a^2, beta_rms^2), columns (FA, BL)."""
    fa = component_stats(profile, ctx, Component.FA, rtol)
    bl = component_stats(profile, ctx, Component.BL, rtol)
    return np.array([[fa.sigma_a2, bl.sigma_a2], [fa.beta_rms2, bl.beta_rms2]])


def profile_stats(profile: TurbulenceProfile, ctx: KernelContext, rtol: float = DEFAULT_RTOL) -> SecondOrderStats:
    """Statistics of the whole (FA + BL) profile."""
    return component_stats(profile, ctx, Component.FA, rtol) + component_stats(profile, ctx, Component.BL, rtol)
