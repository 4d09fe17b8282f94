"""State-coupled fading: Gamma scintillation times power-law angular loss.

Given the slow atmospheric state s, the scintillation factor h_a is unit-mean
Gamma with shape m_s = 1/sigma_a,s^2 and the angular-loss factor h_p has
density q_s u^(q_s - 1) on (0, 1].  The two are independent within a state
and coupled through the state mixture.

Random streams are numpy ``PCG64`` generators seeded by
``SeedSequence([seed, stream])``, so independent streams come from the same
seed by changing the stream index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DomainError
from .linkbudget import LinkConfig
from .turbulence import SecondOrderStats


@dataclass(frozen=True)
class StateModel:
    """Discrete atmospheric states with probabilities and (FA, BL) multipliers."""

    probs: tuple[float, ...]
    scales: tuple[tuple[float, float], ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        scales = tuple((float(a), float(b)) for a, b in self.scales)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "scales", scales)
        if len(probs) == 0 or len(probs) != len(scales):
            raise ConfigError("state probabilities and scales must be non-empty and of equal length")
        if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ConfigError(f"state probabilities must be non-negative and sum to 1, got {probs}")
        if any(a <= 0 or b <= 0 for a, b in scales):
            raise ConfigError("state scale factors must be positive")

    @classmethod
    def single(cls, fa: float = 1.0, bl: float = 1.0) -> "StateModel":
        return cls((1.0,), ((fa, bl),))

    @property
    def size(self) -> int:
        return len(self.probs)

    def mean_scale(self) -> np.ndarray:
        """Probability-weighted (FA, BL) multiplier."""
        return np.asarray(self.probs) @ np.asarray(self.scales)


@dataclass(frozen=True)
class FadingParams:
    """Gamma shape ``m`` and angular-loss exponent ``q`` of one state."""

    m: float
    q: float

    def __post_init__(self):
        if not self.m > 0 or not self.q > 0:
            raise DomainError(f"fading parameters must be positive, got m={self.m!r}, q={self.q!r}")


def state_stats(matrix, state_scale: Sequence[float]) -> SecondOrderStats:
    """z_s = M chi_s."""
    z = np.asarray(matrix, dtype=float) @ np.asarray(state_scale, dtype=float)
    return SecondOrderStats(float(z[0]), float(z[1]))


def fading_params(stats: SecondOrderStats, cfg: LinkConfig, eta_tt: float = 1.0) -> FadingParams:
    """Map second-order statistics to (m, q).

    ``eta_tt`` is the fraction of AoA variance left after tip-tilt
    correction; it does not touch the mechanical jitter.
    """
    if not 0 < eta_tt <= 1:
        raise DomainError(f"eta_tt must lie in (0, 1], got {eta_tt!r}")
    if not stats.sigma_a2 > 0:
        raise DomainError("scintillation index must be positive for the Gamma model")
    denom = 4.0 * cfg.jitter_std ** 2 + 2.0 * eta_tt * stats.beta_rms2
    if not denom > 0:
        raise DomainError("angular variance is zero; angular-loss exponent is unbounded")
    return FadingParams(m=1.0 / stats.sigma_a2, q=cfg.theta_eq2 / denom)


def state_params(matrix, states: StateModel, cfg: LinkConfig, eta_tt: float = 1.0) -> list[FadingParams]:
    return [fading_params(state_stats(matrix, chi), cfg, eta_tt) for chi in states.scales]


def scint_pdf(x, m: float):
    """Unit-mean Gamma density with shape ``m``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        logpdf = m * math.log(m) - math.lgamma(m) + (m - 1.0) * np.log(x) - m * x
    out = np.where(x > 0, np.exp(logpdf), 0.0)
    return out if out.ndim else float(out)


def angular_pdf(u, q: float):
    """Density q u^(q-1) on (0, 1]; zero elsewhere."""
    u = np.asarray(u, dtype=float)
    inside = (u > 0) & (u <= 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(inside, q * np.power(np.where(inside, u, 1.0), q - 1.0), 0.0)
    return out if out.ndim else float(out)


def angular_cdf(u, q: float):
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    out = u ** q
    return out if out.ndim else float(out)


def joint_pdf(x, u, states: StateModel, params: Sequence[FadingParams]):
    """Mixture over states of the product of conditional marginals."""
    if len(params) != states.size:
        raise ConfigError(f"expected {states.size} parameter sets, got {len(params)}")
    total = 0.0
    for p, fp in zip(states.probs, params):
        total = total + p * np.asarray(scint_pdf(x, fp.m)) * np.asarray(angular_pdf(u, fp.q))
    return total if np.ndim(total) else float(total)


def marginal_scint_pdf(x, states: StateModel, params: Sequence[FadingParams]):
    return sum(p * np.asarray(scint_pdf(x, fp.m)) for p, fp in zip(states.probs, params))


def marginal_angular_pdf(u, states: StateModel, params: Sequence[FadingParams]):
    return sum(p * np.asarray(angular_pdf(u, fp.q)) for p, fp in zip(states.probs, params))


def cov_ha2_hp(states: StateModel, params: Sequence[FadingParams]) -> float:
    """Analytic Cov(h_a^2, h_p) of the mixture.

    E[h_a | s] = 1 in every state, so coupling only shows in higher moments:
    E[h_a^2 | s] = 1 + 1/m_s and E[h_p | s] = q_s / (q_s + 1).
    """
    pi = np.asarray(states.probs)
    ea2 = np.array([1.0 + 1.0 / fp.m for fp in params])
    ep = np.array([fp.q / (fp.q + 1.0) for fp in params])
    return float(pi @ (ea2 * ep) - (pi @ ea2) * (pi @ ep))


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """PCG64 generator for stream ``stream`` of ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(stream)])))


@dataclass
class FadingSample:
    h_a: np.ndarray
    h_p: np.ndarray
    state: np.ndarray


def sample_fading(states: StateModel, params: Sequence[FadingParams], n: int, seed: int, stream: int = 0,
                  angular: str = "gaussian", theta_eq2: float = 1.0) -> FadingSample:
    """Draw ``n`` joint realizations of (h_a, h_p).

    ``angular="gaussian"`` builds h_p = exp(-2 |theta|^2 / theta_eq^2) from a
    2-D isotropic Gaussian misalignment with per-axis variance
    theta_eq^2 / (4 q_s); ``angular="uniform"`` uses h_p = U^(1/q_s).  Both
    have CDF u^q_s within a state.  The h_p law does not depend on
    ``theta_eq2``; it only sets the physical angle scale.
    """
    if len(params) != states.size:
        raise ConfigError(f"expected {states.size} parameter sets, got {len(params)}")
    rng = make_rng(seed, stream)
    m = np.array([fp.m for fp in params])
    q = np.array([fp.q for fp in params])
    if states.size == 1:
        state = np.zeros(n, dtype=np.intp)
    else:
        state = rng.choice(states.size, size=n, p=np.asarray(states.probs))
    ms = m[state]
    h_a = rng.standard_gamma(ms) / ms
    qs = q[state]
    if angular == "gaussian":
        sigma = np.sqrt(theta_eq2 / (4.0 * qs))
        theta = rng.standard_normal((2, n)) * sigma
        h_p = np.exp(-2.0 * (theta[0] ** 2 + theta[1] ** 2) / theta_eq2)
    elif angular == "uniform":
        # 1 - U lies in (0, 1]
        h_p = (1.0 - rng.random(n)) ** (1.0 / qs)
    else:
        raise ConfigError(f"unknown angular sampling method {angular!r}")
    return FadingSample(h_a=h_a, h_p=h_p, state=state)
