"""Outage probability Pr[h_a h_p < nu] for the state-coupled fading model.

Per state the probability has the closed form

    P_s = [gamma(m, m nu) + (m nu)^q Gamma(m - q, m nu)] / Gamma(m)

where the upper incomplete gamma may have a non-positive first argument.
``outage_state_numeric`` integrates the conditional Gamma CDF against the
angular-loss density directly and serves as the reference for the closed
form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate

from . import specfun
from .errors import ConfigError, DomainError, NumericError
from .fading import FadingParams, StateModel, fading_params
from .linkbudget import LinkConfig
from .turbulence import SecondOrderStats

_CLAMP = 1e-14
_LOG_MAX = 709.0


def _check(m: float, q: float, nu: float) -> None:
    if not m > 0 or not q > 0:
        raise DomainError(f"outage requires m > 0 and q > 0, got m={m!r}, q={q!r}")
    if not nu >= 0:
        raise DomainError(f"normalized threshold must be non-negative, got {nu!r}")


def _clamp_probability(p: float, what: str) -> float:
    if -_CLAMP <= p < 0.0:
        return 0.0
    if 1.0 < p <= 1.0 + _CLAMP:
        return 1.0
    if not 0.0 <= p <= 1.0:
        raise NumericError(f"{what} produced {p!r}, outside [0, 1]", estimate=p)
    return p


def outage_state_closed(m: float, q: float, nu: float) -> float:
    """Closed-form conditional outage probability of one state."""
    _check(m, q, nu)
    if nu == 0.0:
        return 0.0
    if math.isinf(nu):
        return 1.0
    x = m * nu
    lower = specfun.reg_lower_gamma(m, x)
    log_upper = q * math.log(x) + specfun.log_upper_gamma_ext(m - q, x) - math.lgamma(m)
    if log_upper > _LOG_MAX:
        raise NumericError(
            f"closed-form outage overflowed (m={m}, q={q}, nu={nu}, ln second term={log_upper:.6g})"
        )
    return _clamp_probability(lower + math.exp(log_upper), "closed-form outage")


def _breakpoints(m: float, nu: float) -> list[float]:
    # the conditional CDF P(m, m nu / u) switches from ~1 to ~0 around u = nu
    ratios = [0.02, 0.1, 1 / 3, 0.5, 2 / 3, 1.0, 1.5, 2.0, 3.0, 10.0, 50.0]
    pts = {nu * r for r in ratios}
    root = math.sqrt(m)
    for j in (1, 2, 4, 6, 9):
        pts.add(m * nu / (m + j * root))
        if m - j * root > 0:
            pts.add(m * nu / (m - j * root))
    # one break per decade keeps each piece within a single order of magnitude
    lo = min(pts)
    k = math.floor(math.log10(lo)) + 1
    while 10.0 ** k < 1.0:
        pts.add(10.0 ** k)
        k += 1
    return sorted(p for p in pts if 0.0 < p < 1.0)


def outage_state_numeric(m: float, q: float, nu: float, rtol: float = 1e-10) -> float:
    """Conditional outage by quadrature of q int_0^1 P(m, m nu/u) u^(q-1) du.

    Each piece between breakpoints is integrated after dividing out its
    peak magnitude, so probabilities far below 1e-250 are still resolved to
    relative accuracy.
    """
    _check(m, q, nu)
    if nu == 0.0:
        return 0.0
    if math.isinf(nu):
        return 1.0

    def log_integrand(u):
        return specfun.log_reg_lower_gamma(m, m * nu / u) + (q - 1.0) * math.log(u)

    pts = _breakpoints(m, nu) + [1.0]
    first = pts[0]
    pieces = []
    # [0, first]: substitute u = first * t so the algebraic weight is t^(q-1) on [0, 1]
    res = integrate.quad(lambda t: 1.0 if t <= 0.0 else math.exp(specfun.log_reg_lower_gamma(m, m * nu / (first * t))),
                         0.0, 1.0, weight="alg", wvar=(q - 1.0, 0.0), epsabs=0.0, epsrel=rtol / 10,
                         limit=400, full_output=1)
    pieces.append((q * math.log(first), res))
    for a, b in zip(pts[:-1], pts[1:]):
        scale = max(log_integrand(a), log_integrand(b), log_integrand(0.5 * (a + b)))
        res = integrate.quad(lambda u: math.exp(log_integrand(u) - scale), a, b, epsabs=0.0,
                             epsrel=rtol / 10, limit=400, full_output=1)
        pieces.append((scale, res))

    top = max(scale for scale, _ in pieces)
    total = 0.0
    err = 0.0
    for scale, res in pieces:
        w = math.exp(scale - top)
        total += w * res[0]
        err += w * res[1]
    log_result = math.log(q) + top + math.log(total) if total > 0 else -math.inf
    for scale, res in pieces:
        if len(res) > 3 and math.exp(scale - top) * res[1] > rtol * total:
            raise NumericError(f"outage quadrature did not converge: {res[3]}",
                               estimate=math.exp(log_result), error_bound=q * math.exp(top) * err)
    return _clamp_probability(math.exp(log_result), "numeric outage")


@dataclass(frozen=True)
class OutageQuery:
    nu: float
    params: tuple[FadingParams, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if not self.nu > 0:
            raise DomainError("normalized threshold must be positive")
        if len(self.params) != len(self.probs) or not self.params:
            raise ConfigError("params and probs must be non-empty and of equal length")
        if any(p < 0 for p in self.probs) or abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise ConfigError("state probabilities must be non-negative and sum to 1")


def outage_coupled(query: OutageQuery) -> float:
    """Mixture outage: sum over states of pi_s times the closed form."""
    terms = [p * outage_state_closed(fp.m, fp.q, query.nu) for p, fp in zip(query.probs, query.params)]
    return _clamp_probability(math.fsum(terms), "coupled outage")


def outage_for_states(states: StateModel, params: Sequence[FadingParams], nu: float) -> float:
    return outage_coupled(OutageQuery(nu=nu, params=tuple(params), probs=states.probs))


def outage_independent_baseline(stats: SecondOrderStats, cfg: LinkConfig, eta_tt: float, nu: float) -> float:
    """Independent-fading baseline: one state built from the unscaled profile."""
    fp = fading_params(stats, cfg, eta_tt)
    return outage_state_closed(fp.m, fp.q, nu)


def outage_product_of_marginals(states: StateModel, params: Sequence[FadingParams], nu: float) -> float:
    """Outage when h_a and h_p follow the mixture marginals but are independent.

    Alternative reading of an independence baseline; every (scintillation
    state, angular state) pair contributes with weight pi_s pi_r.
    """
    pi = np.asarray(states.probs)
    total = []
    for ps, fs in zip(pi, params):
        for pr, fr in zip(pi, params):
            total.append(ps * pr * outage_state_closed(fs.m, fr.q, nu))
    return _clamp_probability(math.fsum(total), "product-of-marginals outage")
