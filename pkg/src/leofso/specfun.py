"""Incomplete gamma functions in double precision.

The regularized lower function P(a, x) uses the classical split: power
series for x < a + 1, Legendre continued fraction otherwise.  The upper
function Gamma(a, x) is defined for every real ``a`` when x > 0 (the
defining integral converges), which the outage closed form needs once the
Gamma shape drops below the angular exponent.

Everything is evaluated through ``log_upper_gamma_ext`` so that callers can
combine huge and tiny factors without overflow.
"""
from __future__ import annotations

import math

from .errors import DomainError, NumericError

EULER_GAMMA = 0.57721566490153286061
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_EPS = 2.0 ** -53
_FPMIN = 1e-300
_MAX_ITER = 10_000
# below this x, negative/small shapes go through the series + recurrence route
_SMALL_X = 1.5
_LOG_MAX = math.log(1.7976931348623157e308)


def _zeta_int(k: int) -> float:
    """Riemann zeta at integer k >= 2 (Euler-Maclaurin, N = 12)."""
    n_terms = 12
    s = math.fsum(n ** -float(k) for n in range(1, n_terms))
    big_n = float(n_terms)
    s += big_n ** (1 - k) / (k - 1) + 0.5 * big_n ** -k
    # B_{2j} / (2j)!
    bern = (1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160, -691 / 1307674368000)
    rising = float(k)
    for j, coef in enumerate(bern, start=1):
        s += coef * rising * big_n ** (-k - 2 * j + 1)
        rising *= (k + 2 * j - 1) * (k + 2 * j)
    return s


_ZETA = [0.0, 0.0] + [_zeta_int(k) for k in range(2, 70)]

# B_{2k} / (2k (2k-1)) for the Stirling remainder
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360, 1 / 156, -3617 / 122400)


def log_gamma(a: float) -> float:
    """ln Gamma(a) for a > 0."""
    if not a > 0:
        raise DomainError(f"log_gamma requires a > 0, got {a!r}")
    return math.lgamma(a)


def _lgamma1p_over_b(b: float) -> float:
    """ln Gamma(1 + b) / b for |b| <= 0.5, with the b -> 0 limit -gamma."""
    total = -EULER_GAMMA
    power = 1.0
    for k in range(2, len(_ZETA)):
        power *= -b
        term = -_ZETA[k] * power / k
        total += term
        if abs(term) < _EPS * abs(total) * 0.1:
            break
    return total


def _exprel(y: float) -> float:
    """expm1(y) / y, equal to 1 at y = 0."""
    if y == 0.0:
        return 1.0
    if abs(y) < 1e-5:
        return 1.0 + y / 2.0 + y * y / 6.0
    return math.expm1(y) / y


def _gamma1p_m1_over_b(b: float) -> float:
    """(Gamma(1 + b) - 1) / b for |b| <= 0.5."""
    lb = _lgamma1p_over_b(b)
    return lb * _exprel(b * lb)


def _log1pmx(y: float) -> float:
    """ln(1 + y) - y."""
    if abs(y) >= 0.5:
        return math.log1p(y) - y
    total = 0.0
    power = y
    for k in range(2, 200):
        power *= -y
        term = power / k
        total += term
        if abs(term) < _EPS * abs(total) * 0.1:
            break
    return total


def _stirlerr(a: float) -> float:
    """ln Gamma(a + 1) - [(a + 1/2) ln a - a + ln sqrt(2 pi)] for a >= 10."""
    inv = 1.0 / a
    inv2 = inv * inv
    total = 0.0
    power = inv
    for coef in _STIRLING:
        total += coef * power
        power *= inv2
    return total


def _log_prefactor(a: float, x: float) -> float:
    """ln(x^a e^-x / Gamma(a)) for a > 0, x > 0."""
    if a < 10.0:
        return a * math.log(x) - x - math.lgamma(a)
    d = x - a
    # log1pmx only near the peak; far from it 1 + d/a would lose digits
    core = a * _log1pmx(d / a) if abs(d) < 0.5 * a else a * math.log(x / a) - d
    return core + 0.5 * math.log(a) - _HALF_LOG_2PI - _stirlerr(a)


def _lower_series(a: float, x: float) -> float:
    """Sum x^n / (a (a+1) ... (a+n)) so that P(a, x) = prefactor * sum."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total
    raise NumericError(f"lower incomplete gamma series did not converge (a={a}, x={x})", estimate=total)


def _upper_cf(a: float, x: float) -> float:
    """Continued fraction for Gamma(a, x) * e^x * x^-a (any real a, x > 0)."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b if b != 0.0 else 1.0 / _FPMIN
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise NumericError(f"upper incomplete gamma continued fraction did not converge (a={a}, x={x})", estimate=h)


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).

    Parameters
    ----------
    a : float
        Shape, strictly positive.
    x : float
        Upper integration limit, non-negative (``inf`` allowed).
    """
    if not a > 0:
        raise DomainError(f"reg_lower_gamma requires a > 0, got a={a!r}")
    if not x >= 0:
        raise DomainError(f"reg_lower_gamma requires x >= 0, got x={x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        lp = _log_prefactor(a, x)
        if lp < -745.0:
            return 0.0
        return min(1.0, math.exp(lp) * _lower_series(a, x))
    q = math.exp(_log_prefactor(a, x)) * _upper_cf(a, x)
    return max(0.0, 1.0 - q)


def log_reg_lower_gamma(a: float, x: float) -> float:
    """ln P(a, x); stays finite where P itself underflows."""
    if not a > 0:
        raise DomainError(f"log_reg_lower_gamma requires a > 0, got a={a!r}")
    if not x >= 0:
        raise DomainError(f"log_reg_lower_gamma requires x >= 0, got x={x!r}")
    if x == 0.0:
        return -math.inf
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return _log_prefactor(a, x) + math.log(_lower_series(a, x))
    q = math.exp(_log_prefactor(a, x)) * _upper_cf(a, x)
    return math.log1p(-q)


def reg_upper_gamma(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), a > 0."""
    if not a > 0:
        raise DomainError(f"reg_upper_gamma requires a > 0, got a={a!r}")
    if not x >= 0:
        raise DomainError(f"reg_upper_gamma requires x >= 0, got x={x!r}")
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return 1.0 - reg_lower_gamma(a, x)
    lp = _log_prefactor(a, x)
    return 0.0 if lp < -745.0 else min(1.0, math.exp(lp) * _upper_cf(a, x))


def _upper_small_shape(b: float, x: float) -> float:
    """Gamma(b, x) for b in (-1/2, 1/2] and 0 < x <= _SMALL_X.

    Uses Gamma(b, x) = (Gamma(1+b) - 1)/b - (x^b - 1)/b - x^b S(b, x) with
    S = sum_{k>=1} (-x)^k / (k! (b + k)); every piece stays finite at b = 0,
    where the expression reduces to the exponential integral E1(x).
    """
    log_x = math.log(x)
    s = 0.0
    term = 1.0
    for k in range(1, _MAX_ITER):
        term *= -x / k
        contrib = term / (b + k)
        s += contrib
        if abs(contrib) < _EPS * abs(s) * 0.1:
            break
    xb = math.exp(b * log_x)
    return _gamma1p_m1_over_b(b) - log_x * _exprel(b * log_x) - xb * s


def log_upper_gamma_ext(a: float, x: float) -> float:
    """ln Gamma(a, x) for any real ``a`` and x > 0.

    Gamma(a, x) = int_x^inf z^(a-1) e^-z dz is strictly positive, so the log
    is always defined.  For a <= 1/2 and small x the value is built from a
    shape in (-1/2, 1/2] and carried down with
    Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x) / a, in the scaled variable
    G(a) = Gamma(a, x) e^x x^-a to avoid overflow.
    """
    if not x > 0:
        raise DomainError(f"upper incomplete gamma requires x > 0, got x={x!r}")
    if math.isinf(x):
        return -math.inf
    if math.isnan(a):
        raise DomainError("shape is NaN")
    log_x = math.log(x)

    if x > _SMALL_X:
        if a <= 0.5 or x >= a + 1.0:
            return math.log(_upper_cf(a, x)) + a * log_x - x
        p = math.exp(_log_prefactor(a, x)) * _lower_series(a, x)
        return math.lgamma(a) + math.log1p(-p)

    if a > 0.5:
        # here x <= 1.5 < a + 1
        p = math.exp(_log_prefactor(a, x)) * _lower_series(a, x)
        return math.lgamma(a) + math.log1p(-p)

    steps = math.floor(0.5 - a)
    base = a + steps
    gamma_base = _upper_small_shape(base, x)
    if not gamma_base > 0:
        raise NumericError(f"upper incomplete gamma lost all precision (a={a}, x={x})", estimate=gamma_base)
    if steps == 0:
        return math.log(gamma_base)
    scaled = gamma_base * math.exp(x - base * log_x)
    for k in range(steps - 1, -1, -1):
        scaled = (x * scaled - 1.0) / (a + k)
    if not scaled > 0:
        raise NumericError(f"upper incomplete gamma recurrence went non-positive (a={a}, x={x})", estimate=scaled)
    return math.log(scaled) + a * log_x - x


def upper_gamma_ext(a: float, x: float) -> float:
    """Upper incomplete gamma Gamma(a, x) for any real ``a`` and x > 0.

    Raises :class:`NumericError` when the result overflows a double.
    """
    lg = log_upper_gamma_ext(a, x)
    if lg > _LOG_MAX:
        raise NumericError(
            f"Gamma({a}, {x}) overflows double precision (ln value {lg:.6g})", estimate=math.inf
        )
    return math.exp(lg)


def exp1(x: float) -> float:
    """Exponential integral E1(x) = Gamma(0, x)."""
    return upper_gamma_ext(0.0, x)
