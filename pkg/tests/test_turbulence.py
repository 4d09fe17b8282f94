import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leofso.errors import ConfigError
from leofso.linkbudget import LinkConfig
from leofso.turbulence import (Component, KernelContext, TurbulenceProfile, aoa_kernel, component_stats,
                               kernel_asymptotic_coeff, profile_stats, scint_kernel, stats_matrix)

LINK = LinkConfig()
PROFILE = TurbulenceProfile.from_link(LINK)


def ctx_at(deg):
    return KernelContext.from_link(LINK, math.radians(deg))


def oracle_matrix(deg, dps=25):
    with mpmath.workdps(dps):
        return _oracle_matrix(deg)


def _oracle_matrix(deg):
    """Component statistics from the complex-power kernel and the literal HV formula, in mpmath."""
    ctx = ctx_at(deg)
    k0, dh, dr = mpmath.mpf(ctx.wavenumber), mpmath.mpf(ctx.delta_h), mpmath.mpf(LINK.rx_aperture)
    csc = 1 / mpmath.sin(mpmath.mpf(ctx.elevation))
    h0 = mpmath.mpf(LINK.ogs_altitude)
    alpha = k0 * dr ** 2 / (16 * dh * csc)

    def ka(h):
        xi = (h - h0) / dh
        return mpmath.mpf("8.70") * k0 ** (mpmath.mpf(7) / 6) * dh ** (mpmath.mpf(5) / 6) * csc ** (
            mpmath.mpf(11) / 6) * mpmath.re((alpha + 1j * xi) ** (mpmath.mpf(5) / 6) - alpha ** (mpmath.mpf(5) / 6))

    kb = mpmath.mpf("2.91") * dr ** (-mpmath.mpf(1) / 3) * csc

    def fa(h):
        return 0.00594 * (mpmath.mpf(21) / 27) ** 2 * (h / 100000) ** 10 * mpmath.exp(-h / 1000) \
            + mpmath.mpf("2.7e-16") * mpmath.exp(-h / 1500)

    def bl(h):
        return mpmath.mpf("1.7e-14") * mpmath.exp(-(h - h0) / 100)

    pts = [h0, h0 + 100, h0 + 1000, 5e3, 10e3, 20e3, 40e3, 100e3, h0 + dh]
    out = np.empty((2, 2))
    for j, cn2 in enumerate((fa, bl)):
        out[0, j] = float(mpmath.quad(lambda h: ka(h) * cn2(h), pts))
        out[1, j] = float(mpmath.quad(lambda h: kb * cn2(h), pts))
    return out


def test_matrix_against_independent_oracle():
    got = stats_matrix(PROFILE, ctx_at(25.0))
    ref = oracle_matrix(25.0)
    np.testing.assert_allclose(got, ref, rtol=1e-7)


def test_kernel_vanishes_at_ground_station():
    for deg in (20, 45, 90):
        assert scint_kernel(ctx_at(deg), LINK.ogs_altitude) == 0.0


@pytest.mark.parametrize("deg", [20.0, 25.0, 40.0, 70.0, 90.0])
def test_quadratic_coefficient_by_richardson(deg):
    ctx = ctx_at(deg)
    h0 = LINK.ogs_altitude
    f = lambda d: scint_kernel(ctx, h0 + d) / d ** 2  # noqa: E731
    d = 50.0
    est = (4.0 * f(d / 2) - f(d)) / 3.0
    assert est == pytest.approx(kernel_asymptotic_coeff(ctx), rel=1e-3)


def test_kernel_small_offset_has_no_cancellation():
    ctx = ctx_at(30.0)
    h0 = LINK.ogs_altitude
    for d in (1e-6, 1e-3, 1.0):
        assert scint_kernel(ctx, h0 + d) == pytest.approx(kernel_asymptotic_coeff(ctx) * d * d, rel=1e-6)


def test_aoa_kernel_constant_in_altitude():
    ctx = ctx_at(33.0)
    assert aoa_kernel(ctx) == pytest.approx(2.91 * LINK.rx_aperture ** (-1 / 3) / math.sin(ctx.elevation), rel=1e-15)


def test_scint_kernel_positive_and_increasing():
    ctx = ctx_at(25.0)
    h = np.linspace(LINK.ogs_altitude, LINK.ogs_altitude + LINK.delta_h, 2001)
    k = scint_kernel(ctx, h)
    assert np.all(k[1:] > 0) and np.all(np.diff(k) > 0)


def test_stats_decrease_with_elevation():
    prev = None
    for deg in range(20, 91, 10):
        z = profile_stats(PROFILE, ctx_at(deg))
        if prev is not None:
            assert z.sigma_a2 < prev.sigma_a2 and z.beta_rms2 < prev.beta_rms2
        prev = z


@settings(max_examples=20, deadline=None)
@given(fa=st.floats(0.0, 5.0), bl=st.floats(0.0, 5.0))
def test_statistics_linear_in_component_scales(fa, bl):
    ctx = ctx_at(25.0)
    m = stats_matrix(PROFILE, ctx)
    direct = profile_stats(PROFILE.scaled(fa, bl), ctx).as_array()
    np.testing.assert_allclose(direct, m @ np.array([fa, bl]), rtol=1e-7, atol=1e-300)


def test_tolerance_self_consistency():
    ctx = ctx_at(25.0)
    for comp in Component:
        coarse, err = component_stats(PROFILE, ctx, comp, rtol=1e-8, return_error=True)
        fine = component_stats(PROFILE, ctx, comp, rtol=1e-11)
        assert coarse.sigma_a2 == pytest.approx(fine.sigma_a2, rel=1e-7)
        assert coarse.beta_rms2 == pytest.approx(fine.beta_rms2, rel=1e-7)
        assert err[0] <= 1e-7 * coarse.sigma_a2


def test_invalid_profile():
    with pytest.raises(ConfigError):
        TurbulenceProfile(ground_cn2=-1.0)
    with pytest.raises(ConfigError):
        PROFILE.scaled(-1.0, 1.0)
