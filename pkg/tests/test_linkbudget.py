import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from leofso.errors import ConfigError, DomainError
from leofso.linkbudget import (LinkConfig, atmospheric_transmittance, large_scale_gain, normalized_threshold,
                               slant_range, zenith_optical_depth)

LINK = LinkConfig()


def test_zenith_range_is_altitude_difference():
    assert slant_range(LINK, math.pi / 2) == pytest.approx(LINK.sat_altitude - LINK.ogs_altitude, rel=1e-12)


def test_slant_range_law_of_cosines():
    eps = math.radians(25.0)
    r0, rs = LINK.earth_radius + LINK.ogs_altitude, LINK.earth_radius + LINK.sat_altitude
    d = slant_range(LINK, eps)
    # satellite position from the ground station along the line of sight
    assert (r0 + d * math.sin(eps)) ** 2 + (d * math.cos(eps)) ** 2 == pytest.approx(rs ** 2, rel=1e-13)


@given(st.floats(0.01, math.pi / 2), st.floats(0.01, math.pi / 2))
def test_range_decreases_with_elevation(e1, e2):
    lo, hi = sorted((e1, e2))
    assert slant_range(LINK, lo) >= slant_range(LINK, hi) * (1 - 1e-14)


def test_transmittance_follows_cosecant_law():
    tau = zenith_optical_depth(LINK)
    for deg in (20.0, 45.0, 90.0):
        eps = math.radians(deg)
        assert atmospheric_transmittance(LINK, eps) == pytest.approx(math.exp(-tau / math.sin(eps)), rel=1e-14)
    assert tau > 0.05


def test_gain_and_threshold_roundtrip():
    eps = math.radians(30.0)
    p_th = 1e-4
    nu = normalized_threshold(LINK, p_th, eps)
    assert nu * LINK.tx_power * large_scale_gain(LINK, eps) == pytest.approx(p_th, rel=1e-14)
    assert 0 < large_scale_gain(LINK, eps) < 1


def test_gain_increases_with_elevation():
    gains = [large_scale_gain(LINK, math.radians(d)) for d in range(20, 91, 5)]
    assert all(a < b for a, b in zip(gains, gains[1:]))


@pytest.mark.parametrize("eps", [0.0, -0.1, math.pi / 2 + 1e-6, float("nan")])
def test_elevation_domain(eps):
    with pytest.raises(DomainError):
        large_scale_gain(LINK, eps)


def test_invalid_config_rejected():
    with pytest.raises(ConfigError):
        LinkConfig(rx_aperture=-0.3)
    with pytest.raises(ConfigError):
        LinkConfig(sat_altitude=10.0)
