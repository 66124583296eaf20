import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import floats

from twocav.classical import (CavityGeometry, cavity_amplitudes, cavity_rates,
                              fresnel_coefficients, truncated_bounce_sum,
                              undriven_intensity)
from twocav.parameters import kappa_exact


def unit_transit(n):
    """Geometry with one-way transit time nd/c = 1."""
    return CavityGeometry(length=1.0 / n, index=n)


def test_fresnel_no_interface():
    f = fresnel_coefficients(1.0)
    assert (f.r, f.t, f.r_prime, f.t_prime) == (0.0, 1.0, 0.0, 1.0)


def test_fresnel_n3():
    f = fresnel_coefficients(3.0)
    assert (f.r, f.t, f.r_prime, f.t_prime) == (0.5, 1.5, -0.5, 0.5)


def test_fresnel_n20():
    assert fresnel_coefficients(20.0).r == pytest.approx(19.0 / 21.0, abs=1e-15)
    assert fresnel_coefficients(20.0).r == pytest.approx(0.904762, abs=1e-6)


def test_fresnel_rejects_thin_media():
    with pytest.raises(ValueError):
        fresnel_coefficients(0.99)


@given(floats(min_value=1.0, max_value=1e6))
def test_stokes_relation(n):
    f = fresnel_coefficients(n)
    assert abs(f.r ** 2 + f.t * f.t_prime - 1.0) < 1e-14
    assert f.r_prime == -f.r


def test_geometry_validation():
    with pytest.raises(ValueError):
        CavityGeometry(length=0.0, index=2.0)
    with pytest.raises(ValueError):
        CavityGeometry(length=1.0, index=0.5)
    with pytest.raises(ValueError):
        CavityGeometry(length=1.0, index=2.0, light_speed=0.0)
    with pytest.raises(ValueError):
        unit_transit(3.0).round_trip_phase(-1.0)


def test_amplitudes_on_resonance():
    geom = unit_transit(3.0)
    for m in (1, 2, 5):
        amp = cavity_amplitudes(geom, m * math.pi)
        assert abs(amp.r_cav) < 1e-12
        assert abs(abs(amp.t_cav) - 1.0) < 1e-12


def test_amplitudes_quarter_wave():
    # phi = pi/2, n=3: r_cav = -0.8 and t_cav = 0.6i by direct evaluation
    amp = cavity_amplitudes(unit_transit(3.0), math.pi / 2)
    np.testing.assert_allclose(amp.r_cav, -0.8, atol=1e-14)
    np.testing.assert_allclose(amp.t_cav, 0.6j, atol=1e-14)


def test_amplitudes_no_mirrors():
    # n=1 means r=0: pure propagation phase
    amp = cavity_amplitudes(CavityGeometry(length=1.0, index=1.0), 0.7)
    assert amp.r_cav == 0.0
    np.testing.assert_allclose(amp.t_cav, cmath.exp(0.7j), atol=1e-15)


def test_bounce_single_pass():
    geom = unit_transit(3.0)
    for phi in (0.0, 0.7, 2.5):
        amp = truncated_bounce_sum(geom, phi, m_max=1)
        np.testing.assert_allclose(amp.t_cav, 0.75 * cmath.exp(1j * phi),
                                   atol=1e-15)
        assert amp.r_cav == -0.5


def test_bounce_series_is_exact_for_vacuum():
    geom = CavityGeometry(length=1.0, index=1.0)
    amp = truncated_bounce_sum(geom, 1.3, m_max=1)
    closed = cavity_amplitudes(geom, 1.3)
    assert amp.t_cav == closed.t_cav
    assert amp.r_cav == closed.r_cav == 0.0


def test_bounce_rejects_bad_m():
    with pytest.raises(ValueError):
        truncated_bounce_sum(unit_transit(3.0), 1.0, m_max=0)


def bounces_for(r, target=1e-13):
    """Traversal count pushing the geometric remainder below target."""
    return math.ceil(math.log(target * (1.0 - r * r)) / math.log(r)) + 2


@pytest.mark.parametrize("n", [1.5, 3.0, 20.0])
def test_bounce_sum_converges_to_closed_form(n):
    # independent oracle for the closed forms; the remainder after m
    # traversals scales as r^m, so high reflectivity needs more bounces
    # (r = 19/21 keeps ~2e-9 after the 200 bounces that suffice for r=0.5)
    geom = unit_transit(n)
    m_max = max(200, bounces_for(fresnel_coefficients(n).r))
    for phi in np.linspace(0.05, 2.0 * math.pi, 29):
        closed = cavity_amplitudes(geom, phi)
        series = truncated_bounce_sum(geom, phi, m_max=m_max)
        assert abs(closed.r_cav - series.r_cav) < 1e-12
        assert abs(closed.t_cav - series.t_cav) < 1e-12


def test_bounce_sum_200_passes_at_half_reflectivity():
    closed = cavity_amplitudes(unit_transit(3.0), math.pi / 2)
    series = truncated_bounce_sum(unit_transit(3.0), math.pi / 2, m_max=200)
    assert abs(closed.r_cav - series.r_cav) < 1e-12
    assert abs(closed.t_cav - series.t_cav) < 1e-12


def test_rates_on_resonance():
    geom = unit_transit(3.0)
    for m in (1, 2, 7):
        rates = cavity_rates(geom, m * math.pi)
        assert rates.T_cav == 1.0
        assert rates.R_cav == 0.0


def test_rates_quarter_wave_n3():
    rates = cavity_rates(unit_transit(3.0), math.pi / 2)
    np.testing.assert_allclose(rates.finesse, 16.0 / 9.0, atol=1e-15)
    np.testing.assert_allclose(rates.T_cav, 0.36, atol=1e-15)
    np.testing.assert_allclose(rates.R_cav, 0.64, atol=1e-15)


def test_rates_quarter_wave_n20():
    rates = cavity_rates(unit_transit(20.0), math.pi / 2)
    # anti-resonant floor of the sharp transmission curve
    assert rates.T_cav == pytest.approx(0.009951, abs=1e-6)
    # frozen against the bounce-series oracle
    series = truncated_bounce_sum(unit_transit(20.0), math.pi / 2, m_max=400)
    assert rates.T_cav == pytest.approx(abs(series.t_cav) ** 2, abs=1e-12)


@pytest.mark.parametrize("n", [1.5, 3.0, 20.0])
def test_unitarity_on_grid(n):
    geom = unit_transit(n)
    for phi in np.linspace(0.0, 2.0 * math.pi, 1000, endpoint=False):
        amp = cavity_amplitudes(geom, phi)
        assert abs(abs(amp.r_cav) ** 2 + abs(amp.t_cav) ** 2 - 1.0) < 1e-12


def test_rates_match_amplitudes():
    geom = unit_transit(3.0)
    for phi in np.linspace(0.1, 6.2, 40):
        amp = cavity_amplitudes(geom, phi)
        rates = cavity_rates(geom, phi)
        assert abs(rates.R_cav - abs(amp.r_cav) ** 2) < 1e-12
        assert abs(rates.T_cav - abs(amp.t_cav) ** 2) < 1e-12


def test_rates_pi_periodic():
    geom = unit_transit(20.0)
    for phi in np.linspace(0.0, math.pi, 101):
        a = cavity_rates(geom, phi)
        b = cavity_rates(geom, phi + math.pi)
        assert abs(a.R_cav - b.R_cav) < 1e-12
        assert abs(a.T_cav - b.T_cav) < 1e-12


def test_finesse_grows_with_reflectivity():
    values = [cavity_rates(unit_transit(n), 1.0).finesse
              for n in (1.2, 1.5, 2.0, 3.0, 8.0, 20.0)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_intensity_at_zero_time():
    assert undriven_intensity(unit_transit(3.0), 0.0, 2.5) == 2.5


def test_intensity_one_round_trip():
    # r = 0.5 and transit time 1: a round trip costs r^2 = 1/4
    assert undriven_intensity(unit_transit(3.0), 1.0, 1.0) == pytest.approx(
        0.25, abs=1e-15)


def test_intensity_lossless_limit():
    # r -> 1 as n -> infinity: essentially no decay
    geom = unit_transit(1e12)
    for t in (0.0, 1.0, 10.0):
        assert undriven_intensity(geom, t, 1.0) == pytest.approx(1.0, abs=1e-9)


def test_intensity_rejects_bad_inputs():
    with pytest.raises(ValueError):
        undriven_intensity(unit_transit(3.0), -1.0, 1.0)
    with pytest.raises(ValueError):
        undriven_intensity(unit_transit(3.0), 1.0, -1.0)


@pytest.mark.parametrize("n", [1.5, 3.0, 20.0])
def test_decay_matches_kappa_exponential(n):
    geom = unit_transit(n)
    kappa = kappa_exact(geom)
    for t in np.linspace(0.0, 10.0, 101):
        assert abs(undriven_intensity(geom, t, 1.0)
                   - math.exp(-kappa * t)) < 1e-12


def test_bounce_count_offset_is_one_round_trip():
    # the smooth decay at the m-th bounce time sits one r^2 factor below
    # the per-bounce tally r^(2(m-1)); recorded as data, not reconciled
    geom = unit_transit(3.0)
    r = fresnel_coefficients(geom.index).r
    for m in (1, 2, 5):
        smooth = undriven_intensity(geom, float(m), 1.0)
        bounces = r ** (2 * (m - 1))
        assert smooth == pytest.approx(bounces * r * r, rel=1e-12)
