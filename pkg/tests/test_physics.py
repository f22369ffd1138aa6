import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from neutron_wigner import physics
from neutron_wigner.physics import (
    BADUREK,
    CODATA2018,
    UNITS,
    ExperimentConfig,
    NeutronConstants,
    UnitScale,
    cat_separation,
    displacement,
    free_spread,
    momentum_shift,
    time_of_flight,
)


def test_constants_positive_and_codata():
    assert CODATA2018.mass == 1.67492749804e-27
    assert CODATA2018.magnetic_moment_magnitude == 9.6623651e-27
    assert CODATA2018.hbar == 1.054571817e-34
    with pytest.raises(ValueError):
        NeutronConstants(mass=-1.0)


def test_unit_product_is_one():
    assert UNITS.length_unit * UNITS.wavenumber_unit == 1.0
    with pytest.raises(ValueError):
        UnitScale(1e-10, 1e9)


def test_momentum_shift_examples():
    assert momentum_shift(0.0, 1.7e10) == 0.0
    # m mu B / (hbar^2 k0) by hand with the CODATA values
    by_hand = 1.67492749804e-27 * 9.6623651e-27 * 0.28e-3 / (1.054571817e-34**2 * 1.7e10)
    dk = momentum_shift(0.28e-3, 1.7e10)
    assert dk == pytest.approx(by_hand, rel=1e-15)
    assert dk == pytest.approx(23.96, rel=1e-3)
    assert momentum_shift(0.56e-3, 1.7e10) == pytest.approx(2 * dk, rel=1e-15)
    assert momentum_shift(-0.28e-3, 1.7e10) == pytest.approx(-dk)


@pytest.mark.parametrize("k0", [0.0, -1.0, math.inf, math.nan])
def test_momentum_shift_domain(k0):
    with pytest.raises(ValueError):
        momentum_shift(1e-3, k0)


def test_displacement_examples():
    assert displacement(0.0, 0.57, 1.7e10) == 0.0
    d = displacement(0.28e-3, 0.57, 1.7e10)
    assert d == pytest.approx(8.03e-10, rel=1e-3)
    assert displacement(0.28e-3, 1.14, 1.7e10) == pytest.approx(2 * d, rel=1e-15)
    with pytest.raises(ValueError):
        displacement(0.28e-3, 0.0, 1.7e10)


def test_cat_separation_experiment_value():
    delta0, sigma = cat_separation(BADUREK)
    assert delta0 == pytest.approx(16.1e-10, rel=0.01)
    assert sigma == 0.0
    assert delta0 == pytest.approx(2 * displacement(0.28e-3, 0.57, 1.7e10), rel=1e-15)


def test_cat_separation_zero_field_and_ratio():
    cfg = ExperimentConfig(0.0, 0.0, 0.57, 1.7e10, 1.1e-10)
    assert cat_separation(cfg) == (0.0, 0.0)
    with pytest.raises(ValueError, match="undefined"):
        cat_separation(ExperimentConfig(0.0, 1e-6, 0.57, 1.7e10, 1.1e-10))
    cfg = ExperimentConfig(0.28e-3, 0.05 * 0.28e-3, 0.57, 1.7e10, 1.1e-10)
    delta0, sigma = cat_separation(cfg)
    assert sigma / delta0 == pytest.approx(0.05, rel=1e-12)
    # sigma from a separation of exactly 16.1e-10 m
    assert 16.1e-10 * 0.05 == pytest.approx(0.805e-10, rel=1e-12)


def test_experiment_config_validation():
    with pytest.raises(ValueError, match="region_length_L"):
        ExperimentConfig(0.28e-3, 0.0, -1.0, 1.7e10, 1.1e-10)
    with pytest.raises(ValueError, match="packet_spread_delta"):
        ExperimentConfig(0.28e-3, 0.0, 0.57, 1.7e10, 0.0)


def test_free_spread():
    assert free_spread(1.1e-10, 0.0) == 1.1e-10
    t = time_of_flight(0.57, 1.7e10)
    assert t == pytest.approx(CODATA2018.mass * 0.57 / (CODATA2018.hbar * 1.7e10))
    assert free_spread(1.1e-10, t) == pytest.approx(0.15, rel=0.05)
    assert free_spread(1.0, t) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        free_spread(0.0, t)
    with pytest.raises(ValueError):
        free_spread(1e-10, -1.0)


def test_derive_and_internal_units():
    d = physics.derive(BADUREK)
    k0, delta, delta0, sigma = physics.to_internal(BADUREK)
    assert k0 == pytest.approx(1.7, rel=1e-15)
    assert delta == pytest.approx(1.1, rel=1e-15)
    assert delta0 == pytest.approx(d.delta0 / 1e-10, rel=1e-15)
    assert delta0 == pytest.approx(16.1, rel=0.01)
    assert sigma == 0.0


finite = st.floats(min_value=-1e-6, max_value=1e-6, allow_nan=False, allow_infinity=False)


@given(st.lists(finite, min_size=5, max_size=5))
def test_nondimensional_round_trip(vals):
    x, k_si, delta, sigma, delta0 = vals
    k_si *= 1e16
    assert UNITS.length_to_si(UNITS.length_to_internal(x)) == pytest.approx(x, rel=1e-12, abs=0)
    assert UNITS.wavenumber_to_si(UNITS.wavenumber_to_internal(k_si)) == pytest.approx(k_si, rel=1e-12, abs=0)
    for v in (delta, sigma, delta0):
        assert UNITS.length_to_si(UNITS.length_to_internal(v)) == pytest.approx(v, rel=1e-12, abs=0)


@given(
    st.floats(min_value=1e8, max_value=1e11),
    st.floats(min_value=1e-11, max_value=1e-8),
)
def test_phase_invariance(k_si, d_si):
    internal = UNITS.wavenumber_to_internal(k_si) * UNITS.length_to_internal(d_si)
    assert internal == pytest.approx(k_si * d_si, rel=1e-14)


def test_linearity_in_field():
    b = np.linspace(0, 1e-3, 7)
    shifts = np.array([momentum_shift(v, 1.7e10) for v in b])
    assert np.allclose(shifts, shifts[-1] * b / b[-1], rtol=1e-14, atol=0)
