import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from wvakerr import (
    CoherentProbe,
    CouplingConfig,
    DegeneratePostselection,
    DivergentWeakValue,
    PpsAngles,
    amplified_strength,
    encode_phase,
    coherent_amplitudes,
    postselected_state,
    postselection_probability,
    pps_coefficients,
    weak_value,
)
from wvakerr.fock_core import default_cutoff

angle = st.floats(-4 * math.pi, 4 * math.pi)


def test_angles_validate():
    with pytest.raises(ValueError):
        PpsAngles(math.nan, 0, 0)
    assert PpsAngles.aav() == PpsAngles(math.pi / 2, math.pi / 2, math.pi)


def test_coefficients_aav():
    c = pps_coefficients(PpsAngles(math.pi / 2, math.pi / 2, math.pi))
    assert c.a_coef == pytest.approx(0.5, abs=1e-16)
    assert c.b_coef == pytest.approx(0.5, abs=1e-16)
    assert c.c_coef == pytest.approx(0.0, abs=1e-16)


@pytest.mark.parametrize("theta_f", [0.0, 0.7, 2.0, math.pi, 5.0])
def test_coefficients_theta_i_zero(theta_f):
    c = pps_coefficients(PpsAngles(0.0, theta_f, 1.3))
    assert c.b_coef == 0
    assert c.a_coef == pytest.approx((1 + math.cos(theta_f)) / 2, abs=1e-16)
    assert c.c_coef == pytest.approx((1 + math.cos(theta_f)) / 2, abs=1e-16)


def test_coefficients_orthogonal_poles():
    c = pps_coefficients(PpsAngles(math.pi, 0.0, 0.0))
    assert (c.a_coef, c.b_coef, c.c_coef) == (0, 0, 0)


@settings(max_examples=200)
@given(angle, angle)
def test_coefficient_invariants(ti, tf):
    c = pps_coefficients(PpsAngles(ti, tf, 0.0))
    assert -1e-15 <= c.a_coef <= 1 + 1e-15
    assert -0.5 <= c.b_coef <= 0.5
    assert -1 <= c.c_coef <= 1
    assert c.a_coef >= abs(c.b_coef) - 1e-15


def test_degenerate_state_at_zero_coupling(aav_angles, probe8):
    with pytest.raises(DegeneratePostselection) as info:
        postselected_state(aav_angles, probe8, CouplingConfig(0.0), default_cutoff(probe8))
    assert info.value.p_f < 1e-15
    assert postselection_probability(aav_angles, probe8, CouplingConfig(0.0), default_cutoff(probe8)) <= 1e-15


@pytest.mark.parametrize("theta_f", [0.3, 1.9, 4.4])
@pytest.mark.parametrize("chi", [0.0, 0.05, 1.7])
def test_theta_i_zero_gives_minus_branch(theta_f, chi):
    probe = CoherentProbe(6)
    n_max = default_cutoff(probe)
    state, p_f = postselected_state(PpsAngles(0.0, theta_f, 0.4), probe, CouplingConfig(chi), n_max)
    assert p_f == pytest.approx(math.cos(theta_f / 2) ** 2, rel=1e-12)
    normalized = state.amplitudes / math.sqrt(p_f)
    minus = encode_phase(coherent_amplitudes(probe, n_max), CouplingConfig(chi), -1).amplitudes
    sign = math.copysign(1, math.cos(theta_f / 2))
    np.testing.assert_allclose(normalized, sign * minus, rtol=0, atol=1e-13)


def test_state_norm_matches_eq4_oracle(aav_angles, probe8):
    n_max = default_cutoff(probe8)
    _, p_f = postselected_state(aav_angles, probe8, CouplingConfig(0.1), n_max)
    expected = oracles.eq4_probability(math.pi / 2, math.pi / 2, math.pi, 0.1, 8, n_max)
    assert abs(p_f - expected) < 1e-12


def test_probability_zero_coupling():
    probe = CoherentProbe(3)
    n_max = default_cutoff(probe)
    for ti, tf, ph in [(0.4, 2.1, 0.3), (1.2, 1.2, 2.9), (3.0, 0.2, -1.0)]:
        angles = PpsAngles(ti, tf, ph)
        c = pps_coefficients(angles)
        got = postselection_probability(angles, probe, CouplingConfig(0.0), n_max)
        assert got == pytest.approx(c.a_coef + c.b_coef * math.cos(ph), abs=1e-15)


@pytest.mark.parametrize("mean", [0.5, 8, 40])
@pytest.mark.parametrize("chi", [0.0, 0.02, 0.9])
def test_probability_theta_i_zero(mean, chi):
    probe = CoherentProbe(mean)
    got = postselection_probability(PpsAngles(0.0, 1.1, 2.0), probe, CouplingConfig(chi), default_cutoff(probe))
    assert got == pytest.approx(math.cos(0.55) ** 2, rel=1e-12)


def test_probability_cross_path(aav_angles, probe8):
    n_max = default_cutoff(probe8)
    coupling = CouplingConfig(0.01)
    _, norm = postselected_state(aav_angles, probe8, coupling, n_max)
    assert abs(postselection_probability(aav_angles, probe8, coupling, n_max) - norm) < 1e-12


@settings(max_examples=60, deadline=None)
@given(angle, angle, angle, st.floats(0, 0.5), st.floats(0, 40))
def test_cross_path_and_range(ti, tf, ph, chi, mean):
    angles = PpsAngles(ti, tf, ph)
    probe = CoherentProbe(mean)
    coupling = CouplingConfig(chi)
    n_max = default_cutoff(probe)
    p = postselection_probability(angles, probe, coupling, n_max)
    assert -1e-15 <= p <= 1 + 1e-12
    try:
        _, norm = postselected_state(angles, probe, coupling, n_max)
    except DegeneratePostselection:
        assert p < 1e-12 + 1e-15
    else:
        assert abs(p - norm) < 1e-12


def test_probability_range_grid():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        ti, tf, ph = rng.uniform(0, 2 * math.pi, 3)
        probe = CoherentProbe(rng.uniform(0, 20))
        p = postselection_probability(PpsAngles(ti, tf, ph), probe, CouplingConfig(rng.uniform(0, 0.3)),
                                      default_cutoff(probe))
        assert 0 <= p <= 1 + 1e-12


def test_periodicity_theta_f_and_phi0():
    probe = CoherentProbe(5)
    n_max = default_cutoff(probe)
    coupling = CouplingConfig(0.03)
    base = postselection_probability(PpsAngles(1.0, 2.0, 0.5), probe, coupling, n_max)
    shifted_f = postselection_probability(PpsAngles(1.0, 2.0 + 2 * math.pi, 0.5), probe, coupling, n_max)
    shifted_phi = postselection_probability(PpsAngles(1.0, 2.0, 0.5 + 2 * math.pi), probe, coupling, n_max)
    assert shifted_f == pytest.approx(base, abs=1e-14)
    assert shifted_phi == pytest.approx(base, abs=1e-14)


def test_weak_value_aav_diverges(aav_angles):
    with pytest.raises(DivergentWeakValue):
        weak_value(aav_angles)
    with pytest.raises(DivergentWeakValue):
        amplified_strength(CouplingConfig(0.1), aav_angles)


def test_weak_value_parallel_states():
    assert abs(weak_value(PpsAngles(math.pi / 2, math.pi / 2, 0.0))) < 1e-15


@pytest.mark.parametrize("theta_f", [0.0, 1.0, 2.5, 4.0])
def test_weak_value_eigenstate(theta_f):
    assert weak_value(PpsAngles(0.0, theta_f, 0.8)) == pytest.approx(-1, abs=1e-15)


def test_amplified_strength():
    assert amplified_strength(CouplingConfig(0.0), PpsAngles(1.0, 2.0, 0.3)) == 0
    assert amplified_strength(CouplingConfig(0.02), PpsAngles(0.0, 1.0, 0.0)) == pytest.approx(-0.02)
    angles = PpsAngles(math.pi / 2, math.pi / 2 + 0.2, math.pi)
    expected = 0.01 * oracles.bloch_weak_value(angles.theta_i, angles.theta_f, angles.phi_0)
    got = amplified_strength(CouplingConfig(0.01), angles)
    assert abs(got - expected) < 1e-14 * abs(expected)
    # near-orthogonal states amplify: |weak value| well beyond the eigenvalue range
    assert abs(got) > 0.01 * 5


@settings(max_examples=100)
@given(angle, angle, angle)
def test_weak_value_matches_bloch_oracle(ti, tf, ph):
    angles = PpsAngles(ti, tf, ph)
    try:
        wv = weak_value(angles)
    except DivergentWeakValue:
        return
    ref = oracles.bloch_weak_value(ti, tf, ph)
    assert abs(wv - ref) <= 1e-9 * max(1.0, abs(ref))
