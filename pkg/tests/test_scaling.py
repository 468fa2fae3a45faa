import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wvakerr import CoherentProbe, CouplingConfig, InsufficientPoints, NonpositiveData, PpsAngles, fisher_report
from wvakerr.scaling import FixedParams, SweepAxis, SweepSpec, fig4_spec, fit_power_law, run_sweep, scaling_fits

Q_CM_8 = 9760.0


def fig1_spec(chi, points=201, start=0.0, stop=2 * math.pi):
    fixed = FixedParams(PpsAngles.aav(), CoherentProbe(8), CouplingConfig(chi))
    return SweepSpec(SweepAxis.THETA_F, start, stop, points, fixed)


def test_spec_validation():
    fixed = FixedParams(PpsAngles.aav(), CoherentProbe(8), CouplingConfig(0.1))
    with pytest.raises(ValueError):
        SweepSpec(SweepAxis.CHI, 0.2, 0.1, 5, fixed)
    with pytest.raises(ValueError):
        SweepSpec(SweepAxis.CHI, 0.0, 0.1, 5, fixed, log_spaced=True)
    with pytest.raises(ValueError):
        SweepSpec(SweepAxis.CHI, 0.1, 0.2, 0, fixed)
    assert SweepSpec("chi", 0.1, 0.2, 3, fixed).axis is SweepAxis.CHI
    np.testing.assert_allclose(SweepSpec("chi", 1e-3, 1e-1, 3, fixed, True).grid(), [1e-3, 1e-2, 1e-1])


def test_fig1d_exceeds():
    rows = run_sweep(fig1_spec(0.1))
    assert len(rows) == 201
    assert any(r.report.wva_fi > Q_CM_8 for r in rows if not r.degenerate)


def test_fig1a_never_exceeds():
    rows = run_sweep(fig1_spec(0.001))
    assert all(r.report.wva_fi <= Q_CM_8 for r in rows if not r.degenerate)


def test_degenerate_rows_flagged():
    fixed = FixedParams(PpsAngles.aav(), CoherentProbe(8), CouplingConfig(0.0))
    rows = run_sweep(SweepSpec(SweepAxis.THETA_F, 0.25 * math.pi, 0.75 * math.pi, 3, fixed))
    assert [r.degenerate for r in rows] == [False, True, False]
    assert rows[1].p_f < 1e-15
    assert rows[1].q_conventional == Q_CM_8


def test_single_point_sweep_matches_report():
    spec = fig1_spec(0.05, points=1, start=1.3, stop=1.3)
    (row,) = run_sweep(spec)
    assert row.report == fisher_report(PpsAngles(math.pi / 2, 1.3, math.pi), CoherentProbe(8), CouplingConfig(0.05))


def test_sweep_parallel_is_deterministic():
    fixed = FixedParams(PpsAngles.aav(), CoherentProbe(8), CouplingConfig(0.01))
    spec = SweepSpec(SweepAxis.CHI, 1e-4, 0.2, 24, fixed, log_spaced=True)
    assert run_sweep(spec) == run_sweep(spec, threads=4) == run_sweep(spec, threads=3)


def test_theta_f_periodicity():
    a = run_sweep(fig1_spec(0.01, points=9, start=0.1, stop=2.9))
    b = run_sweep(fig1_spec(0.01, points=9, start=0.1 + 2 * math.pi, stop=2.9 + 2 * math.pi))
    for ra, rb in zip(a, b):
        assert abs(ra.report.wva_fi - rb.report.wva_fi) <= 1e-12 * max(1.0, ra.report.wva_fi)
        assert abs(ra.report.wva_qfi - rb.report.wva_qfi) <= 1e-12 * max(1.0, ra.report.wva_qfi)
        assert abs(ra.p_f - rb.p_f) < 1e-12


def test_fit_exact_cube():
    fit = fit_power_law([10, 20, 40, 80], [1e3, 8e3, 6.4e4, 5.12e5])
    assert fit.slope == pytest.approx(3.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.precision_exponent == pytest.approx(1.5, abs=1e-12)


@settings(max_examples=60)
@given(st.floats(-5, 5), st.floats(-3, 3), st.integers(3, 30))
def test_fit_recovers_planted_slope(k, log_c, count):
    x = np.geomspace(2.0, 150.0, count)
    y = np.exp(log_c) * x**k
    fit = fit_power_law(x, y)
    assert fit.slope == pytest.approx(k, abs=1e-12)
    assert fit.intercept == pytest.approx(log_c, abs=1e-10)
    assert fit.residual_max < 1e-10
    assert 0 <= fit.r_squared <= 1


def test_fit_errors():
    with pytest.raises(InsufficientPoints):
        fit_power_law([1, 2], [1, 2])
    with pytest.raises(NonpositiveData):
        fit_power_law([1, 2, 3], [1, 0, 3])
    with pytest.raises(NonpositiveData):
        fit_power_law([1, -2, 3], [1, 2, 3])


def test_fit_residuals_consistent():
    x = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    y = x**2 * np.array([1.0, 1.1, 0.9, 1.05, 1.0])
    fit = fit_power_law(x, y)
    resid = np.log(y) - (fit.slope * np.log(x) + fit.intercept)
    np.testing.assert_allclose(fit.residuals, resid, atol=1e-14)
    assert fit.residual_max == pytest.approx(np.max(np.abs(resid)))
    assert 0.9 < fit.r_squared < 1


def test_conventional_qfi_slope():
    x = np.geomspace(20, 120, 12)
    fit = fit_power_law(x, 4 * (4 * x**3 + 6 * x**2 + x))
    assert fit.slope == pytest.approx(3, abs=0.1)


def test_fig4_fits():
    fits = scaling_fits(run_sweep(fig4_spec()))
    assert fits["wva_fi"].slope == pytest.approx(4, abs=0.3)
    assert fits["q_cm"].slope == pytest.approx(3, abs=0.1)
