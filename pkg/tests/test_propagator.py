import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from adiapulse import propagator
from adiapulse.errors import ToleranceNotMet, ZeroDetuning
from adiapulse.frame import FrameTracker, two_level_frame
from adiapulse.hamiltonian import h_lambda, h_two_level
from adiapulse.params import LambdaSystem, PulseEnvelope, TimeGrid, TwoLevelSystem
from adiapulse.propagator import (
    cpr_population_analytic,
    propagate_lambda,
    propagate_two_level,
)
from adiapulse.sweep import fig1_system, fig6_system, fig8_10_system, fig11_12_system

NORM_TOL = 1e-8


def _scipy_reference(hfun, dim, times):
    def rhs(t, y):
        return -1j * (hfun(t) @ y)

    y0 = np.zeros(dim, dtype=complex)
    y0[0] = 1.0
    sol = solve_ivp(rhs, (times[0], times[-1]), y0, method="DOP853", t_eval=times,
                    rtol=1e-12, atol=1e-14)
    return sol.y.T


@pytest.mark.parametrize("ratio", [1, 4, 10])
def test_two_level_matches_scipy(ratio):
    sys = fig1_system(ratio)
    times = TimeGrid.around(sys, 81).times()
    ours = propagate_two_level(sys, times).states
    ref = _scipy_reference(lambda t: h_two_level(sys, t), 2, times)
    assert np.abs(ours - ref).max() < 1e-7


@pytest.mark.parametrize("sys", [fig6_system(2), fig6_system(10), fig8_10_system(),
                                 LambdaSystem.simultaneous(20, 20, 6.5, 3.0, -7.0)])
def test_lambda_matches_scipy(sys):
    times = TimeGrid.around(sys, 61).times()
    ours = propagate_lambda(sys, times).states
    ref = _scipy_reference(lambda t: h_lambda(sys, t), 3, times)
    assert np.abs(ours - ref).max() < 1e-7


def test_no_coupling_stays_put():
    two = propagate_two_level(TwoLevelSystem(PulseEnvelope(0.0, 8.0), 3.0))
    assert np.all(two.populations[:, 0] == 1.0)
    lam = propagate_lambda(LambdaSystem.simultaneous(0.0, 0.0, 6.0, 5.0, 10.0))
    assert np.all(lam.populations[:, 0] == 1.0)


MARGINAL = "Delta*tau = 8 is only marginally adiabatic; see decisions ledger"


@pytest.mark.parametrize(
    "ratio, expected",
    [(1, 0.1464), (4, 0.3787), pytest.param(10, 0.45025, marks=pytest.mark.xfail(
        strict=True, reason=MARGINAL + " (P2(0) = 0.4737 at Delta = 1)"))],
)
def test_fig1_peak_and_return(ratio, expected):
    tr = propagate_two_level(fig1_system(ratio))
    assert tr.at_peak()[1] == pytest.approx(expected, abs=0.01)
    assert tr.final()[0] > 0.99


@pytest.mark.parametrize("ratio, expected", [(1, 0.14645), (4, 0.37873), (10, 0.45025)])
def test_peak_follows_adiabatic_formula_well_inside_regime(ratio, expected):
    # Delta * tau = 40 >> 1
    tr = propagate_two_level(fig1_system(ratio, delta=5.0))
    assert tr.at_peak()[1] == pytest.approx(expected, abs=0.01)
    assert tr.final()[0] > 0.99


def _mixing_angle_gap(ratio, delta, tau):
    sys = TwoLevelSystem(PulseEnvelope(ratio * delta, tau), delta)
    tr = propagate_two_level(sys, TimeGrid.around(sys, 201))
    oracle = [two_level_frame(sys.pulse(t), delta).excited_population for t in tr.times]
    return np.abs(tr.populations[:, 1] - oracle).max()


@pytest.mark.xfail(strict=True, reason=MARGINAL)
@given(st.floats(0.5, 20.0), st.floats(0.2, 3.0))
@settings(max_examples=40)
def test_two_level_follows_mixing_angle_at_dtau_8(ratio, delta):
    assert _mixing_angle_gap(ratio, delta, 8.0 / delta) < 0.02


@given(st.floats(0.5, 20.0), st.floats(0.2, 3.0), st.floats(16.0, 40.0))
@settings(max_examples=25)
def test_two_level_follows_mixing_angle(ratio, delta, dtau):
    assert _mixing_angle_gap(ratio, delta, dtau / delta) < 0.02


def test_cpr_analytic_examples():
    assert cpr_population_analytic(0.0, 5.0) == 0.0
    assert cpr_population_analytic(1e6, 1.0) == pytest.approx(0.4999995, abs=1e-9)
    assert cpr_population_analytic(1.0, 1.0) == pytest.approx(0.5 - 1 / (2 * math.sqrt(2)))
    with pytest.raises(ZeroDetuning):
        cpr_population_analytic(1.0, 0.0)


@given(st.floats(0.0, 100.0), st.floats(-20.0, 20.0).filter(lambda d: abs(d) > 1e-3))
def test_cpr_analytic_matches_mixing_angle(omega, delta):
    assert cpr_population_analytic(omega, delta) == pytest.approx(
        two_level_frame(omega, abs(delta)).excited_population, abs=1e-12
    )


PRESETS = [fig1_system(r) for r in (1, 4, 10)] + [fig6_system(r) for r in (2, 4, 10)] + [
    fig8_10_system(), fig11_12_system()
]


@pytest.mark.parametrize("sys", PRESETS)
def test_norm_conserved_on_presets(sys):
    prop = propagate_two_level if isinstance(sys, TwoLevelSystem) else propagate_lambda
    assert prop(sys).norm_error() <= NORM_TOL


@pytest.mark.parametrize("sys", [
    fig6_system(2), fig6_system(4), fig11_12_system(),
    pytest.param(fig6_system(10), marks=pytest.mark.xfail(strict=True, reason="2.7e-4")),
    pytest.param(fig8_10_system(), marks=pytest.mark.xfail(strict=True, reason="9.4e-3")),
])
def test_time_reversal_symmetry(sys):
    tr = propagate_lambda(sys, TimeGrid.around(sys, 401))
    p = tr.populations
    assert np.abs(p - p[::-1]).max() < 1e-4


@pytest.mark.parametrize("sys", [fig6_system(2), fig6_system(10), fig8_10_system(),
                                 fig11_12_system()])
def test_state_locked_to_phi2(sys):
    tr = propagate_lambda(sys, TimeGrid.around(sys, 301))
    tracker = FrameTracker(sys)
    overlap = [abs(tracker(t).phi[:, 1] @ c) ** 2 for t, c in zip(tr.times, tr.states)]
    assert min(overlap) > 0.98


def test_halving_tolerance_is_consistent():
    sys = fig6_system(10)
    for rel in (1e-8, 1e-9):
        a = propagate_lambda(sys, TimeGrid.around(sys, 101), rel_tol=rel)
        b = propagate_lambda(sys, TimeGrid.around(sys, 101), rel_tol=rel / 2)
        assert np.abs(a.populations - b.populations).max() < rel


def test_lambda_examples():
    tr = propagate_lambda(fig6_system(10))
    p0 = tr.at_peak()
    assert p0[1] < 0.05 and abs(p0[0] - p0[2]) < 0.05
    assert tr.excited_final < 0.02


def test_trajectory_accessors():
    tr = propagate_lambda(fig6_system(4), TimeGrid.around(fig6_system(4), 11))
    assert tr.dim == 3
    assert np.allclose(tr.rho, tr.states[:, 0] * np.conj(tr.states[:, 2]))
    assert tr.coherence_13 is not None and tr.peak_index() == 5
    two = propagate_two_level(fig1_system(4), TimeGrid.around(fig1_system(4), 11))
    assert np.allclose(two.rho, two.states[:, 0] * np.conj(two.states[:, 1]))


def test_explicit_initial_state():
    sys = fig6_system(4)
    tr = propagate_lambda(sys, TimeGrid.around(sys, 11), initial=[0, 0, 1])
    assert tr.populations[0, 2] == 1.0
    with pytest.raises(ValueError):
        propagate_lambda(sys, initial=[1, 0])


def test_bad_sample_times():
    with pytest.raises(ValueError):
        propagate_lambda(fig6_system(4), np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        propagate_lambda(fig6_system(4), rel_tol=0.0)


def test_step_budget_exhaustion_raises(monkeypatch):
    monkeypatch.setattr(propagator, "MAX_STEPS", 10)
    with pytest.raises(ToleranceNotMet):
        propagate_lambda(fig6_system(10))


def test_deterministic():
    a = propagate_lambda(fig8_10_system())
    b = propagate_lambda(fig8_10_system())
    assert np.array_equal(a.states, b.states)
