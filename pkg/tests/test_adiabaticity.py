import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from adiapulse.adiabaticity import (
    DetuningKind,
    classify_detunings,
    gap_functions,
    gap_report,
    limit_gaps,
    theta_extrema_check,
    two_level_adiabatic,
)
from adiapulse.frame import cubic_from_rabi, lambda_eigenvalues
from adiapulse.sweep import fig6_system

detunings = st.floats(-20.0, 20.0)
nonzero = st.floats(0.5, 20.0) | st.floats(-20.0, -0.5)


@pytest.mark.parametrize("delta, t, expected", [(0.0, 8.0, False), (1.0, 8.0, True),
                                                (0.1, 8.0, False), (-1.0, 8.0, True)])
def test_two_level_adiabatic(delta, t, expected):
    assert two_level_adiabatic(delta, t) is expected


def test_two_level_adiabatic_needs_duration():
    with pytest.raises(ValueError):
        two_level_adiabatic(1.0, 0.0)


@given(st.floats(0, 40), st.floats(0, 40), detunings, detunings)
def test_gaps_match_eigenvalue_differences(op, os_, dp, ds):
    c = cubic_from_rabi(op, os_, dp, ds)
    assume(not c.degenerate)
    z1, z2, z3 = lambda_eigenvalues(c)
    g12, g32 = gap_functions(c)
    assert g12 == pytest.approx(abs(z1 - z2), abs=1e-10 * max(1.0, c.p))
    assert g32 == pytest.approx(abs(z3 - z2), abs=1e-10 * max(1.0, c.p))


def test_degenerate_gaps_are_zero():
    assert gap_functions(cubic_from_rabi(0.0, 0.0, 0.0, 0.0)) == (0.0, 0.0)


def test_gap_examples():
    assert limit_gaps(10.0, 5.0) == pytest.approx((5.0, 5.0), rel=1e-6)
    assert limit_gaps(-3.0, 3.0) == pytest.approx((3.0, 3.0), rel=1e-6)
    # on Delta_P = Delta_S only the gap below Z2 closes: (|Delta_P|, 0)
    g = limit_gaps(4.0, 4.0)
    assert min(g) < 1e-5 * 4.0
    assert max(g) == pytest.approx(4.0, rel=1e-6)


@pytest.mark.xfail(strict=True, reason="only one gap closes on Delta_P = Delta_S; see ledger")
def test_gap_example_both_vanish_on_resonance_line():
    assert limit_gaps(4.0, 4.0) == pytest.approx((0.0, 0.0), abs=1e-5)


@pytest.mark.parametrize(
    "dp, ds, kind, gap",
    [(0.0, 7.0, DetuningKind.MINIMUM, 0.0), (14.0, 7.0, DetuningKind.MAXIMUM, 7.0),
     (3.0, 10.0, DetuningKind.GENERIC, None), (5.0, 5.0, DetuningKind.MINIMUM, 0.0),
     (-4.0, 4.0, DetuningKind.MAXIMUM, 4.0), (3.0, 6.0, DetuningKind.MAXIMUM, 3.0)],
)
def test_classify_examples(dp, ds, kind, gap):
    c = classify_detunings(dp, ds)
    assert c.kind is kind
    if gap is not None:
        assert c.limit_gap == pytest.approx(gap, rel=1e-6, abs=1e-12)


@given(nonzero, nonzero, st.floats(0.01, 100.0))
def test_classify_scale_invariant(dp, ds, k):
    assert classify_detunings(dp, ds).kind is classify_detunings(k * dp, k * ds).kind


@given(nonzero)
def test_classify_lines(ds):
    for dp in (0.0, ds):
        c = classify_detunings(dp, ds)
        assert c.kind is DetuningKind.MINIMUM and c.limit_gap == 0.0
    for dp in (2 * ds, -ds):
        c = classify_detunings(dp, ds)
        assert c.kind is DetuningKind.MAXIMUM
        assert c.limit_gap == pytest.approx(abs(ds), rel=1e-6)


def test_theta_examples():
    assert theta_extrema_check(5.0, 5.0).minimum == 0.0
    r = theta_extrema_check(-4.0, 4.0)
    assert r.maximum == 0.0 and r.max_factored == 0.0
    r = theta_extrema_check(1.0, 5.0)
    assert r.minimum != 0 and r.maximum != 0 and r.max_factored != 0


@given(detunings, detunings)
def test_theta_factorisation(dp, ds):
    r = theta_extrema_check(dp, ds)
    assert r.max_poly == pytest.approx(r.max_factored, abs=1e-9 * max(1.0, abs(dp), abs(ds)) ** 3)


@given(nonzero, nonzero)
def test_theta_residual_matches_cos_theta(dp, ds):
    # the residuals encode cos(theta) = -1, +1 and 0 at Omega = 0
    r = theta_extrema_check(dp, ds)
    p3 = (dp * dp - dp * ds + ds * ds) ** 1.5
    cos_theta = -r.max_poly / (2 * p3)
    assert cos_theta == pytest.approx(cubic_from_rabi(0.0, 0.0, dp, ds).cos_theta, abs=1e-7)


def test_gap_report_fig6():
    sys = fig6_system(10)
    rep = gap_report(sys, -8.0)
    assert rep.gap_12 > 0 and rep.gap_32 > 0
    assert rep.adiabatic
    loose = gap_report(sys, -8.0, margin=1e9)
    assert not loose.adiabatic
