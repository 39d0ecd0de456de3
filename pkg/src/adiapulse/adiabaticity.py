"""Adiabaticity criteria: the two-level detuning condition, the Lambda-system
eigenvalue gaps and the classification of detuning pairs by their gaps at
vanishing Rabi frequency."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .frame import (
    CubicCoefficients,
    cubic_coefficients,
    cubic_from_rabi,
    default_h_step,
    nonadiabatic_couplings,
)
from .params import LambdaSystem

SQRT3_3 = math.sqrt(3.0) / 3.0
DEFAULT_MARGIN = 10.0
DEFAULT_CLASSIFY_TOL = 1e-6
VANISHING_RABI = 1e-6  # "Omega -> 0", relative to max(|Delta_P|, |Delta_S|, 1)


def two_level_adiabatic(delta: float, duration: float) -> bool:
    if not duration > 0:
        raise ValueError("duration must be > 0")
    return abs(delta) >= 1.0 / duration


def gap_functions(coeffs: CubicCoefficients) -> tuple[float, float]:
    """(|Z1 - Z2|, |Z3 - Z2|) from p and theta alone."""
    if coeffs.degenerate:
        return 0.0, 0.0
    x = coeffs.theta / 3.0
    gap_12 = abs(coeffs.p * (math.cos(x) - SQRT3_3 * math.sin(x)))
    gap_32 = abs(2.0 * SQRT3_3 * coeffs.p * math.sin(x))
    return gap_12, gap_32


def vanishing_rabi(delta_p: float, delta_s: float) -> float:
    return VANISHING_RABI * max(abs(delta_p), abs(delta_s), 1.0)


def limit_gaps(delta_p: float, delta_s: float) -> tuple[float, float]:
    """Gaps with both Rabi frequencies set to the tiny 'Omega -> 0' value."""
    om = vanishing_rabi(delta_p, delta_s)
    return gap_functions(cubic_from_rabi(om, om, delta_p, delta_s))


@dataclass(frozen=True)
class GapReport:
    gap_12: float
    gap_32: float
    coupling_12: float
    coupling_32: float
    margin: float = DEFAULT_MARGIN

    @property
    def adiabatic_12(self) -> bool:
        return self.gap_12 >= self.margin * self.coupling_12

    @property
    def adiabatic_32(self) -> bool:
        return self.gap_32 >= self.margin * self.coupling_32

    @property
    def adiabatic(self) -> bool:
        return self.adiabatic_12 and self.adiabatic_32


def gap_report(
    sys: LambdaSystem, t: float, margin: float = DEFAULT_MARGIN, h_step: float | None = None
) -> GapReport:
    """Compare the gaps next to Z2 with the couplings that would drive the state off Phi_2."""
    g12, g32 = gap_functions(cubic_coefficients(sys, t))
    cm = nonadiabatic_couplings(sys, t, h_step or default_h_step(sys))
    return GapReport(g12, g32, abs(cm.a12), abs(cm.a23), margin)


class DetuningKind(enum.Enum):
    MINIMUM = "Minimum"
    MAXIMUM = "Maximum"
    GENERIC = "Generic"


@dataclass(frozen=True)
class DetuningClass:
    kind: DetuningKind
    limit_gap: float  # smallest gap next to Z2 as Omega -> 0
    lines: tuple[str, ...] = ()


_MIN_LINES = {
    "delta_p = 0": lambda p, s: p,
    "delta_p = delta_s": lambda p, s: p - s,
}
_MAX_LINES = {
    "delta_p = 2 delta_s": lambda p, s: p - 2.0 * s,
    "delta_s = 2 delta_p": lambda p, s: s - 2.0 * p,
    "delta_p = -delta_s": lambda p, s: p + s,
}


def classify_detunings(
    delta_p: float, delta_s: float, tol: float = DEFAULT_CLASSIFY_TOL
) -> DetuningClass:
    """Place a detuning pair on the extremal lines of the Omega -> 0 gaps.

    On the minimum lines one of the gaps next to Z2 closes.  On the maximum
    lines the two gaps are equal; the common value is |Delta_S| on
    Delta_P = 2 Delta_S and Delta_P = -Delta_S, but |Delta_P| = |Delta_S|/2
    on Delta_S = 2 Delta_P, so ``limit_gap`` reports the actual gap.
    """
    scale = max(abs(delta_p), abs(delta_s))
    if scale == 0:
        return DetuningClass(DetuningKind.MINIMUM, 0.0, tuple(_MIN_LINES))
    on = lambda lines: tuple(k for k, f in lines.items() if abs(f(delta_p, delta_s)) <= tol * scale)
    hits = on(_MIN_LINES)
    if hits:
        return DetuningClass(DetuningKind.MINIMUM, 0.0, hits)
    hits = on(_MAX_LINES)
    if hits:
        return DetuningClass(DetuningKind.MAXIMUM, min(limit_gaps(delta_p, delta_s)), hits)
    return DetuningClass(DetuningKind.GENERIC, min(limit_gaps(delta_p, delta_s)))


@dataclass(frozen=True)
class ThetaResiduals:
    """Polynomial identities behind the extremal lines, at Omega = 0.

    ``min_12`` vanishes where cos(theta) = -1 (Z1 = Z2), ``min_32`` where
    cos(theta) = 1 (Z2 = Z3), and ``max_poly``/``max_factored`` where
    cos(theta) = 0.
    """

    min_12: float
    min_32: float
    max_poly: float
    max_factored: float

    @property
    def minimum(self) -> float:
        return min(abs(self.min_12), abs(self.min_32))

    @property
    def maximum(self) -> float:
        return abs(self.max_poly)


def theta_extrema_check(delta_p: float, delta_s: float) -> ThetaResiduals:
    a = -(2.0 * delta_p - delta_s)
    b = delta_p * (delta_p - delta_s)
    p3 = (delta_p**2 - delta_p * delta_s + delta_s**2) ** 1.5
    poly = 2.0 * a**3 - 9.0 * a * b
    factored = (delta_p - 2.0 * delta_s) * (2.0 * delta_p - delta_s) * (delta_p + delta_s)
    return ThetaResiduals(poly - 2.0 * p3, poly + 2.0 * p3, poly, factored)
