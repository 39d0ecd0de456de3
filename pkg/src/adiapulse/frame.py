"""Analytic adiabatic frame of the two-level and Lambda Hamiltonians.

For the Lambda system the eigenvalues come from the trigonometric solution
of the characteristic cubic, the eigenvectors from the explicit vectors

    w_i = (Omega_P (Z_i - delta), 2 Z_i (Z_i - delta), Z_i Omega_S),
    delta = Delta_P - Delta_S,

unit-normalised.  ``R`` has the adiabatic vectors as columns (it maps
adiabatic-basis amplitudes to bare-basis amplitudes) and is kept a proper
rotation so it can be written as an axis ``u`` and angle ``alpha``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .hamiltonian import lambda_matrix, lambda_rabi
from .params import LambdaSystem

EPS_P_REL = 1e-10  # p below this (times max(1, |a|)) counts as a triple root
ARCCOS_SLACK = 1e-9
EPS_W_REL = 1e-12  # |w_i| below this (times scale**2) -> numerical eigenvector
GAP_FALLBACK_REL = 1e-7  # nearly double roots -> numerical eigenvectors


# ------------------------------------------------------------------ two-level


@dataclass(frozen=True)
class TwoLevelFrame:
    lambda_minus: float
    lambda_plus: float
    mixing_angle: float

    @property
    def excited_population(self) -> float:
        """sin^2 of the mixing angle: P2 when the state follows Phi_-."""
        return math.sin(self.mixing_angle) ** 2


def two_level_frame(omega: float, delta: float) -> TwoLevelFrame:
    root = math.hypot(omega, delta)
    return TwoLevelFrame(
        0.5 * (delta - root), 0.5 * (delta + root), 0.5 * math.atan2(omega, delta)
    )


# ---------------------------------------------------------------- cubic roots


@dataclass(frozen=True)
class CubicCoefficients:
    """Z^3 + a Z^2 + b Z + c, plus the trigonometric-solution parameters."""

    a: float
    b: float
    c: float
    p: float
    theta: float
    degenerate: bool = False

    @property
    def cos_theta(self) -> float:
        return math.cos(self.theta)


def cubic_from_rabi(omega_p, omega_s, delta_p, delta_s) -> CubicCoefficients:
    delta = delta_p - delta_s
    a = -(2.0 * delta_p - delta_s)
    b = delta_p * delta - 0.25 * (omega_p**2 + omega_s**2)
    c = 0.25 * delta * omega_p**2

    # p^2 = a^2 - 3b and 27c + 2a^3 - 9ab = -27 det(H - tr(H)/3) for this
    # matrix; the traceless forms avoid cancellation when |a| >> p.
    m = -a / 3.0
    d1, d2, d3 = -m, delta_p - m, delta - m
    q, s = 0.5 * omega_p, 0.5 * omega_s
    p = math.sqrt(1.5 * (d1 * d1 + d2 * d2 + d3 * d3 + 2.0 * (q * q + s * s)))
    if p < EPS_P_REL * max(1.0, abs(a)):
        return CubicCoefficients(a, b, c, p, math.nan, degenerate=True)
    det_b = d1 * (d2 * d3 - s * s) - q * q * d3
    cos_theta = 27.0 * det_b / (2.0 * p**3)
    if abs(cos_theta) > 1.0 + ARCCOS_SLACK:
        raise NumericalError(f"cos(theta) = {cos_theta!r} outside [-1, 1]")
    theta = math.acos(min(1.0, max(-1.0, cos_theta)))
    return CubicCoefficients(a, b, c, p, theta)


def cubic_coefficients(sys: LambdaSystem, t: float) -> CubicCoefficients:
    op, os_ = lambda_rabi(sys, t)
    return cubic_from_rabi(op, os_, sys.delta_p, sys.delta_s)


def lambda_eigenvalues(coeffs: CubicCoefficients) -> tuple[float, float, float]:
    """Trigonometric roots; always ordered Z1 >= Z2 >= Z3."""
    shift = -coeffs.a / 3.0
    if coeffs.degenerate:
        return shift, shift, shift
    k = 2.0 * coeffs.p / 3.0
    x = coeffs.theta / 3.0
    return (
        shift + k * math.cos(x),
        shift - k * math.cos(x + math.pi / 3.0),
        shift - k * math.cos(x - math.pi / 3.0),
    )


def characteristic_residual(coeffs: CubicCoefficients, z: float) -> float:
    return ((z + coeffs.a) * z + coeffs.b) * z + coeffs.c


def _newton_polish(a, b, c, z, steps=2):
    out = np.array(z, dtype=float)
    for i in range(out.size):
        zi = out[i]
        for _ in range(steps):
            r = ((zi + a) * zi + b) * zi + c
            d = (3.0 * zi + 2.0 * a) * zi + b
            if d == 0.0 or r == 0.0:
                break
            cand = zi - r / d
            if abs(((cand + a) * cand + b) * cand + c) >= abs(r):
                break
            zi = cand
        out[i] = zi
    return out


def _shifted_coefficients(omega_p, omega_s, delta_p, delta_s, shift):
    """Characteristic coefficients of H - shift*I built from the matrix entries.

    With ``shift`` equal to a bare energy one diagonal entry is exactly zero,
    so roots close to that bare energy come out with full relative accuracy.
    """
    d1, d2, d3 = -shift, delta_p - shift, (delta_p - delta_s) - shift
    q2, s2 = 0.25 * omega_p**2, 0.25 * omega_s**2
    a = -(d1 + d2 + d3)
    b = d1 * d2 + d1 * d3 + d2 * d3 - q2 - s2
    c = -(d1 * (d2 * d3 - s2) - q2 * d3)
    return a, b, c


def polish_roots(coeffs: CubicCoefficients, z) -> np.ndarray:
    """Guarded Newton steps on the characteristic cubic.

    Roots near zero (pulse edges, where a root is O(Omega^2)) carry an
    absolute error of order eps * |a| from the trigonometric form, which
    would spoil the small eigenvector components.  Steps are kept only while
    they lower the residual.
    """
    if coeffs.degenerate:
        return np.array(z, dtype=float)
    return _newton_polish(coeffs.a, coeffs.b, coeffs.c, z)


# --------------------------------------------------------------------- frame


@dataclass(frozen=True)
class LambdaFrame:
    z: np.ndarray  # (Z1, Z2, Z3)
    phi: np.ndarray  # columns Phi_1, Phi_2, Phi_3 in the bare basis
    axis_u: np.ndarray
    angle_alpha: float
    fallback: bool = False  # eigenvectors came from a dense eigensolver

    @property
    def r_matrix(self) -> np.ndarray:
        return self.phi

    @property
    def projections(self) -> np.ndarray:
        """``[i, j] = |<psi_j|Phi_i>|^2``."""
        return (self.phi**2).T


def home_rows(delta_p: float, delta_s: float) -> np.ndarray:
    """Bare state each adiabatic vector connects to when the pulses are off.

    Z1 >= Z2 >= Z3 always, so Phi_i tends to the bare state with the i-th
    largest bare energy (0, Delta_P, Delta_P - Delta_S).  For Delta_P > 0 and
    Delta_S > Delta_P this is (psi2, psi1, psi3).
    """
    bare = np.array([0.0, delta_p, delta_p - delta_s])
    return np.argsort(-bare, kind="stable")


def _dense_basis(h, home):
    evals, evecs = np.linalg.eigh(h)
    if not np.any(h - np.diag(np.diag(h))):
        return np.eye(3)[:, home]
    return evecs[:, ::-1].copy()


def _fix_signs(phi, home, reference):
    if reference is not None:
        flips = np.where(np.einsum("ij,ij->j", phi, reference) < 0, -1.0, 1.0)
        phi = phi * flips
    else:
        for i in range(3):
            v = phi[home[i], i]
            if v == 0.0:
                v = phi[int(np.argmax(np.abs(phi[:, i]))), i]
            if v < 0:
                phi[:, i] = -phi[:, i]
    if np.linalg.det(phi) < 0:
        phi[:, 2] = -phi[:, 2]
    return phi


def rotation_axis_angle(r: np.ndarray, previous_axis=None) -> tuple[np.ndarray, float]:
    """Axis and angle of the rotation ``R^T`` (Rodrigues form, alpha in [0, pi]).

    The axis sign is the one for which the Rodrigues matrix of (u, alpha)
    reproduces R^T; at alpha = 0 or pi either sign works and the sign closest
    to ``previous_axis`` (or with a positive largest component) is used.
    """
    m = r.T
    cos_a = 0.5 * (np.trace(m) - 1.0)
    alpha = math.acos(min(1.0, max(-1.0, cos_a)))
    _, _, vt = np.linalg.svd(m - np.eye(3))
    u = vt[-1]
    u = u / np.linalg.norm(u)
    anti = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    if np.linalg.norm(anti) > 1e-8:
        if u @ anti < 0:
            u = -u
    elif previous_axis is not None:
        if u @ previous_axis < 0:
            u = -u
    elif u[int(np.argmax(np.abs(u)))] < 0:
        u = -u
    return u, alpha


def rodrigues(u, alpha) -> np.ndarray:
    """The matrix R^T written in terms of its axis and angle."""
    ux, uy, uz = u
    c, s = math.cos(alpha), math.sin(alpha)
    k = 1.0 - c
    return np.array(
        [
            [c + ux * ux * k, ux * uy * k - uz * s, ux * uz * k + uy * s],
            [uy * ux * k + uz * s, c + uy * uy * k, uy * uz * k - ux * s],
            [uz * ux * k - uy * s, uz * uy * k + ux * s, c + uz * uz * k],
        ]
    )


def frame_from_rabi(
    omega_p, omega_s, delta_p, delta_s, reference=None, previous_axis=None
) -> LambdaFrame:
    coeffs = cubic_from_rabi(omega_p, omega_s, delta_p, delta_s)
    z = polish_roots(coeffs, lambda_eigenvalues(coeffs))
    delta = delta_p - delta_s
    # Z_i - delta, accurate even when Z_i sits next to the bare energy delta
    zd = _newton_polish(
        *_shifted_coefficients(omega_p, omega_s, delta_p, delta_s, delta), z - delta
    )
    h = lambda_matrix(omega_p, omega_s, delta_p, delta_s)
    home = home_rows(delta_p, delta_s)
    scale = max(abs(delta_p), abs(delta_s), omega_p, omega_s, 1e-300)

    fallback = coeffs.degenerate or min(z[0] - z[1], z[1] - z[2]) < GAP_FALLBACK_REL * scale
    if not fallback:
        w = np.array([omega_p * zd, 2.0 * z * zd, z * omega_s])
        norms = np.linalg.norm(w, axis=0)
        if np.all(norms >= EPS_W_REL * scale * scale):
            phi = w / norms
        else:
            fallback = True
    if fallback:
        phi = _dense_basis(h, home)

    phi = _fix_signs(phi, home, reference)
    u, alpha = rotation_axis_angle(phi, previous_axis)
    return LambdaFrame(z, phi, u, alpha, fallback)


def adiabatic_basis(sys: LambdaSystem, t: float, reference=None) -> LambdaFrame:
    """Adiabatic frame at one instant.

    Without ``reference`` the column signs follow the boundary alignment:
    each Phi_i has a non-negative component on its home bare state (see
    :func:`home_rows`), with Phi_3 flipped if needed so det R = +1.  With a
    reference matrix the signs are instead chosen to keep each column
    continuous with the reference; :class:`FrameTracker` does this along a
    time grid.
    """
    op, os_ = lambda_rabi(sys, t)
    return frame_from_rabi(op, os_, sys.delta_p, sys.delta_s, reference)


# --------------------------------------------------------- non-adiabatic part


@dataclass(frozen=True)
class CouplingMatrix:
    a12: float
    a13: float
    a23: float
    matrix: np.ndarray  # the full finite-difference R^T dR/dt, for diagnostics

    def antisymmetric(self) -> np.ndarray:
        return np.array(
            [
                [0.0, self.a12, self.a13],
                [-self.a12, 0.0, self.a23],
                [-self.a13, -self.a23, 0.0],
            ]
        )


def default_h_step(sys: LambdaSystem) -> float:
    return min(sys.pump.width_tau, sys.stokes.width_tau) / 1000.0


def _coupling_about(sys, t, h_step, r0) -> CouplingMatrix:
    # five-point central stencil; the three-point one leaves an
    # (h^2/6) d3R/dt3 term of ~4e-7 at tau/1000 for the strong-field presets
    def r(s):
        return adiabatic_basis(sys, t + s, reference=r0).phi

    h = h_step
    m = r0.T @ ((8.0 * (r(h) - r(-h)) - (r(2.0 * h) - r(-2.0 * h))) / (12.0 * h))
    return CouplingMatrix(m[0, 1], m[0, 2], m[1, 2], m)


def nonadiabatic_couplings(sys: LambdaSystem, t: float, h_step: float | None = None):
    """Off-diagonal elements of R^T dR/dt by five-point central differences of R."""
    if h_step is None:
        h_step = default_h_step(sys)
    if not h_step > 0:
        raise ValueError("h_step must be > 0")
    return _coupling_about(sys, t, h_step, adiabatic_basis(sys, t).phi)


def analytic_couplings(sys: LambdaSystem, t: float, frame: LambdaFrame | None = None):
    """<Phi_i| dH/dt |Phi_j> / (Z_j - Z_i); independent of any differencing."""
    from .params import envelope_at

    if frame is None:
        frame = adiabatic_basis(sys, t)
    dop = envelope_at(sys.pump, t) * (-2.0 * (t - sys.pump.center_t0) / sys.pump.width_tau**2)
    dos = envelope_at(sys.stokes, t) * (
        -2.0 * (t - sys.stokes.center_t0) / sys.stokes.width_tau**2
    )
    dh = lambda_matrix(dop, dos, 0.0, 0.0)
    phi, z = frame.phi, frame.z
    m = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            if i != j:
                m[i, j] = phi[:, i] @ dh @ phi[:, j] / (z[j] - z[i])
    return CouplingMatrix(m[0, 1], m[0, 2], m[1, 2], m)


# ------------------------------------------------------------- trajectories


class FrameTracker:
    """Builds frames along increasing times, keeping every column continuous.

    Holds the previous frame as state; use one tracker per trajectory.
    """

    def __init__(self, sys: LambdaSystem):
        self.sys = sys
        self._previous: LambdaFrame | None = None

    def __call__(self, t: float) -> LambdaFrame:
        prev = self._previous
        op, os_ = lambda_rabi(self.sys, t)
        frame = frame_from_rabi(
            op,
            os_,
            self.sys.delta_p,
            self.sys.delta_s,
            reference=None if prev is None else prev.phi,
            previous_axis=None if prev is None else prev.axis_u,
        )
        self._previous = frame
        return frame


FRAME_COLUMNS = (
    ["t", "Z1", "Z2", "Z3", "ux", "uy", "uz", "alpha", "a12", "a13", "a23"]
    + [f"proj_{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3)]
)


@dataclass(frozen=True)
class FrameTable:
    times: np.ndarray
    data: np.ndarray  # shape (len(times), len(FRAME_COLUMNS))
    columns: tuple = tuple(FRAME_COLUMNS)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def projection_matrix(self, k: int) -> np.ndarray:
        """``[i, j] = |<psi_j|Phi_i>|^2`` at sample ``k``."""
        start = self.columns.index("proj_11")
        return self.data[k, start : start + 9].reshape(3, 3)


def frame_trajectory(sys: LambdaSystem, times, h_step: float | None = None) -> FrameTable:
    if h_step is None:
        h_step = default_h_step(sys)
    times = np.asarray(times, dtype=float)
    tracker = FrameTracker(sys)
    rows = []
    for t in times:
        f = tracker(t)
        cm = _coupling_about(sys, t, h_step, f.phi)
        rows.append(
            np.concatenate(
                [
                    [t],
                    f.z,
                    f.axis_u,
                    [f.angle_alpha, cm.a12, cm.a13, cm.a23],
                    f.projections.ravel(),
                ]
            )
        )
    return FrameTable(times, np.array(rows))
