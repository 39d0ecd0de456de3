"""Closed-form rotation axis and angle of the Lambda-system adiabatic frame.

These are the long explicit expressions in terms of Z1, Z3, the
normalisation factors xi_1, xi_3 and the Rabi frequencies.  They are kept
as a cross-check on the generic extraction in :mod:`adiapulse.frame`,
which remains the reference.

With ``literal=True`` the expressions are evaluated exactly as printed.  The
printed text has two misprints, both confirmed by agreement with the generic
extraction to round-off once corrected:

* ``b1`` contains a factor ``(Delta_S - Delta_S)`` where ``g1`` and ``b3``
  have ``(Delta_P - Delta_S)``;
* the radicand of ``u_y`` reads ``c - d - e + f`` where ``u_x`` and ``u_z``
  use ``c + d + e + f``.

``literal=False`` (the default) applies both corrections.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import IllConditioned
from .frame import adiabatic_basis
from .hamiltonian import lambda_rabi
from .params import LambdaSystem

EPS_DEN = 1e-10


def normalisation_factors(frame, omega_p, omega_s, delta_p, delta_s) -> np.ndarray:
    """xi_i such that Phi_i = xi_i w_i for the frame's (sign-fixed) columns."""
    z = frame.z
    delta = delta_p - delta_s
    w = np.array([omega_p * (z - delta), 2.0 * z * (z - delta), z * omega_s])
    xi = np.empty(3)
    for i in range(3):
        k = int(np.argmax(np.abs(w[:, i])))
        xi[i] = frame.phi[k, i] / w[k, i] if w[k, i] != 0 else math.nan
    return xi


def _shared_terms(z1, z3, x1, x3, op, os_, dp, ds):
    c = (
        1
        + 4 * z1**2 * (z1 - dp + ds) ** 2 * x1**2
        + 4 * z3**4 * x3**2
        - 4 * z3**2 * (dp - ds) * (2 * z3 - dp + ds) * x3**2
    )
    d = (
        z3
        * x3
        * os_
        * (
            -2
            - 8 * z1**2 * (z1 - z3) * (z1 - dp + ds) * x1**2
            + z3 * (1 + 4 * z1**2 * (z1 - z3) ** 2 * x1**2) * x3 * os_
        )
    )
    e = x1**2 * op**2 * (
        (z1 - dp + ds) ** 2 * (1 + 4 * (z1 - z3) ** 2 * (z3 - dp + ds) ** 2 * x3**2)
        + (z1 - z3)
        * (dp - ds)
        * x3
        * os_
        * (-2 * (z1 - dp + ds) + (z1 - z3) * (dp - ds) * x3 * os_)
    )
    f = (
        2
        * x1
        * op
        * (
            (z1 - dp + ds) * (-1 + 4 * (z1 - z3) * z3 * (z3 - dp + ds) ** 2 * x3**2)
            + x3
            * os_
            * (
                z1 * (z3 + dp - ds)
                + 2 * z3 * (-dp + ds)
                + z3 * (-z1 + z3) * (dp - ds) * x3 * os_
            )
        )
    )
    g = (1 - z3 * x3 * os_ + x1 * op * (-z1 + dp - ds + (z1 - z3) * (dp - ds) * x3 * os_)) ** 2
    return c, d, e, f, g


def closed_form_axis_angle(z1, z3, x1, x3, op, os_, dp, ds, literal=False):
    c, d, e, f, g = _shared_terms(z1, z3, x1, x3, op, os_, dp, ds)

    a1 = 2 * z1 * x1 * (z1 - dp + ds + z3 * (-z1 + z3) * x3 * os_)
    slot = (ds - ds) if literal else (dp - ds)
    b1 = -1 + z3 * x3 * os_ + x1 * op * (z1 - dp + ds - (z1 - z3) * slot * x3 * os_)
    a2 = 1 - z3 * x3 * os_
    b2 = x1 * op * (-z1 + dp - ds + (z1 - z3) * (dp - ds) * x3 * os_)
    a3 = 2 * (z3 - dp + ds) * x3 * (z3 + (z1 - z3) * (z1 - dp + ds) * x1 * op)
    b3 = 1 - z3 * x3 * os_ + x1 * op * (-z1 + dp - ds + (z1 - z3) * (dp - ds) * x3 * os_)

    for name, den in (("b1", b1), ("b3", b3), ("g", g)):
        if abs(den) < EPS_DEN:
            raise IllConditioned(f"denominator {name} = {den!r}")
    ratio = (c + d + e + f) / g
    rad_y = (c - d - e + f) if literal else (c + d + e + f)
    if ratio <= 0 or rad_y <= 0:
        raise IllConditioned("non-positive radicand")

    ux = -a1 / (b1 * math.sqrt(ratio))
    uy = (a2 + b2) / math.sqrt(rad_y)
    uz = a3 / (b3 * math.sqrt(ratio))

    den_alpha = ux**2 - 1
    if abs(den_alpha) < EPS_DEN:
        raise IllConditioned("u_x^2 - 1 vanishes")
    arg = (ux**2 - z1 * x1 * op + (dp - ds) * x1 * op) / den_alpha
    alpha = math.acos(min(1.0, max(-1.0, arg)))
    return np.array([ux, uy, uz]), alpha


def rotation_closed_forms(sys: LambdaSystem, t: float, literal: bool = False):
    """Axis and angle at ``t`` from the closed forms.

    The xi factors are taken from the unit-normalised, sign-fixed frame so
    both routes describe the same matrix R.  Raises :class:`IllConditioned`
    when a denominator is too small to trust.
    """
    op, os_ = lambda_rabi(sys, t)
    frame = adiabatic_basis(sys, t)
    xi = normalisation_factors(frame, op, os_, sys.delta_p, sys.delta_s)
    if not np.all(np.isfinite(xi)):
        raise IllConditioned("normalisation factor undefined (w_i vanishes)")
    z = frame.z
    return closed_form_axis_angle(
        z[0], z[2], xi[0], xi[2], op, os_, sys.delta_p, sys.delta_s, literal
    )
