"""RWA Hamiltonians divided by hbar, so that dc/dt = -i H c.

Laser phases are zero, which makes every coupling real and the matrices
real symmetric.
"""
import numpy as np

from .params import LambdaSystem, TwoLevelSystem, envelope_at


def two_level_matrix(omega, delta):
    return 0.5 * np.array([[0.0, omega], [omega, 2.0 * delta]])


def lambda_matrix(omega_p, omega_s, delta_p, delta_s):
    return 0.5 * np.array(
        [
            [0.0, omega_p, 0.0],
            [omega_p, 2.0 * delta_p, omega_s],
            [0.0, omega_s, 2.0 * (delta_p - delta_s)],
        ]
    )


def h_two_level(sys: TwoLevelSystem, t: float) -> np.ndarray:
    return two_level_matrix(envelope_at(sys.pulse, t), sys.detuning)


def h_lambda(sys: LambdaSystem, t: float) -> np.ndarray:
    return lambda_matrix(
        envelope_at(sys.pump, t), envelope_at(sys.stokes, t), sys.delta_p, sys.delta_s
    )


def lambda_rabi(sys: LambdaSystem, t: float) -> tuple[float, float]:
    return envelope_at(sys.pump, t), envelope_at(sys.stokes, t)
