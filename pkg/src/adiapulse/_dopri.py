"""Dormand-Prince 5(4) kernel for dc/dt = -i H(t) c with Gaussian couplings.

H(t) = diag(diag) + sum_k g_k(t) (|i_k><j_k| + |j_k><i_k|) with
g_k(t) = half_peak_k * exp(-((t - t0_k) / tau_k)**2).  The state is carried
as real and imaginary parts so the kernel stays in plain float64 loops.
"""
import numpy as np
from numba import njit

# Butcher tableau (Hairer, Norsett & Wanner, p. 178)
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# 5th minus embedded 4th order weights
E1 = 71 / 57600
E3 = -71 / 16695
E4 = 71 / 1920
E5 = -17253 / 339200
E6 = 22 / 525
E7 = -1 / 40

OK, STEP_TOO_SMALL, TOO_MANY_STEPS = 0, 1, 2


@njit(cache=True, nogil=True)
def _rhs(t, yr, yi, diag, ci, cj, half_peak, tau, t0, outr, outi):
    n = diag.size
    # H is real, so -i H (yr + i yi) = H yi - i H yr
    for a in range(n):
        outr[a] = diag[a] * yi[a]
        outi[a] = -diag[a] * yr[a]
    for k in range(ci.size):
        x = (t - t0[k]) / tau[k]
        g = half_peak[k] * np.exp(-x * x)
        i = ci[k]
        j = cj[k]
        outr[i] += g * yi[j]
        outi[i] -= g * yr[j]
        outr[j] += g * yi[i]
        outi[j] -= g * yr[i]


@njit(cache=True, nogil=True)
def integrate(
    diag, ci, cj, half_peak, tau, t0, y0r, y0i, times, rtol, atol, h_init, max_steps
):
    """Integrate and record the state at every entry of ``times``.

    Steps are clipped to land exactly on sample times.  Returns
    (states_re, states_im, status, n_accepted, n_rejected).
    """
    n = diag.size
    m = times.size
    out_r = np.empty((m, n))
    out_i = np.empty((m, n))
    yr = y0r.copy()
    yi = y0i.copy()
    out_r[0] = yr
    out_i[0] = yi

    k1r = np.empty(n); k1i = np.empty(n)
    k2r = np.empty(n); k2i = np.empty(n)
    k3r = np.empty(n); k3i = np.empty(n)
    k4r = np.empty(n); k4i = np.empty(n)
    k5r = np.empty(n); k5i = np.empty(n)
    k6r = np.empty(n); k6i = np.empty(n)
    k7r = np.empty(n); k7i = np.empty(n)
    tr = np.empty(n); ti = np.empty(n)
    nr = np.empty(n); ni = np.empty(n)

    t = times[0]
    h = h_init
    accepted = 0
    rejected = 0
    _rhs(t, yr, yi, diag, ci, cj, half_peak, tau, t0, k1r, k1i)

    for s in range(1, m):
        target = times[s]
        while t < target:
            if accepted + rejected >= max_steps:
                return out_r, out_i, TOO_MANY_STEPS, accepted, rejected
            last = False
            h_free = h
            if t + h >= target:
                h = target - t
                last = True
            min_h = 16.0 * 2.220446049250313e-16 * max(abs(t), abs(target), 1.0)
            if h < min_h and not last:
                return out_r, out_i, STEP_TOO_SMALL, accepted, rejected

            for a in range(n):
                tr[a] = yr[a] + h * A21 * k1r[a]
                ti[a] = yi[a] + h * A21 * k1i[a]
            _rhs(t + C2 * h, tr, ti, diag, ci, cj, half_peak, tau, t0, k2r, k2i)
            for a in range(n):
                tr[a] = yr[a] + h * (A31 * k1r[a] + A32 * k2r[a])
                ti[a] = yi[a] + h * (A31 * k1i[a] + A32 * k2i[a])
            _rhs(t + C3 * h, tr, ti, diag, ci, cj, half_peak, tau, t0, k3r, k3i)
            for a in range(n):
                tr[a] = yr[a] + h * (A41 * k1r[a] + A42 * k2r[a] + A43 * k3r[a])
                ti[a] = yi[a] + h * (A41 * k1i[a] + A42 * k2i[a] + A43 * k3i[a])
            _rhs(t + C4 * h, tr, ti, diag, ci, cj, half_peak, tau, t0, k4r, k4i)
            for a in range(n):
                tr[a] = yr[a] + h * (
                    A51 * k1r[a] + A52 * k2r[a] + A53 * k3r[a] + A54 * k4r[a]
                )
                ti[a] = yi[a] + h * (
                    A51 * k1i[a] + A52 * k2i[a] + A53 * k3i[a] + A54 * k4i[a]
                )
            _rhs(t + C5 * h, tr, ti, diag, ci, cj, half_peak, tau, t0, k5r, k5i)
            for a in range(n):
                tr[a] = yr[a] + h * (
                    A61 * k1r[a] + A62 * k2r[a] + A63 * k3r[a] + A64 * k4r[a] + A65 * k5r[a]
                )
                ti[a] = yi[a] + h * (
                    A61 * k1i[a] + A62 * k2i[a] + A63 * k3i[a] + A64 * k4i[a] + A65 * k5i[a]
                )
            _rhs(t + h, tr, ti, diag, ci, cj, half_peak, tau, t0, k6r, k6i)
            for a in range(n):
                nr[a] = yr[a] + h * (
                    B1 * k1r[a] + B3 * k3r[a] + B4 * k4r[a] + B5 * k5r[a] + B6 * k6r[a]
                )
                ni[a] = yi[a] + h * (
                    B1 * k1i[a] + B3 * k3i[a] + B4 * k4i[a] + B5 * k5i[a] + B6 * k6i[a]
                )
            _rhs(t + h, nr, ni, diag, ci, cj, half_peak, tau, t0, k7r, k7i)

            err = 0.0
            for a in range(n):
                er = h * (
                    E1 * k1r[a] + E3 * k3r[a] + E4 * k4r[a] + E5 * k5r[a]
                    + E6 * k6r[a] + E7 * k7r[a]
                )
                ei = h * (
                    E1 * k1i[a] + E3 * k3i[a] + E4 * k4i[a] + E5 * k5i[a]
                    + E6 * k6i[a] + E7 * k7i[a]
                )
                sr = atol + rtol * max(abs(yr[a]), abs(nr[a]))
                si = atol + rtol * max(abs(yi[a]), abs(ni[a]))
                err += (er / sr) ** 2 + (ei / si) ** 2
            err = np.sqrt(err / (2 * n))

            if err <= 1.0:
                t = target if last else t + h
                for a in range(n):
                    yr[a] = nr[a]
                    yi[a] = ni[a]
                    k1r[a] = k7r[a]
                    k1i[a] = k7i[a]
                accepted += 1
                fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
                # a step clipped to hit a sample says nothing about the
                # natural step size, so fall back to the unclipped proposal
                h = max(h * fac, h_free) if last else h * fac
            else:
                rejected += 1
                h = h * max(0.2, 0.9 * err ** -0.2)
        out_r[s] = yr
        out_i[s] = yi
    return out_r, out_i, OK, accepted, rejected
