"""Compiled inner loops for superadiabatic propagation.

Jet algebra here mirrors `jets.py` on fixed-length Taylor-coefficient
arrays (length 8, zero padded).  Entries beyond the valid order of a
recursion level are meaningless but finite; only the value slot of the
final level is ever read.  The propagator is an embedded Dormand-Prince
5(4) step with PI step-size control, a step cap of one tenth of the
local oscillation period, and running-extremum detection of the
reconstructed transition probability.

Model kind codes: 0 lz, 1 superlinear, 2 sublinear, 3 essential, 4 tangent.
Parity cases for the running probability: 0 both frames even (odd SA
order), 1 even coupling / odd detuning (order 0), 2 odd coupling / even
detuning (even order >= 2).
"""

import math

import numpy as np
from numba import njit

_L = 8

# propagation status codes
STATUS_CONVERGED = 0
STATUS_MAX_TIME = 1
STATUS_MAX_STEPS = 2
STATUS_STEP_UNDERFLOW = 3


@njit(cache=True)
def _tmul(a, b, out):
    for k in range(_L):
        s = 0.0
        for j in range(k + 1):
            s += a[j] * b[k - j]
        out[k] = s


@njit(cache=True)
def _tdiv(num, den, out):
    for k in range(_L):
        s = num[k]
        for j in range(k):
            s -= out[j] * den[k - j]
        out[k] = s / den[0]


@njit(cache=True)
def _tpow(a, p, out):
    out[0] = a[0] ** p
    for k in range(1, _L):
        s = 0.0
        for j in range(1, k + 1):
            s += ((p + 1.0) * j - k) * a[j] * out[k - j]
        out[k] = s / (k * a[0])


@njit(cache=True)
def _tderiv(a, out):
    for k in range(_L - 1):
        out[k] = (k + 1) * a[k + 1]
    out[_L - 1] = 0.0


@njit(cache=True)
def _ttan(u, out):
    # g = tan(u), g' = (1 + g^2) u'
    w = np.zeros(_L)
    out[0] = math.tan(u[0])
    w[0] = 1.0 + out[0] * out[0]
    for k in range(_L - 1):
        s = 0.0
        for j in range(k + 1):
            s += w[j] * (k - j + 1) * u[k - j + 1]
        out[k + 1] = s / (k + 1)
        ws = 0.0
        for j in range(k + 2):
            ws += out[j] * out[k + 1 - j]
        w[k + 1] = ws
    return out


@njit(cache=True)
def _base_detuning(kind, eps, npow, ts, tau, dl):
    for i in range(_L):
        dl[i] = 0.0
    if kind == 0:
        dl[0] = tau
        dl[1] = 1.0
    elif kind == 1:
        u = np.zeros(_L)
        u[0] = 1.0 + 2.0 * eps * eps * tau * tau
        u[1] = 4.0 * eps * eps * tau
        u[2] = 2.0 * eps * eps
        root = np.empty(_L)
        _tpow(u, 0.5, root)
        x = np.zeros(_L)
        x[0] = tau
        x[1] = 1.0
        _tmul(x, root, dl)
    elif kind == 2:
        u = np.zeros(_L)
        u[0] = 1.0 + 4.0 * eps * eps * tau * tau
        u[1] = 8.0 * eps * eps * tau
        u[2] = 4.0 * eps * eps
        root = np.empty(_L)
        _tpow(u, -0.25, root)
        x = np.zeros(_L)
        x[0] = tau
        x[1] = 1.0
        _tmul(x, root, dl)
    elif kind == 3:
        # Taylor of (tau + h)^N: binomial coefficients times powers
        c = 1.0
        for k in range(_L):
            if k > npow:
                break
            dl[k] = c * tau ** (npow - k)
            c = c * (npow - k) / (k + 1.0)
    else:
        u = np.zeros(_L)
        u[0] = tau / ts
        u[1] = 1.0 / ts
        g = np.zeros(_L)
        _ttan(u, g)
        for i in range(_L):
            dl[i] = ts * g[i]


@njit(cache=True)
def _frame_value(kind, a, eps, npow, ts, order_n, tau):
    """Value of the order-n superadiabatic detuning and coupling at tau."""
    dl = np.empty(_L)
    _base_detuning(kind, eps, npow, ts, tau, dl)
    om = np.zeros(_L)
    om[0] = a
    t1 = np.empty(_L)
    t2 = np.empty(_L)
    esq = np.empty(_L)
    dnew = np.empty(_L)
    dom = np.empty(_L)
    ddl = np.empty(_L)
    t3 = np.empty(_L)
    t4 = np.empty(_L)
    onew = np.empty(_L)
    for _m in range(order_n):
        _tmul(om, om, t1)
        _tmul(dl, dl, t2)
        for i in range(_L):
            esq[i] = t1[i] + t2[i]
        _tpow(esq, 0.5, dnew)
        _tderiv(om, dom)
        _tderiv(dl, ddl)
        _tmul(dom, dl, t3)
        _tmul(om, ddl, t4)
        for i in range(_L):
            t3[i] = t3[i] - t4[i]
            esq[i] = 2.0 * esq[i]
        _tdiv(t3, esq, onew)
        for i in range(_L):
            dl[i] = dnew[i]
            om[i] = onew[i]
    return dl[0], om[0]


@njit(cache=True, inline="always")
def _running_probability(parity_case, b1, b2):
    # |U12|^2 of the reconstructed evolution over (-t, t) for the
    # even-even and odd-even frames, |U11|^2 for the diabatic frame
    if parity_case == 0:
        im = (b1 * b2).imag
        return 4.0 * im * im
    if parity_case == 1:
        d = abs(b1) ** 2 - abs(b2) ** 2
        return d * d
    re = (b1 * b2).real
    return 4.0 * re * re


@njit(cache=True, nogil=True)
def propagate(kind, a, eps, npow, ts, order_n, parity_case,
              rtol, atol, conv_ratio, tau_gate, max_tau, h0,
              max_steps, ext_cap):
    """Half-axis propagation of the fundamental solutions.

    Returns (b1, b2, p_final, tau_stop, last_span, status, ext_tau, ext_p,
    n_ext, n_steps, max_norm_err).
    """
    b1 = 1.0 + 0.0j
    b2 = 0.0 + 0.0j
    tau = 0.0

    d0, o0 = _frame_value(kind, a, eps, npow, ts, order_n, tau)
    k1_1 = 1j * d0 * b1 - 1j * o0 * b2
    k1_2 = -1j * o0 * b1 - 1j * d0 * b2
    d_last = d0

    ext_tau = np.empty(ext_cap)
    ext_p = np.empty(ext_cap)
    n_ext = 0
    gate_count = 0

    p_a = _running_probability(parity_case, b1, b2)
    have_b = False
    p_b = 0.0
    tau_b = 0.0

    # fallback detector for tails whose oscillation is below float noise:
    # the running probability must stay flat across a 1.5x time window
    win_start = 0.0
    win_min = p_a
    win_max = p_a

    h = h0
    err_prev = 1.0
    status = STATUS_MAX_STEPS
    last_span = math.inf
    n_steps = 0
    max_norm_err = 0.0
    converged = False
    by_extrema = False

    while n_steps < max_steps:
        if tau >= max_tau:
            status = STATUS_MAX_TIME
            break
        cap = math.pi / (10.0 * max(abs(d_last), 1e-12))
        if h > cap:
            h = cap
        if h > max_tau - tau:
            h = max_tau - tau
        if h < 1e-14 * max(1.0, tau):
            status = STATUS_STEP_UNDERFLOW
            break

        # Dormand-Prince 5(4) stages (FSAL)
        y1_1 = b1 + h * 0.2 * k1_1
        y1_2 = b2 + h * 0.2 * k1_2
        d, o = _frame_value(kind, a, eps, npow, ts, order_n, tau + 0.2 * h)
        k2_1 = 1j * d * y1_1 - 1j * o * y1_2
        k2_2 = -1j * o * y1_1 - 1j * d * y1_2

        y1_1 = b1 + h * (0.075 * k1_1 + 0.225 * k2_1)
        y1_2 = b2 + h * (0.075 * k1_2 + 0.225 * k2_2)
        d, o = _frame_value(kind, a, eps, npow, ts, order_n, tau + 0.3 * h)
        k3_1 = 1j * d * y1_1 - 1j * o * y1_2
        k3_2 = -1j * o * y1_1 - 1j * d * y1_2

        y1_1 = b1 + h * ((44.0 / 45.0) * k1_1 - (56.0 / 15.0) * k2_1 + (32.0 / 9.0) * k3_1)
        y1_2 = b2 + h * ((44.0 / 45.0) * k1_2 - (56.0 / 15.0) * k2_2 + (32.0 / 9.0) * k3_2)
        d, o = _frame_value(kind, a, eps, npow, ts, order_n, tau + 0.8 * h)
        k4_1 = 1j * d * y1_1 - 1j * o * y1_2
        k4_2 = -1j * o * y1_1 - 1j * d * y1_2

        y1_1 = b1 + h * ((19372.0 / 6561.0) * k1_1 - (25360.0 / 2187.0) * k2_1
                         + (64448.0 / 6561.0) * k3_1 - (212.0 / 729.0) * k4_1)
        y1_2 = b2 + h * ((19372.0 / 6561.0) * k1_2 - (25360.0 / 2187.0) * k2_2
                         + (64448.0 / 6561.0) * k3_2 - (212.0 / 729.0) * k4_2)
        d, o = _frame_value(kind, a, eps, npow, ts, order_n, tau + (8.0 / 9.0) * h)
        k5_1 = 1j * d * y1_1 - 1j * o * y1_2
        k5_2 = -1j * o * y1_1 - 1j * d * y1_2

        y1_1 = b1 + h * ((9017.0 / 3168.0) * k1_1 - (355.0 / 33.0) * k2_1
                         + (46732.0 / 5247.0) * k3_1 + (49.0 / 176.0) * k4_1
                         - (5103.0 / 18656.0) * k5_1)
        y1_2 = b2 + h * ((9017.0 / 3168.0) * k1_2 - (355.0 / 33.0) * k2_2
                         + (46732.0 / 5247.0) * k3_2 + (49.0 / 176.0) * k4_2
                         - (5103.0 / 18656.0) * k5_2)
        d, o = _frame_value(kind, a, eps, npow, ts, order_n, tau + h)
        k6_1 = 1j * d * y1_1 - 1j * o * y1_2
        k6_2 = -1j * o * y1_1 - 1j * d * y1_2

        y5_1 = b1 + h * ((35.0 / 384.0) * k1_1 + (500.0 / 1113.0) * k3_1
                         + (125.0 / 192.0) * k4_1 - (2187.0 / 6784.0) * k5_1
                         + (11.0 / 84.0) * k6_1)
        y5_2 = b2 + h * ((35.0 / 384.0) * k1_2 + (500.0 / 1113.0) * k3_2
                         + (125.0 / 192.0) * k4_2 - (2187.0 / 6784.0) * k5_2
                         + (11.0 / 84.0) * k6_2)
        # stages 6 and 7 share the abscissa tau + h
        k7_1 = 1j * d * y5_1 - 1j * o * y5_2
        k7_2 = -1j * o * y5_1 - 1j * d * y5_2

        e_1 = h * ((71.0 / 57600.0) * k1_1 - (71.0 / 16695.0) * k3_1
                   + (71.0 / 1920.0) * k4_1 - (17253.0 / 339200.0) * k5_1
                   + (22.0 / 525.0) * k6_1 - (1.0 / 40.0) * k7_1)
        e_2 = h * ((71.0 / 57600.0) * k1_2 - (71.0 / 16695.0) * k3_2
                   + (71.0 / 1920.0) * k4_2 - (17253.0 / 339200.0) * k5_2
                   + (22.0 / 525.0) * k6_2 - (1.0 / 40.0) * k7_2)
        sc1 = atol + rtol * max(abs(b1), abs(y5_1))
        sc2 = atol + rtol * max(abs(b2), abs(y5_2))
        err = math.sqrt(0.5 * ((abs(e_1) / sc1) ** 2 + (abs(e_2) / sc2) ** 2))

        n_steps += 1
        if err <= 1.0:
            tau += h
            b1 = y5_1
            b2 = y5_2
            k1_1 = k7_1
            k1_2 = k7_2
            d_last = d

            nrm = abs(b1) ** 2 + abs(b2) ** 2
            dev = abs(nrm - 1.0)
            if dev > max_norm_err:
                max_norm_err = dev

            p_cur = _running_probability(parity_case, b1, b2)
            if have_b:
                if (p_cur - p_b) * (p_b - p_a) < 0.0:
                    if n_ext < ext_cap:
                        ext_tau[n_ext] = tau_b
                        ext_p[n_ext] = p_b
                        n_ext += 1
                    if tau_b > tau_gate:
                        gate_count += 1
                    if n_ext >= 2:
                        last_span = abs(ext_p[n_ext - 1] - ext_p[n_ext - 2])
                        if gate_count >= 3 and last_span <= conv_ratio * p_cur + 1e-15:
                            status = STATUS_CONVERGED
                            converged = True
                            by_extrema = True
                p_a = p_b
            else:
                have_b = True
            p_b = p_cur
            tau_b = tau
            if converged:
                break

            if p_cur < win_min:
                win_min = p_cur
            if p_cur > win_max:
                win_max = p_cur
            if tau > 3.0 * tau_gate and tau >= 1.5 * win_start:
                if win_start > 0.0 and win_max - win_min <= conv_ratio * p_cur + 1e-15:
                    status = STATUS_CONVERGED
                    converged = True
                    break
                win_start = tau
                win_min = p_cur
                win_max = p_cur

            fac = 0.9 * err ** -0.14 * err_prev ** 0.08 if err > 0 else 5.0
            err_prev = max(err, 1e-10)
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
        h *= min(5.0, max(0.2, fac))

    p_final = _running_probability(parity_case, b1, b2)
    if by_extrema and n_ext >= 2:
        # midpoint of the last oscillation cancels the leading wobble
        p_final = 0.5 * (ext_p[n_ext - 1] + ext_p[n_ext - 2])
    return (b1, b2, p_final, tau, last_span, status,
            ext_tau[:n_ext].copy(), ext_p[:n_ext].copy(),
            n_ext, n_steps, max_norm_err)
