"""Compiled numeric kernels behind the public module functions.

Everything here takes plain arrays and floats so it can be compiled with
numba; the public modules validate inputs and unpack their dataclasses
before calling in. The closed-loop derivative is assembled from the same
kernels the public API exposes, so the simulator and the unit-tested
functions cannot drift apart.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numba import njit

TRAJ_ELLIPSE = 0
TRAJ_FIGURE_EIGHT = 1
TRAJ_SETPOINT = 2


@njit(cache=True)
def sq3(s):
    return s[0] * s[0] + s[1] * s[1] + s[2] * s[2]


@njit(cache=True)
def frac_power_k(s, p):
    out = np.zeros(3)
    # normalise by the largest entry so tiny vectors do not underflow to zero
    m = max(abs(s[0]), abs(s[1]), abs(s[2]))
    if m == 0.0:
        return out
    r = s / m
    scale = m ** (2.0 * p - 2.0) * sq3(r) ** (p - 1.0)
    for i in range(3):
        out[i] = s[i] * scale
    return out


@njit(cache=True)
def theta_k(s, p, eps):
    out = np.zeros(3)
    sq = sq3(s)
    if sq == 0.0:
        return out
    scale = sq ** (p - 1.0)
    if sq <= eps:
        scale *= math.sin(0.5 * math.pi * sq / eps) ** 2
    for i in range(3):
        out[i] = s[i] * scale
    return out


@njit(cache=True)
def theta_rows_k(S, p, eps):
    out = np.empty_like(S)
    for i in range(S.shape[0]):
        out[i] = theta_k(S[i], p, eps)
    return out


@njit(cache=True)
def alpha1_k(pd_dot, y1, i1, c1, k, k1, beta1, gamma1, p, eps):
    th_i = theta_k(i1, p, eps)
    th_y = theta_k(y1, p, eps)
    ni = sq3(i1)
    ny = sq3(y1)
    out = np.empty(3)
    for j in range(3):
        out[j] = (pd_dot[j] - c1[j] * ni * i1[j] - k[j] * i1[j] - k1[j] * th_i[j]
                  - beta1[j] * ny * y1[j] - gamma1[j] * th_y[j])
    return out


@njit(cache=True)
def alpha2_k(xi, x1, y2, i2, c2, k2, beta2, gamma2, p):
    fp_i = frac_power_k(i2, p)
    fp_y = frac_power_k(y2, p)
    ni = sq3(i2)
    ny = sq3(y2)
    out = np.empty(3)
    for j in range(3):
        out[j] = (xi[j] - x1[j] - c2[j] * ni * i2[j] - k2[j] * fp_i[j]
                  - beta2[j] * ny * y2[j] - gamma2[j] * fp_y[j])
    return out


@njit(cache=True)
def filter_deriv_k(chi, xi, a1, zeta, rho, feps):
    xi_dot = np.empty(3)
    inv = 1.0 / (feps * feps)
    for j in range(3):
        xi_dot[j] = inv * (-zeta * math.atan(chi[j] - a1[j]) - rho * math.atan(feps * xi[j]))
    return xi.copy(), xi_dot


@njit(cache=True)
def comp_deriv_k(i1, i2, chi, a1, fhat, c1, c2, k, k1, k2, p, eps):
    th = theta_k(i1, p, eps)
    fp = frac_power_k(i2, p)
    n1 = sq3(i1)
    n2 = sq3(i2)
    d1 = np.empty(3)
    d2 = np.empty(3)
    for j in range(3):
        d1[j] = (i2[j] + chi[j] - a1[j]) - c1[j] * n1 * i1[j] - k[j] * i1[j] - k1[j] * th[j]
        d2[j] = -i1[j] - c2[j] * n2 * i2[j] - k2[j] * fp[j] + fhat[j]
    return d1, d2


@njit(cache=True)
def sigmoid_k(z):
    out = np.empty(z.size)
    for i in range(z.size):
        zi = z[i]
        # split by sign so exp never overflows
        if zi >= 0.0:
            out[i] = 1.0 / (1.0 + math.exp(-zi))
        else:
            e = math.exp(zi)
            out[i] = e / (1.0 + e)
    return out


@njit(cache=True)
def hidden_k(v0, x):
    """Augmented activation vector ``[sigmoid(V0' x); 1]``."""
    n1 = v0.shape[1]
    z = np.zeros(n1)
    for j in range(n1):
        acc = 0.0
        for i in range(x.size):
            acc += v0[i, j] * x[i]
        z[j] = acc
    s = sigmoid_k(z)
    phi = np.empty(n1 + 1)
    phi[:n1] = s
    phi[n1] = 1.0
    return phi


@njit(cache=True)
def forward_k(v0, v1, x):
    phi = hidden_k(v0, x)
    n2 = v1.shape[1]
    out = np.zeros(n2)
    for c in range(n2):
        acc = 0.0
        for r in range(phi.size):
            acc += v1[r, c] * phi[r]
        out[c] = acc
    return out


@njit(cache=True)
def raw_updates_k(v0, v1, x, y2, g0, g1):
    phi = hidden_k(v0, x)
    n1 = v0.shape[1]
    v1_dot = np.empty(v1.shape)
    for r in range(phi.size):
        for c in range(y2.size):
            v1_dot[r, c] = g1[r] * phi[r] * y2[c]
    back = np.empty(n1)
    for j in range(n1):
        acc = 0.0
        for c in range(y2.size):
            acc += v1[j, c] * y2[c]
        back[j] = phi[j] * (1.0 - phi[j]) * acc
    v0_dot = np.empty(v0.shape)
    for i in range(x.size):
        for j in range(n1):
            v0_dot[i, j] = g0[i] * x[i] * back[j]
    return v0_dot, v1_dot


@njit(cache=True)
def proj_k(raw, w, vbar):
    sq = np.sum(w * w)
    if sq < vbar:
        return raw
    radial = np.sum(w * raw)
    if radial <= 0.0:
        return raw
    return raw - (radial / sq) * w


@njit(cache=True)
def friction_k(v, visc, coul, v_s, m_t):
    out = np.empty(3)
    for j in range(3):
        out[j] = -(visc[j] * v[j] + coul[j] * math.tanh(v[j] / v_s)) / m_t
    return out


@njit(cache=True)
def disturbance_k(t, amp, freq, phase):
    out = np.empty(3)
    for j in range(3):
        out[j] = amp[j] * math.sin(freq[j] * t + phase[j])
    return out


@njit(cache=True)
def ramp_k(t, duration):
    if t >= duration:
        return 1.0, 0.0, 0.0, 0.0
    if t <= 0.0:
        return 0.0, 0.0, 0.0, 0.0
    s = t / duration
    s2 = s * s
    s3 = s2 * s
    s4 = s3 * s
    # clamp: the closed form rounds a few ulps past 1 as s -> 1
    r = min(s4 * (35.0 - 84.0 * s + 70.0 * s2 - 20.0 * s3), 1.0)
    r1 = 140.0 * s3 * (1.0 - s) ** 3
    r2 = 420.0 * s2 * (1.0 - s) ** 2 * (1.0 - 2.0 * s)
    r3 = 840.0 * s * (1.0 - s) * (1.0 - 5.0 * s + 5.0 * s2)
    return r, r1 / duration, r2 / duration ** 2, r3 / duration ** 3


@njit(cache=True)
def _harmonic(out, col, amp, w, t, use_cos):
    """Fill rows 0..3 of ``out[:, col]`` with amp*cos(wt) or amp*sin(wt) and derivatives."""
    c = math.cos(w * t)
    s = math.sin(w * t)
    if use_cos:
        out[0, col] = amp * c
        out[1, col] = -amp * w * s
        out[2, col] = -amp * w * w * c
        out[3, col] = amp * w ** 3 * s
    else:
        out[0, col] = amp * s
        out[1, col] = amp * w * c
        out[2, col] = -amp * w * w * s
        out[3, col] = -amp * w ** 3 * c


@njit(cache=True)
def traj_k(kind, t, center, a, b, h, omega, ramp):
    """Rows: position, velocity, acceleration, jerk of the reference."""
    out = np.zeros((4, 3))
    if kind == TRAJ_SETPOINT:
        out[0, :] = center
        return out
    q = np.zeros((4, 3))
    if kind == TRAJ_ELLIPSE:
        _harmonic(q, 0, a, omega, t, True)
        _harmonic(q, 1, b, omega, t, False)
    else:
        _harmonic(q, 0, a, omega, t, False)
        _harmonic(q, 1, b, 2.0 * omega, t, False)
    _harmonic(q, 2, h, omega, t, False)
    r0, r1, r2, r3 = ramp_k(t, ramp)
    # Leibniz rule for derivatives of r(t) * q(t)
    for j in range(3):
        out[0, j] = center[j] + r0 * q[0, j]
        out[1, j] = r0 * q[1, j] + r1 * q[0, j]
        out[2, j] = r0 * q[2, j] + 2.0 * r1 * q[1, j] + r2 * q[0, j]
        out[3, j] = r0 * q[3, j] + 3.0 * r1 * q[2, j] + 3.0 * r2 * q[1, j] + r3 * q[0, j]
    return out


class LoopParams(NamedTuple):
    """Flattened configuration consumed by the compiled closed loop."""

    # plant
    m_t: float
    visc: np.ndarray
    coul: np.ndarray
    v_s: float
    dist_amp: np.ndarray
    dist_freq: np.ndarray
    dist_phase: np.ndarray
    v_limit: float
    # compensator and virtual controls
    c1: np.ndarray
    c2: np.ndarray
    k: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    beta1: np.ndarray
    gamma1: np.ndarray
    beta2: np.ndarray
    gamma2: np.ndarray
    p_exp: float
    switch_eps: float
    # filter
    zeta: float
    rho: float
    filt_eps: float
    # network
    n0: int
    n1: int
    n2: int
    gamma0_nn: np.ndarray
    gamma1_nn: np.ndarray
    vbar0: float
    vbar1: float
    # trigger
    sigma: float
    delta: float
    # reference
    traj_kind: int
    center: np.ndarray
    a: float
    b: float
    h: float
    omega: float
    ramp: float


# flat state layout: p, v, chi, xi, iota1, iota2, V0 (row-major), V1 (row-major), kappa
@njit(cache=True)
def state_size(n0, n1, n2):
    return 18 + (n0 + 1) * n1 + (n1 + 1) * n2 + 1


@njit(cache=True)
def split_weights(x, lp):
    o0 = 18
    s0 = (lp.n0 + 1) * lp.n1
    s1 = (lp.n1 + 1) * lp.n2
    v0 = x[o0:o0 + s0].copy().reshape((lp.n0 + 1, lp.n1))
    v1 = x[o0 + s0:o0 + s0 + s1].copy().reshape((lp.n1 + 1, lp.n2))
    return v0, v1


@njit(cache=True)
def loop_deriv(t, x, u_held, e_held, lp):
    """Time derivative of the full closed-loop state with the actuator input held.

    Returns ``(xdot, ok)``; ``ok`` is False when the velocity limit is exceeded.
    """
    p = x[0:3]
    v = x[3:6]
    chi = x[6:9]
    xi = x[9:12]
    i1 = x[12:15]
    i2 = x[15:18]
    v0, v1 = split_weights(x, lp)
    kappa = x[x.size - 1]

    ref = traj_k(lp.traj_kind, t, lp.center, lp.a, lp.b, lp.h, lp.omega, lp.ramp)
    pd_dot = ref[1].copy()
    x1 = p - ref[0]
    y1 = x1 - i1
    y2 = (v - chi) - i2

    a1 = alpha1_k(pd_dot, y1, i1, lp.c1, lp.k, lp.k1, lp.beta1, lp.gamma1, lp.p_exp, lp.switch_eps)
    chi_dot, xi_dot = filter_deriv_k(chi, xi, a1, lp.zeta, lp.rho, lp.filt_eps)
    xd = np.empty(lp.n0 + 1)
    xd[:3] = pd_dot
    xd[3] = 1.0
    fhat = forward_k(v0, v1, xd)
    d1, d2 = comp_deriv_k(i1, i2, chi, a1, fhat, lp.c1, lp.c2, lp.k, lp.k1, lp.k2, lp.p_exp, lp.switch_eps)
    r0, r1 = raw_updates_k(v0, v1, xd, y2, lp.gamma0_nn, lp.gamma1_nn)
    w0_dot = proj_k(r0, v0, lp.vbar0)
    w1_dot = proj_k(r1, v1, lp.vbar1)

    out = np.empty(x.size)
    ok = sq3(v) <= lp.v_limit * lp.v_limit
    fr = friction_k(v, lp.visc, lp.coul, lp.v_s, lp.m_t)
    dist = disturbance_k(t, lp.dist_amp, lp.dist_freq, lp.dist_phase)
    for j in range(3):
        out[j] = v[j]
        out[3 + j] = u_held[j] + dist[j] + fr[j]
    out[6:9] = chi_dot
    out[9:12] = xi_dot
    out[12:15] = d1
    out[15:18] = d2
    s0 = w0_dot.size
    out[18:18 + s0] = w0_dot.ravel()
    out[18 + s0:18 + s0 + w1_dot.size] = w1_dot.ravel()
    m = -1e300
    for j in range(3):
        cand = lp.sigma - abs(e_held[j])
        if cand > m:
            m = cand
    out[x.size - 1] = -kappa + m
    return out, ok


@njit(cache=True)
def _clamp_segment(x, start, stop, vbar):
    sq = 0.0
    for i in range(start, stop):
        sq += x[i] * x[i]
    if sq > vbar:
        scale = math.sqrt(vbar / sq)
        for i in range(start, stop):
            x[i] *= scale


@njit(cache=True)
def loop_advance(x, t0, h, nsub, u_held, e_held, lp):
    """RK4-integrate the closed loop over ``nsub`` substeps of length ``h``.

    Weight blocks are radially pulled back onto their norm balls after each
    substep. Returns ``(x_new, ok)``; on failure ``x_new`` is the last good state.
    """
    s0 = (lp.n0 + 1) * lp.n1
    s1 = (lp.n1 + 1) * lp.n2
    for j in range(nsub):
        t = t0 + j * h
        k1, ok1 = loop_deriv(t, x, u_held, e_held, lp)
        k2, ok2 = loop_deriv(t + 0.5 * h, x + 0.5 * h * k1, u_held, e_held, lp)
        k3, ok3 = loop_deriv(t + 0.5 * h, x + 0.5 * h * k2, u_held, e_held, lp)
        k4, ok4 = loop_deriv(t + h, x + h * k3, u_held, e_held, lp)
        if not (ok1 and ok2 and ok3 and ok4):
            return x, False
        xn = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _clamp_segment(xn, 18, 18 + s0, lp.vbar0)
        _clamp_segment(xn, 18 + s0, 18 + s0 + s1, lp.vbar1)
        for i in range(xn.size):
            if not math.isfinite(xn[i]):
                return x, False
        x = xn
    return x, True


@njit(cache=True)
def plant_deriv_k(t, x, u, lp):
    v = x[3:6]
    fr = friction_k(v, lp.visc, lp.coul, lp.v_s, lp.m_t)
    dist = disturbance_k(t, lp.dist_amp, lp.dist_freq, lp.dist_phase)
    out = np.empty(6)
    for j in range(3):
        out[j] = v[j]
        out[3 + j] = u[j] + dist[j] + fr[j]
    return out, sq3(v) <= lp.v_limit * lp.v_limit


@njit(cache=True)
def plant_advance(x, t0, h, nsub, u, lp):
    """RK4-integrate the bare plant under a constant command."""
    for j in range(nsub):
        t = t0 + j * h
        k1, ok1 = plant_deriv_k(t, x, u, lp)
        k2, ok2 = plant_deriv_k(t + 0.5 * h, x + 0.5 * h * k1, u, lp)
        k3, ok3 = plant_deriv_k(t + 0.5 * h, x + 0.5 * h * k2, u, lp)
        k4, ok4 = plant_deriv_k(t + h, x + h * k3, u, lp)
        if not (ok1 and ok2 and ok3 and ok4):
            return x, False
        xn = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        for i in range(6):
            if not math.isfinite(xn[i]):
                return x, False
        x = xn
    return x, True
