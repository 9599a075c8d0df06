"""Compiled fixed-step RK4 integrators for both model variants.

Scalar loops only: every trajectory is computed in the same order regardless
of how many are run side by side, so results are bit-reproducible.
"""
import math

import numba
import numpy as np


@numba.njit(cache=True)
def _sig(y, e):
    z = -y / e
    if z > 700.0:
        return 0.0
    if z < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(z))


@numba.njit(cache=True)
def _rhs_nondim(x, p, out):
    # p = (eps, G, bstar, y01, y02, y03, alpha2, alpha4, a1, a2, a3, P)
    eps, G, bs = p[0], p[1], p[2]
    u1 = _sig(x[4] - x[2] - p[3], eps / p[8])
    u2 = _sig(x[0] - p[4], eps / p[9])
    u3 = _sig(x[0] - p[5], eps / p[10])
    out[0] = x[1]
    out[1] = (2.0 / G) * u1 - 2.0 * x[1] - x[0]
    out[2] = x[3]
    out[3] = 2.0 * bs * p[7] * u2 - 2.0 * bs * x[3] - bs * bs * x[2]
    out[4] = x[5]
    out[5] = p[11] / G + (2.0 * p[6] / G) * u3 - 2.0 * x[5] - x[4]


@numba.njit(cache=True)
def _sig_dim(v, e0, r, y0):
    z = r * (y0 - v)
    if z > 700.0:
        return 0.0
    if z < -700.0:
        return 2.0 * e0
    return 2.0 * e0 / (1.0 + math.exp(z))


@numba.njit(cache=True)
def _rhs_dim(x, p, out):
    # p = (A, B, a, b, C1, C2, C3, C4, e0, y0, r, p)
    A, B, a, b = p[0], p[1], p[2], p[3]
    e0, y0, r = p[8], p[9], p[10]
    out[0] = x[1]
    out[1] = A * a * _sig_dim(x[4] - x[2], e0, r, y0) - 2.0 * a * x[1] - a * a * x[0]
    out[2] = x[3]
    out[3] = B * b * p[7] * _sig_dim(p[6] * x[0], e0, r, y0) - 2.0 * b * x[3] - b * b * x[2]
    out[4] = x[5]
    out[5] = A * a * (p[11] + p[5] * _sig_dim(p[4] * x[0], e0, r, y0)) - 2.0 * a * x[5] - a * a * x[4]


@numba.njit(cache=True)
def _rk4(x0, p, n, dt, dimensional):
    """Returns (states[n+1, 6], steps_completed)."""
    out = np.empty((n + 1, 6))
    x = x0.copy()
    out[0] = x
    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    tmp = np.empty(6)
    for i in range(n):
        if dimensional:
            _rhs_dim(x, p, k1)
        else:
            _rhs_nondim(x, p, k1)
        for j in range(6):
            tmp[j] = x[j] + 0.5 * dt * k1[j]
        if dimensional:
            _rhs_dim(tmp, p, k2)
        else:
            _rhs_nondim(tmp, p, k2)
        for j in range(6):
            tmp[j] = x[j] + 0.5 * dt * k2[j]
        if dimensional:
            _rhs_dim(tmp, p, k3)
        else:
            _rhs_nondim(tmp, p, k3)
        for j in range(6):
            tmp[j] = x[j] + dt * k3[j]
        if dimensional:
            _rhs_dim(tmp, p, k4)
        else:
            _rhs_nondim(tmp, p, k4)
        finite = True
        for j in range(6):
            x[j] = x[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if not math.isfinite(x[j]):
                finite = False
        out[i + 1] = x
        if not finite:
            return out, i + 1
    return out, n


def rk4(x0, p, n, dt, dimensional=False):
    return _rk4(np.ascontiguousarray(x0, dtype=np.float64),
                np.ascontiguousarray(p, dtype=np.float64), int(n), float(dt), bool(dimensional))
