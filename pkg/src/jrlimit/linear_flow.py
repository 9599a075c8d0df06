"""Exact flow of the critically damped affine oscillator

    y'' = b^2 c - 2 b y' - b^2 y,

which governs each population between two switching events.  The matrix
exponential has the repeated eigenvalue -b, so the closed form is used
instead of a generic ``expm``.
"""
from __future__ import annotations

import numpy as np

E1 = np.array([1.0, 0.0])


def mat_exp(b: float, t) -> np.ndarray:
    """exp(M_b t) for M_b = [[0, 1], [-b^2, -2b]].

    ``t`` may be an array, in which case the result has shape ``t.shape + (2, 2)``.
    """
    t = np.asarray(t, dtype=float)
    e = np.exp(-b * t)
    out = np.empty(t.shape + (2, 2))
    out[..., 0, 0] = e * (1.0 + b * t)
    out[..., 0, 1] = e * t
    out[..., 1, 0] = -e * b * b * t
    out[..., 1, 1] = e * (1.0 - b * t)
    return out


def advance(t, b: float, c: float, init) -> np.ndarray:
    """State (y, y') after time ``t`` (negative for backward) from ``init``.

    Vectorised over ``t``: returns shape ``t.shape + (2,)``.
    """
    init = np.asarray(init, dtype=float)
    M = mat_exp(b, t)
    shifted = init - np.array([c, 0.0])
    return M @ shifted + np.array([c, 0.0])


def periodic_init(T: float, t_on: float, b: float) -> np.ndarray:
    """Initial state making a unit-amplitude drive, off on [0, t_on) and on
    on [t_on, T), produce a T-periodic solution.

    Returns [I - exp(M_b T)]^-1 [I - exp(M_b (T - t_on))] e1.
    """
    if not (b > 0 and T > 0):
        raise ValueError("need b > 0 and T > 0")
    rhs = (np.eye(2) - mat_exp(b, T - t_on)) @ E1
    if np.exp(-b * T) < 1e-300:
        return rhs
    lhs = np.eye(2) - mat_exp(b, T)
    det = lhs[0, 0] * lhs[1, 1] - lhs[0, 1] * lhs[1, 0]
    assert det != 0.0, "I - exp(M_b T) is singular"
    inv = np.array([[lhs[1, 1], -lhs[0, 1]], [-lhs[1, 0], lhs[0, 0]]]) / det
    return inv @ rhs
