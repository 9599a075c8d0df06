"""Sigmoid activations and vector fields of the column model."""
from __future__ import annotations

import numpy as np

from .params import DimensionalParams, NondimParams

_EXP_CAP = 700.0


def sigmoid_dim(y, params: DimensionalParams):
    """Firing rate 2*e0 / (1 + exp(r*(y0 - y))) in 1/s."""
    z = np.clip(params.r * (params.y0 - np.asarray(y, dtype=float)), -_EXP_CAP, _EXP_CAP)
    out = 2.0 * params.e0 / (1.0 + np.exp(z))
    return out if out.ndim else float(out)


def sigmoid_nondim(y, eps: float):
    """Activation 1 / (1 + exp(-y/eps)).

    ``eps == 0`` is the Heaviside switch with value 1/2 on the threshold.
    Exponents beyond +-700 saturate to exactly 0 or 1.
    """
    y = np.asarray(y, dtype=float)
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps == 0:
        out = np.where(y > 0, 1.0, np.where(y < 0, 0.0, 0.5))
    else:
        z = -y / eps
        with np.errstate(over="ignore"):
            out = np.where(z > _EXP_CAP, 0.0,
                           np.where(z < -_EXP_CAP, 1.0, 1.0 / (1.0 + np.exp(np.clip(z, -_EXP_CAP, _EXP_CAP)))))
    return out if out.ndim else float(out)


def sigmoid_nondim_slope(y, eps: float):
    """d/dy of :func:`sigmoid_nondim` for eps > 0."""
    s = np.asarray(sigmoid_nondim(y, eps))
    out = s * (1.0 - s) / eps
    return out if out.ndim else float(out)


def rhs_dim(state, params: DimensionalParams) -> np.ndarray:
    Y1, dY1, Y2, dY2, Y3, dY3 = np.asarray(state, dtype=float)
    A, B, a, b = params.A, params.B, params.a, params.b
    return np.array([
        dY1,
        A * a * sigmoid_dim(Y3 - Y2, params) - 2 * a * dY1 - a * a * Y1,
        dY2,
        B * b * params.C4 * sigmoid_dim(params.C3 * Y1, params) - 2 * b * dY2 - b * b * Y2,
        dY3,
        A * a * (params.p + params.C2 * sigmoid_dim(params.C1 * Y1, params)) - 2 * a * dY3 - a * a * Y3,
    ])


def activations(state, params: NondimParams, eps: float | None = None) -> tuple[float, float, float]:
    """Drives (u1, u2, u3) seen by the pyramidal, inhibitory and excitatory populations."""
    eps = params.eps if eps is None else eps
    y1, _, y2, _, y3, _ = np.asarray(state, dtype=float)
    return (sigmoid_nondim(y3 - y2 - params.y01, eps / params.a1),
            sigmoid_nondim(y1 - params.y02, eps / params.a2),
            sigmoid_nondim(y1 - params.y03, eps / params.a3))


def affine_rhs(state, params: NondimParams, u1: float, u2: float, u3: float) -> np.ndarray:
    """Vector field with the three activations supplied externally."""
    y1, dy1, y2, dy2, y3, dy3 = np.asarray(state, dtype=float)
    G, bs = params.G, params.bstar
    return np.array([
        dy1,
        (2.0 / G) * u1 - 2 * dy1 - y1,
        dy2,
        2 * bs * params.alpha4 * u2 - 2 * bs * dy2 - bs * bs * y2,
        dy3,
        params.P / G + (2 * params.alpha2 / G) * u3 - 2 * dy3 - y3,
    ])


def rhs_nondim(state, params: NondimParams, eps: float | None = None) -> np.ndarray:
    """Dimensionless vector field; valid for eps >= 0."""
    return affine_rhs(state, params, *activations(state, params, eps))


def jacobian_nondim(state, params: NondimParams, eps: float | None = None) -> np.ndarray:
    """Analytic 6x6 Jacobian of :func:`rhs_nondim` (eps > 0)."""
    eps = params.eps if eps is None else eps
    if eps <= 0:
        raise ValueError("Jacobian requires eps > 0")
    y1, _, y2, _, y3, _ = np.asarray(state, dtype=float)
    G, bs = params.G, params.bstar
    s1 = sigmoid_nondim_slope(y3 - y2 - params.y01, eps / params.a1)
    s2 = sigmoid_nondim_slope(y1 - params.y02, eps / params.a2)
    s3 = sigmoid_nondim_slope(y1 - params.y03, eps / params.a3)
    J = np.zeros((6, 6))
    J[0, 1] = J[2, 3] = J[4, 5] = 1.0
    J[1, 0], J[1, 1] = -1.0, -2.0
    J[1, 2], J[1, 4] = -(2.0 / G) * s1, (2.0 / G) * s1
    J[3, 0] = 2 * bs * params.alpha4 * s2
    J[3, 2], J[3, 3] = -bs * bs, -2 * bs
    J[5, 0] = (2 * params.alpha2 / G) * s3
    J[5, 4], J[5, 5] = -1.0, -2.0
    return J
