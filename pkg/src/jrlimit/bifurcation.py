"""Equilibria and their bifurcations.

In the switching limit equilibria are read off closed forms; for eps > 0 they
are roots of the scalar reduction

    F(y1) = (G/2) y1 - S(y3(y1) - y2(y1) - y01)

with y2, y3 the equilibrium responses of the interneurons to y1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._newton import damped_newton
from .errors import JRLimitError, NoConvergence, NoFold
from .model import jacobian_nondim, sigmoid_nondim, sigmoid_nondim_slope
from .params import NondimParams


@dataclass(frozen=True)
class CriticalGs:
    G1: float
    G2: float
    G3: float
    G4: float


def critical_gs(params: NondimParams) -> CriticalGs:
    a2, a4, b = params.alpha2, params.alpha4, params.bstar
    return CriticalGs(
        G1=a2 * b / (a4 + params.y01 * b / 2.0),
        G2=2.0 / params.y02,
        G3=2.0 * a2 / params.y01,
        G4=2.0 / params.y03,
    )


def hopf_curve(bstar_values, params: NondimParams) -> np.ndarray:
    """Rows of (b*, G1(b*)): lower boundary of alpha activity."""
    b = np.asarray(bstar_values, dtype=float)
    g1 = params.alpha2 * b / (params.alpha4 + params.y01 * b / 2.0)
    return np.column_stack([b, g1])


@dataclass(frozen=True)
class EquilibriumBranch:
    label: str
    location: tuple[float, float, float]
    index: int
    g_range: tuple[float, float]


def equilibria_heaviside(G: float, params: NondimParams) -> list[EquilibriumBranch]:
    """Equilibria of the switching limit valid at ``G``.

    Pseudo-equilibria on a switching surface carry the index of the nearby
    unstable equilibrium for small eps > 0.
    """
    if not G > 0:
        raise ValueError("G must be positive")
    c = critical_gs(params)
    top = min(c.G3, c.G4)
    for name, value in (("G1", c.G1), ("G2", c.G2), ("min(G3, G4)", top)):
        if math.isclose(G, value, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError(f"G = {G} sits on the critical value {name}")
    eq1 = EquilibriumBranch("eq1", (0.0, 0.0, 0.0), 0, (0.0, math.inf))
    if G > top:
        return [eq1]
    eq2 = EquilibriumBranch("eq2", (params.y03, 0.0, params.y01), 1, (0.0, top))
    y3 = 2.0 * params.alpha2 / G
    if G < c.G1:
        big = EquilibriumBranch("eq3", (2.0 / G, 2.0 * params.alpha4 / params.bstar, y3), 0, (0.0, c.G1))
    elif G < c.G2:
        big = EquilibriumBranch("eq4", (params.y02, y3 - params.y01, y3), 2, (c.G1, c.G2))
    else:
        big = EquilibriumBranch("eq4", (2.0 / G, 0.0, y3), 0, (c.G2, top))
    return [eq1, eq2, big]


# -- smooth system -------------------------------------------------------------------

def _responses(y1, params: NondimParams, eps: float):
    y2 = 2.0 * params.alpha4 / params.bstar * sigmoid_nondim(y1 - params.y02, eps / params.a2)
    y3 = (params.P + 2.0 * params.alpha2 * sigmoid_nondim(y1 - params.y03, eps / params.a3)) / params.G
    return y2, y3


def reduced_residual(y1, params: NondimParams, eps: float | None = None):
    """F(y1); its roots are the y1-coordinates of equilibria."""
    eps = params.eps if eps is None else eps
    y2, y3 = _responses(y1, params, eps)
    return 0.5 * params.G * np.asarray(y1) - sigmoid_nondim(y3 - y2 - params.y01, eps / params.a1)


def reduced_slope(y1, params: NondimParams, eps: float | None = None):
    eps = params.eps if eps is None else eps
    y2, y3 = _responses(y1, params, eps)
    dy2 = 2.0 * params.alpha4 / params.bstar * sigmoid_nondim_slope(y1 - params.y02, eps / params.a2)
    dy3 = 2.0 * params.alpha2 / params.G * sigmoid_nondim_slope(y1 - params.y03, eps / params.a3)
    return 0.5 * params.G - sigmoid_nondim_slope(y3 - y2 - params.y01, eps / params.a1) * (dy3 - dy2)


@dataclass(frozen=True)
class SmoothEquilibrium:
    state: np.ndarray
    eigenvalues: np.ndarray

    @property
    def location(self) -> tuple[float, float, float]:
        return float(self.state[0]), float(self.state[2]), float(self.state[4])

    @property
    def index(self) -> int:
        return int(np.sum(self.eigenvalues.real > 0))

    @property
    def leading_real(self) -> float:
        return float(np.max(self.eigenvalues.real))


def equilibrium_state(y1: float, params: NondimParams, eps: float | None = None) -> np.ndarray:
    eps = params.eps if eps is None else eps
    y2, y3 = _responses(y1, params, eps)
    return np.array([y1, 0.0, float(y2), 0.0, float(y3), 0.0])


def _y1_grid(params: NondimParams, eps: float, upper: float | None = None) -> np.ndarray:
    top = (2.0 / params.G) * (1.0 + 1e-9) + 1e-12 if upper is None else upper
    step = min(eps / 20.0, top / 200.0)
    n = min(int(top / step) + 2, 2_000_000)
    return np.unique(np.concatenate([[0.0], np.geomspace(1e-300, min(1e-3, top), 600),
                                     np.linspace(0.0, top, n)]))


def _root_brackets(params: NondimParams, eps: float, upper: float | None = None):
    y = _y1_grid(params, eps, upper)
    f = reduced_residual(y, params, eps)
    exact = y[f == 0.0]
    idx = np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)
    return [(y[i], y[i + 1]) for i in idx], list(exact)


def _newton_scalar(y1, params, eps, tol=1e-14, maxiter=60):
    for _ in range(maxiter):
        f = float(reduced_residual(y1, params, eps))
        d = float(reduced_slope(y1, params, eps))
        if d == 0 or not math.isfinite(d):
            break
        step = f / d
        y1 -= step
        if abs(step) <= tol * max(1.0, abs(y1)):
            return y1
    raise NoConvergence("Newton on the reduced equilibrium equation did not converge")


def equilibria_smooth(G: float, params: NondimParams, seeds=None, eps: float | None = None
                      ) -> list[SmoothEquilibrium]:
    """Equilibria of the smooth model at ``G``, sorted by y1.

    Without ``seeds`` all sign changes of F on a fine grid are located and
    refined; with ``seeds`` Newton runs from each seed and failures are dropped.
    """
    eps = params.eps if eps is None else eps
    if not eps > 0:
        raise ValueError("equilibria_smooth needs eps > 0")
    p = params.replace(G=G, eps=eps)
    roots = []
    if seeds is None:
        brackets, exact = _root_brackets(p, eps)
        roots.extend(exact)
        for lo, hi in brackets:
            roots.append(brentq(lambda v: float(reduced_residual(v, p, eps)), lo, hi,
                                xtol=1e-300, rtol=1e-15, maxiter=500))
    else:
        for s in seeds:
            try:
                roots.append(_newton_scalar(float(s), p, eps))
            except NoConvergence:
                continue
    roots = sorted(roots)
    unique = []
    for r in roots:
        if not unique or abs(r - unique[-1]) > 1e-12 * max(1.0, abs(r)):
            unique.append(r)
    out = []
    for r in unique:
        x = equilibrium_state(r, p, eps)
        out.append(SmoothEquilibrium(x, np.linalg.eigvals(jacobian_nondim(x, p, eps))))
    return out


def large_equilibrium(G: float, params: NondimParams, eps: float | None = None) -> SmoothEquilibrium:
    """The equilibrium with the largest pyramidal potential."""
    return equilibria_smooth(G, params, eps=eps)[-1]


def hopf_point_smooth(params: NondimParams, G_lo: float, G_hi: float, eps: float | None = None,
                      tol: float = 1e-6) -> float:
    """G at which the large-activity equilibrium's leading complex pair crosses
    the imaginary axis, bisected inside [G_lo, G_hi]."""

    def lead(G):
        return large_equilibrium(G, params, eps).leading_real

    f_lo, f_hi = lead(G_lo), lead(G_hi)
    if f_lo * f_hi > 0:
        raise NoConvergence("leading eigenvalue does not cross the imaginary axis in the window")
    while G_hi - G_lo > tol:
        mid = 0.5 * (G_lo + G_hi)
        f_mid = lead(mid)
        if f_mid * f_lo > 0:
            G_lo, f_lo = mid, f_mid
        else:
            G_hi = mid
    return 0.5 * (G_lo + G_hi)


# -- fold of the small-activity pair -------------------------------------------------

def _small_roots(G, params, eps):
    upper = 0.5 * (params.y03 + params.y02)
    p = params.replace(G=G)
    brackets, exact = _root_brackets(p, eps, upper)
    return len(brackets) + len(exact), brackets


def snic_fold(params: NondimParams, eps: float | None = None, full_output: bool = False,
              G_min: float = 1e-4, G_max: float = 1e3):
    """Saddle-node of the small-activity pair (eq1/eq2) for eps > 0.

    The fold is bracketed by a geometric scan (factor 1.1) from G2/10, moving
    up or down depending on whether the pair exists there, then refined by
    Newton on (F, dF/dy1) = 0.
    """
    eps = params.eps if eps is None else eps
    if not eps > 0:
        raise ValueError("snic_fold needs eps > 0")
    params = params.replace(eps=eps)
    G = critical_gs(params).G2 / 10.0
    has_pair = _small_roots(G, params, eps)[0] >= 2
    factor = 1.0 / 1.1 if has_pair else 1.1
    while True:
        G_next = G * factor
        if not (G_min <= G_next <= G_max):
            raise NoFold(f"small-activity pair {'persists' if has_pair else 'absent'} over the G window")
        if (_small_roots(G_next, params, eps)[0] >= 2) != has_pair:
            break
        G = G_next
    lo, hi = sorted((G, G_next))  # pair absent at lo, present at hi
    while hi - lo > 1e-9 * hi:
        mid = 0.5 * (lo + hi)
        if _small_roots(mid, params, eps)[0] >= 2:
            hi = mid
        else:
            lo = mid
    _, brackets = _small_roots(hi, params, eps)
    y_seed = 0.5 * (brackets[0][0] + brackets[1][1]) if len(brackets) >= 2 else brackets[0][0]

    def fold_eqs(v):
        p = params.replace(G=float(v[1]))
        return np.array([float(reduced_residual(v[0], p, eps)), float(reduced_slope(v[0], p, eps))])

    try:
        v, _ = damped_newton(fold_eqs, np.array([y_seed, hi]), tol=1e-12, maxiter=50)
    except JRLimitError as exc:
        raise NoFold(f"fold refinement failed: {exc}") from exc
    G_fold, y_fold = float(v[1]), float(v[0])
    return (G_fold, y_fold) if full_output else G_fold


def fold_test_function(y1: float, G: float, params: NondimParams, eps: float | None = None) -> float:
    """Smallest |eigenvalue| of the full Jacobian at the equilibrium with this y1."""
    eps = params.eps if eps is None else eps
    p = params.replace(G=G)
    x = equilibrium_state(y1, p, eps)
    return float(np.min(np.abs(np.linalg.eigvals(jacobian_nondim(x, p, eps)))))


# -- thresholds of order eps ------------------------------------------------------------

@dataclass(frozen=True)
class SmallThresholdReport:
    eps: float
    G: float
    y1_bound: float
    y3_bound: float
    equilibria: list
    ok: bool


def small_threshold_bounds(G: float, z01: float, z03: float, alpha2: float = 0.8) -> tuple[float, float]:
    """Lower bounds on equilibrium y1 and y3 when y01 = eps*z01, y03 = eps*z03."""
    return (2.0 / G) / (1.0 + math.exp(z01 + 1.0)), (2.0 * alpha2 / G) / (1.0 + math.exp(z03))


def small_threshold_check(params: NondimParams, eps: float, z01: float, z03: float,
                          G: float | None = None) -> SmallThresholdReport:
    """Check that no equilibrium falls below the closed-form lower bounds when
    the excitatory thresholds scale with eps."""
    G = params.G if G is None else G
    p = params.replace(eps=eps, G=G, y01=eps * z01, y03=eps * z03)
    b1, b3 = small_threshold_bounds(G, z01, z03, p.alpha2)
    eqs = equilibria_smooth(G, p)
    ok = all(e.state[0] >= b1 and e.state[4] >= b3 for e in eqs)
    return SmallThresholdReport(eps, G, b1, b3, eqs, ok)
