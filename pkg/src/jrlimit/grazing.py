"""Grazing of the alpha orbit on the y1 = y03 threshold and its locus in (b*, G)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._newton import damped_newton, fd_jacobian
from .errors import JRLimitError, NoBracket, StepFailure
from .orbit import (PwOrbit, SwitchingTimes, _y1_after_on, crossing_residual, grazing_residual,
                    make_orbit, orbit_minimum, solve_orbit, solve_orbit_seeded, threshold_consistent)
from .params import NondimParams


@dataclass(frozen=True)
class GrazingPoint:
    bstar: float
    G: float
    times: SwitchingTimes
    t1_min: float

    def as_vector(self) -> np.ndarray:
        return np.array([*self.times.as_array(), self.t1_min, self.bstar, self.G])

    @classmethod
    def from_vector(cls, z) -> "GrazingPoint":
        return cls(float(z[5]), float(z[6]), SwitchingTimes.from_array(z[:4]), float(z[4]))


@dataclass
class GrazingCurve:
    samples: list[GrazingPoint]
    end_reasons: tuple[str, str] = ("", "")

    @property
    def bstar(self) -> np.ndarray:
        return np.array([s.bstar for s in self.samples])

    @property
    def G(self) -> np.ndarray:
        return np.array([s.G for s in self.samples])

    def G_at(self, bstar) -> np.ndarray:
        """Interpolated G on the curve; nan outside its b* range."""
        b, g = self.bstar, self.G
        order = np.argsort(b)
        b, g = b[order], g[order]
        x = np.asarray(bstar, dtype=float)
        out = np.interp(x, b, g)
        return np.where((x < b[0]) | (x > b[-1]), np.nan, out)


def grazing_system(z, params: NondimParams) -> np.ndarray:
    """Six residuals in z = (ts2_off, ts1_on, ts2_on, T, t1_min, b*, G)."""
    p = params.replace(bstar=float(z[5]), G=float(z[6]))
    times = SwitchingTimes.from_array(z[:4])
    y, dy = _y1_after_on(times, p, z[4] - z[1])
    return np.concatenate([crossing_residual(times, p), [dy, y - p.y03]])


def _admissible(z) -> bool:
    return bool(0 < z[0] < z[1] < z[4] < z[2] < z[3] and z[5] > 0 and z[6] > 0)


def _valid_point(pt: GrazingPoint, params: NondimParams) -> bool:
    p = params.replace(bstar=pt.bstar, G=pt.G)
    if not threshold_consistent(pt.times, p):
        return False
    try:
        orbit_minimum(pt.times, p)
    except JRLimitError:
        return False
    return True


def find_grazing_1d(G: float, bstar_start: float, params: NondimParams, step: float = 0.01,
                    bstar_min: float = 1e-3, tol: float = 1e-8) -> tuple[float, PwOrbit]:
    """March b* down from ``bstar_start`` at fixed G until the orbit grazes y03."""
    p = params.replace(G=G, bstar=bstar_start)
    times = solve_orbit_seeded(p)
    r_hi = grazing_residual(times, p)
    if r_hi <= 0:
        raise NoBracket(f"orbit at b* = {bstar_start} already dips below y03 (residual {r_hi:.3g})")
    b_hi, t_hi = bstar_start, times
    while True:
        b_lo = b_hi - step
        if b_lo < bstar_min:
            raise NoBracket("b* reached its lower limit without a sign change")
        try:
            t_lo = solve_orbit(t_hi, p.replace(bstar=b_lo))
            r_lo = grazing_residual(t_lo, p.replace(bstar=b_lo))
        except JRLimitError as exc:
            raise NoBracket(f"orbit solver failed at b* = {b_lo:.4f} before a sign change: {exc}") from exc
        if r_lo <= 0:
            break
        b_hi, t_hi, r_hi = b_lo, t_lo, r_lo
    for _ in range(200):
        b_mid = 0.5 * (b_lo + b_hi)
        t_mid = solve_orbit(t_hi, p.replace(bstar=b_mid))
        r_mid = grazing_residual(t_mid, p.replace(bstar=b_mid))
        if abs(r_mid) < tol:
            break
        if r_mid > 0:
            b_hi, t_hi = b_mid, t_mid
        else:
            b_lo = b_mid
    else:
        raise NoBracket("bisection on b* did not reach the residual tolerance")
    pm = p.replace(bstar=b_mid)
    return b_mid, make_orbit(t_mid, pm)


def polish_grazing_point(bstar: float, G: float, times: SwitchingTimes, params: NondimParams,
                         t1_min: float | None = None) -> GrazingPoint:
    """Newton on the grazing system with G held fixed."""
    p = params.replace(bstar=bstar, G=G)
    if t1_min is None:
        t1_min = orbit_minimum(times, p)[0]
    z0 = np.array([*times.as_array(), t1_min, bstar])

    def fun(v):
        return grazing_system(np.append(v, G), params)

    v, _ = damped_newton(fun, z0, admissible=lambda v: _admissible(np.append(v, G)))
    return GrazingPoint.from_vector(np.append(v, G))


def _tangent(z, params) -> np.ndarray:
    J = fd_jacobian(lambda v: grazing_system(v, params), z, central=False)
    v = np.linalg.svd(J)[2][-1]
    return v / np.linalg.norm(v[5:7])


def _branch(z0, tau, params, step, box, max_points, max_halvings=6):
    (b_min, b_max), (g_min, g_max) = box
    out = []
    z_prev, z_cur = None, z0
    ds = step
    while len(out) < max_points:
        if z_prev is None:
            direction = tau / np.linalg.norm(tau[5:7])
        else:
            sec = z_cur - z_prev
            direction = sec / np.linalg.norm(sec[5:7])
        halvings = 0
        while True:
            anchor = z_cur[5:7].copy()
            pred = z_cur + ds * direction

            # chord of length ds in the (b*, G) plane; the predictor picks the forward root
            def fun(v, anchor=anchor, ds=ds):
                d = v[5:7] - anchor
                return np.append(grazing_system(v, params), (np.dot(d, d) - ds * ds) / (2.0 * ds))

            try:
                z_new, _ = damped_newton(fun, pred, admissible=_admissible)
                pt = GrazingPoint.from_vector(z_new)
                if np.dot(z_new[5:7] - anchor, direction[5:7]) <= 0:
                    raise StepFailure("corrector turned back along the curve")
                if not _valid_point(pt, params):
                    raise StepFailure("corrected point has unencoded crossings")
                break
            except JRLimitError:
                halvings += 1
                if halvings > max_halvings:
                    return out, "step failure"
                ds *= 0.5
        if not (b_min <= pt.bstar <= b_max and g_min <= pt.G <= g_max):
            return out, "left box"
        out.append(pt)
        z_prev, z_cur = z_cur, z_new
        ds = min(step, 2.0 * ds)
    return out, "max points"


def continue_grazing(seed: GrazingPoint, params: NondimParams, step: float = 0.01,
                     box=((0.2, 0.5), (0.5, 3.5)), max_points: int = 2000) -> GrazingCurve:
    """Pseudo-arclength continuation of the grazing locus through ``seed``.

    Arclength is measured in the (b*, G) projection: each corrector holds the
    chord from the previous sample at the current step length.  The curve is
    traced both ways from the seed and returned in increasing b*.
    """
    z0 = seed.as_vector()
    if not _admissible(z0):
        raise ValueError("seed violates the switching-time ordering")
    res = np.max(np.abs(grazing_system(z0, params)))
    if not res < 1e-8:
        raise ValueError(f"seed does not solve the grazing system (residual {res:.3g})")
    g0 = z0[6]
    z0, _ = damped_newton(lambda v: np.append(grazing_system(v, params), v[6] - g0), z0,
                          admissible=_admissible)
    tau = _tangent(z0, params)
    fwd, why_fwd = _branch(z0, tau, params, step, box, max_points)
    bwd, why_bwd = _branch(z0, -tau, params, step, box, max_points)
    samples = bwd[::-1] + [GrazingPoint.from_vector(z0)] + fwd
    if samples[0].bstar > samples[-1].bstar:
        samples = samples[::-1]
        why_fwd, why_bwd = why_bwd, why_fwd
    return GrazingCurve(samples, (why_bwd, why_fwd))


def trace_from_fixed_G(G: float, bstar_start: float, params: NondimParams, **kwargs) -> GrazingCurve:
    """find_grazing_1d followed by continuation."""
    b, orbit = find_grazing_1d(G, bstar_start, params)
    seed = polish_grazing_point(b, G, orbit.times, params, orbit.t1_min)
    return continue_grazing(seed, params, **kwargs)
