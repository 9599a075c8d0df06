"""Alpha-type periodic orbits of the switching limit (eps = 0).

With y3 pinned at 2*alpha2/G, the pyramidal potential y1 and the inhibitory
potential y2 follow piecewise exponential profiles.  An orbit is fixed by
four times (the switch-off of the pyramidal drive is put at t = 0):

    0 < ts2_off < ts1_on < ts2_on < T

where y1 falls through y02 at ts2_off, y2 falls through 2*alpha2/G - y01 at
ts1_on, y1 rises through y02 at ts2_on and y2 rises through the same
threshold again at T.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._newton import damped_newton
from .errors import NoConvergence, NoMinimumInInterval, OrderingViolated, SpuriousCrossing
from .linear_flow import advance, periodic_init
from .params import NondimParams


@dataclass(frozen=True)
class SwitchingTimes:
    ts2_off: float
    ts1_on: float
    ts2_on: float
    T: float

    def as_array(self) -> np.ndarray:
        return np.array([self.ts2_off, self.ts1_on, self.ts2_on, self.T])

    @classmethod
    def from_array(cls, x) -> "SwitchingTimes":
        return cls(*(float(v) for v in x))

    def is_ordered(self) -> bool:
        return 0 < self.ts2_off < self.ts1_on < self.ts2_on < self.T


def _ordered(x) -> bool:
    return bool(0 < x[0] < x[1] < x[2] < x[3])


@dataclass(frozen=True)
class PwOrbit:
    times: SwitchingTimes
    t1_min: float
    y1_min: float
    y3_eq: float

    @property
    def freq(self) -> float:
        """Frequency 1/T in dimensionless units."""
        return 1.0 / self.times.T

    def freq_hz(self, rate: float = 100.0) -> float:
        return rate / self.times.T


def _initial_states(times: SwitchingTimes, params: NondimParams):
    """(y1, y1') at t = 0 and (y2, y2') at t = ts2_off."""
    G, bs = params.G, params.bstar
    y1_0 = (2.0 / G) * periodic_init(times.T, times.ts1_on, 1.0)
    y2_off = (2.0 * params.alpha4 / bs) * periodic_init(times.T, times.ts2_on - times.ts2_off, bs)
    return y1_0, y2_off


def crossing_residual(times: SwitchingTimes, params: NondimParams) -> np.ndarray:
    """Residuals of the four threshold-crossing conditions."""
    G, bs = params.G, params.bstar
    y1_0, y2_off = _initial_states(times, params)
    thr = params.y2_threshold
    return np.array([
        advance(times.ts2_off, 1.0, 0.0, y1_0)[0] - params.y02,
        advance(times.ts2_on - times.T, 1.0, 2.0 / G, y1_0)[0] - params.y02,
        advance(times.ts1_on - times.ts2_off, bs, 0.0, y2_off)[0] - thr,
        advance(-times.ts2_off, bs, 2.0 * params.alpha4 / bs, y2_off)[0] - thr,
    ])


def reconstruct(times: SwitchingTimes, params: NondimParams, t) -> np.ndarray:
    """Orbit state(s) at time(s) ``t`` (taken modulo T).

    Returns shape ``(6,)`` for scalar ``t`` and ``(n, 6)`` for arrays.
    """
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    G, bs, T = params.G, params.bstar, times.T
    y1_0, y2_off = _initial_states(times, params)
    out = np.empty(t.shape + (6,))

    t1 = np.mod(t - times.ts1_on, T) + times.ts1_on - T  # in [ts1_on - T, ts1_on)
    off = t1 >= 0
    out[off, 0:2] = advance(t1[off], 1.0, 0.0, y1_0)
    out[~off, 0:2] = advance(t1[~off], 1.0, 2.0 / G, y1_0)

    t2 = np.mod(t - times.ts2_on, T) + times.ts2_on - T  # in [ts2_on - T, ts2_on)
    off = t2 >= times.ts2_off
    drive = 2.0 * params.alpha4 / bs
    out[off, 2:4] = advance(t2[off] - times.ts2_off, bs, 0.0, y2_off)
    out[~off, 2:4] = advance(t2[~off] - times.ts2_off, bs, drive, y2_off)

    out[:, 4] = params.y3_eq
    out[:, 5] = 0.0
    return out[0] if scalar else out


def threshold_consistent(times: SwitchingTimes, params: NondimParams, n: int = 1000) -> bool:
    """True if y1 and y2 cross their thresholds only at the four encoded times."""
    T = times.T
    t = (np.arange(n) + 0.5) * T / n
    switches = np.array([0.0, times.ts2_off, times.ts1_on, times.ts2_on, T])
    keep = np.min(np.abs(t[:, None] - switches[None, :]), axis=1) > 1e-9 * T
    t = t[keep]
    x = reconstruct(times, params, t)
    y1_high = (t < times.ts2_off) | (t > times.ts2_on)
    y2_high = t < times.ts1_on
    return bool(np.all((x[:, 0] > params.y02) == y1_high)
                and np.all((x[:, 2] > params.y2_threshold) == y2_high))


def solve_orbit(guess: SwitchingTimes, params: NondimParams, full_output: bool = False,
                tol: float = 1e-12, maxiter: int = 50):
    """Damped Newton solve of the crossing system from ``guess``.

    Raises :class:`NoConvergence`, :class:`OrderingViolated` or
    :class:`SpuriousCrossing`; any of them means the caller should re-seed.
    With ``full_output`` returns ``(times, iterations)``.
    """
    if not guess.is_ordered():
        raise ValueError(f"guess violates the switching-time ordering: {guess}")
    x, its = damped_newton(lambda v: crossing_residual(SwitchingTimes.from_array(v), params),
                           guess.as_array(), admissible=_ordered, tol=tol, maxiter=maxiter)
    times = SwitchingTimes.from_array(x)
    if not threshold_consistent(times, params):
        raise SpuriousCrossing(f"root {times} has unencoded threshold crossings")
    return (times, its) if full_output else times


def _y1_after_on(times: SwitchingTimes, params: NondimParams, s):
    """(y1, y1') at time ts1_on + s, s in [0, ts2_on - ts1_on]."""
    y1_0, _ = _initial_states(times, params)
    v_on = advance(times.ts1_on, 1.0, 0.0, y1_0)
    return advance(s, 1.0, 2.0 / params.G, v_on)


def orbit_minimum(times: SwitchingTimes, params: NondimParams) -> tuple[float, float]:
    """Time and value of the interior minimum of y1 on (ts1_on, ts2_on)."""
    c = 2.0 / params.G
    span = times.ts2_on - times.ts1_on
    lo, hi = 0.0, span
    d_lo = _y1_after_on(times, params, lo)[1]
    d_hi = _y1_after_on(times, params, hi)[1]
    if not (d_lo < 0 < d_hi):
        raise NoMinimumInInterval(f"y1' does not change sign on (ts1_on, ts2_on): {d_lo:.3g}, {d_hi:.3g}")
    for _ in range(60):
        if hi - lo < 1e-10:
            break
        mid = 0.5 * (lo + hi)
        if _y1_after_on(times, params, mid)[1] < 0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    for _ in range(5):
        y, dy = _y1_after_on(times, params, s)
        ddy = c - 2.0 * dy - y
        if ddy <= 0:
            break
        step = dy / ddy
        s -= step
        if abs(step) < 1e-15:
            break
    y, dy = _y1_after_on(times, params, s)
    return times.ts1_on + float(s), float(y)


def grazing_residual(times: SwitchingTimes, params: NondimParams) -> float:
    """y1_min - y03; zero at the grazing bifurcation."""
    return orbit_minimum(times, params)[1] - params.y03


def make_orbit(times: SwitchingTimes, params: NondimParams) -> PwOrbit:
    t1_min, y1_min = orbit_minimum(times, params)
    return PwOrbit(times=times, t1_min=t1_min, y1_min=y1_min, y3_eq=params.y3_eq)


def seed_from_simulation(params: NondimParams, eps: float = 0.001, t_end: float = 300.0,
                         dt: float = 0.005) -> SwitchingTimes:
    """Read switching times off one settled cycle of a small-eps simulation."""
    from .sim import integrate

    traj = integrate(params, None, t_end, dt, eps=eps)
    t = traj.times
    y1 = traj.states[:, 0]
    y2 = traj.states[:, 2]
    thr = params.y2_threshold

    def crossings(y, level, up):
        if up:
            idx = np.flatnonzero((y[:-1] < level) & (y[1:] >= level))
        else:
            idx = np.flatnonzero((y[:-1] >= level) & (y[1:] < level))
        return t[idx] + (level - y[idx]) / (y[idx + 1] - y[idx]) * dt

    starts = crossings(y2, thr, True)
    starts = starts[starts > 0.5 * t_end]
    if len(starts) < 2:
        raise NoConvergence("seed simulation shows no settled oscillation through the y2 threshold")
    t0, t1 = starts[-2], starts[-1]

    def first_in(ts):
        ts = ts[(ts > t0) & (ts < t1)]
        if len(ts) != 1:
            raise NoConvergence("seed simulation cycle is not of alpha type")
        return ts[0] - t0

    guess = SwitchingTimes(first_in(crossings(y1, params.y02, False)),
                           first_in(crossings(y2, thr, False)),
                           first_in(crossings(y1, params.y02, True)),
                           t1 - t0)
    if not guess.is_ordered():
        raise NoConvergence(f"seed simulation gave unordered switching times {guess}")
    return guess


def solve_orbit_seeded(params: NondimParams, full_output: bool = False,
                       offsets=((0.05, 0.0), (0.1, 0.0), (0.2, 0.0), (0.0, -0.03), (0.0, -0.06), (0.0, -0.1))):
    """Seed from simulation and solve.

    Close to grazing the seeding run may not settle on an alpha cycle; the
    orbit is then seeded at (b* + db, G + dG) for each offset in turn and
    followed back to the target in steps of at most 0.01.
    """
    try:
        return solve_orbit(seed_from_simulation(params), params, full_output=full_output)
    except (NoConvergence, SpuriousCrossing, OrderingViolated) as exc:
        first = exc
    for db, dG in offsets:
        p0 = params.replace(bstar=params.bstar + db, G=params.G + dG)
        if p0.bstar <= 0 or p0.G <= 0:
            continue
        try:
            times = solve_orbit(seed_from_simulation(p0), p0)
            n = int(np.ceil(max(abs(db), abs(dG)) / 0.01))
            for s in np.linspace(1.0, 0.0, n + 1)[1:]:
                p = params.replace(bstar=params.bstar + s * db, G=params.G + s * dG)
                times, its = solve_orbit(times, p, full_output=True)
            return (times, its) if full_output else times
        except (NoConvergence, SpuriousCrossing, OrderingViolated):
            continue
    raise first
