"""Time integration, event-driven flow of the switching limit, and regime
classification / parameter scans."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import JRLimitError, NonFinite, StallOnSurface, Unclassifiable
from .linear_flow import advance
from .params import DimensionalParams, NondimParams, nondimensionalize, scale_state

DEFAULT_DT = 0.01
DEFAULT_DT_DIM = 1e-4
DEFAULT_T_END = 1000.0
DEFAULT_T_END_DIM = 8.0
AMPLITUDE_TOL = 1e-4


@dataclass(frozen=True)
class Trajectory:
    dt: float
    states: np.ndarray
    params: NondimParams | DimensionalParams

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.states)) * self.dt

    @property
    def dimensional(self) -> bool:
        return isinstance(self.params, DimensionalParams)

    @property
    def t_end(self) -> float:
        return (len(self.states) - 1) * self.dt


@dataclass(frozen=True)
class RegimeReport:
    regime: str  # "alpha" | "delta" | "equilibrium" | "unclassifiable"
    freq_nondim: float
    freq_hz: float
    amplitude: float
    y1_floor: float
    error: str | None = None


class Event(NamedTuple):
    time: float
    surface: int  # 1: y3-y2=y01, 2: y1=y02, 3: y1=y03
    direction: int  # +1 crossing upward, -1 downward
    state: np.ndarray  # state just after the crossing


def standard_state(params) -> np.ndarray:
    """Heaviside high-activity point, used as the default initial state."""
    if isinstance(params, DimensionalParams):
        return scale_state(nondimensionalize(params).high_state(), params, "to_dim")
    return params.high_state()


def integrate(params, state0=None, t_end: float = DEFAULT_T_END, dt: float | None = None,
              eps: float | None = None) -> Trajectory:
    """Classical RK4 on the smooth model.

    ``params`` selects the physical (time in s) or dimensionless model;
    ``eps`` overrides ``params.eps`` for the latter and must be positive.
    """
    dimensional = isinstance(params, DimensionalParams)
    if dt is None:
        dt = DEFAULT_DT_DIM if dimensional else DEFAULT_DT
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    if dimensional:
        p = np.array([params.A, params.B, params.a, params.b, params.C1, params.C2,
                      params.C3, params.C4, params.e0, params.y0, params.r, params.p])
    else:
        if eps is not None:
            params = params.replace(eps=eps)
        if params.eps <= 0:
            raise ValueError("eps = 0 needs integrate_events")
        p = params.as_array()
    x0 = standard_state(params) if state0 is None else np.asarray(state0, dtype=float)
    n = int(round(t_end / dt))
    states, done = _kernels.rk4(x0, p, n, dt, dimensional)
    if done < n or not np.all(np.isfinite(states[-1])):
        raise NonFinite(f"state overflowed at step {done}")
    return Trajectory(dt=dt, states=states, params=params)


# -- exact integration of the switching limit ---------------------------------

def _drive_constants(params: NondimParams, u):
    G, bs = params.G, params.bstar
    return (2.0 / G * u[0], 2.0 * params.alpha4 / bs * u[1],
            params.P / G + 2.0 * params.alpha2 / G * u[2])


def _flow(x, tau, params: NondimParams, u) -> np.ndarray:
    """States at times ``tau`` (array) after ``x`` under fixed drives ``u``."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    c1, c2, c3 = _drive_constants(params, u)
    out = np.empty(tau.shape + (6,))
    out[..., 0:2] = advance(tau, 1.0, c1, x[0:2])
    out[..., 2:4] = advance(tau, params.bstar, c2, x[2:4])
    out[..., 4:6] = advance(tau, 1.0, c3, x[4:6])
    return out


def _switch_values(states, params: NondimParams) -> np.ndarray:
    s = np.atleast_2d(states)
    return np.stack([s[:, 4] - s[:, 2] - params.y01, s[:, 0] - params.y02,
                     s[:, 0] - params.y03], axis=-1)


def _switch_rates(state) -> np.ndarray:
    return np.array([state[5] - state[3], state[1], state[1]])


def _initial_drives(x, params: NondimParams, tol=1e-10):
    h = _switch_values(x, params)[0]
    hdot = _switch_rates(x)
    u = []
    for i in range(3):
        if abs(h[i]) > tol:
            u.append(1.0 if h[i] > 0 else 0.0)
        elif abs(hdot[i]) > 1e-9:
            u.append(1.0 if hdot[i] > 0 else 0.0)
        else:
            raise StallOnSurface(f"initial state on surface {i + 1} with zero crossing rate")
    return u


def integrate_events(params: NondimParams, state0, t_end: float, sample_dt: float = DEFAULT_DT,
                     scan_step: float = 0.005, time_tol: float = 1e-12):
    """Integrate the eps = 0 system exactly between switching events.

    Events are bracketed on a grid of ``scan_step`` and bisected to
    ``time_tol``.  Returns ``(trajectory, events)``; the trajectory is sampled
    on a uniform grid of ``sample_dt``.
    """
    x = np.asarray(state0, dtype=float).copy()
    u = _initial_drives(x, params)
    t = 0.0
    n_samples = int(math.floor(t_end / sample_dt + 1e-9)) + 1
    sample_t = np.arange(n_samples) * sample_dt
    samples = np.empty((n_samples, 6))
    filled = 0
    events: list[Event] = []
    window = 5.0

    def wrong_side(h, drives):
        sgn = np.where(np.asarray(drives) > 0.5, 1.0, -1.0)
        return sgn * h < 0

    while True:
        horizon = min(window, t_end - t)
        if horizon <= 0:
            break
        m = max(2, int(math.ceil(horizon / scan_step)))
        taus = np.linspace(0.0, horizon, m + 1)[1:]
        bad = wrong_side(_switch_values(_flow(x, taus, params, u), params), u)
        hit = np.flatnonzero(bad.any(axis=1))
        if hit.size == 0:
            seg_end = t + horizon
            event = None
        else:
            k = hit[0]
            lo = 0.0 if k == 0 else taus[k - 1]
            hi = taus[k]
            for _ in range(100):
                if hi - lo <= time_tol:
                    break
                mid = 0.5 * (lo + hi)
                if wrong_side(_switch_values(_flow(x, mid, params, u), params), u).any():
                    hi = mid
                else:
                    lo = mid
            seg_end = t + hi
            event = hi
        # samples in [t, seg_end) (and the final one at t_end)
        stop = np.searchsorted(sample_t, seg_end, side="left" if event is not None else "right")
        if stop > filled:
            samples[filled:stop] = _flow(x, sample_t[filled:stop] - t, params, u)
            filled = stop
        if event is None:
            x = _flow(x, horizon, params, u)[0]
            t = seg_end
            continue
        x_new = _flow(x, event, params, u)[0]
        flipped = np.flatnonzero(wrong_side(_switch_values(x_new, params), u)[0])
        rates = _switch_rates(x_new)
        for i in flipped:
            if abs(rates[i]) < 1e-9:
                raise StallOnSurface(f"tangential contact with surface {i + 1} at t={seg_end:.12g}")
            u[i] = 1.0 - u[i]
            events.append(Event(t + event - 0.5 * (event - lo), int(i + 1),
                                1 if rates[i] > 0 else -1, x_new.copy()))
        x, t = x_new, seg_end
    if filled < n_samples:
        samples[filled:] = _flow(x, sample_t[filled:] - t, params, u)
    return Trajectory(dt=sample_dt, states=samples, params=params.replace(eps=0.0)), events


# -- classification -------------------------------------------------------------

def _upward_crossings(y: np.ndarray, level: float, dt: float) -> np.ndarray:
    idx = np.flatnonzero((y[:-1] < level) & (y[1:] >= level))
    frac = (level - y[idx]) / (y[idx + 1] - y[idx])
    return (idx + frac) * dt


def classify(traj: Trajectory, params=None, rate_hz: float | None = None) -> RegimeReport:
    """Classify the settled behaviour of a trajectory.

    Periods are read from upward crossings of y2 through its mid-range.
    Raises :class:`Unclassifiable` when the last five periods spread by more
    than 5 %.
    """
    params = traj.params if params is None else params
    states = traj.states
    dt = traj.dt
    if isinstance(params, DimensionalParams):
        states = scale_state(states, params, "to_nondim")
        dt = dt * params.a
        nd = nondimensionalize(params)
        rate = params.a
    else:
        nd = params
        rate = 100.0 if rate_hz is None else rate_hz
    n = len(states)
    if n < 10:
        raise Unclassifiable("trajectory too short")
    t_end = (n - 1) * dt
    cut = int(0.4 * (n - 1))
    y2 = states[cut:, 2]
    mid = 0.5 * (y2.min() + y2.max())
    ups = _upward_crossings(y2, mid, dt)
    if len(ups) >= 2:
        t_est = float(np.median(np.diff(ups)))
        t_cut = max(0.4 * t_end, 20 * t_est)
        t_cut = min(t_cut, max(0.4 * t_end, t_end - 6.5 * t_est))
        cut = int(t_cut / dt)
    tail = states[cut:]
    y1 = tail[:, 0]
    amplitude = float(y1.max() - y1.min())
    floor = float(y1.min())
    if amplitude < AMPLITUDE_TOL:
        return RegimeReport("equilibrium", 0.0, 0.0, amplitude, floor)
    y2 = tail[:, 2]
    mid = 0.5 * (y2.min() + y2.max())
    ups = _upward_crossings(y2, mid, dt)
    if len(ups) < 6:
        raise Unclassifiable(f"only {len(ups)} y2 crossings after transient")
    periods = np.diff(ups)[-5:]
    spread = (periods.max() - periods.min()) / periods.mean()
    if spread > 0.05:
        raise Unclassifiable(f"period spread {spread:.3f} over the last 5 cycles")
    f = 1.0 / float(periods.mean())
    regime = "alpha" if floor > nd.y03 else "delta"
    return RegimeReport(regime, f, rate * f, amplitude, floor)


def classify_safe(traj: Trajectory, params=None, rate_hz=None) -> RegimeReport:
    try:
        return classify(traj, params, rate_hz)
    except Unclassifiable as exc:
        tail = traj.states[int(0.4 * (len(traj.states) - 1)):, 0]
        floor = float(tail.min()) if len(tail) else math.nan
        amp = float(tail.max() - tail.min()) if len(tail) else math.nan
        if isinstance(traj.params, DimensionalParams) and len(tail):
            k = scale_state(np.ones(6), traj.params, "to_nondim")[0]
            floor, amp = floor * k, amp * k
        return RegimeReport("unclassifiable", math.nan, math.nan, amp, floor, str(exc))


# -- scans ------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanCell:
    bstar: float
    G: float
    report: RegimeReport


def _scan_cell(args) -> ScanCell:
    params, bstar, G, t_end, dt = args
    p = params.replace(bstar=bstar, G=G)
    try:
        report = classify_safe(integrate(p, None, t_end, dt))
    except JRLimitError as exc:
        report = RegimeReport("error", math.nan, math.nan, math.nan, math.nan, str(exc))
    return ScanCell(bstar, G, report)


def scan(bstar_grid, G_grid, eps: float, params: NondimParams | None = None, workers: int = 1,
         t_end: float = DEFAULT_T_END, dt: float = DEFAULT_DT) -> list[ScanCell]:
    """Classify every (b*, G) cell, b* outer and G inner.

    Cells are independent; the output order is the grid order whatever the
    worker count.
    """
    params = (params or NondimParams()).replace(eps=eps)
    jobs = [(params, float(b), float(g), t_end, dt) for b in bstar_grid for g in G_grid]
    if not jobs:
        raise ValueError("empty grid")
    if workers <= 1:
        return [_scan_cell(j) for j in jobs]
    workers = min(workers, os.cpu_count() or 1, len(jobs))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_scan_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


@dataclass
class SweepResult:
    name: str
    values: np.ndarray
    up: list[RegimeReport] = field(default_factory=list)
    down: list[RegimeReport] = field(default_factory=list)

    @staticmethod
    def _transition(values, reports):
        f = np.array([r.freq_hz if r.regime in ("alpha", "delta") else np.nan for r in reports])
        jumps = np.abs(np.diff(f))
        if np.all(np.isnan(jumps)):
            return math.nan
        k = int(np.nanargmax(jumps))
        return 0.5 * (values[k] + values[k + 1])

    @property
    def transition_up(self) -> float:
        return self._transition(self.values, self.up)

    @property
    def transition_down(self) -> float:
        return self._transition(self.values, self.down)

    @property
    def gap(self) -> float:
        return abs(self.transition_up - self.transition_down)


def hysteresis_probe(params, values, name: str = "G", t_end: float | None = None,
                     dt: float | None = None, state0=None) -> SweepResult:
    """Sweep one parameter up then down, warm-starting each run from the end
    state of the previous one."""
    dimensional = isinstance(params, DimensionalParams)
    if t_end is None:
        t_end = DEFAULT_T_END_DIM if dimensional else DEFAULT_T_END
    values = np.asarray(sorted(values), dtype=float)
    result = SweepResult(name, values)
    x = None if state0 is None else np.asarray(state0, dtype=float)
    up_reports = []
    for v in values:
        p = params.replace(**{name: float(v)})
        traj = integrate(p, x if x is not None else standard_state(p), t_end, dt)
        x = traj.states[-1]
        up_reports.append(classify_safe(traj))
    down_reports = []
    for v in values[::-1]:
        p = params.replace(**{name: float(v)})
        traj = integrate(p, x, t_end, dt)
        x = traj.states[-1]
        down_reports.append(classify_safe(traj))
    result.up = up_reports
    result.down = down_reports[::-1]
    return result
