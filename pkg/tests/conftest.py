import numpy as np
import pytest

from jrlimit.grazing import continue_grazing, find_grazing_1d, polish_grazing_point
from jrlimit.orbit import solve_orbit_seeded
from jrlimit.params import DimensionalParams, NondimParams, nondimensionalize
from jrlimit.sim import integrate


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    # compile the RK4 kernels once so timed checks measure the numerics
    integrate(NondimParams(), None, 1.0)
    integrate(DimensionalParams(), None, 1e-3)


@pytest.fixture(scope="session")
def nd():
    return NondimParams()


@pytest.fixture(scope="session")
def nd_formula():
    """Dimensionless set converted from the dimensional defaults."""
    return nondimensionalize(DimensionalParams())


@pytest.fixture(scope="session")
def orbit_05_17():
    p = NondimParams(G=1.7, bstar=0.5)
    return p, solve_orbit_seeded(p)


@pytest.fixture(scope="session")
def graze_17(nd):
    return find_grazing_1d(1.7, 0.5, nd)


@pytest.fixture(scope="session")
def grazing_curve(nd, graze_17):
    b, orbit = graze_17
    seed = polish_grazing_point(b, 1.7, orbit.times, nd, orbit.t1_min)
    return continue_grazing(seed, nd, step=0.01, box=((0.19, 0.51), (0.5, 3.5)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def event_oracle(times, params, n=1000):
    """One period of exact event-driven integration started on the closed-form orbit.

    Returns (max state deviation from reconstruct, return-to-start error,
    max switching-time deviation).
    """
    from jrlimit.orbit import reconstruct
    from jrlimit.sim import integrate_events

    T = times.T
    x0 = reconstruct(times, params, 0.0)
    # run a little past T so the crossing that closes the period is detected
    traj, events = integrate_events(params.replace(eps=0.0), x0, 2 * T, sample_dt=T / n)
    ref = reconstruct(times, params, traj.times[: n + 1])
    dev = np.max(np.abs(traj.states[: n + 1] - ref))
    ret = np.max(np.abs(traj.states[n] - x0))
    # h1 = y3 - y2 - y01 rises as y2 falls, so u1 switches on with an upward h1 crossing
    expected = {(2, -1): times.ts2_off, (1, 1): times.ts1_on, (2, 1): times.ts2_on, (1, -1): T}
    got = {}
    for ev in events:
        key = (ev.surface, ev.direction)
        if key in expected and key not in got and ev.time > 1e-9:
            got[key] = ev.time
    if set(got) != set(expected):
        return dev, ret, np.inf
    return dev, ret, max(abs(got[k] - expected[k]) for k in expected)


ACCEPTANCE: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> bool:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
