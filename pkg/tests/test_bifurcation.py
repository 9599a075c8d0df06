import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jrlimit.bifurcation import (critical_gs, equilibria_heaviside, equilibria_smooth,
                                 fold_test_function, hopf_curve, hopf_point_smooth,
                                 reduced_residual, small_threshold_bounds, small_threshold_check,
                                 snic_fold)
from jrlimit.errors import NoFold
from jrlimit.model import jacobian_nondim, rhs_nondim
from jrlimit.params import NondimParams


def test_critical_values_defaults(nd):
    c = critical_gs(nd)
    assert c.G1 == pytest.approx(0.4 / 0.27)
    assert c.G1 == pytest.approx(1.481, abs=1e-3)
    assert c.G2 == pytest.approx(2 / 0.3) and c.G3 == pytest.approx(20.0) and c.G4 == pytest.approx(25.0)
    assert c.G1 < c.G2 < c.G3 < c.G4


def test_critical_values_formula_thresholds(nd_formula):
    c = critical_gs(nd_formula)
    assert c.G2 == pytest.approx(6.19, abs=0.01)
    assert c.G4 == pytest.approx(24.75, abs=0.01)
    assert c.G1 < c.G2 < c.G3 < c.G4


def test_G1_small_threshold_limit(nd):
    assert critical_gs(nd.replace(y01=1e-12)).G1 == pytest.approx(nd.alpha2 * nd.bstar / nd.alpha4)


def test_hopf_curve_values(nd):
    h = hopf_curve([0.5, 1e-9, 0.25], nd)
    assert h[0, 1] == pytest.approx(1.481, abs=1e-3)
    assert h[1, 1] < 1e-8
    assert h[2, 1] == pytest.approx(0.2 / 0.26)


@given(st.floats(0.01, 1.0), st.floats(0.001, 0.5))
def test_hopf_curve_increasing(b, db):
    h = hopf_curve([b, b + db], NondimParams())
    assert h[1, 1] > h[0, 1]


def test_heaviside_rows(nd):
    low = {b.label: b for b in equilibria_heaviside(1.0, nd)}
    assert set(low) == {"eq1", "eq2", "eq3"}
    assert low["eq3"].location == pytest.approx((2.0, 1.0, 1.6))
    assert low["eq2"].location == pytest.approx((nd.y03, 0.0, nd.y01)) and low["eq2"].index == 1
    mid = {b.label: b for b in equilibria_heaviside(3.0, nd)}
    assert mid["eq4"].location == pytest.approx((0.3, 1.6 / 3 - 0.08, 1.6 / 3))
    assert mid["eq4"].index == 2
    high = {b.label: b for b in equilibria_heaviside(10.0, nd)}
    assert high["eq4"].location == pytest.approx((0.2, 0.0, 0.16)) and high["eq4"].index == 0
    assert [b.label for b in equilibria_heaviside(30.0, nd)] == ["eq1"]


def test_heaviside_rows_are_equilibria(nd):
    p = nd.replace(eps=0.0)
    for G in (0.7, 1.0, 7.0, 15.0):
        q = p.replace(G=G)
        for br in equilibria_heaviside(G, q):
            if br.label in ("eq1", "eq3") or (br.label == "eq4" and G > critical_gs(q).G2):
                y1, y2, y3 = br.location
                assert np.allclose(rhs_nondim([y1, 0, y2, 0, y3, 0], q), 0, atol=1e-14)


def test_heaviside_rejects_degenerate(nd):
    c = critical_gs(nd)
    for G in (c.G1, c.G2, c.G3):
        with pytest.raises(ValueError):
            equilibria_heaviside(G, nd)
    with pytest.raises(ValueError):
        equilibria_heaviside(0.0, nd)


def test_smooth_near_heaviside_at_G1(nd):
    eqs = equilibria_smooth(1.0, nd, eps=0.001)
    hv = equilibria_heaviside(1.0, nd)
    assert len(eqs) == len(hv) == 3
    # the saddle sits eps*logit(s3) ~ 3 eps below y03; the others are exponentially close
    for e, b in zip(eqs, hv):
        assert np.max(np.abs(np.array(e.location) - b.location)) < 4e-3
    assert abs(eqs[0].location[0]) < 1e-30 and np.allclose(eqs[2].location, hv[2].location, atol=1e-12)


@pytest.mark.parametrize("G", [0.5, 1.0, 1.3, 1.7, 2.5, 4.0, 6.0, 8.0, 12.0, 18.0, 22.0, 28.0])
def test_smooth_matches_heaviside(nd, G):
    hv = equilibria_heaviside(G, nd)
    sm = equilibria_smooth(G, nd, eps=0.001)
    assert len(sm) == len(hv)
    for e, b in zip(sm, hv):
        assert np.max(np.abs(np.array(e.location) - b.location)) < 1e-2
        assert e.index == b.index


@pytest.mark.parametrize("eps", [0.002, 0.005])
@pytest.mark.parametrize("G", [0.5, 1.0, 1.7, 4.0, 8.0])
def test_smooth_matches_heaviside_order_eps(nd, G, eps):
    # offsets are (eps/a_i)*logit(s) for a saturation level s of the steepest
    # sigmoid; away from G3 (where the small pair folds) |logit| < |ln eps|
    hv = equilibria_heaviside(G, nd)
    sm = equilibria_smooth(G, nd, eps=eps)
    tol = eps / min(nd.a1, nd.a2, nd.a3) * abs(math.log(eps))
    assert len(sm) == len(hv)
    for e, b in zip(sm, hv):
        assert np.max(np.abs(np.array(e.location) - b.location)) < tol
        assert e.index == b.index


def test_smooth_roots_are_fixed_points(nd):
    p = nd.replace(eps=0.01)
    for G in (1.0, 3.0, 8.0):
        for e in equilibria_smooth(G, p):
            assert np.max(np.abs(rhs_nondim(e.state, p.replace(G=G)))) < 1e-12


def test_seeded_newton(nd):
    full = equilibria_smooth(3.0, nd, eps=0.005)
    seeded = equilibria_smooth(3.0, nd, eps=0.005, seeds=[e.state[0] * 1.001 + 1e-6 for e in full[1:]])
    assert len(seeded) >= 1
    for e in seeded:
        assert min(abs(e.state[0] - f.state[0]) for f in full) < 1e-10


def test_small_equilibrium_scaling(nd):
    # y1 of the stable small root behaves like exp(-y01/eps)
    eps = np.array([0.004, 0.005, 0.0067, 0.01])
    y = np.array([equilibria_smooth(1.0, nd, eps=e)[0].state[0] for e in eps])
    slope = np.polyfit(1 / eps, np.log(y), 1)[0]
    assert slope == pytest.approx(-nd.y01, rel=0.1)


def test_hopf_smooth_near_G1(nd):
    Gh = hopf_point_smooth(nd, 1.38, 1.58, eps=0.001)
    assert abs(Gh - critical_gs(nd).G1) < 0.05


def test_snic_trend(nd_formula):
    g = [snic_fold(nd_formula, eps=e) for e in (0.024, 0.015, 0.01)]
    assert abs(g[0] - 3.0) <= 0.3
    assert g[0] > g[1] > g[2]


def test_snic_is_a_fold(nd_formula):
    G, y = snic_fold(nd_formula, eps=0.024, full_output=True)
    p = nd_formula.replace(eps=0.024, G=G)
    assert abs(reduced_residual(y, p)) < 1e-12
    assert fold_test_function(y, G, nd_formula, 0.024) < 1e-6
    # just past the fold the pair exists, with Jacobian determinants of opposite sign
    q = p.replace(G=G * 1.01)
    small = [e for e in equilibria_smooth(q.G, q) if e.state[0] < 0.5 * (q.y02 + q.y03)]
    assert len(small) == 2
    dets = [np.linalg.det(jacobian_nondim(e.state, q)) for e in small]
    assert dets[0] * dets[1] < 0
    below = p.replace(G=G * 0.99)
    assert len([e for e in equilibria_smooth(below.G, below) if e.state[0] < 0.5 * (q.y02 + q.y03)]) == 0


def test_no_fold_for_tiny_eps(nd):
    with pytest.raises(NoFold):
        snic_fold(nd, eps=0.0015)
    with pytest.raises(ValueError):
        snic_fold(nd, eps=0.0)


def test_small_threshold_bounds():
    b1, b3 = small_threshold_bounds(2.0, 3.36, 3.36)
    assert b1 == pytest.approx(1 / (1 + math.exp(4.36)))
    assert b1 == pytest.approx(0.0126, abs=1e-4)
    rep_a = small_threshold_check(NondimParams(G=2.0), 0.024, 3.36, 3.36)
    rep_b = small_threshold_check(NondimParams(G=2.0), 0.005, 3.36, 3.36)
    assert rep_a.y1_bound == rep_b.y1_bound and rep_a.y3_bound == rep_b.y3_bound
    assert rep_b.ok and rep_b.equilibria
    assert all(e.state[0] >= rep_b.y1_bound for e in rep_b.equilibria)
