import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jrlimit.model import rhs_dim, rhs_nondim
from jrlimit.params import (DimensionalParams, NondimParams, load_params, nondimensionalize,
                            params_to_dict, scale_state)


def test_eps_from_table_values():
    # 2a / (B r C1 2 e0) evaluated by hand
    expected = 2 * 100 / (22 * 0.56 * 135 * 5.0)
    nd = nondimensionalize(DimensionalParams())
    assert nd.eps == pytest.approx(expected, rel=1e-15)
    assert abs(nd.eps - 0.024) < 5e-4


def test_thresholds_and_ratios():
    nd = nondimensionalize(DimensionalParams())
    assert nd.y01 == pytest.approx(0.56 * 6 * nd.eps)
    assert nd.y03 == pytest.approx(nd.y01)
    assert nd.y02 == pytest.approx(4 * nd.y01)
    assert nd.y01 == pytest.approx(0.0808, abs=1e-4)
    assert nd.y02 == pytest.approx(0.323, abs=1e-3)
    assert nd.G == pytest.approx(22 / 3.25)
    assert nd.bstar == pytest.approx(0.5)
    assert (nd.a1, nd.a2, nd.a3) == (1.0, 0.25, 1.0)
    assert (nd.alpha2, nd.alpha4) == pytest.approx((0.8, 0.25))


def test_equal_amplitudes_give_unit_G():
    assert nondimensionalize(DimensionalParams(A=22.0, B=22.0)).G == 1.0


def test_input_scaling():
    d = DimensionalParams(p=120.0)
    nd = nondimensionalize(d)
    assert nd.P == pytest.approx(nd.eps * d.B * d.r * 120.0 / d.a)


def test_rejects_non_positive():
    with pytest.raises(ValueError):
        DimensionalParams(B=0.0)
    with pytest.raises(ValueError):
        NondimParams(eps=-1e-3)
    with pytest.raises(ValueError):
        NondimParams(G=0.0)


def test_from_ratios():
    d = DimensionalParams.from_ratios(C=135.0, alpha2=0.8, alpha3=0.25, alpha4=0.25)
    assert (d.C2, d.C3, d.C4) == pytest.approx((108.0, 33.75, 33.75))


def test_zero_state_maps_to_zero():
    assert np.all(scale_state(np.zeros(6), DimensionalParams()) == 0)


@given(st.lists(st.floats(-50, 50), min_size=6, max_size=6))
def test_scale_round_trip(x):
    d = DimensionalParams()
    x = np.array(x)
    back = scale_state(scale_state(x, d, "to_nondim"), d, "to_dim")
    assert np.allclose(back, x, rtol=1e-14, atol=1e-12)


@settings(max_examples=200)
@given(st.lists(st.floats(-30, 30), min_size=6, max_size=6),
       st.floats(5.0, 20.0), st.floats(10.0, 40.0), st.floats(20.0, 80.0))
def test_vector_field_conjugacy(x, A, B, b):
    d = DimensionalParams(A=A, B=B, b=b)
    nd = nondimensionalize(d)
    x = np.array(x)
    lhs = rhs_nondim(scale_state(x, d), nd)
    rhs = scale_state(rhs_dim(x, d), d) / d.a
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * np.max(np.abs(rhs)) + 1e-12)


def test_load_params(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"dimensional": {"A": 11}, "nondimensional": {"G": 1.7, "bstar": 0.44}}))
    d, nd = load_params(path)
    assert d.A == 11.0 and d.B == 22.0
    assert nd.G == 1.7 and nd.bstar == 0.44 and nd.y02 == 0.3


def test_load_params_defaults_and_errors(tmp_path):
    path = tmp_path / "p.json"
    path.write_text("{}")
    assert load_params(path) == (DimensionalParams(), NondimParams())
    path.write_text(json.dumps({"dimensional": {"Q": 1}}))
    with pytest.raises(ValueError):
        load_params(path)
    path.write_text("[1, 2]")
    with pytest.raises(ValueError):
        load_params(path)


def test_params_snapshot_round_trip():
    nd = NondimParams(G=1.3)
    assert NondimParams(**params_to_dict(nd)) == nd
    assert math.isclose(nd.y3_eq, 1.6 / 1.3)
