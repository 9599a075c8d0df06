import json

import numpy as np
import pytest

from jrlimit import __version__
from jrlimit.cli import main


def _data(path):
    lines = path.read_text().splitlines()
    body = [l for l in lines if not l.startswith("#")]
    return body[0].split(","), [l.split(",") for l in body[1:]]


def _footer(path):
    return [l[2:] for l in path.read_text().splitlines() if l.startswith("# ")][-1]


def test_nondim(capsys):
    assert main(["nondim"]) == 0
    out = capsys.readouterr().out
    assert "eps = 0.02405" in out and "G1 = 1.48" in out


def test_nondim_equal_amplitudes(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"dimensional": {"A": 22.0, "B": 22.0}}))
    assert main(["nondim", "--params", str(f)]) == 0
    assert "G = 1\n" in capsys.readouterr().out


def test_config_errors(tmp_path, capsys):
    assert main(["simulate", "--params", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["nondim", "--params", str(bad)]) == 2
    bad.write_text(json.dumps({"nondimensional": {"G": -1}}))
    assert main(["orbit", "--params", str(bad)]) == 2
    assert main(["simulate", "--t-end", "-1", "--out", str(tmp_path / "x.csv")]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--bogus"])
    assert exc.value.code == 2


def test_numerical_failure_exit_code(tmp_path, capsys):
    # below the Hopf value there is no oscillation to seed an orbit from
    assert main(["orbit", "--bstar", "0.5", "--G", "1.0", "--out", str(tmp_path / "o.csv")]) == 3
    assert "solve_orbit" in capsys.readouterr().err
    assert not (tmp_path / "o.csv").exists()


def test_simulate_header_only(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["simulate", "--t-end", "0", "--out", str(out)]) == 0
    cols, rows = _data(out)
    assert cols == ["t", "y1", "dy1", "y2", "dy2", "y3", "dy3"] and rows == []
    text = out.read_text()
    assert f"# jrlimit {__version__}" in text and "# params: " in text


@pytest.mark.parametrize("A, regime", [(11, "alpha"), (10, "delta")])
def test_simulate_dimensional(tmp_path, A, regime):
    out = tmp_path / "t.csv"
    assert main(["simulate", "--A", str(A), "--out", str(out)]) == 0
    rep = _footer(out).split(",")
    assert rep[2] == regime
    f = float(rep[3])
    assert (8 <= f <= 12) if regime == "alpha" else (f <= 4)


def test_orbit_outputs(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["orbit", "--bstar", "0.5", "--G", "1.7", "--out", str(a)]) == 0
    assert main(["orbit", "--bstar", "0.5", "--G", "1.7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    cols, rows = _data(a)
    rec = dict(zip(cols, rows[0]))
    assert float(rec["y1_min"]) > 0.08 and float(rec["grazing_residual"]) > 0
    assert (tmp_path / "a_profile.csv").exists()


def test_orbit_near_grazing(tmp_path):
    out = tmp_path / "g.csv"
    assert main(["orbit", "--bstar", "0.44", "--G", "1.7", "--out", str(out), "--svg"]) == 0
    cols, rows = _data(out)
    rec = dict(zip(cols, rows[0]))
    assert abs(float(rec["grazing_residual"])) < 1e-2
    pcols, prow = _data(tmp_path / "g_profile.csv")
    marked = [r for r in prow if r[-1] == "1"]
    assert len(marked) == 1 and float(marked[0][1]) == pytest.approx(float(rec["y1_min"]), abs=1e-12)
    assert out.with_suffix(".svg").read_text().lstrip().startswith("<?xml")


def test_graze_find_and_trace(tmp_path, capsys):
    assert main(["graze", "--find", "--G", "1.7", "--out", str(tmp_path / "p.csv")]) == 0
    cols, rows = _data(tmp_path / "p.csv")
    assert abs(float(rows[0][0]) - 0.44) <= 0.01
    out = tmp_path / "c.csv"
    assert main(["graze", "--trace", "--out", str(out)]) == 0
    cols, rows = _data(out)
    assert cols == ["bstar", "G", "ts2_off", "ts1_on", "ts2_on", "T", "t1_min"]
    b = np.array([float(r[0]) for r in rows])
    g = np.array([float(r[1]) for r in rows])
    assert np.all(np.diff(b) > 0) and np.all(np.diff(g) > 0)


def test_graze_bad_seed(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert main(["graze", "--trace", "--seed", "0.5", "1.7", "--out", str(out)]) == 2
    assert not out.exists()
    assert main(["graze", "--out", str(out)]) == 2


def test_scan_single_cell_matches_simulate(tmp_path):
    s, t = tmp_path / "s.csv", tmp_path / "t.csv"
    assert main(["scan", "--nb", "1", "--nG", "1", "--bstar-min", "0.4", "--bstar-max", "0.4",
                 "--G-min", "1.4", "--G-max", "1.4", "--out", str(s)]) == 0
    assert main(["simulate", "--bstar", "0.4", "--G", "1.4", "--out", str(t)]) == 0
    _, rows = _data(s)
    assert ",".join(rows[0]) == _footer(t)


def test_scan_worker_determinism(tmp_path):
    args = ["scan", "--nb", "3", "--nG", "3", "--G-min", "1.2", "--G-max", "2.0", "--t-end", "300"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--workers", "1", "--out", str(a)]) == 0
    assert main(args + ["--workers", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_scan_overlay_and_svg(tmp_path):
    out = tmp_path / "s.csv"
    args = ["scan", "--nb", "2", "--nG", "2", "--t-end", "200", "--overlay", "--out", str(out)]
    assert main(args) == 0
    plain = out.read_bytes()
    for suffix in ("hopf", "grazing", "snic"):
        assert (tmp_path / f"s_{suffix}.csv").exists()
    assert main(args + ["--svg"]) == 0
    assert out.read_bytes() == plain
    svg1 = out.with_suffix(".svg").read_bytes()
    assert main(args + ["--svg"]) == 0
    assert out.with_suffix(".svg").read_bytes() == svg1


def test_equilibria_table(tmp_path):
    out = tmp_path / "e.csv"
    assert main(["equilibria", "--G-min", "0.1", "--G-max", "30", "--n", "300", "--out", str(out)]) == 0
    cols, rows = _data(out)
    eq3 = [float(r[0]) for r in rows if r[2] == "eq3"]
    eq4 = [float(r[0]) for r in rows if r[2] == "eq4"]
    eq2 = [float(r[0]) for r in rows if r[2] == "eq2"]
    assert max(eq3) < 1.4815 < min(eq4)
    assert max(eq4) < 20.0 and max(eq2) < 20.0
    assert len([r for r in rows if float(r[0]) > 20.0 and r[2] != "eq1"]) == 0


def test_equilibria_hopf_flag(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert main(["equilibria", "--eps", "0.001", "--G-min", "1.3", "--G-max", "1.7", "--n", "41",
                 "--out", str(out)]) == 0
    _, rows = _data(out)
    hb = [float(r[0]) for r in rows if r[-1] == "HB"]
    assert len(hb) == 1 and abs(hb[0] - 1.48) < 0.05


def test_equilibria_fold(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert main(["equilibria", "--eps", "0.024", "--fold", "--from-dimensional", "--n", "3",
                 "--out", str(out)]) == 0
    _, rows = _data(out)
    g = [float(r[0]) for r in rows if r[2] == "SNIC"]
    assert len(g) == 1 and abs(g[0] - 3.0) <= 0.3
    assert main(["equilibria", "--fold", "--out", str(out)]) == 2
