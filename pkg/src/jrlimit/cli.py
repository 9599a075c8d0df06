"""Command-line interface.

Every command writes CSV as its primary output; ``--svg`` adds a derived
plot.  Exit status: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bifurcation import (critical_gs, equilibria_heaviside, equilibria_smooth, hopf_curve,
                          snic_fold)
from .errors import JRLimitError
from .grazing import GrazingCurve, continue_grazing, find_grazing_1d, polish_grazing_point
from .orbit import grazing_residual, make_orbit, reconstruct, solve_orbit_seeded
from .output import fmt, header_lines, heatmap, line_plot, write_csv
from .params import STATE_LABELS, DimensionalParams, NondimParams, load_params, nondimensionalize
from .sim import (DEFAULT_DT, DEFAULT_T_END, classify_safe, hysteresis_probe, integrate,
                  integrate_events, scan, standard_state)

REPORT_COLUMNS = ("bstar", "G", "regime", "freq_hz", "amplitude", "y1_floor")
CURVE_COLUMNS = ("bstar", "G", "ts2_off", "ts1_on", "ts2_on", "T", "t1_min")


class ConfigError(Exception):
    pass


class NumericalError(Exception):
    def __init__(self, where: str, exc: Exception):
        super().__init__(f"{where}: {type(exc).__name__}: {exc}")


def _run(where, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except JRLimitError as exc:
        raise NumericalError(where, exc) from exc


def _load(args) -> tuple[DimensionalParams, NondimParams]:
    if getattr(args, "params", None) is None:
        return DimensionalParams(), NondimParams()
    path = Path(args.params)
    if not path.exists():
        raise ConfigError(f"parameter file {path} not found")
    try:
        return load_params(path)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad parameter file {path}: {exc}") from exc


def _load_nd(args) -> tuple[DimensionalParams, NondimParams]:
    """As _load, but ``--from-dimensional`` replaces the dimensionless set by
    the conversion of the dimensional one (G and b* keep their values)."""
    dim, nd = _load(args)
    if getattr(args, "from_dimensional", False):
        nd = nondimensionalize(dim).replace(G=nd.G, bstar=nd.bstar)
    return dim, nd


def _nondim(args, nd: NondimParams) -> NondimParams:
    updates = {k: getattr(args, k) for k in ("bstar", "G", "eps") if getattr(args, k, None) is not None}
    return nd.replace(**updates) if updates else nd


def _out(args, default: str) -> Path:
    out = Path(args.out) if getattr(args, "out", None) else Path(default)
    if getattr(args, "out_dir", None):
        out = Path(args.out_dir) / out
    return out


def report_row(bstar, G, rep) -> tuple:
    return (bstar, G, rep.regime, rep.freq_hz, rep.amplitude, rep.y1_floor)


# -- nondim --------------------------------------------------------------------------

def cmd_nondim(args) -> int:
    dim, _ = _load(args)
    if args.A is not None:
        dim = dim.replace(A=args.A)
    nd = nondimensionalize(dim)
    c = critical_gs(nd)
    for k, v in list(vars(nd).items()) + list(vars(c).items()):
        print(f"{k} = {v:.6g}")
    return 0


# -- simulate ------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    dim, nd = _load_nd(args)
    dimensional = args.dimensional or args.A is not None
    if args.t_end is not None and args.t_end < 0:
        raise ConfigError("--t-end must be non-negative")
    if dimensional:
        params = dim.replace(A=args.A) if args.A is not None else dim
        ndp = nondimensionalize(params)
        t_end = 8.0 if args.t_end is None else args.t_end
        dt = 1e-4 if args.dt is None else args.dt
    else:
        params = ndp = _nondim(args, nd)
        t_end = DEFAULT_T_END if args.t_end is None else args.t_end
        dt = DEFAULT_DT if args.dt is None else args.dt
    if not dt > 0:
        raise ConfigError("--dt must be positive")
    out = _out(args, "trajectory.csv")
    head = header_lines("simulate", params, {"dimensional": int(dimensional), "t_end": t_end, "dt": dt})
    columns = ("t",) + STATE_LABELS
    if t_end == 0:
        write_csv(out, columns, [], head)
        return 0
    if not dimensional and params.eps == 0:
        traj, _ = _run("integrate_events", integrate_events, params, standard_state(params), t_end, dt)
    else:
        traj = _run("integrate", integrate, params, None, t_end, dt)
    rep = classify_safe(traj)
    rows = np.column_stack([traj.times, traj.states])
    footer = ["# report: " + ",".join(REPORT_COLUMNS),
              "# " + ",".join(_fmt_row(report_row(ndp.bstar, ndp.G, rep)))]
    write_csv(out, columns, rows, head, footer)
    if args.svg:
        unit = "t (s)" if dimensional else "t"
        line_plot(out.with_suffix(".svg"),
                  [(traj.times, traj.states[:, 0], "y1"), (traj.times, traj.states[:, 2], "y2"),
                   (traj.times, traj.states[:, 4], "y3")],
                  xlabel=unit, ylabel="potential",
                  title=f"{rep.regime}, {rep.freq_hz:.3g} Hz")
    print(f"{rep.regime} freq_hz={rep.freq_hz:.6g} amplitude={rep.amplitude:.6g} y1_floor={rep.y1_floor:.6g}")
    return 0


def _fmt_row(row):
    return [fmt(v) for v in row]


# -- orbit ---------------------------------------------------------------------------

def cmd_orbit(args) -> int:
    _, nd = _load_nd(args)
    p = _nondim(args, nd)
    times = _run("solve_orbit", solve_orbit_seeded, p)
    orbit = _run("orbit_minimum", make_orbit, times, p)
    res = orbit.y1_min - p.y03
    out = _out(args, "orbit.csv")
    head = header_lines("orbit", p)
    write_csv(out, ("bstar", "G", "ts2_off", "ts1_on", "ts2_on", "T", "t1_min", "y1_min",
                    "grazing_residual", "freq_hz"),
              [(p.bstar, p.G, *times.as_array(), orbit.t1_min, orbit.y1_min, res, orbit.freq_hz())],
              head)
    t = np.linspace(0.0, times.T, args.samples + 1)
    t = np.sort(np.append(t, orbit.t1_min))
    x = reconstruct(times, p, t)
    mark = (t == orbit.t1_min).astype(int)
    profile = out.with_name(out.stem + "_profile.csv")
    write_csv(profile, ("t",) + STATE_LABELS + ("mark",), np.column_stack([t, x, mark]), head)
    if args.svg:
        star = [(orbit.t1_min, orbit.y1_min, "y1 minimum")] if abs(res) < 1e-2 else []
        line_plot(out.with_suffix(".svg"), [(t, x[:, 0], "y1"), (t, x[:, 2], "y2")],
                  xlabel="t", ylabel="potential", markers=star,
                  hlines=[(p.y02, "y02"), (p.y03, "y03")],
                  title=f"b* = {p.bstar:g}, G = {p.G:g}")
    print(f"T={times.T:.12g} y1_min={orbit.y1_min:.12g} residual={res:.3g}")
    return 0


# -- graze ---------------------------------------------------------------------------

def _curve_rows(curve: GrazingCurve):
    return [(s.bstar, s.G, *s.times.as_array(), s.t1_min) for s in curve.samples]


def _trace(p: NondimParams, args) -> GrazingCurve:
    box = ((args.bstar_min, args.bstar_max), (args.G_min, args.G_max))
    if args.seed is not None:
        b0, g0 = args.seed
        ps = p.replace(bstar=b0, G=g0)
        times = _run("solve_orbit", solve_orbit_seeded, ps)
        r = _run("orbit_minimum", grazing_residual, times, ps)
        if abs(r) > 1e-3:
            raise ConfigError(f"seed ({b0}, {g0}) is not a grazing point (y1_min - y03 = {r:.3g})")
        seed = _run("polish_grazing_point", polish_grazing_point, b0, g0, times, p)
    else:
        b, orbit = _run("find_grazing_1d", find_grazing_1d, args.G, args.bstar_start, p)
        seed = _run("polish_grazing_point", polish_grazing_point, b, args.G, orbit.times, p, orbit.t1_min)
    return _run("continue_grazing", continue_grazing, seed, p, step=args.step, box=box)


def cmd_graze(args) -> int:
    _, nd = _load_nd(args)
    p = nd
    if args.find == args.trace:
        raise ConfigError("choose exactly one of --find or --trace")
    if args.find:
        b, orbit = _run("find_grazing_1d", find_grazing_1d, args.G, args.bstar_start, p)
        out = _out(args, "graze_point.csv")
        write_csv(out, CURVE_COLUMNS + ("y1_min",),
                  [(b, args.G, *orbit.times.as_array(), orbit.t1_min, orbit.y1_min)],
                  header_lines("graze --find", p.replace(G=args.G, bstar=b)))
        print(f"bstar={b:.10g} G={args.G:g}")
        return 0
    curve = _trace(p, args)
    out = _out(args, "grazing_curve.csv")
    write_csv(out, CURVE_COLUMNS, _curve_rows(curve),
              header_lines("graze --trace", p, {"ends": list(curve.end_reasons)}))
    if args.svg:
        line_plot(out.with_suffix(".svg"), [(curve.bstar, curve.G, "grazing")],
                  xlabel="b*", ylabel="G")
    print(f"{len(curve.samples)} samples, b* in [{curve.bstar.min():.4g}, {curve.bstar.max():.4g}]")
    return 0


# -- scan ----------------------------------------------------------------------------

def cmd_scan(args) -> int:
    _, nd = _load_nd(args)
    p = nd.replace(eps=args.eps) if args.eps is not None else nd
    if args.nb < 1 or args.nG < 1:
        raise ConfigError("grid sizes must be positive")
    B = np.linspace(args.bstar_min, args.bstar_max, args.nb)
    G = np.linspace(args.G_min, args.G_max, args.nG)
    t0 = time.perf_counter()
    cells = scan(B, G, p.eps, p, workers=args.workers, t_end=args.t_end, dt=args.dt)
    out = _out(args, "scan.csv")
    head = header_lines("scan", p, {"t_end": args.t_end, "dt": args.dt})
    write_csv(out, REPORT_COLUMNS, [report_row(c.bstar, c.G, c.report) for c in cells], head)
    curves = []
    if args.overlay:
        hc = hopf_curve(B, p)
        write_csv(out.with_name(out.stem + "_hopf.csv"), ("bstar", "G"), hc, head)
        curves.append((hc[:, 0], hc[:, 1], "Hopf"))
        try:
            gargs = argparse.Namespace(seed=None, G=1.7, bstar_start=0.5, step=0.01,
                                       bstar_min=args.bstar_min - 0.01, bstar_max=args.bstar_max + 0.01,
                                       G_min=0.05, G_max=max(args.G_max, 3.5))
            gc = _trace(p, gargs)
            write_csv(out.with_name(out.stem + "_grazing.csv"), CURVE_COLUMNS, _curve_rows(gc), head)
            curves.append((gc.bstar, gc.G, "grazing"))
        except NumericalError as exc:
            print(f"warning: grazing overlay skipped ({exc})", file=sys.stderr)
        rows = []
        for e in (0.024, 0.015, 0.01):
            try:
                rows.append((e, snic_fold(p, eps=e)))
            except JRLimitError as exc:
                print(f"warning: no SNIC at eps={e} ({exc})", file=sys.stderr)
        write_csv(out.with_name(out.stem + "_snic.csv"), ("eps", "G"), rows, head)
        for e, g in rows:
            curves.append((B, np.full_like(B, g), f"SNIC eps={e:g}"))
    if args.svg:
        z = np.array([c.report.freq_hz if c.report.regime in ("alpha", "delta") else np.nan
                      for c in cells]).reshape(len(B), len(G)).T
        heatmap(out.with_suffix(".svg"), B, G, z, xlabel="b*", ylabel="G", curves=curves)
    print(f"{len(cells)} cells in {time.perf_counter() - t0:.1f} s")
    return 0


# -- equilibria ----------------------------------------------------------------------

def cmd_equilibria(args) -> int:
    _, nd = _load_nd(args)
    p = _nondim(args, nd)
    c = critical_gs(p)
    critical = (c.G1, c.G2, min(c.G3, c.G4))
    rows = []
    prev_index = None
    for G in np.linspace(args.G_min, args.G_max, args.n):
        if any(math.isclose(G, v, rel_tol=1e-12) for v in critical):
            continue
        for br in equilibria_heaviside(G, p):
            rows.append((G, "heaviside", br.label, *br.location, br.index, math.nan, ""))
        if args.eps is not None:
            eqs = _run("equilibria_smooth", equilibria_smooth, G, p, eps=args.eps)
            for k, e in enumerate(eqs):
                flag = ""
                if k == len(eqs) - 1:
                    ev = e.eigenvalues
                    lead = ev[np.argmax(ev.real)]
                    if prev_index is not None and (prev_index == 0) != (e.index == 0) and lead.imag != 0:
                        flag = "HB"
                    prev_index = e.index
                rows.append((G, "smooth", f"s{k}", *e.location, e.index, e.leading_real, flag))
    if args.fold:
        if args.eps is None:
            raise ConfigError("--fold needs --eps")
        Gf, yf = _run("snic_fold", snic_fold, p, eps=args.eps, full_output=True)
        rows.append((Gf, "fold", "SNIC", yf, math.nan, math.nan, 1, 0.0, "SNIC"))
        print(f"G_SNIC = {Gf:.6g}")
    out = _out(args, "equilibria.csv")
    write_csv(out, ("G", "source", "label", "y1", "y2", "y3", "index", "max_real", "flag"), rows,
              header_lines("equilibria", p, {"eps": args.eps if args.eps is not None else math.nan}))
    for r in rows:
        if r[-1] == "HB":
            print(f"HB near G = {r[0]:.6g}")
    if args.svg:
        series = []
        for src in ("heaviside", "smooth"):
            for lbl in sorted({r[2] for r in rows if r[1] == src}):
                pts = np.array([(r[0], r[3]) for r in rows if r[1] == src and r[2] == lbl])
                series.append((pts[:, 0], pts[:, 1], f"{src} {lbl}"))
        line_plot(out.with_suffix(".svg"), series, xlabel="G", ylabel="y1")
    return 0


# -- repro ---------------------------------------------------------------------------

def cmd_repro(args) -> int:
    stamp = time.strftime("%Y%m%d-%H%M%S")
    root = Path(args.out_dir or f"repro-{stamp}")
    root.mkdir(parents=True, exist_ok=True)
    base = dict(params=args.params, out_dir=str(root), svg=True, bstar=None, G=None, eps=None)
    ns = argparse.Namespace

    step = 0.25 if args.quick else 0.05
    dim, _ = _load(args)
    values = np.round(np.arange(9.5, 11.0 + 1e-9, step), 10)
    sweep = _run("hysteresis_probe", hysteresis_probe, dim, values, name="A")
    write_csv(root / "fig2_sweep.csv", ("A", "regime_up", "freq_up", "regime_down", "freq_down"),
              [(v, u.regime, u.freq_hz, d.regime, d.freq_hz) for v, u, d in zip(values, sweep.up, sweep.down)],
              header_lines("repro sweep", dim, {"transition_up": sweep.transition_up,
                                                "transition_down": sweep.transition_down}))
    for A in (10.0, 11.0):
        cmd_simulate(ns(**{**base, "dimensional": True, "A": A, "t_end": None, "dt": None,
                           "out": f"fig2_A{A:g}.csv"}))
    for b, G in ((0.5, 1.7), (0.44, 1.7)):
        cmd_orbit(ns(**{**base, "bstar": b, "G": G, "samples": 1000, "out": f"fig4_orbit_{b:g}_{G:g}.csv"}))
    for b, G in ((0.4, 1.4), (0.4, 1.6)):
        cmd_simulate(ns(**{**base, "dimensional": False, "A": None, "bstar": b, "G": G, "eps": 0.024,
                           "t_end": 500.0, "dt": None, "out": f"fig5_sim_{b:g}_{G:g}.csv"}))
    n = 12 if args.quick else 40
    cmd_scan(ns(**{**base, "eps": 0.024, "bstar_min": 0.2, "bstar_max": 0.5, "nb": n,
                   "G_min": 0.5, "G_max": 3.5, "nG": n, "workers": args.workers,
                   "t_end": DEFAULT_T_END, "dt": DEFAULT_DT, "overlay": True, "out": "fig5_scan.csv"}))
    cmd_equilibria(ns(**{**base, "G_min": 0.1, "G_max": 30.0, "n": 300, "eps": 0.001, "fold": False,
                         "out": "table3_equilibria.csv"}))
    print(f"outputs in {root}")
    return 0


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jrlimit", description="Jansen-Rit steep-sigmoid toolkit")
    ap.add_argument("--version", action="version", version=f"jrlimit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("--params", help="parameter JSON file")
        if out:
            sp.add_argument("--from-dimensional", action="store_true",
                            help="derive eps, thresholds and ratios from the dimensional set")
            sp.add_argument("--out", help="output CSV path")
            sp.add_argument("--out-dir", help="directory for outputs")
            sp.add_argument("--svg", action="store_true", help="also write an SVG plot")

    def nd_flags(sp):
        sp.add_argument("--bstar", type=float)
        sp.add_argument("--G", type=float)
        sp.add_argument("--eps", type=float)

    sp = sub.add_parser("nondim", help="convert dimensional parameters")
    common(sp, out=False)
    sp.add_argument("--A", type=float)
    sp.set_defaults(func=cmd_nondim)

    sp = sub.add_parser("simulate", help="integrate one trajectory")
    common(sp)
    nd_flags(sp)
    sp.add_argument("--dimensional", action="store_true")
    sp.add_argument("--A", type=float, help="dimensional run at this A")
    sp.add_argument("--t-end", type=float)
    sp.add_argument("--dt", type=float)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("orbit", help="solve the piecewise alpha orbit")
    common(sp)
    nd_flags(sp)
    sp.add_argument("--samples", type=int, default=1000)
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("graze", help="grazing point or curve")
    common(sp)
    sp.add_argument("--find", action="store_true")
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--G", type=float, default=1.7)
    sp.add_argument("--bstar-start", type=float, default=0.5)
    sp.add_argument("--seed", type=float, nargs=2, metavar=("BSTAR", "G"))
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--bstar-min", type=float, default=0.2)
    sp.add_argument("--bstar-max", type=float, default=0.5)
    sp.add_argument("--G-min", type=float, default=0.5)
    sp.add_argument("--G-max", type=float, default=3.5)
    sp.set_defaults(func=cmd_graze)

    sp = sub.add_parser("scan", help="classify a (b*, G) grid")
    common(sp)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--bstar-min", type=float, default=0.2)
    sp.add_argument("--bstar-max", type=float, default=0.5)
    sp.add_argument("--nb", type=int, default=40)
    sp.add_argument("--G-min", type=float, default=0.5)
    sp.add_argument("--G-max", type=float, default=3.5)
    sp.add_argument("--nG", type=int, default=40)
    sp.add_argument("--t-end", type=float, default=DEFAULT_T_END)
    sp.add_argument("--dt", type=float, default=DEFAULT_DT)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--overlay", action="store_true", help="write Hopf, grazing and SNIC curves")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("equilibria", help="equilibrium branches over G")
    common(sp)
    sp.add_argument("--bstar", type=float)
    sp.add_argument("--G-min", type=float, default=0.1)
    sp.add_argument("--G-max", type=float, default=30.0)
    sp.add_argument("--n", type=int, default=300)
    sp.add_argument("--eps", type=float, help="also refine smooth equilibria at this eps")
    sp.add_argument("--fold", action="store_true", help="locate the small-activity fold")
    sp.set_defaults(func=cmd_equilibria)

    sp = sub.add_parser("repro", help="regenerate all figure data")
    sp.add_argument("--params")
    sp.add_argument("--out-dir")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--quick", action="store_true", help="coarse grids")
    sp.set_defaults(func=cmd_repro)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, json.JSONDecodeError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure in {exc}", file=sys.stderr)
        return 3
    except JRLimitError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
