"""CSV writing and optional SVG line plots.

CSV files carry a ``#`` header with the toolkit version and the parameter
snapshot; floats use 17 significant digits so runs diff byte-for-byte.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from . import __version__
from .params import params_to_dict


def fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool,)):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def header_lines(command: str, params=None, extra: dict | None = None) -> list[str]:
    lines = [f"# jrlimit {__version__}", f"# command: {command}"]
    if params is not None:
        snapshot = params if isinstance(params, dict) else params_to_dict(params)
        lines.append("# params: " + json.dumps(snapshot, sort_keys=True))
    for k, v in (extra or {}).items():
        lines.append(f"# {k}: {fmt(v) if not isinstance(v, (list, dict)) else json.dumps(v)}")
    return lines


def write_csv(path, columns, rows, header=(), footer=()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for line in header:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
        for line in footer:
            fh.write(line + "\n")
    return path


def line_plot(path, series, xlabel="", ylabel="", title="", markers=(), hlines=()):
    """Static SVG of ``series`` = [(x, y, label), ...].

    ``markers`` are (x, y, label) points drawn as stars.  Output is
    reproducible: no timestamp and a fixed id salt.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "jrlimit", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        for x, y, label in series:
            ax.plot(x, y, lw=1.2, label=label)
        for y, label in hlines:
            ax.axhline(y, color="0.6", lw=0.8, ls="--", label=label)
        for x, y, label in markers:
            ax.plot([x], [y], marker="*", ms=12, color="k", ls="none", label=label)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if any(lbl for *_, lbl in series) or markers or hlines:
            ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return Path(path)


def heatmap(path, x, y, z, xlabel="", ylabel="", title="", curves=()):
    """Frequency map with optional overlaid curves [(x, y, label), ...]."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    with matplotlib.rc_context({"svg.hashsalt": "jrlimit", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        mesh = ax.pcolormesh(x, y, np.ma.masked_invalid(z), shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="frequency (Hz)")
        for cx, cy, label in curves:
            ax.plot(cx, cy, lw=1.5, label=label)
        ax.set_xlim(min(x), max(x))
        ax.set_ylim(min(y), max(y))
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if curves:
            ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return Path(path)
