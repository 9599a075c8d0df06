"""Parameter sets of the Jansen-Rit column and the map between them.

State vectors throughout the package are length-6 numpy arrays ordered as
``(y1, dy1, y2, dy2, y3, dy3)``: pyramidal, inhibitory-interneuron and
excitatory-interneuron potentials, each followed by its time derivative.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

STATE_LABELS = ("y1", "dy1", "y2", "dy2", "y3", "dy3")


@dataclass(frozen=True)
class DimensionalParams:
    """Physical parameters (mV, 1/s).  Defaults are the classic column values."""

    A: float = 3.25
    B: float = 22.0
    a: float = 100.0
    b: float = 50.0
    C1: float = 135.0
    C2: float = 108.0
    C3: float = 33.75
    C4: float = 33.75
    e0: float = 2.5
    y0: float = 6.0
    r: float = 0.56
    p: float = 0.0

    def __post_init__(self):
        for name in ("A", "B", "a", "b", "C1", "e0", "r"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def from_ratios(cls, C: float = 135.0, alpha1: float = 1.0, alpha2: float = 0.8,
                    alpha3: float = 0.25, alpha4: float = 0.25, **kw) -> "DimensionalParams":
        C1 = C * alpha1
        return cls(C1=C1, C2=alpha2 * C1, C3=alpha3 * C1, C4=alpha4 * C1, **kw)

    def replace(self, **changes) -> "DimensionalParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class NondimParams:
    """Dimensionless parameters.

    ``eps == 0`` selects the Heaviside limit.  Thresholds are free fields; the
    defaults are the rounded table values (0.08, 0.3, 0.08), while
    :func:`nondimensionalize` yields the unrounded ones.
    """

    eps: float = 0.024
    G: float = 2.0
    bstar: float = 0.5
    y01: float = 0.08
    y02: float = 0.3
    y03: float = 0.08
    alpha2: float = 0.8
    alpha4: float = 0.25
    a1: float = 1.0
    a2: float = 0.25
    a3: float = 1.0
    P: float = 0.0

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError("eps must be non-negative")
        if not (self.G > 0 and self.bstar > 0):
            raise ValueError("G and bstar must be positive")

    def replace(self, **changes) -> "NondimParams":
        return dataclasses.replace(self, **changes)

    @property
    def y3_eq(self) -> float:
        """Excitatory-interneuron level when fully driven (P = 0)."""
        return 2.0 * self.alpha2 / self.G

    @property
    def y2_threshold(self) -> float:
        """Level of y2 at which the pyramidal drive switches, with y3 at y3_eq."""
        return self.y3_eq - self.y01

    def high_state(self) -> np.ndarray:
        """Heaviside high-activity point (2/G, 0, 2*alpha4/b*, 0, 2*alpha2/G, 0)."""
        return np.array([2.0 / self.G, 0.0, 2.0 * self.alpha4 / self.bstar, 0.0,
                         self.y3_eq, 0.0])

    def as_array(self) -> np.ndarray:
        return np.array([self.eps, self.G, self.bstar, self.y01, self.y02, self.y03,
                         self.alpha2, self.alpha4, self.a1, self.a2, self.a3, self.P])


def nondimensionalize(params: DimensionalParams) -> NondimParams:
    """Map physical parameters to the dimensionless model.

    Time is measured in units of 1/a, and the pyramidal potential is scaled by
    r*C1*eps, the interneuron potentials by r*eps.
    """
    for name in ("B", "r", "C1", "e0", "a"):
        if not getattr(params, name) > 0:
            raise ValueError(f"{name} must be positive")
    eps = 2.0 * params.a / (params.B * params.r * params.C1 * 2.0 * params.e0)
    a1 = 1.0
    a2 = params.C3 / params.C1
    a3 = 1.0
    ry0 = params.r * params.y0
    return NondimParams(
        eps=eps,
        G=params.B / params.A,
        bstar=params.b / params.a,
        y01=ry0 * eps / a1,
        y02=ry0 * eps / a2,
        y03=ry0 * eps / a3,
        alpha2=params.C2 / params.C1,
        alpha4=params.C4 / params.C1,
        a1=a1,
        a2=a2,
        a3=a3,
        P=eps * params.B * params.r * params.p / params.a,
    )


def _state_scales(params: DimensionalParams) -> np.ndarray:
    eps = 2.0 * params.a / (params.B * params.r * params.C1 * 2.0 * params.e0)
    k1 = params.r * params.C1 * eps
    k = params.r * eps
    return np.array([k1, k1 / params.a, k, k / params.a, k, k / params.a])


def scale_state(state, params: DimensionalParams, direction: str = "to_nondim") -> np.ndarray:
    """Convert states between the physical and dimensionless models.

    ``direction`` is ``"to_nondim"`` or ``"to_dim"``.  Works on a single state
    or on an ``(n, 6)`` array of states.
    """
    scales = _state_scales(params)
    state = np.asarray(state, dtype=float)
    if direction == "to_nondim":
        return state * scales
    if direction == "to_dim":
        return state / scales
    raise ValueError(f"unknown direction {direction!r}")


def _build(cls, data):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ValueError(f"{cls.__name__} section must be a JSON object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    return cls(**{k: float(v) for k, v in data.items()})


def load_params(path) -> tuple[DimensionalParams, NondimParams]:
    """Read a parameter JSON file with optional ``dimensional`` and
    ``nondimensional`` objects.  Missing fields take the default values."""
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict):
        raise ValueError("parameter file must hold a JSON object")
    return _build(DimensionalParams, doc.get("dimensional")), _build(NondimParams, doc.get("nondimensional"))


def params_to_dict(params) -> dict:
    return dataclasses.asdict(params)
