"""Jansen-Rit neural mass model in the steep-sigmoid limit.

Piecewise-linear analysis of alpha and delta rhythms: closed-form orbits,
grazing and equilibrium bifurcations, and smooth-model simulation.
"""
__version__ = "0.1.0"

from .params import DimensionalParams, NondimParams, load_params, nondimensionalize, scale_state
from .errors import JRLimitError

__all__ = ["DimensionalParams", "NondimParams", "JRLimitError", "load_params",
           "nondimensionalize", "scale_state", "__version__"]
