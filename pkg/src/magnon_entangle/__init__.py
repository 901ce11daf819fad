"""magnon-entangle: steady-state entanglement of a cavity with two magnon modes."""

__version__ = "0.1.0"
__author__ = "Linell Bonnette"
__email__ = "tlbonnette@gmail.com"

# Public re-exports
from .entanglement import EntanglementReport, analyze
from .errors import ConfigError, MagnonEntangleError, NumericalError
from .model import SteadyState, SystemParams, steady_state
from .sweep import Axis, GridRecord, SweepJob, map2d, max_over_scan

__all__ = [
    "Axis",
    "ConfigError",
    "EntanglementReport",
    "GridRecord",
    "MagnonEntangleError",
    "NumericalError",
    "SteadyState",
    "SweepJob",
    "SystemParams",
    "analyze",
    "map2d",
    "max_over_scan",
    "steady_state",
]
