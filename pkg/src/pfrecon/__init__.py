"""Pseudo-frequency layer-stripping reconstruction of a wave-speed coefficient.

Recovers ``c(x) >= 1`` in ``c u_tt = Laplace(u)`` from time-resolved
backscattering data of a single incident plane wave.
"""
from .errors import ConfigurationError, InstabilityError, NumericalError, PfreconError, PositivityError, SolverError
from .grids import Grid, GridSpec
from .laplace import PseudoFreqBoundaryData, PseudoFreqGrid
from .recon import AlgoConfig, ForwardModel, run
from .scenarios import Scenario, load_scenario
from .wave import TimeTrace, WaveConfig, solve_forward

__version__ = "0.1.0"

__all__ = [
    "AlgoConfig",
    "ConfigurationError",
    "ForwardModel",
    "Grid",
    "GridSpec",
    "InstabilityError",
    "NumericalError",
    "PfreconError",
    "PositivityError",
    "PseudoFreqBoundaryData",
    "PseudoFreqGrid",
    "Scenario",
    "SolverError",
    "TimeTrace",
    "WaveConfig",
    "load_scenario",
    "run",
    "solve_forward",
]
