"""From a scenario to completed pseudo-frequency boundary data, and on to a reconstruction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .grids import boundary_mask, boundary_regions
from .laplace import (
    PseudoFreqBoundaryData,
    add_noise,
    complete_boundary,
    interval_average_from_trace,
    psi_from_trace,
)
from .recon import ForwardModel, ReconState, run
from .scenarios import Scenario
from .wave import TimeTrace, solve_forward

__all__ = [
    "BoundaryTraces",
    "omega_boundary_nodes",
    "simulate_traces",
    "traces_to_psi",
    "make_boundary_data",
    "reconstruct_scenario",
]


@dataclass
class BoundaryTraces:
    """Time traces on the boundary of Omega for the true and the homogeneous media."""

    omega_nodes: np.ndarray  # flat Omega indices of the boundary nodes
    measured: np.ndarray  # bool per boundary node: on the backscattering side
    true: TimeTrace
    homogeneous: TimeTrace


def omega_boundary_nodes(scenario: Scenario) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(omega_flat, G_flat, measured)`` for the boundary nodes of Omega."""
    grid = scenario.grid
    om_bnd = boundary_mask(grid.omega)
    omega_flat = np.flatnonzero(om_bnd)
    G_index = np.arange(grid.G.size).reshape(grid.G.shape)[grid.omega_slices]
    G_flat = G_index.ravel()[omega_flat]
    gamma = boundary_regions(grid.omega, grid.source_side)["backscatter"]
    measured = gamma.ravel()[omega_flat]
    return omega_flat, G_flat, measured


def simulate_traces(scenario: Scenario, true_c: np.ndarray | None = None) -> BoundaryTraces:
    """Noiseless traces on the boundary of Omega for ``true_c`` and for ``c = 1``."""
    grid = scenario.grid
    omega_flat, G_flat, measured = omega_boundary_nodes(scenario)
    c = scenario.true_c("G") if true_c is None else true_c
    tr = solve_forward(c, grid, scenario.wave, record=G_flat).trace
    hom = solve_forward(grid.G.ones(), grid, scenario.wave, record=G_flat).trace
    return BoundaryTraces(omega_flat, measured, tr, hom)


def traces_to_psi(trace: TimeTrace, scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Interval averages ``psi_bar`` (N x nodes) and ``psi(., s_max)``."""
    sg = scenario.sgrid
    return interval_average_from_trace(trace, sg), psi_from_trace(trace, sg.s_max)


def make_boundary_data(
    scenario: Scenario,
    traces: BoundaryTraces | None = None,
    noise: bool = True,
    boundary: str = "backscatter",
) -> PseudoFreqBoundaryData:
    """Completed boundary data for the reconstruction.

    ``boundary="backscatter"`` keeps the (noisy) true data on the measured
    side only and uses homogeneous-medium values elsewhere; ``"full"`` uses the
    true data on the whole boundary.
    """
    if boundary not in ("backscatter", "full"):
        raise ConfigurationError(f"unknown boundary mode {boundary!r}")
    if traces is None:
        traces = simulate_traces(scenario)
    sg = scenario.sgrid
    hom_bar, hom_sbar = traces_to_psi(traces.homogeneous, scenario)
    homogeneous = PseudoFreqBoundaryData(
        sg, scenario.grid.omega.shape, traces.omega_nodes, hom_bar, hom_sbar, np.zeros(traces.omega_nodes.size, bool)
    )
    rows = np.flatnonzero(traces.measured) if boundary == "backscatter" else np.arange(traces.omega_nodes.size)
    meas = traces.true.subset(rows)
    if noise and scenario.noise_sigma > 0:
        meas = add_noise(meas, scenario.noise_sigma, scenario.seed)
    bar, sbar = traces_to_psi(meas, scenario)
    return complete_boundary(traces.omega_nodes[rows], bar, sbar, homogeneous)


def reconstruct_scenario(
    scenario: Scenario,
    data: PseudoFreqBoundaryData | None = None,
    noise: bool = True,
    boundary: str = "backscatter",
) -> tuple[np.ndarray, ReconState]:
    """Simulate data for ``scenario`` (unless given) and run the reconstruction."""
    if data is None:
        data = make_boundary_data(scenario, noise=noise, boundary=boundary)
    model = ForwardModel(scenario.grid, scenario.wave)
    true_c = scenario.true_c("G") if scenario.algo.first_tail == "exact" else None
    return run(data, scenario.algo, model, true_c=true_c)
