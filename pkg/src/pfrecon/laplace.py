"""Pseudo-frequency processing of boundary traces.

Time traces are Laplace transformed (trapezoidal rule on the trace's own
time grid, nothing added for ``t > T``), turned into the boundary function
``psi = s^-2 d/ds ln w - 2 s^-3 ln w`` and averaged over the pseudo-frequency
intervals.  Only the backscattering side is measured; the rest of the
boundary is completed with the homogeneous-medium values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, PositivityError
from .wave import TimeTrace

__all__ = [
    "PseudoFreqGrid",
    "PseudoFreqBoundaryData",
    "laplace_weights",
    "laplace_transform",
    "laplace_transform_ds",
    "compute_psi",
    "psi_from_trace",
    "average_psi",
    "interval_average_from_trace",
    "add_noise",
    "complete_boundary",
]

_GAUSS_POINTS = 5


@dataclass(frozen=True)
class PseudoFreqGrid:
    """Partition ``s_N = s_min < ... < s_1 < s_0 = s_max`` with step ``h``.

    Interval ``n`` (1-based) is ``(s_n, s_{n-1}]``; the iteration runs from the
    top of the range downwards.
    """

    s_min: float
    s_max: float
    h: float

    def __post_init__(self):
        if not (self.s_min > 0 and self.h > 0 and self.s_max > self.s_min):
            raise ConfigurationError("need 0 < s_min < s_max and h > 0")
        ratio = (self.s_max - self.s_min) / self.h
        if abs(ratio - round(ratio)) > 1e-8 * max(1.0, ratio):
            raise ConfigurationError("(s_max - s_min)/h must be an integer")

    @property
    def N(self) -> int:
        return int(round((self.s_max - self.s_min) / self.h))

    def s(self, n: int) -> float:
        """Node ``s_n``; ``s(0) == s_max`` and ``s(N) == s_min``."""
        if not 0 <= n <= self.N:
            raise IndexError(f"s index {n} outside 0..{self.N}")
        return self.s_max - n * self.h

    def interval(self, n: int) -> tuple[float, float]:
        """``(s_n, s_{n-1})`` for ``n = 1..N``."""
        if not 1 <= n <= self.N:
            raise IndexError(f"interval {n} outside 1..{self.N}")
        return self.s(n), self.s(n - 1)

    def quadrature(self, n: int, points: int = _GAUSS_POINTS) -> tuple[np.ndarray, np.ndarray]:
        """Gauss-Legendre nodes in interval ``n`` and weights summing to 1."""
        a, b = self.interval(n)
        x, w = np.polynomial.legendre.leggauss(points)
        return 0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * w

    def to_dict(self) -> dict:
        return {"s_min": self.s_min, "s_max": self.s_max, "h": self.h}


def laplace_weights(times: np.ndarray, svals) -> np.ndarray:
    """Trapezoid weights ``W[k, j]`` so that ``u @ W`` approximates ``int u e^{-s_j t}``."""
    times = np.asarray(times, dtype=float)
    dt = np.diff(times)
    tw = np.zeros_like(times)
    tw[:-1] += 0.5 * dt
    tw[1:] += 0.5 * dt
    svals = np.atleast_1d(np.asarray(svals, dtype=float))
    return tw[:, None] * np.exp(-np.outer(times, svals))


def _check_s(s) -> None:
    if np.any(np.asarray(s) <= 0):
        raise ConfigurationError("pseudo-frequency must be positive")


def laplace_transform(trace: TimeTrace, s):
    """``w(x, s) = int_0^T u(x, t) e^{-st} dt`` per trace node.

    Scalar ``s`` gives shape ``(nnodes,)``, an array gives ``(nnodes, len(s))``.
    """
    _check_s(s)
    out = trace.samples @ laplace_weights(trace.times, s)
    return out[:, 0] if np.ndim(s) == 0 else out


def laplace_transform_ds(trace: TimeTrace, s):
    """``dw/ds = -int_0^T t u(x, t) e^{-st} dt``, same quadrature."""
    _check_s(s)
    out = -(trace.samples * trace.times) @ laplace_weights(trace.times, s)
    return out[:, 0] if np.ndim(s) == 0 else out


def compute_psi(w, dw, s):
    """``psi = dw / (s^2 w) - 2 ln(w) / s^3``; ``w`` must be positive everywhere."""
    w = np.asarray(w, dtype=float)
    dw = np.asarray(dw, dtype=float)
    bad = np.argwhere(~(w > 0))
    if bad.size:
        idx = tuple(int(k) for k in bad[0])
        raise PositivityError(
            f"Laplace transform not positive at node {idx} (w={w[idx]:.3e}); "
            "s too small or T too short"
        )
    s = np.asarray(s, dtype=float)
    return dw / (s**2 * w) - 2.0 * np.log(w) / s**3


def psi_from_trace(trace: TimeTrace, s):
    return compute_psi(laplace_transform(trace, s), laplace_transform_ds(trace, s), s)


def average_psi(psi, n: int, sgrid: PseudoFreqGrid, points: int = _GAUSS_POINTS):
    """``(1/h) int_{s_n}^{s_{n-1}} psi ds`` with Gauss-Legendre quadrature.

    ``psi`` is a callable ``s -> values``.
    """
    if points < 3:
        raise ConfigurationError("use at least 3 quadrature points")
    nodes, weights = sgrid.quadrature(n, points)
    return sum(wk * np.asarray(psi(sk), dtype=float) for sk, wk in zip(nodes, weights))


def interval_average_from_trace(trace: TimeTrace, sgrid: PseudoFreqGrid, points: int = _GAUSS_POINTS):
    """``psi_bar[n-1, node]`` for every interval, computed in one batched transform."""
    nodes = np.concatenate([sgrid.quadrature(n, points)[0] for n in range(1, sgrid.N + 1)])
    weights = np.concatenate([sgrid.quadrature(n, points)[1] for n in range(1, sgrid.N + 1)])
    psi = compute_psi(laplace_transform(trace, nodes), laplace_transform_ds(trace, nodes), nodes)
    psi = psi * weights
    return psi.reshape(trace.nnodes, sgrid.N, points).sum(axis=2).T


def add_noise(trace: TimeTrace, sigma: float, seed: int, per_node: bool = False) -> TimeTrace:
    """Multiplicative noise ``u (1 + alpha * sigma * (u_max - u_min))``.

    ``alpha`` is uniform on (-1, 1), one value per time sample (shared by all
    nodes) unless ``per_node`` is set.
    """
    if sigma < 0:
        raise ConfigurationError("sigma must be non-negative")
    if sigma == 0:
        return TimeTrace(trace.coords.copy(), trace.samples.copy(), trace.tau, trace.index)
    rng = np.random.default_rng(seed)
    nt = trace.samples.shape[1]
    if per_node:
        alpha = rng.uniform(-1.0, 1.0, size=trace.samples.shape)
    else:
        alpha = rng.uniform(-1.0, 1.0, size=nt)[None, :]
    spread = float(trace.samples.max() - trace.samples.min())
    noisy = trace.samples * (1.0 + alpha * sigma * spread)
    return TimeTrace(trace.coords.copy(), noisy, trace.tau, trace.index)


@dataclass
class PseudoFreqBoundaryData:
    """Interval-averaged boundary data on every node of the boundary of Omega.

    ``nodes`` are flat (row-major) indices into the Omega grid, ``psi_bar`` has
    shape ``(N, len(nodes))``, ``psi_sbar`` holds ``psi(x, s_max)`` itself and
    ``measured`` flags nodes whose values came from the backscattering data.
    """

    sgrid: PseudoFreqGrid
    omega_shape: tuple[int, ...]
    nodes: np.ndarray
    psi_bar: np.ndarray
    psi_sbar: np.ndarray
    measured: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=np.int64)
        self.psi_bar = np.atleast_2d(np.asarray(self.psi_bar, dtype=float))
        self.psi_sbar = np.asarray(self.psi_sbar, dtype=float)
        self.measured = np.asarray(self.measured, dtype=bool)
        nb = self.nodes.size
        if self.psi_bar.shape != (self.sgrid.N, nb):
            raise ConfigurationError(
                f"psi_bar has shape {self.psi_bar.shape}, expected {(self.sgrid.N, nb)}"
            )
        if self.psi_sbar.shape != (nb,) or self.measured.shape != (nb,):
            raise ConfigurationError("psi_sbar and measured need one entry per node")
        if np.unique(self.nodes).size != nb:
            raise ConfigurationError("boundary nodes must be distinct")
        if not (np.all(np.isfinite(self.psi_bar)) and np.all(np.isfinite(self.psi_sbar))):
            raise ConfigurationError("boundary data must be finite")

    @property
    def provenance(self) -> np.ndarray:
        return np.where(self.measured, "measured", "completed")

    def dirichlet(self, n: int) -> np.ndarray:
        """Omega-shaped array holding interval ``n``'s data on the boundary (zeros inside)."""
        out = np.zeros(self.omega_shape)
        out.flat[self.nodes] = self.psi_bar[n - 1]
        return out

    def dirichlet_sbar(self) -> np.ndarray:
        out = np.zeros(self.omega_shape)
        out.flat[self.nodes] = self.psi_sbar
        return out


def complete_boundary(
    measured_nodes: np.ndarray,
    measured_bar: np.ndarray,
    measured_sbar: np.ndarray,
    homogeneous: PseudoFreqBoundaryData,
) -> PseudoFreqBoundaryData:
    """Replace the homogeneous data by measured values on the measured nodes.

    ``measured_nodes`` are flat Omega indices (normally the backscattering
    side); ``measured_bar`` has shape ``(N, len(measured_nodes))``.
    """
    measured_nodes = np.asarray(measured_nodes, dtype=np.int64)
    pos = {int(k): i for i, k in enumerate(homogeneous.nodes)}
    try:
        cols = np.array([pos[int(k)] for k in measured_nodes], dtype=int)
    except KeyError as exc:
        raise ConfigurationError(f"measured node {exc.args[0]} is not a boundary node") from None
    measured_bar = np.atleast_2d(np.asarray(measured_bar, dtype=float))
    if measured_bar.shape != (homogeneous.sgrid.N, measured_nodes.size):
        raise ConfigurationError("measured data do not match the pseudo-frequency grid / nodes")
    psi_bar = homogeneous.psi_bar.copy()
    psi_sbar = homogeneous.psi_sbar.copy()
    flags = np.zeros(homogeneous.nodes.size, dtype=bool)
    psi_bar[:, cols] = measured_bar
    psi_sbar[cols] = measured_sbar
    flags[cols] = True
    return PseudoFreqBoundaryData(
        homogeneous.sgrid, homogeneous.omega_shape, homogeneous.nodes.copy(), psi_bar, psi_sbar, flags
    )
