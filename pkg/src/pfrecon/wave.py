"""Explicit leapfrog solver for ``c(x) u_tt = Laplace(u)`` on the box ``G``.

A plane wave enters through one face of the depth axis as a Neumann flux
``du/dn = f(t)`` during ``0 < t <= 2*pi/omega``; afterwards that face, and
the opposite face at all times, carry the first-order absorbing condition
``du/dn = -u_t``.  The remaining faces are homogeneous Neumann, which makes
a laterally uniform medium behave like an unbounded one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InstabilityError
from .grids import GridSpec

__all__ = [
    "waveform",
    "waveform_integral",
    "WaveConfig",
    "TimeTrace",
    "ForwardResult",
    "solve_forward",
    "discrete_energy",
]


def waveform(t, omega_src: float):
    """Source pulse ``0.1 (sin(omega t - pi/2) + 1)`` on ``(0, 2 pi/omega]``, zero after."""
    t = np.asarray(t, dtype=float)
    t1 = 2.0 * math.pi / omega_src
    f = 0.1 * (np.sin(omega_src * t - math.pi / 2.0) + 1.0)
    out = np.where((t > 0.0) & (t <= t1), f, 0.0)
    return out if out.ndim else float(out)


def waveform_integral(t, omega_src: float):
    """``F(t) = int_0^t waveform``; the plane wave a Neumann flux injects."""
    t = np.asarray(t, dtype=float)
    t1 = 2.0 * math.pi / omega_src
    tc = np.clip(t, 0.0, t1)
    out = 0.1 * (tc - np.sin(omega_src * tc) / omega_src)
    return out if out.ndim else float(out)


@dataclass
class WaveConfig:
    """Time-stepping parameters.

    ``tau=None`` selects ``0.5 * h / sqrt(dim)``.  ``boundary="reflecting"``
    replaces both absorbing faces by zero Neumann (used for energy checks).
    """

    omega_src: float = 7.0
    T: float = 6.0
    tau: float | None = None
    snapshot_every: int | None = None
    boundary: str = "absorbing"

    def resolved_tau(self, grid: GridSpec) -> tuple[float, int]:
        """Time step actually used and the number of steps (``T`` is hit exactly)."""
        tau = self.tau if self.tau is not None else 0.5 * grid.mesh_size / math.sqrt(grid.dim)
        if tau <= 0 or self.T <= 0:
            raise ConfigurationError("tau and T must be positive")
        nsteps = int(math.ceil(self.T / tau - 1e-9))
        return self.T / nsteps, nsteps

    def validate(self, grid: GridSpec) -> None:
        tau, _ = self.resolved_tau(grid)
        if tau * math.sqrt(grid.dim) / grid.mesh_size > 1.0 + 1e-12:
            raise ConfigurationError(
                f"CFL violated: tau*sqrt(dim)/h = {tau * math.sqrt(grid.dim) / grid.mesh_size:.3f} > 1"
            )
        if self.T < 2.0 * math.pi / self.omega_src:
            raise ConfigurationError("T must be at least one source period 2*pi/omega")
        if self.boundary not in ("absorbing", "reflecting"):
            raise ConfigurationError(f"unknown boundary mode {self.boundary!r}")

    def to_dict(self) -> dict:
        return {
            "omega_src": self.omega_src,
            "T": self.T,
            "tau": self.tau,
            "snapshot_every": self.snapshot_every,
            "boundary": self.boundary,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WaveConfig":
        return cls(**{k: d[k] for k in ("omega_src", "T", "tau", "snapshot_every", "boundary") if k in d})


@dataclass
class TimeTrace:
    """Wave field samples ``samples[node, k]`` at times ``k * tau``, ``k = 0..nsteps``."""

    coords: np.ndarray
    samples: np.ndarray
    tau: float
    index: np.ndarray | None = None

    def __post_init__(self):
        self.coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        if self.samples.shape[0] != self.coords.shape[0]:
            raise ConfigurationError("one sample row per node is required")
        if not np.all(np.isfinite(self.samples)):
            raise ConfigurationError("trace samples must be finite")

    @property
    def nnodes(self) -> int:
        return self.samples.shape[0]

    @property
    def nsteps(self) -> int:
        return self.samples.shape[1] - 1

    @property
    def T(self) -> float:
        return self.nsteps * self.tau

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.nsteps + 1) * self.tau

    def subset(self, rows) -> "TimeTrace":
        rows = np.asarray(rows)
        return TimeTrace(
            self.coords[rows],
            self.samples[rows],
            self.tau,
            None if self.index is None else self.index[rows],
        )


@dataclass
class ForwardResult:
    trace: TimeTrace | None
    laplace: dict[float, np.ndarray] = field(default_factory=dict)
    snapshots: list[tuple[float, np.ndarray]] = field(default_factory=list)
    tau: float = 0.0
    nsteps: int = 0


def _neumann_laplacian(u: np.ndarray, spacing, out: np.ndarray) -> np.ndarray:
    """Laplacian with mirror ghost nodes (zero normal derivative) on every face."""
    out.fill(0.0)
    for k, h in enumerate(spacing):
        inv = 1.0 / h**2
        um = np.moveaxis(u, k, 0)
        om = np.moveaxis(out, k, 0)
        om[1:-1] += (um[2:] - 2.0 * um[1:-1] + um[:-2]) * inv
        om[0] += 2.0 * (um[1] - um[0]) * inv
        om[-1] += 2.0 * (um[-2] - um[-1]) * inv
    return out


def solve_forward(
    c: np.ndarray,
    grid: GridSpec,
    cfg: WaveConfig,
    record: np.ndarray | None = None,
    laplace_s=(),
    laplace_region: str = "omega",
    forcing=None,
    incident: bool = True,
) -> ForwardResult:
    """Run the forward problem and collect boundary traces and Laplace fields.

    Parameters
    ----------
    c : ndarray
        Coefficient on ``grid.G``; must satisfy ``c >= 1``.
    grid : GridSpec
    cfg : WaveConfig
    record : ndarray of bool or int, optional
        Mask over ``grid.G.shape`` or flat node indices to record every step.
    laplace_s : sequence of float
        Pseudo-frequencies at which the trapezoidal Laplace transform
        ``int_0^T u e^{-st} dt`` is accumulated on the fly.
    laplace_region : {"omega", "G"}
        Where the accumulated transforms are returned.
    forcing : callable, optional
        ``forcing(t)`` returns a body source ``g`` on ``G`` for
        ``c u_tt = Laplace(u) + g`` (used by manufactured-solution tests).
    incident : bool
        Switch off the plane-wave flux (the source face then behaves as the
        opposite one: absorbing, or zero Neumann when reflecting).

    Returns
    -------
    ForwardResult
    """
    c = np.asarray(c, dtype=float)
    if c.shape != grid.G.shape:
        raise ConfigurationError(f"c has shape {c.shape}, grid needs {grid.G.shape}")
    if not np.all(np.isfinite(c)) or c.min() < 1.0 - 1e-12:
        raise ConfigurationError("coefficient must be finite and >= 1")
    cfg.validate(grid)
    tau, nsteps = cfg.resolved_tau(grid)
    spacing = grid.G.spacing
    hz = spacing[-1]
    t1 = 2.0 * math.pi / cfg.omega_src

    src = [slice(None)] * grid.dim
    far = [slice(None)] * grid.dim
    src[-1] = -1 if grid.source_side == "hi" else 0
    far[-1] = 0 if grid.source_side == "hi" else -1
    src, far = tuple(src), tuple(far)

    coef = tau**2 / c
    gamma_on = np.zeros(grid.G.shape)
    if cfg.boundary == "absorbing":
        gamma_on[far] = tau / (c[far] * hz)
    gamma_off = gamma_on.copy()  # after the pulse the source face absorbs as well
    if cfg.boundary == "absorbing":
        gamma_off[src] = tau / (c[src] * hz)

    if record is None:
        rec_idx = None
    else:
        record = np.asarray(record)
        rec_idx = np.flatnonzero(record) if record.dtype == bool else record.ravel().astype(int)
        samples = np.zeros((rec_idx.size, nsteps + 1))

    svals = [float(s) for s in laplace_s]
    acc = {s: np.zeros(grid.G.shape) for s in svals}

    u_prev = np.zeros(grid.G.shape)
    u = np.zeros(grid.G.shape)
    lap = np.empty(grid.G.shape)
    snapshots = []

    def accumulate(k: int, field_: np.ndarray):
        t = k * tau
        wgt = 0.5 if k in (0, nsteps) else 1.0
        for s in svals:
            acc[s] += (wgt * tau * math.exp(-s * t)) * field_

    # u(0) = u_t(0) = 0 and f(0) = 0, so the Taylor start gives u(tau) = 0 exactly;
    # keep the general form for clarity.
    _neumann_laplacian(u, spacing, lap)
    if incident:
        lap[src] += 2.0 * float(waveform(0.0, cfg.omega_src)) / hz
    if forcing is not None:
        lap += forcing(0.0)
    u_next = u + 0.5 * coef * lap
    u_prev, u = u, u_next
    if rec_idx is not None:
        samples[:, 0] = u_prev.ravel()[rec_idx]
        samples[:, 1] = u.ravel()[rec_idx]
    accumulate(0, u_prev)
    accumulate(1, u)

    for k in range(1, nsteps):
        t = k * tau
        _neumann_laplacian(u, spacing, lap)
        source_active = incident and t <= t1 + 1e-12
        if source_active:
            lap[src] += 2.0 * float(waveform(t, cfg.omega_src)) / hz
            gamma = gamma_on
        else:
            gamma = gamma_off
        if forcing is not None:
            lap += forcing(t)
        u_next = (2.0 * u - (1.0 - gamma) * u_prev + coef * lap) / (1.0 + gamma)
        if not np.all(np.isfinite(u_next)):
            raise InstabilityError(f"non-finite wave field at time step {k + 1} (t={t + tau:.4g})")
        u_prev, u = u, u_next
        if rec_idx is not None:
            samples[:, k + 1] = u.ravel()[rec_idx]
        accumulate(k + 1, u)
        if cfg.snapshot_every and (k + 1) % cfg.snapshot_every == 0:
            snapshots.append(((k + 1) * tau, u.copy()))

    trace = None
    if rec_idx is not None:
        pts = grid.G.points()[rec_idx]
        trace = TimeTrace(pts, samples, tau, rec_idx)
    if laplace_region == "omega":
        laplace = {s: grid.restrict(a) for s, a in acc.items()}
    elif laplace_region == "G":
        laplace = acc
    else:
        raise ConfigurationError(f"unknown laplace_region {laplace_region!r}")
    return ForwardResult(trace, laplace, snapshots, tau, nsteps)


def discrete_energy(u_prev: np.ndarray, u: np.ndarray, c: np.ndarray, grid: GridSpec, tau: float) -> float:
    """``sum (c u_t^2 + |grad u|^2) dV`` with ``u_t`` a backward difference."""
    from .grids import gradient

    ut = (u - u_prev) / tau
    gu = gradient(0.5 * (u + u_prev), grid.G)
    dens = c * ut**2 + sum(g**2 for g in gu)
    return float(np.sum(grid.G.trapezoid_weights() * dens))
