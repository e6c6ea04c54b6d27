"""The globally convergent layer-stripping reconstruction.

For each pseudo-frequency interval ``n`` (from ``s_max`` downwards) and tail
iteration ``i``:

1. solve the linear Dirichlet problem for ``q_{n,i}`` with drift
   ``A1 (grad V - G)`` and right-hand side ``-A2 |grad V - G|^2``,
   ``G = h sum_{j<n} grad q_j``;
2. ``v = -h q_{n,i} - h sum_{j<n} q_j + V``;
3. ``c = Laplace(v) + s_n^2 |grad v|^2``, smoothed and clamped to ``[1, c_max]``
   (out-of-range values are reset to 1, and ``c = 1`` outside Omega);
4. new tail ``V = ln w(., s_max) / s_max^2`` from the medium ``c``.

Iterations stop on the relative-change rule described in :func:`run`.
"""
from __future__ import annotations

import logging
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cwf import CwfCoeffs, compute_cwf
from .elliptic import PecletWarning, solve_drift_dirichlet, solve_first_tail, solve_pseudofreq_field
from .errors import ConfigurationError, NumericalError, PositivityError
from .grids import MOLLIFY_STENCILS, GridSpec, _copy_to_boundary, gradient, grad_sq, l2_relative_diff, laplacian, mollify
from .laplace import PseudoFreqBoundaryData, PseudoFreqGrid
from .wave import WaveConfig, solve_forward

__all__ = [
    "AlgoConfig",
    "ForwardModel",
    "ReconState",
    "StepRecord",
    "ReconstructionError",
    "clamp",
    "coefficient_from_v",
    "tail_from_field",
    "init_first_tail",
    "inner_step",
    "run",
]

log = logging.getLogger(__name__)

TAIL_MODES = ("time-domain", "fast")
FIRST_TAIL_MODES = ("harmonic", "homogeneous", "exact")


@dataclass
class AlgoConfig:
    sgrid: PseudoFreqGrid
    lam: float | None = None
    m: int = 5
    eta: float = 1e-3
    c_min: float = 1.0
    c_max: float | None = None
    tail_mode: str = "time-domain"
    first_tail: str = "homogeneous"
    mollify_passes: int = 2
    mollify_stencil: str = "lazy"
    d: float | None = None
    solver_tol: float = 1e-10

    def __post_init__(self):
        if self.lam is None:
            self.lam = 1.0 / self.sgrid.h
        if self.lam * self.sgrid.h < 1.0 - 1e-12:
            raise ConfigurationError("need lambda * h >= 1")
        if self.m < 1:
            raise ConfigurationError("m must be >= 1")
        if self.eta <= 0:
            raise ConfigurationError("eta must be positive")
        if self.c_max is not None and not self.c_max > self.c_min:
            raise ConfigurationError("c_max must exceed c_min")
        if self.tail_mode not in TAIL_MODES:
            raise ConfigurationError(f"tail_mode must be one of {TAIL_MODES}")
        if self.first_tail not in FIRST_TAIL_MODES:
            raise ConfigurationError(f"first_tail must be one of {FIRST_TAIL_MODES}")
        if self.mollify_passes < 0:
            raise ConfigurationError("mollify_passes must be >= 0")
        if self.mollify_stencil not in MOLLIFY_STENCILS:
            raise ConfigurationError(f"mollify_stencil must be one of {MOLLIFY_STENCILS}")

    def to_dict(self) -> dict:
        return {
            "sgrid": self.sgrid.to_dict(),
            "lam": self.lam,
            "m": self.m,
            "eta": self.eta,
            "c_min": self.c_min,
            "c_max": self.c_max,
            "tail_mode": self.tail_mode,
            "first_tail": self.first_tail,
            "mollify_passes": self.mollify_passes,
            "mollify_stencil": self.mollify_stencil,
            "d": self.d,
            "solver_tol": self.solver_tol,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AlgoConfig":
        kw = dict(d)
        kw["sgrid"] = PseudoFreqGrid(**d["sgrid"])
        return cls(**kw)


@dataclass
class ForwardModel:
    """What the tail updates need to re-solve the forward problem."""

    grid: GridSpec
    wave: WaveConfig
    _homogeneous: dict = field(default_factory=dict, repr=False)

    def laplace_field(self, c_G: np.ndarray, s: float, region: str = "omega") -> np.ndarray:
        res = solve_forward(c_G, self.grid, self.wave, laplace_s=[s], laplace_region=region)
        return res.laplace[float(s)]

    def homogeneous_laplace(self, s: float) -> np.ndarray:
        """Laplace transform at ``s`` of the ``c = 1`` solution on all of ``G`` (cached)."""
        key = float(s)
        if key not in self._homogeneous:
            self._homogeneous[key] = self.laplace_field(self.grid.G.ones(), key, region="G")
        return self._homogeneous[key]


@dataclass
class StepRecord:
    n: int
    i: int
    N: float
    max_c: float
    runtime_ms: float


@dataclass
class ReconState:
    q_history: list[np.ndarray]
    V: np.ndarray
    c: np.ndarray
    history: list[StepRecord] = field(default_factory=list)
    q_sum: np.ndarray | None = None
    grad_q_sum: list[np.ndarray] | None = None
    interval_c: dict[int, np.ndarray] = field(default_factory=dict)
    interval_N: dict[int, float] = field(default_factory=dict)
    stop_n: int | None = None
    stop_reason: str = ""
    accepted_n: int | None = None
    metadata: dict = field(default_factory=dict)

    @classmethod
    def start(cls, shape, V: np.ndarray) -> "ReconState":
        dim = len(shape)
        return cls(
            q_history=[np.zeros(shape)],  # q_0 = 0
            V=V,
            c=np.ones(shape),
            q_sum=np.zeros(shape),
            grad_q_sum=[np.zeros(shape) for _ in range(dim)],
        )


class ReconstructionError(NumericalError):
    """A step failed; ``state`` holds everything computed before the failure."""

    def __init__(self, message: str, state: ReconState):
        super().__init__(message)
        self.state = state


def clamp(c: np.ndarray, c_min: float = 1.0, c_max: float | None = None) -> np.ndarray:
    """Reset values below ``c_min`` (or above ``c_max``) to ``c_min``."""
    out = np.array(c, dtype=float)
    bad = ~(out >= c_min)
    if c_max is not None:
        bad |= out > c_max
    out[bad] = c_min
    return out


def coefficient_from_v(v: np.ndarray, s: float, grid) -> np.ndarray:
    """``Laplace(v) + s^2 |grad v|^2`` at interior nodes, copied outward to the boundary."""
    return _copy_to_boundary(laplacian(v, grid) + s**2 * grad_sq(gradient(v, grid)))


def tail_from_field(w: np.ndarray, sbar: float) -> np.ndarray:
    """``V = ln(w) / sbar^2``; raises if ``w`` is not positive."""
    if not np.all(w > 0):
        idx = tuple(int(k) for k in np.unravel_index(int(np.argmin(np.where(np.isfinite(w), w, -np.inf))), np.shape(w)))
        raise PositivityError(f"Laplace field not positive at node {idx} (w={w[idx]:.3e})")
    return np.log(w) / sbar**2


def _tail_from_medium(c_omega: np.ndarray, model: ForwardModel, cfg: AlgoConfig) -> np.ndarray:
    grid = model.grid
    sbar = cfg.sgrid.s_max
    c_G = grid.extend(c_omega, 1.0)
    if cfg.tail_mode == "time-domain":
        w = model.laplace_field(c_G, sbar)
    else:
        w_inc = model.homogeneous_laplace(sbar)
        w = grid.restrict(solve_pseudofreq_field(grid.G, c_G, sbar, w_inc, tol=cfg.solver_tol))
    return tail_from_field(w, sbar)


def init_first_tail(
    mode: str,
    data: PseudoFreqBoundaryData,
    model: ForwardModel,
    cfg: AlgoConfig,
    true_c: np.ndarray | None = None,
) -> np.ndarray:
    """First guess ``V_{1,1}`` on Omega.

    ``harmonic``: ``p / sbar`` with ``p`` harmonic, ``p = -sbar^2 psi(., sbar)`` on
    the boundary.  ``homogeneous``: the tail of the ``c = 1`` medium.
    ``exact``: the tail of ``true_c`` (verification only).
    """
    sbar = cfg.sgrid.s_max
    if mode == "harmonic":
        _, V = solve_first_tail(model.grid.omega, data.dirichlet_sbar(), sbar, tol=cfg.solver_tol)
        return V
    if mode == "homogeneous":
        return tail_from_field(model.grid.restrict(model.homogeneous_laplace(sbar)), sbar)
    if mode == "exact":
        if true_c is None:
            raise ConfigurationError("exact first tail needs the true coefficient")
        true_c = np.asarray(true_c, dtype=float)
        if true_c.shape == model.grid.G.shape:
            c_G = true_c
        else:
            c_G = model.grid.extend(true_c, 1.0)
        return tail_from_field(model.laplace_field(c_G, sbar), sbar)
    raise ConfigurationError(f"unknown first-tail mode {mode!r}")


def inner_step(
    state: ReconState,
    n: int,
    i: int,
    dirichlet: np.ndarray,
    cwf: CwfCoeffs,
    cfg: AlgoConfig,
    model: ForwardModel,
    update_tail: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One tail iteration on interval ``n``.  Returns ``(q_{n,i}, c_{n,i}, v_{n,i})``.

    ``state.V`` is replaced by the next tail when ``update_tail`` is set;
    ``state.c`` always receives the clamped coefficient.
    """
    omega = model.grid.omega
    h = cfg.sgrid.h
    s_n = cfg.sgrid.s(n)
    gV = gradient(state.V, omega)
    G = [h * g for g in state.grad_q_sum]
    diff = [a - b for a, b in zip(gV, G)]
    drift = [cwf.A1 * d for d in diff]
    rhs = -cwf.A2 * grad_sq(diff)
    with warnings.catch_warnings():
        # large mesh Peclet numbers are recorded rather than reported per solve
        warnings.simplefilter("ignore", PecletWarning)
        q = solve_drift_dirichlet(omega, drift, rhs, dirichlet, tol=cfg.solver_tol)
    pe = max(float(np.max(np.abs(b))) * hk / 2.0 for b, hk in zip(drift, omega.spacing))
    state.metadata["max_peclet"] = max(pe, state.metadata.get("max_peclet", 0.0))

    v = -h * q - h * state.q_sum + state.V
    c_raw = coefficient_from_v(v, s_n, omega)
    c_new = clamp(mollify(c_raw, cfg.mollify_passes, cfg.mollify_stencil), cfg.c_min, cfg.c_max)
    state.c = c_new
    if update_tail:
        state.V = _tail_from_medium(c_new, model, cfg)
    return q, c_new, v


def run(
    data: PseudoFreqBoundaryData,
    cfg: AlgoConfig,
    model: ForwardModel,
    true_c: np.ndarray | None = None,
) -> tuple[np.ndarray, ReconState]:
    """Reconstruct ``c`` on Omega from completed boundary data.

    Stopping rule: inside interval ``n`` the relative change
    ``N = ||c_{n,i} - c_{n,i-1}|| / ||c_{n,i}||`` is tracked (``c_{n,0}`` is the
    previous interval's result, ``c_{1,0} = 1``) and the tail loop ends early
    once ``N <= eta``.  The last value is ``N_n``.  The outer loop stops when
    ``N_n <= eta`` (returning ``c_n``) or ``N_n >= N_{n-1}`` (returning
    ``c_{n-1}``, the last interval before growth), else after ``n = N``.
    """
    if data.sgrid != cfg.sgrid:
        raise ConfigurationError("data and configuration use different pseudo-frequency grids")
    if tuple(data.omega_shape) != model.grid.omega.shape:
        raise ConfigurationError("data were produced for a different Omega grid")
    sg = cfg.sgrid
    V0 = init_first_tail(cfg.first_tail, data, model, cfg, true_c=true_c)
    state = ReconState.start(model.grid.omega.shape, V0)
    state.metadata.update(
        first_tail=cfg.first_tail,
        tail_mode=cfg.tail_mode,
        verification_only=cfg.first_tail == "exact",
        stopping_rule="N_n from consecutive tail iterates; stop on N_n >= N_(n-1) or N_n <= eta",
    )
    if cfg.tail_mode == "fast":
        state.metadata["fast_tail_boundary"] = "Dirichlet on dG from homogeneous-medium field (added assumption)"

    omega = model.grid.omega
    c_ref = np.ones(omega.shape)
    N_prev = math.inf
    final_c = None
    for n in range(1, sg.N + 1):
        cwf = compute_cwf(n, sg, cfg.lam)
        dirichlet = data.dirichlet(n)
        c_last = c_ref
        N_n = math.inf
        q = None
        for i in range(1, cfg.m + 1):
            t0 = time.perf_counter()
            try:
                q, c_new, _ = inner_step(state, n, i, dirichlet, cwf, cfg, model, update_tail=True)
            except NumericalError as exc:
                raise ReconstructionError(f"step ({n},{i}) failed: {exc}", state) from exc
            N_n = l2_relative_diff(c_new, c_last, omega)
            c_last = c_new
            rec = StepRecord(n, i, N_n, float(c_new.max()), 1e3 * (time.perf_counter() - t0))
            state.history.append(rec)
            log.debug("n=%d i=%d N=%.3e max c=%.3f", n, i, N_n, rec.max_c)
            if N_n <= cfg.eta:
                break
        state.q_history.append(q)
        state.q_sum = state.q_sum + q
        gq = gradient(q, omega)
        state.grad_q_sum = [a + b for a, b in zip(state.grad_q_sum, gq)]
        state.interval_c[n] = c_last
        state.interval_N[n] = N_n
        c_ref = c_last

        if n > 1 and N_n >= N_prev:
            state.stop_n, state.stop_reason = n, "growth"
            state.accepted_n = n - 1
            final_c = state.interval_c[n - 1]
            break
        if N_n <= cfg.eta:
            state.stop_n, state.stop_reason = n, "small change"
            state.accepted_n = n
            final_c = c_last
            break
        N_prev = N_n
    else:
        state.stop_n, state.stop_reason = sg.N, "exhausted"
        state.accepted_n = sg.N
        final_c = c_ref
    state.c = final_c
    state.metadata.update(stop_n=state.stop_n, accepted_n=state.accepted_n, stop_reason=state.stop_reason)
    return final_c, state
