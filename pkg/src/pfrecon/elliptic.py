"""Dirichlet solvers for the linear elliptic problems of the method.

All of them are instances of

    Laplace(u) + b . grad(u) - b0 u = f   in the grid interior,
    u = g                                 on the grid boundary,

discretised with the standard 5/7-point Laplacian and centred first
differences.  Small systems are factorised directly; large ones use a
Jacobi-preconditioned Krylov method (CG when the operator is symmetric).
Either way the relative residual is checked against ``tol``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigurationError, PositivityError, SolverError
from .grids import Grid

__all__ = [
    "EllipticProblem",
    "PecletWarning",
    "assemble",
    "solve_dirichlet",
    "solve_drift_dirichlet",
    "solve_first_tail",
    "solve_pseudofreq_field",
    "point_source_field",
]

DIRECT_LIMIT = 60_000


class PecletWarning(RuntimeWarning):
    pass


@dataclass
class EllipticProblem:
    """Coefficients of ``Laplace(u) + b . grad(u) - b0 u = f`` on a grid.

    ``dirichlet`` is a full grid array whose boundary entries are used.
    """

    grid: Grid
    rhs: np.ndarray
    dirichlet: np.ndarray
    drift: list[np.ndarray] | None = None
    zeroth_order: np.ndarray | None = None

    def __post_init__(self):
        shape = self.grid.shape
        self.rhs = np.broadcast_to(np.asarray(self.rhs, dtype=float), shape)
        self.dirichlet = np.asarray(self.dirichlet, dtype=float)
        if self.dirichlet.shape != shape:
            raise ConfigurationError("dirichlet array must match the grid")
        if not np.all(np.isfinite(self.dirichlet[~self.grid.interior_mask()])):
            raise ConfigurationError("Dirichlet data must be finite")
        if self.drift is not None:
            if len(self.drift) != self.grid.dim:
                raise ConfigurationError("one drift component per axis")
            self.drift = [np.broadcast_to(np.asarray(b, dtype=float), shape) for b in self.drift]
        if self.zeroth_order is not None:
            self.zeroth_order = np.broadcast_to(np.asarray(self.zeroth_order, dtype=float), shape)
            if np.any(self.zeroth_order < 0):
                raise ConfigurationError("zeroth-order coefficient must be >= 0")

    def peclet(self) -> float:
        if self.drift is None:
            return 0.0
        inner = self.grid.interior_mask()
        return max(
            float(np.max(np.abs(b[inner]))) * h / 2.0 for b, h in zip(self.drift, self.grid.spacing)
        )


def _second_diff(n: int, h: float) -> sp.csr_matrix:
    return sp.diags([np.ones(n - 1), -2.0 * np.ones(n), np.ones(n - 1)], [-1, 0, 1]) / h**2


def _first_diff(n: int, h: float) -> sp.csr_matrix:
    return sp.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1]) / (2.0 * h)


def _kron_axis(mat, axis: int, shape) -> sp.csr_matrix:
    out = None
    for k, n in enumerate(shape):
        factor = mat if k == axis else sp.identity(n, format="csr")
        out = factor if out is None else sp.kron(out, factor, format="csr")
    return out


def assemble(p: EllipticProblem) -> sp.csr_matrix:
    """Full-grid sparse operator (boundary rows are later discarded)."""
    shape = p.grid.shape
    A = None
    for k, h in enumerate(p.grid.spacing):
        term = _kron_axis(_second_diff(shape[k], h), k, shape)
        A = term if A is None else A + term
    if p.drift is not None:
        for k, (b, h) in enumerate(zip(p.drift, p.grid.spacing)):
            if np.any(b):
                A = A + sp.diags(b.ravel()) @ _kron_axis(_first_diff(shape[k], h), k, shape)
    if p.zeroth_order is not None:
        A = A - sp.diags(p.zeroth_order.ravel())
    return A.tocsr()


def solve_dirichlet(p: EllipticProblem, tol: float = 1e-10, strict: bool = False, method: str = "auto") -> np.ndarray:
    """Solve the problem and return the full grid solution (boundary = data)."""
    pe = p.peclet()
    if pe >= 1.0:
        msg = f"mesh Peclet number {pe:.3f} >= 1; centred drift may oscillate"
        if strict:
            raise ConfigurationError(msg)
        warnings.warn(msg, PecletWarning, stacklevel=2)

    grid = p.grid
    inner = grid.interior_mask().ravel()
    A = assemble(p)
    A_ii = A[inner][:, inner].tocsr()
    A_ib = A[inner][:, ~inner]
    g_b = p.dirichlet.ravel()[~inner]
    b = p.rhs.ravel()[inner] - A_ib @ g_b
    n = int(inner.sum())
    symmetric = p.drift is None or not any(np.any(d) for d in p.drift)

    if method == "auto":
        method = "direct" if n <= DIRECT_LIMIT else "iterative"
    if method == "direct":
        x = spla.spsolve(A_ii.tocsc(), b)
    elif method == "iterative":
        diag = A_ii.diagonal()
        if np.any(diag == 0):
            raise SolverError("zero diagonal entry; Jacobi preconditioner unavailable")
        M = sp.diags(1.0 / diag)
        maxiter = 20 * n
        if symmetric:
            # -A is SPD for the Laplacian / Helmholtz-type operators used here
            x, info = spla.cg(-A_ii, -b, rtol=tol, atol=0.0, M=-M, maxiter=maxiter)
        else:
            x, info = spla.bicgstab(A_ii, b, rtol=tol, atol=0.0, M=M, maxiter=maxiter)
        if info < 0:
            raise SolverError(f"Krylov solver breakdown (info={info})")
    else:
        raise ConfigurationError(f"unknown solver method {method!r}")

    bnorm = np.linalg.norm(b)
    res = np.linalg.norm(A_ii @ x - b) / (bnorm if bnorm > 0 else 1.0)
    # direct factorisations are trusted to rounding level; allow for conditioning
    limit = tol if method == "iterative" else max(tol, 1e-8)
    if not np.isfinite(res) or res > limit * 1.0001:
        raise SolverError(f"linear solve stopped at relative residual {res:.3e} > {tol:.1e}", res)
    u = p.dirichlet.ravel().copy()
    u[inner] = x
    return u.reshape(grid.shape)


def solve_drift_dirichlet(
    grid: Grid,
    drift: list[np.ndarray] | None,
    rhs,
    dirichlet: np.ndarray,
    tol: float = 1e-10,
    strict: bool = False,
) -> np.ndarray:
    """``Laplace(q) + b . grad(q) = f`` with ``q = dirichlet`` on the boundary."""
    return solve_dirichlet(EllipticProblem(grid, rhs, dirichlet, drift=drift), tol=tol, strict=strict)


def solve_first_tail(grid: Grid, psi_sbar: np.ndarray, sbar: float, tol: float = 1e-10):
    """Harmonic first guess for the tail.

    ``p`` is harmonic with ``p = -sbar^2 psi(., sbar)`` on the boundary; the tail
    guess is ``p / sbar``.  ``psi_sbar`` is a grid array (only boundary values
    are read).  Returns ``(p, V11)``.
    """
    data = -(sbar**2) * np.asarray(psi_sbar, dtype=float)
    p = solve_dirichlet(EllipticProblem(grid, 0.0, data), tol=tol)
    return p, p / sbar


def solve_pseudofreq_field(
    grid: Grid, c: np.ndarray, s: float, boundary: np.ndarray, tol: float = 1e-10, method: str = "auto"
) -> np.ndarray:
    """``Laplace(w) - s^2 c w = 0`` with ``w = boundary`` on the grid boundary.

    With positive boundary data the solution must be positive; this is checked.
    """
    c = np.asarray(c, dtype=float)
    if s <= 0:
        raise ConfigurationError("s must be positive")
    if np.any(c < 1.0 - 1e-12):
        raise ConfigurationError("coefficient must be >= 1")
    w = solve_dirichlet(EllipticProblem(grid, 0.0, boundary, zeroth_order=s**2 * c), tol=tol, method=method)
    bnd = np.asarray(boundary)[~grid.interior_mask()]
    if np.all(bnd > 0) and not np.all(w > 0):
        raise PositivityError("pseudo-frequency field lost positivity")
    return w


def point_source_field(points: np.ndarray, x0, s: float, c: float = 1.0) -> np.ndarray:
    """``exp(-s sqrt(c) r) / (4 pi r)``, the 3D fundamental solution for constant ``c``."""
    r = np.linalg.norm(np.asarray(points, dtype=float) - np.asarray(x0, dtype=float), axis=-1)
    return np.exp(-s * math.sqrt(c) * r) / (4.0 * math.pi * r)
