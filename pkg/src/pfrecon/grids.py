"""Structured node grids, boundary regions and finite-difference operators.

Every field in the package is a plain ``numpy`` array sampled on the nodes of
a :class:`Grid` (``indexing='ij'``, row-major).  A :class:`GridSpec` couples the
computational box ``G`` with the inverse-problem box ``Omega`` strictly inside
it; the last axis is always the depth axis along which the plane wave travels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "Grid",
    "GridSpec",
    "BOUNDARY_TAGS",
    "boundary_regions",
    "boundary_mask",
    "gradient",
    "laplacian",
    "grad_dot",
    "grad_sq",
    "l2_norm",
    "l2_relative_diff",
    "mollify",
]

_SNAP = 1e-9


def _as_tuple(values, dim: int | None = None) -> tuple[float, ...]:
    if np.isscalar(values):
        if dim is None:
            raise ValueError("scalar extent needs an explicit dimension")
        return (float(values),) * dim
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class Grid:
    """Uniform node grid on the closed box ``[lo, hi]``.

    ``mesh_size`` must divide every extent (to 1e-9 relative), which keeps node
    positions exact enough that sub-boxes can be located by index arithmetic.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    mesh_size: float

    def __post_init__(self):
        lo = _as_tuple(self.lo)
        hi = _as_tuple(self.hi, len(lo))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "mesh_size", float(self.mesh_size))
        if len(lo) not in (1, 2, 3):
            raise ValueError(f"grid dimension must be 1, 2 or 3, got {len(lo)}")
        if self.mesh_size <= 0:
            raise ValueError("mesh_size must be positive")
        for a, b in zip(lo, hi):
            if not b > a:
                raise ValueError(f"empty extent [{a}, {b}]")
            cells = (b - a) / self.mesh_size
            if abs(cells - round(cells)) > _SNAP * max(1.0, cells):
                raise ValueError(
                    f"mesh_size {self.mesh_size} does not divide extent [{a}, {b}]"
                )
            if round(cells) + 1 < 3:
                raise ValueError("need at least 3 nodes per axis")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @cached_property
    def shape(self) -> tuple[int, ...]:
        return tuple(
            int(round((b - a) / self.mesh_size)) + 1 for a, b in zip(self.lo, self.hi)
        )

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple((b - a) / (n - 1) for a, b, n in zip(self.lo, self.hi, self.shape))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(a, b, n) for a, b, n in zip(self.lo, self.hi, self.shape)]

    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def points(self) -> np.ndarray:
        """Node coordinates as an ``(size, dim)`` array in row-major order."""
        return np.stack([m.ravel() for m in self.mesh()], axis=1)

    def index_of(self, axis: int, x: float) -> int:
        """Index of the node at coordinate ``x`` along ``axis`` (must be on the grid)."""
        pos = (x - self.lo[axis]) / self.spacing[axis]
        idx = int(round(pos))
        if abs(pos - idx) > 1e-6 or not 0 <= idx < self.shape[axis]:
            raise ValueError(f"coordinate {x} is not a node of axis {axis}")
        return idx

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def ones(self) -> np.ndarray:
        return np.ones(self.shape)

    def interior_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[(slice(1, -1),) * self.dim] = True
        return mask

    def trapezoid_weights(self) -> np.ndarray:
        """Tensor-product trapezoidal quadrature weights on the nodes."""
        w = np.ones(self.shape)
        for axis, h in enumerate(self.spacing):
            w1 = np.full(self.shape[axis], h)
            w1[[0, -1]] = h / 2
            shape = [1] * self.dim
            shape[axis] = -1
            w = w * w1.reshape(shape)
        return w


@dataclass(frozen=True)
class GridSpec:
    """Computational box ``G`` with the inverse-problem box ``Omega`` inside it.

    ``source_side`` says on which face of the depth (last) axis the plane wave
    is initialised: ``"hi"`` for a downgoing wave (2D land-mine geometry),
    ``"lo"`` for a wave travelling towards +z (3D belt geometry).  The face of
    ``Omega`` facing the source is the backscattering side.
    """

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    mesh_size: float
    omega_lo: tuple[float, ...]
    omega_hi: tuple[float, ...]
    source_side: str = "hi"
    G: Grid = field(init=False, repr=False, compare=False)
    omega: Grid = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        G = Grid(self.lo, self.hi, self.mesh_size)
        om = Grid(self.omega_lo, _as_tuple(self.omega_hi), self.mesh_size)
        object.__setattr__(self, "lo", G.lo)
        object.__setattr__(self, "hi", G.hi)
        object.__setattr__(self, "mesh_size", G.mesh_size)
        object.__setattr__(self, "omega_lo", om.lo)
        object.__setattr__(self, "omega_hi", om.hi)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "omega", om)
        if om.dim != G.dim:
            raise ValueError("Omega and G must have the same dimension")
        if G.dim not in (2, 3):
            raise ValueError("GridSpec supports dim 2 or 3")
        for a, b, oa, ob in zip(G.lo, G.hi, om.lo, om.hi):
            if not (oa > a and ob < b):
                raise ValueError("Omega must lie strictly inside G")
        if self.source_side not in ("lo", "hi"):
            raise ValueError("source_side must be 'lo' or 'hi'")
        # Omega faces must be grid nodes of G
        for axis in range(G.dim):
            G.index_of(axis, om.lo[axis])
            G.index_of(axis, om.hi[axis])

    @property
    def dim(self) -> int:
        return self.G.dim

    @cached_property
    def omega_slices(self) -> tuple[slice, ...]:
        """Index slices of the closed ``Omega`` block inside ``G`` arrays."""
        return tuple(
            slice(self.G.index_of(k, self.omega_lo[k]), self.G.index_of(k, self.omega_hi[k]) + 1)
            for k in range(self.dim)
        )

    def omega_mask(self) -> np.ndarray:
        mask = np.zeros(self.G.shape, dtype=bool)
        mask[self.omega_slices] = True
        return mask

    def restrict(self, f: np.ndarray) -> np.ndarray:
        """Copy of the ``Omega`` block of a field on ``G``."""
        return np.array(f[self.omega_slices])

    def extend(self, f_omega: np.ndarray, fill: float = 1.0) -> np.ndarray:
        """Field on ``G`` equal to ``f_omega`` on closed ``Omega`` and ``fill`` elsewhere."""
        out = np.full(self.G.shape, float(fill))
        out[self.omega_slices] = f_omega
        return out

    def to_dict(self) -> dict:
        return {
            "lo": list(self.lo),
            "hi": list(self.hi),
            "mesh_size": self.mesh_size,
            "omega_lo": list(self.omega_lo),
            "omega_hi": list(self.omega_hi),
            "source_side": self.source_side,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(
            lo=tuple(d["lo"]),
            hi=tuple(d["hi"]),
            mesh_size=d["mesh_size"],
            omega_lo=tuple(d["omega_lo"]),
            omega_hi=tuple(d["omega_hi"]),
            source_side=d.get("source_side", "hi"),
        )


# ---------------------------------------------------------------------------
# boundary regions of Omega

BOUNDARY_TAGS = ("backscatter", "lateral", "bottom", "top", "back")


def boundary_regions(grid: Grid, source_side: str = "hi") -> dict[str, np.ndarray]:
    """Partition the boundary nodes of ``grid`` into tagged regions.

    2D: ``backscatter`` is the open face nearest the source, ``lateral`` the two
    x1-faces (corners included), ``bottom`` the remaining open depth face.

    3D (axes x, y, z with z the depth): ``lateral`` are the x-faces, ``top`` /
    ``bottom`` the y-faces without their x-edges, ``backscatter`` the z-face on
    the source side and ``back`` the opposite z-face, both without edges.

    Returns boolean masks over ``grid.shape``.
    """
    dim = grid.dim
    boundary = ~grid.interior_mask()
    near = 0 if source_side == "lo" else -1
    far = -1 - near
    regions = {tag: np.zeros(grid.shape, dtype=bool) for tag in BOUNDARY_TAGS}

    lateral = np.zeros(grid.shape, dtype=bool)
    lateral[0, ...] = True
    lateral[-1, ...] = True
    regions["lateral"] = lateral
    taken = lateral.copy()
    if dim == 3:
        top = np.zeros(grid.shape, dtype=bool)
        bot = np.zeros(grid.shape, dtype=bool)
        top[:, -1, :] = True
        bot[:, 0, :] = True
        regions["top"] = top & ~taken
        regions["bottom"] = bot & ~taken
        taken |= top | bot
    near_face = np.zeros(grid.shape, dtype=bool)
    far_face = np.zeros(grid.shape, dtype=bool)
    near_face[..., near] = True
    far_face[..., far] = True
    regions["backscatter"] = near_face & ~taken
    if dim == 3:
        regions["back"] = far_face & ~taken
    else:
        regions["bottom"] = far_face & ~taken
    total = sum(m.astype(int) for m in regions.values())
    assert np.array_equal(total > 0, boundary) and total.max() <= 1
    return regions


def boundary_mask(grid: Grid) -> np.ndarray:
    return ~grid.interior_mask()


# ---------------------------------------------------------------------------
# discrete operators


def gradient(f: np.ndarray, grid: Grid) -> list[np.ndarray]:
    """Second-order gradient: centred inside, one-sided three-point at the faces."""
    return [np.gradient(f, h, axis=k, edge_order=2) for k, h in enumerate(grid.spacing)]


def laplacian(f: np.ndarray, grid: Grid) -> np.ndarray:
    """5-point (2D) / 7-point (3D) Laplacian.

    Boundary nodes receive the value of the nearest interior node; callers
    only consume interior values.
    """
    f = np.asarray(f, dtype=float)
    out = np.zeros_like(f)
    inner = (slice(1, -1),) * grid.dim
    for k, h in enumerate(grid.spacing):
        plus = [slice(1, -1)] * grid.dim
        minus = [slice(1, -1)] * grid.dim
        plus[k] = slice(2, None)
        minus[k] = slice(None, -2)
        out[inner] += (f[tuple(plus)] - 2.0 * f[inner] + f[tuple(minus)]) / h**2
    return _copy_to_boundary(out)


def _copy_to_boundary(a: np.ndarray) -> np.ndarray:
    for k in range(a.ndim):
        first = [slice(None)] * a.ndim
        second = [slice(None)] * a.ndim
        first[k], second[k] = 0, 1
        a[tuple(first)] = a[tuple(second)]
        first[k], second[k] = -1, -2
        a[tuple(first)] = a[tuple(second)]
    return a


def grad_dot(a: list[np.ndarray], b: list[np.ndarray]) -> np.ndarray:
    return sum(x * y for x, y in zip(a, b))


def grad_sq(a: list[np.ndarray]) -> np.ndarray:
    return grad_dot(a, a)


def l2_norm(f: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(np.sum(grid.trapezoid_weights() * f**2)))


def l2_relative_diff(a: np.ndarray, b: np.ndarray, grid: Grid) -> float:
    """``||a - b|| / ||a||`` in discrete L2 over the grid (trapezoidal weights)."""
    if np.shape(a) != grid.shape or np.shape(b) != grid.shape:
        raise ValueError("fields must live on the given grid")
    denom = l2_norm(a, grid)
    if denom == 0.0:
        raise ZeroDivisionError("reference field has zero L2 norm")
    return l2_norm(np.asarray(a) - np.asarray(b), grid) / denom


MOLLIFY_STENCILS = ("mean", "lazy")


def mollify(f: np.ndarray, passes: int = 2, stencil: str = "mean") -> np.ndarray:
    """Apply ``passes`` rounds of face-neighbour averaging.

    ``stencil="mean"`` replaces each node by the mean of itself and its
    ``2*dim`` face neighbours.  ``stencil="lazy"`` keeps half the node value
    and takes the other half from the mean of the neighbours, which damps
    less per pass.  A neighbour missing at a face is replaced by the node
    itself.  Both stencil matrices are symmetric with unit row sums, so
    constants and the field sum are preserved.
    """
    if passes < 0:
        raise ValueError("passes must be >= 0")
    if stencil not in MOLLIFY_STENCILS:
        raise ValueError(f"unknown stencil {stencil!r}; choose from {MOLLIFY_STENCILS}")
    out = np.array(f, dtype=float)
    nb = 2 * out.ndim
    for _ in range(passes):
        padded = np.pad(out, 1, mode="edge")
        acc = np.zeros_like(out)
        for k in range(out.ndim):
            lo = [slice(1, -1)] * out.ndim
            hi = [slice(1, -1)] * out.ndim
            lo[k] = slice(None, -2)
            hi[k] = slice(2, None)
            acc += padded[tuple(lo)] + padded[tuple(hi)]
        if stencil == "mean":
            out = (out + acc) / (nb + 1)
        else:
            out = 0.5 * out + acc / (2 * nb)
    return out
