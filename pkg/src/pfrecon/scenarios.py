"""Scenario descriptions: geometry, true medium, wave, pseudo-frequencies, algorithm, noise.

Scenarios are stored as JSON.  Five are built in (``test1_2d`` ... ``test5_3d``);
``load_scenario`` accepts either one of those names or a file path.
"""
from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .grids import GridSpec
from .laplace import PseudoFreqGrid
from .recon import AlgoConfig
from .wave import WaveConfig

__all__ = ["Box", "Scenario", "BUILTIN", "builtin_names", "load_scenario", "scenario_from_dict"]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[lo, hi]`` (closed) carrying coefficient value ``c``."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    c: float
    name: str = ""

    def mask(self, mesh: tuple[np.ndarray, ...], tol: float = 1e-9) -> np.ndarray:
        m = np.ones(mesh[0].shape, dtype=bool)
        for x, a, b in zip(mesh, self.lo, self.hi):
            m &= (x >= a - tol) & (x <= b + tol)
        return m

    def to_dict(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi), "c": self.c, "name": self.name}


@dataclass
class Scenario:
    name: str
    grid: GridSpec
    boxes: list[Box]
    wave: WaveConfig
    algo: AlgoConfig
    noise_sigma: float = 0.0
    seed: int = 0
    background: float = 1.0
    description: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def sgrid(self) -> PseudoFreqGrid:
        return self.algo.sgrid

    def true_c(self, on: str = "G") -> np.ndarray:
        """Piecewise-constant coefficient; later boxes overwrite earlier ones."""
        target = self.grid.G if on == "G" else self.grid.omega
        mesh = target.mesh()
        c = np.full(target.shape, float(self.background))
        for b in self.boxes:
            c[b.mask(mesh)] = b.c
        return c

    def footprint(self, box: Box | int) -> np.ndarray:
        """Boolean mask of a box on the Omega grid."""
        if isinstance(box, int):
            box = self.boxes[box]
        return box.mask(self.grid.omega.mesh())

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "grid": self.grid.to_dict(),
            "background": self.background,
            "boxes": [b.to_dict() for b in self.boxes],
            "wave": self.wave.to_dict(),
            "algo": self.algo.to_dict(),
            "noise": {"sigma": self.noise_sigma, "seed": self.seed},
            "extra": self.extra,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def config_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()

    def replace(self, **changes) -> "Scenario":
        """Copy with top-level fields or ``algo``/``wave`` attributes replaced.

        Keys of the form ``"algo.m"`` address nested attributes.
        """
        d = self.to_dict()
        for key, val in changes.items():
            parts = key.split(".")
            tgt = d
            for p in parts[:-1]:
                tgt = tgt[p]
            tgt[parts[-1]] = val
        return scenario_from_dict(d)


def _require(d: dict, key: str, path: str):
    if not isinstance(d, dict):
        raise ConfigurationError(f"{path or '<root>'}: expected an object")
    if key not in d:
        raise ConfigurationError(f"{path + '.' if path else ''}{key}: missing field")
    return d[key]


def _number_list(v, path: str, dim: int | None = None) -> tuple[float, ...]:
    if not isinstance(v, (list, tuple)) or not all(isinstance(x, (int, float)) for x in v):
        raise ConfigurationError(f"{path}: expected a list of numbers")
    if dim is not None and len(v) != dim:
        raise ConfigurationError(f"{path}: expected {dim} entries, got {len(v)}")
    return tuple(float(x) for x in v)


def scenario_from_dict(d: dict) -> Scenario:
    """Validate and build a scenario; errors name the offending field path."""
    d = copy.deepcopy(d)
    name = _require(d, "name", "")
    g = _require(d, "grid", "")
    try:
        grid = GridSpec.from_dict(g)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"grid: {exc}") from None
    dim = grid.dim

    background = float(d.get("background", 1.0))
    if background != 1.0:
        raise ConfigurationError("background: the coefficient outside the targets must be 1")

    boxes = []
    for k, bd in enumerate(d.get("boxes", [])):
        path = f"boxes[{k}]"
        lo = _number_list(_require(bd, "lo", path), f"{path}.lo", dim)
        hi = _number_list(_require(bd, "hi", path), f"{path}.hi", dim)
        c = _require(bd, "c", path)
        label = bd.get("name") or path
        if not isinstance(c, (int, float)) or not c >= 1.0:
            raise ConfigurationError(f"{path}.c: box {label!r} has c={c}; values must be >= 1")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ConfigurationError(f"{path}: box {label!r} has lo >= hi")
        olo, ohi = grid.omega.lo, grid.omega.hi
        if any(a < ol - 1e-12 or b > oh + 1e-12 for a, b, ol, oh in zip(lo, hi, olo, ohi)):
            raise ConfigurationError(f"{path}: box {label!r} {lo}..{hi} is not inside Omega {olo}..{ohi}")
        boxes.append(Box(lo, hi, float(c), bd.get("name", "")))

    wave = WaveConfig.from_dict(_require(d, "wave", ""))
    wave.validate(grid)
    a = _require(d, "algo", "")
    _require(a, "sgrid", "algo")
    try:
        algo = AlgoConfig.from_dict(a)
    except TypeError as exc:
        raise ConfigurationError(f"algo: {exc}") from None
    noise = d.get("noise", {})
    sigma = float(noise.get("sigma", 0.0))
    if sigma < 0:
        raise ConfigurationError("noise.sigma: must be non-negative")
    seed = noise.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigurationError("noise.seed: must be an integer")
    return Scenario(
        name=str(name),
        grid=grid,
        boxes=boxes,
        wave=wave,
        algo=algo,
        noise_sigma=sigma,
        seed=seed,
        background=background,
        description=d.get("description", ""),
        extra=d.get("extra", {}),
    )


def _algo(s_min, s_max, h, m, first_tail, c_max=None, eta=1e-3, lam=None):
    return {
        "sgrid": {"s_min": s_min, "s_max": s_max, "h": h},
        "lam": lam if lam is not None else 1.0 / h,
        "m": m,
        "eta": eta,
        "c_min": 1.0,
        "c_max": c_max,
        "tail_mode": "time-domain",
        "first_tail": first_tail,
        "mollify_passes": 2,
        "mollify_stencil": "lazy",
        "d": None,
        "solver_tol": 1e-10,
    }


_GRID_2D = {
    "lo": [-4.0, -1.0],
    "hi": [4.0, 4.0],
    "mesh_size": 0.125,
    "omega_lo": [-3.5, -0.5],
    "omega_hi": [3.5, 3.5],
    "source_side": "hi",
}
_TARGETS_2D = [
    {"lo": [-1.5, 2.0], "hi": [-0.5, 3.0], "c": 4.0, "name": "square"},
    {"lo": [0.0, 2.0], "hi": [2.0, 3.0], "c": 4.0, "name": "rectangle"},
]
_WAVE_2D = {"omega_src": 7.0, "T": 6.0, "tau": None, "snapshot_every": None, "boundary": "absorbing"}

_GRID_3D = {
    "lo": [-0.5, -1.08, -0.32],
    "hi": [0.5, 1.08, 0.32],
    "mesh_size": 0.04,
    "omega_lo": [-0.3, -1.0, -0.08],
    "omega_hi": [0.3, 1.0, 0.08],
    "source_side": "lo",
}
_BELT = {"lo": [-0.26, -0.15, -0.04], "hi": [0.26, 0.15, 0.04], "c": 3.2, "name": "belt"}
_BODY = {"lo": [-0.3, -1.0, -0.08], "hi": [0.3, 1.0, 0.08], "c": 80.0, "name": "body"}
_WAVE_3D = {"omega_src": 21.0, "T": 1.0, "tau": 0.001, "snapshot_every": None, "boundary": "absorbing"}

BUILTIN: dict[str, dict] = {
    "test1_2d": {
        "name": "test1_2d",
        "description": "two c=4 targets at depth 2.5, homogeneous-medium first tail",
        "grid": _GRID_2D,
        "background": 1.0,
        "boxes": _TARGETS_2D,
        "wave": _WAVE_2D,
        "algo": _algo(2.0, 3.0, 0.05, 5, "homogeneous"),
        "noise": {"sigma": 0.05, "seed": 1},
    },
    "test2_2d": {
        "name": "test2_2d",
        "description": "two c=4 targets at depth 2.5, harmonic first tail",
        "grid": _GRID_2D,
        "background": 1.0,
        "boxes": _TARGETS_2D,
        "wave": _WAVE_2D,
        "algo": _algo(2.0, 3.0, 0.05, 6, "harmonic"),
        "noise": {"sigma": 0.05, "seed": 1},
    },
    "test3_3d": {
        "name": "test3_3d",
        "description": "c=3.2 belt, coarse pseudo-frequency grid",
        "grid": _GRID_3D,
        "background": 1.0,
        "boxes": [_BELT],
        "wave": _WAVE_3D,
        "algo": _algo(4.0, 11.0, 1.0, 2, "homogeneous"),
        "noise": {"sigma": 0.05, "seed": 1},
    },
    "test4_3d": {
        "name": "test4_3d",
        "description": "c=3.2 belt, fine pseudo-frequency grid, harmonic first tail",
        "grid": _GRID_3D,
        "background": 1.0,
        "boxes": [_BELT],
        "wave": _WAVE_3D,
        "algo": _algo(8.0, 8.85, 0.05, 2, "harmonic"),
        "noise": {"sigma": 0.05, "seed": 1},
    },
    "test5_3d": {
        "name": "test5_3d",
        "description": "c=80 body with a c=3.2 belt, clamped to [1, 10]",
        "grid": _GRID_3D,
        "background": 1.0,
        "boxes": [_BODY, _BELT],
        "wave": _WAVE_3D,
        "algo": _algo(8.0, 8.8, 0.05, 3, "harmonic", c_max=10.0),
        "noise": {"sigma": 0.05, "seed": 1},
    },
}


def builtin_names() -> list[str]:
    return sorted(BUILTIN)


def load_scenario(path_or_name: str | Path) -> Scenario:
    """Load a built-in scenario by name or a JSON scenario file."""
    key = str(path_or_name)
    if key in BUILTIN:
        return scenario_from_dict(BUILTIN[key])
    p = Path(key)
    if not p.exists():
        raise ConfigurationError(f"no scenario file or built-in named {key!r} (built-ins: {builtin_names()})")
    try:
        d = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{p}: not valid JSON ({exc})") from None
    return scenario_from_dict(d)
