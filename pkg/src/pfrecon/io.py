"""File formats: FLD1 fields, TRC1 traces, PSI1 boundary data, VTK export and run manifests.

All binary payloads are little-endian float64 (int64 for node indices) in
row-major order, preceded by a single ASCII header line.
"""
from __future__ import annotations

import csv
import hashlib
import json
import platform
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .grids import Grid
from .laplace import PseudoFreqBoundaryData, PseudoFreqGrid
from .wave import TimeTrace

__all__ = [
    "write_field",
    "read_field",
    "write_trace",
    "read_trace",
    "write_psi",
    "read_psi",
    "export_vtk",
    "read_vtk_header",
    "write_history",
    "write_manifest",
    "manifest_path",
]

_F64 = np.dtype("<f8")
_I64 = np.dtype("<i8")


def _fmt(x: float) -> str:
    return repr(float(x))


def _read_header(fh, magic: str) -> list[str]:
    line = fh.readline().decode("ascii", errors="replace").split()
    if not line or line[0] != magic:
        raise ConfigurationError(f"not a {magic} file (header starts with {line[:1]})")
    return line[1:]


def _read_payload(fh, dtype, count: int, what: str) -> np.ndarray:
    data = np.frombuffer(fh.read(count * dtype.itemsize), dtype=dtype)
    if data.size != count:
        raise ConfigurationError(f"truncated {what}: expected {count} values, found {data.size}")
    return data


# ---------------------------------------------------------------------------
# FLD1


def write_field(path, values: np.ndarray, grid: Grid) -> None:
    """``FLD1 dim n1 n2 [n3] lo... hi...`` then the node values."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise ConfigurationError(f"field shape {values.shape} does not match grid {grid.shape}")
    head = ["FLD1", str(grid.dim), *map(str, grid.shape), *map(_fmt, grid.lo), *map(_fmt, grid.hi)]
    with open(path, "wb") as fh:
        fh.write((" ".join(head) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(values, dtype=_F64).tobytes())


def read_field(path) -> tuple[np.ndarray, Grid]:
    with open(path, "rb") as fh:
        h = _read_header(fh, "FLD1")
        dim = int(h[0])
        shape = tuple(int(v) for v in h[1 : 1 + dim])
        lo = tuple(float(v) for v in h[1 + dim : 1 + 2 * dim])
        hi = tuple(float(v) for v in h[1 + 2 * dim : 1 + 3 * dim])
        vals = _read_payload(fh, _F64, int(np.prod(shape)), "field")
    spacing = {(b - a) / (n - 1) for a, b, n in zip(lo, hi, shape)}
    mesh = min(spacing)
    grid = Grid(lo, hi, mesh)
    if grid.shape != shape:
        raise ConfigurationError("FLD1 header describes a non-uniform grid")
    return vals.reshape(shape).copy(), grid


# ---------------------------------------------------------------------------
# TRC1


def write_trace(path, trace: TimeTrace) -> None:
    """``TRC1 nnodes nsteps tau``, one coordinate line per node, then samples."""
    with open(path, "wb") as fh:
        fh.write(f"TRC1 {trace.nnodes} {trace.nsteps} {_fmt(trace.tau)}\n".encode("ascii"))
        for row in trace.coords:
            fh.write((" ".join(_fmt(x) for x in row) + "\n").encode("ascii"))
        fh.write(np.ascontiguousarray(trace.samples, dtype=_F64).tobytes())


def read_trace(path) -> TimeTrace:
    with open(path, "rb") as fh:
        h = _read_header(fh, "TRC1")
        nnodes, nsteps, tau = int(h[0]), int(h[1]), float(h[2])
        coords = [
            [float(x) for x in fh.readline().decode("ascii").split()] for _ in range(nnodes)
        ]
        samples = _read_payload(fh, _F64, nnodes * (nsteps + 1), "trace")
    return TimeTrace(np.array(coords), samples.reshape(nnodes, nsteps + 1).copy(), tau)


# ---------------------------------------------------------------------------
# PSI1


def write_psi(path, data: PseudoFreqBoundaryData) -> None:
    """Header ``PSI1 s_min s_max h N nb dim n1 n2 [n3]``; payload: node indices,
    ``psi_bar`` (N x nb), ``psi(s_max)`` and the measured-node bitmask."""
    sg = data.sgrid
    head = [
        "PSI1",
        _fmt(sg.s_min),
        _fmt(sg.s_max),
        _fmt(sg.h),
        str(sg.N),
        str(data.nodes.size),
        str(len(data.omega_shape)),
        *map(str, data.omega_shape),
    ]
    with open(path, "wb") as fh:
        fh.write((" ".join(head) + "\n").encode("ascii"))
        fh.write(data.nodes.astype(_I64).tobytes())
        fh.write(np.ascontiguousarray(data.psi_bar, dtype=_F64).tobytes())
        fh.write(np.ascontiguousarray(data.psi_sbar, dtype=_F64).tobytes())
        fh.write(np.packbits(data.measured.astype(np.uint8)).tobytes())


def read_psi(path) -> PseudoFreqBoundaryData:
    with open(path, "rb") as fh:
        h = _read_header(fh, "PSI1")
        sg = PseudoFreqGrid(float(h[0]), float(h[1]), float(h[2]))
        N, nb, dim = int(h[3]), int(h[4]), int(h[5])
        if N != sg.N:
            raise ConfigurationError("PSI1 interval count disagrees with its s-grid")
        shape = tuple(int(v) for v in h[6 : 6 + dim])
        nodes = _read_payload(fh, _I64, nb, "node table")
        bar = _read_payload(fh, _F64, N * nb, "interval data").reshape(N, nb)
        sbar = _read_payload(fh, _F64, nb, "s_max data")
        nbytes = (nb + 7) // 8
        bits = np.frombuffer(fh.read(nbytes), dtype=np.uint8)
        if bits.size != nbytes:
            raise ConfigurationError("truncated provenance bitmask")
    measured = np.unpackbits(bits)[:nb].astype(bool)
    return PseudoFreqBoundaryData(sg, shape, nodes.copy(), bar.copy(), sbar.copy(), measured)


# ---------------------------------------------------------------------------
# VTK


def export_vtk(path, values: np.ndarray, grid: Grid, name: str = "c") -> None:
    """Legacy ASCII ``STRUCTURED_POINTS`` file (x varies fastest).

    The title line carries the scalar range as ``range <min> <max>``.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise ConfigurationError("field does not match grid")
    if not np.all(np.isfinite(values)):
        raise ConfigurationError("field contains non-finite values")
    dims = list(grid.shape) + [1] * (3 - grid.dim)
    origin = list(grid.lo) + [0.0] * (3 - grid.dim)
    spacing = list(grid.spacing) + [1.0] * (3 - grid.dim)
    lines = [
        "# vtk DataFile Version 3.0",
        f"pfrecon {name} range {_fmt(values.min())} {_fmt(values.max())}",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS " + " ".join(map(str, dims)),
        "ORIGIN " + " ".join(map(_fmt, origin)),
        "SPACING " + " ".join(map(_fmt, spacing)),
        f"POINT_DATA {values.size}",
        f"SCALARS {name} double 1",
        "LOOKUP_TABLE default",
    ]
    flat = values.ravel(order="F")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
        for k in range(0, flat.size, 8):
            fh.write(" ".join(_fmt(x) for x in flat[k : k + 8]) + "\n")


def read_vtk_header(path) -> dict:
    """Parse the header of a file written by :func:`export_vtk`."""
    out: dict = {}
    with open(path) as fh:
        lines = [fh.readline().rstrip("\n") for _ in range(10)]
    title = lines[1].split()
    if "range" in title:
        k = title.index("range")
        out["range"] = (float(title[k + 1]), float(title[k + 2]))
    for ln in lines[2:]:
        parts = ln.split()
        if not parts:
            continue
        key = parts[0]
        if key == "DIMENSIONS":
            out["dimensions"] = tuple(int(v) for v in parts[1:])
        elif key in ("ORIGIN", "SPACING"):
            out[key.lower()] = tuple(float(v) for v in parts[1:])
        elif key == "POINT_DATA":
            out["npoints"] = int(parts[1])
        elif key == "DATASET":
            out["dataset"] = parts[1]
    return out


# ---------------------------------------------------------------------------
# history and manifests


def write_history(path, history) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "i", "N_n", "max_c_in_omega", "runtime_ms"])
        for r in history:
            w.writerow([r.n, r.i, repr(float(r.N)), repr(float(r.max_c)), f"{r.runtime_ms:.3f}"])


def manifest_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def _versions() -> dict:
    import scipy

    from . import __version__

    return {
        "pfrecon": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def write_manifest(out, command: str, config: dict | None = None, seed: int | None = None, inputs=(), extra=None) -> Path:
    """Write ``<out>.manifest.json`` recording what is needed to reproduce ``out``."""
    cfg_text = json.dumps(config, sort_keys=True) if config is not None else ""
    digests = {}
    for p in inputs:
        p = Path(p)
        digests[str(p)] = hashlib.sha256(p.read_bytes()).hexdigest() if p.exists() else None
    man = {
        "command": command,
        "output": str(out),
        "config_hash": hashlib.sha256(cfg_text.encode()).hexdigest() if config is not None else None,
        "config": config,
        "seed": seed,
        "inputs": digests,
        "versions": _versions(),
    }
    if extra:
        man.update(extra)
    path = manifest_path(out)
    path.write_text(json.dumps(man, indent=2, sort_keys=True, default=str))
    return path
