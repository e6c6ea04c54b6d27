"""Command-line interface.

Subcommands::

    simulate     forward solve; boundary traces of Omega -> TRC1
    add-noise    multiplicative noise on the backscattering traces
    transform    traces -> completed interval-averaged boundary data (PSI1)
    reconstruct  PSI1 -> coefficient field (FLD1) and iteration history (CSV)
    export       FLD1 -> legacy VTK
    verify       run verification suites

Exit codes: 0 success, 2 invalid input or configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, NumericalError

log = logging.getLogger("pfrecon")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _scenario(args):
    from .scenarios import load_scenario

    return load_scenario(args.config)


def _match_rows(coords: np.ndarray, points: np.ndarray, tol: float) -> np.ndarray:
    """Row index into ``points`` for every coordinate row (exact grid nodes)."""
    lookup = {tuple(np.round(p / tol).astype(np.int64)): k for k, p in enumerate(points)}
    rows = []
    for c in coords:
        key = tuple(np.round(c / tol).astype(np.int64))
        if key not in lookup:
            raise ConfigurationError(f"trace node {tuple(c)} is not a boundary node of Omega")
        rows.append(lookup[key])
    return np.array(rows, dtype=int)


def cmd_simulate(args) -> int:
    from .io import write_field, write_manifest, write_trace
    from .pipeline import omega_boundary_nodes
    from .wave import solve_forward

    sc = _scenario(args)
    _, G_flat, _ = omega_boundary_nodes(sc)
    wave = sc.wave
    if args.snapshots:
        wave = type(wave).from_dict({**wave.to_dict(), "snapshot_every": args.snapshot_every})
    res = solve_forward(sc.true_c("G"), sc.grid, wave, record=G_flat)
    write_trace(args.out, res.trace)
    if args.snapshots:
        d = Path(args.snapshots)
        d.mkdir(parents=True, exist_ok=True)
        for t, u in res.snapshots:
            write_field(d / f"u_t{t:09.4f}.fld1", u, sc.grid.G)
    write_manifest(args.out, "simulate", sc.to_dict(), sc.seed)
    print(f"wrote {res.trace.nnodes} traces x {res.trace.nsteps + 1} samples to {args.out}")
    return EXIT_OK


def _gamma_rows(sc, trace):
    from .pipeline import omega_boundary_nodes

    omega_flat, _, measured = omega_boundary_nodes(sc)
    pts = sc.grid.omega.points()[omega_flat]
    rows = _match_rows(trace.coords, pts, 1e-6 * sc.grid.mesh_size)
    return rows, omega_flat, measured


def cmd_add_noise(args) -> int:
    from .io import read_trace, write_manifest, write_trace
    from .laplace import add_noise
    from .wave import TimeTrace

    tr = read_trace(args.trace)
    if args.config:
        sc = _scenario(args)
        rows, _, measured = _gamma_rows(sc, tr)
        sel = np.flatnonzero(measured[rows])
    else:
        sel = np.arange(tr.nnodes)
    noisy = add_noise(tr.subset(sel), args.sigma, args.seed)
    samples = tr.samples.copy()
    samples[sel] = noisy.samples
    write_trace(args.out, TimeTrace(tr.coords, samples, tr.tau))
    write_manifest(args.out, "add-noise", {"sigma": args.sigma}, args.seed, inputs=[args.trace])
    print(f"noise sigma={args.sigma} seed={args.seed} applied to {sel.size} traces")
    return EXIT_OK


def cmd_transform(args) -> int:
    from .io import read_trace, write_manifest, write_psi
    from .laplace import PseudoFreqBoundaryData, PseudoFreqGrid, complete_boundary
    from .pipeline import simulate_traces, traces_to_psi

    sc = _scenario(args)
    sg = sc.sgrid
    if args.s_min is not None or args.s_max is not None or args.h is not None:
        sg = PseudoFreqGrid(
            args.s_min if args.s_min is not None else sg.s_min,
            args.s_max if args.s_max is not None else sg.s_max,
            args.h if args.h is not None else sg.h,
        )
        sc = sc.replace(**{"algo.sgrid": sg.to_dict()})
    tr = read_trace(args.trace)
    rows, omega_flat, measured = _gamma_rows(sc, tr)
    hom = simulate_traces(sc.replace(boxes=[])).homogeneous
    hom_bar, hom_sbar = traces_to_psi(hom, sc)
    base = PseudoFreqBoundaryData(sg, sc.grid.omega.shape, omega_flat, hom_bar, hom_sbar, np.zeros(omega_flat.size, bool))
    keep = np.arange(rows.size) if args.full_boundary else np.flatnonzero(measured[rows])
    bar, sbar = traces_to_psi(tr.subset(keep), sc)
    data = complete_boundary(omega_flat[rows[keep]], bar, sbar, base)
    write_psi(args.out, data)
    write_manifest(args.out, "transform", sc.to_dict(), None, inputs=[args.trace])
    print(f"wrote {sg.N} intervals x {omega_flat.size} boundary nodes ({int(data.measured.sum())} measured)")
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    from .io import read_psi, write_field, write_history, write_manifest
    from .recon import ForwardModel, ReconstructionError, run

    sc = _scenario(args)
    data = read_psi(args.data)
    cfg = sc.algo
    if data.sgrid != cfg.sgrid:
        cfg = type(cfg).from_dict({**cfg.to_dict(), "sgrid": data.sgrid.to_dict(), "lam": None})
    if args.first_tail:
        cfg = type(cfg).from_dict({**cfg.to_dict(), "first_tail": args.first_tail})
    model = ForwardModel(sc.grid, sc.wave)
    true_c = sc.true_c("G") if cfg.first_tail == "exact" else None
    try:
        c, state = run(data, cfg, model, true_c=true_c)
    except ReconstructionError as exc:
        if args.history:
            write_history(args.history, exc.state.history)
        raise
    write_field(args.out, c, sc.grid.omega)
    if args.history:
        write_history(args.history, state.history)
    write_manifest(
        args.out, "reconstruct", sc.to_dict(), sc.seed, inputs=[args.data], extra={"run": state.metadata, "algo": cfg.to_dict()}
    )
    print(f"stopped at n={state.stop_n} ({state.stop_reason}); returned c_{state.accepted_n}, max c = {c.max():.4f}")
    return EXIT_OK


def cmd_export(args) -> int:
    from .io import export_vtk, read_field

    vals, grid = read_field(args.field)
    export_vtk(args.out, vals, grid, name=args.name)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import Check, verify

    report = verify(args.suite)
    for c in report["checks"]:
        print(Check(**c).line())
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=2))
    print("ALL PASSED" if report["passed"] else "SOME CHECKS FAILED")
    return EXIT_OK if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pfrecon", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="forward solve and record traces on the boundary of Omega")
    s.add_argument("--config", required=True, help="scenario JSON file or built-in name")
    s.add_argument("--out", required=True)
    s.add_argument("--snapshots", help="directory for FLD1 wave-field snapshots")
    s.add_argument("--snapshot-every", type=int, default=50)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("add-noise", help="multiplicative noise on traces")
    s.add_argument("--trace", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--sigma", type=float, default=0.05)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--config", help="restrict noise to the backscattering side of this scenario")
    s.set_defaults(func=cmd_add_noise)

    s = sub.add_parser("transform", help="traces -> PSI1 boundary data")
    s.add_argument("--trace", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--s-min", type=float)
    s.add_argument("--s-max", type=float)
    s.add_argument("--h", type=float)
    s.add_argument("--full-boundary", action="store_true", help="use the traces on every side, not only the backscattering side")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("reconstruct", help="PSI1 -> reconstructed coefficient")
    s.add_argument("--data", required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--history")
    s.add_argument("--first-tail", choices=["harmonic", "homogeneous", "exact"])
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("export", help="FLD1 -> legacy VTK")
    s.add_argument("--field", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--name", default="c")
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("verify", help="run verification suites")
    s.add_argument("suite", nargs="?", default="all", choices=["cwf", "elliptic", "transform", "forward", "null", "bounds", "all"])
    s.add_argument("--out", help="write the JSON report here")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
