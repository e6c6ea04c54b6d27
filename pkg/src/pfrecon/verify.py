"""Verification suites: each check compares a computed quantity with an
independent oracle and reports the measured value next to its tolerance.

Suites: ``cwf``, ``elliptic``, ``transform``, ``forward``, ``null``, ``bounds``
(and ``all``).  Failures are report content, never exceptions.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .cwf import compute_cwf, cwf_by_quadrature
from .elliptic import EllipticProblem, point_source_field, solve_dirichlet, solve_pseudofreq_field
from .grids import Grid, GridSpec
from .laplace import PseudoFreqGrid, laplace_transform, laplace_transform_ds
from .wave import TimeTrace, WaveConfig, solve_forward, waveform_integral

__all__ = ["Check", "SUITES", "verify", "observed_order"]


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    measured: float
    tolerance: str
    detail: str = ""

    def __post_init__(self):
        # numpy scalars would leak into the JSON report otherwise
        self.passed = bool(self.passed)
        self.measured = float(self.measured)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.suite}/{self.name}: measured {self.measured:.6g} (tolerance {self.tolerance}) {self.detail}".rstrip()


def observed_order(e_coarse: float, e_fine: float, ratio: float = 2.0) -> float:
    return math.log(e_coarse / e_fine) / math.log(ratio)


def _order_check(suite, name, errs, lo=1.8, hi=2.2) -> Check:
    p = observed_order(errs[0], errs[1])
    return Check(suite, name, lo <= p <= hi, p, f"[{lo}, {hi}]", f"errors {errs[0]:.3e} -> {errs[1]:.3e}")


# ---------------------------------------------------------------------------
# cwf


def cwf_bound_samples(count: int = 1000, seed: int = 0):
    """Random ``(sgrid, n, lam)`` with ``lam * h >= 1`` and ``s_max >= 1``."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        h = float(10 ** rng.uniform(-2.5, 0.0))
        N = int(rng.integers(1, 40))
        s_max = float(rng.uniform(1.0, 15.0)) + N * h
        sg = PseudoFreqGrid(s_max - N * h, s_max, h)
        lam = float(10 ** rng.uniform(0.0, 3.0)) / h
        n = int(rng.integers(1, N + 1))
        yield sg, n, lam


def suite_cwf(count: int = 1000, seed: int = 0) -> list[Check]:
    worst_a = worst_i = 0.0
    for sg, n, lam in cwf_bound_samples(count, seed):
        cw = compute_cwf(n, sg, lam)
        sbar = sg.s_max
        worst_a = max(worst_a, (abs(cw.A1) + abs(cw.A2)) / (8.0 * sbar**2))
        worst_i = max(worst_i, abs(cw.I1_over_I0) / (4.0 * sbar**2 / lam))
    checks = [
        Check("cwf", "A-bound", worst_a <= 1.0, worst_a, "<= 1", f"max (|A1|+|A2|)/(8 sbar^2) over {count} draws"),
        Check("cwf", "I-bound", worst_i <= 1.0, worst_i, "<= 1", f"max |I1/I0|/(4 sbar^2/lam) over {count} draws"),
    ]

    # large-lambda limits from quadrature, Richardson-extrapolated in 1/lam
    sg = PseudoFreqGrid(2.0, 3.0, 0.05)
    for n in (1, 10):
        S = sg.s(n - 1)
        q3, q4 = cwf_by_quadrature(n, sg, 1e3), cwf_by_quadrature(n, sg, 1e4)

        def extrap(a, b):
            return (10.0 * b - a) / 9.0

        e1 = abs(extrap(q3.A1, q4.A1) - 2 * S**2) / (2 * S**2)
        e2 = abs(extrap(q3.A2, q4.A2) - 2 * S) / (2 * S)
        e3 = abs(extrap(q3.I1_over_I0, q4.I1_over_I0)) / S**2
        worst = max(e1, e2, e3)
        checks.append(Check("cwf", f"limit-n{n}", worst <= 1e-3, worst, "<= 1e-3", "relative error of extrapolated limits"))

    sg = PseudoFreqGrid(2.0, 3.0, 0.05)
    worst = 0.0
    for n in range(1, sg.N + 1):
        a, b = compute_cwf(n, sg, 20.0), cwf_by_quadrature(n, sg, 20.0)
        for f in ("A1", "A2", "I1_over_I0"):
            ref = getattr(b, f)
            worst = max(worst, abs(getattr(a, f) - ref) / max(abs(ref), 1e-300))
    checks.append(Check("cwf", "closed-form-vs-quadrature", worst <= 1e-10, worst, "<= 1e-10", "lam=20, h=0.05"))
    return checks


# ---------------------------------------------------------------------------
# elliptic


def mms_errors_poisson(ns=(16, 32)) -> list[float]:
    errs = []
    for n in ns:
        g = Grid((0.0, 0.0), (1.0, 1.0), 1.0 / n)
        X, Y = g.mesh()
        u = np.sin(math.pi * X) * np.exp(Y)
        f = (1.0 - math.pi**2) * u
        errs.append(float(np.abs(solve_dirichlet(EllipticProblem(g, f, u)) - u).max()))
    return errs


def mms_errors_drift(ns=(16, 32)) -> list[float]:
    """``Laplace(q) + b . grad(q) = f`` with a variable drift."""
    errs = []
    for n in ns:
        g = Grid((0.0, 0.0), (1.0, 1.0), 1.0 / n)
        X, Y = g.mesh()
        q = np.sin(X) * np.cos(Y)
        b = [1.0 + X * Y, -np.ones_like(X) + 0.5 * Y]
        qx, qy = np.cos(X) * np.cos(Y), -np.sin(X) * np.sin(Y)
        f = -2.0 * q + b[0] * qx + b[1] * qy
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            errs.append(float(np.abs(solve_dirichlet(EllipticProblem(g, f, q, drift=b)) - q).max()))
    return errs


def mms_errors_helmholtz(ns=(12, 24), s: float = 2.0) -> list[float]:
    """``Laplace(w) - s^2 c w = f`` in 3D with variable ``c``."""
    errs = []
    for n in ns:
        g = Grid((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 1.0 / n)
        X, Y, Z = g.mesh()
        w = np.exp(-X) * np.cos(Y) * (1.0 + Z**2)
        c = 1.0 + X * Y * Z
        lap = 2.0 * np.exp(-X) * np.cos(Y)  # the x and y second derivatives cancel
        f = lap - s**2 * c * w
        num = solve_dirichlet(EllipticProblem(g, f, w, zeroth_order=s**2 * c))
        errs.append(float(np.abs(num - w).max()))
    return errs


def mms_errors_first_tail(ns=(16, 32)) -> list[float]:
    """Harmonic extension: ``exp(x) sin(y)`` is harmonic but not discretely so."""
    errs = []
    for n in ns:
        g = Grid((0.0, 0.0), (1.0, 2.0), 1.0 / n)
        X, Y = g.mesh()
        p = np.exp(X) * np.sin(Y)
        errs.append(float(np.abs(solve_dirichlet(EllipticProblem(g, 0.0, p)) - p).max()))
    return errs


def suite_elliptic() -> list[Check]:
    checks = [
        _order_check("elliptic", "mms-poisson", mms_errors_poisson()),
        _order_check("elliptic", "mms-drift", mms_errors_drift()),
        _order_check("elliptic", "mms-helmholtz-3d", mms_errors_helmholtz()),
        _order_check("elliptic", "mms-harmonic", mms_errors_first_tail()),
    ]
    g = Grid((0.0, 0.0), (1.0, 1.0), 1.0 / 32)
    X, Y = g.mesh()
    c = 1.0 + 3.0 * np.exp(-20 * ((X - 0.5) ** 2 + (Y - 0.5) ** 2))
    w = solve_pseudofreq_field(g, c, 3.0, np.exp(-Y) + 0.1)
    checks.append(Check("elliptic", "positivity", bool(w.min() > 0), float(w.min()), "> 0"))
    return checks


# ---------------------------------------------------------------------------
# transform


def _synthetic_trace(fn, T: float, tau: float) -> TimeTrace:
    t = np.arange(int(round(T / tau)) + 1) * tau
    return TimeTrace(np.zeros((1, 1)), fn(t)[None, :], tau)


def laplace_pair_errors(s_values=(1.0, 2.0, 3.0), tau: float = 1e-4) -> dict:
    """Errors against ``1/(s+1)`` and ``1/s``; ``T`` keeps the dropped tail below 1e-10."""
    out = {}
    smin = min(s_values)
    T_exp = math.log(1e10 / (smin + 1.0)) / (smin + 1.0) + 1.0
    T_one = math.log(1e10 / smin) / smin + 1.0
    tr_exp = _synthetic_trace(lambda t: np.exp(-t), T_exp, tau)
    tr_one = _synthetic_trace(lambda t: np.ones_like(t), T_one, tau)
    out["exp"] = max(abs(float(laplace_transform(tr_exp, s)[0]) - 1.0 / (s + 1.0)) for s in s_values)
    out["one"] = max(abs(float(laplace_transform(tr_one, s)[0]) - 1.0 / s) for s in s_values)
    out["tail_exp"] = math.exp(-(smin + 1.0) * T_exp) / (smin + 1.0)
    out["tail_one"] = math.exp(-smin * T_one) / smin
    return out


def ds_difference_errors(s: float = 2.0, deltas=(0.02, 0.01)) -> list[float]:
    tr = _synthetic_trace(lambda t: t * np.exp(-t) + np.sin(3 * t) ** 2 * np.exp(-0.5 * t), 30.0, 1e-3)
    exact = float(laplace_transform_ds(tr, s)[0])
    errs = []
    for d in deltas:
        cd = (float(laplace_transform(tr, s + d)[0]) - float(laplace_transform(tr, s - d)[0])) / (2 * d)
        errs.append(abs(cd - exact))
    return errs


def suite_transform() -> list[Check]:
    e = laplace_pair_errors()
    checks = [
        Check("transform", "pair-exp", e["exp"] <= 1e-8, e["exp"], "<= 1e-8", f"dropped tail {e['tail_exp']:.1e}"),
        Check("transform", "pair-one", e["one"] <= 1e-8, e["one"], "<= 1e-8", f"dropped tail {e['tail_one']:.1e}"),
    ]
    checks.append(_order_check("transform", "ds-central-difference", ds_difference_errors()))
    return checks


# ---------------------------------------------------------------------------
# forward


def forward_mms_errors(hs=(0.05, 0.025)) -> list[float]:
    """Manufactured ``u = t^3 e^{-t} cos(pi x) cos(pi y)`` with variable ``c``."""
    errs = []
    for hh in hs:
        g = GridSpec((0.0, 0.0), (1.0, 1.0), hh, (0.2, 0.2), (0.8, 0.8))
        X, Y = g.G.mesh()
        S = np.cos(math.pi * X) * np.cos(math.pi * Y)
        c = 1.0 + 0.5 * np.sin(math.pi * X) ** 2 * np.sin(math.pi * Y) ** 2

        def ut(t):
            return t**3 * math.exp(-t)

        def utt(t):
            return (6 * t - 6 * t**2 + t**3) * math.exp(-t)

        def forcing(t):
            return (c * utt(t) + 2 * math.pi**2 * ut(t)) * S

        cfg = WaveConfig(omega_src=7.0, T=2.0, tau=0.5 * hh / math.sqrt(2), boundary="reflecting")
        res = solve_forward(c, g, cfg, record=np.ones(g.G.shape, bool), forcing=forcing, incident=False)
        exact = np.outer(S.ravel(), [ut(t) for t in res.trace.times])
        errs.append(float(np.abs(res.trace.samples - exact).max()))
    return errs


def plane_wave_errors(hs=(0.0625, 0.03125)) -> list[float]:
    """Homogeneous medium: the trace at depth ``d`` below the source face is ``F(t - d)``."""
    errs = []
    for hh in hs:
        g = GridSpec((-1.0, -1.0), (1.0, 1.0), hh, (-0.5, -0.5), (0.5, 0.5), source_side="hi")
        cfg = WaveConfig(omega_src=7.0, T=1.5)
        j = g.G.index_of(1, 0.5)
        rec = np.zeros(g.G.shape, bool)
        rec[:, j] = True
        res = solve_forward(g.G.ones(), g, cfg, record=rec)
        exact = waveform_integral(res.trace.times - 0.5, cfg.omega_src)
        errs.append(float(np.abs(res.trace.samples - exact[None, :]).max()))
    return errs


def energy_ratio() -> float:
    """Energy left in ``G`` after the pulse has passed, relative to the peak."""
    from .wave import discrete_energy

    g = GridSpec((-1.0, -1.0), (1.0, 1.0), 0.05, (-0.5, -0.5), (0.5, 0.5))
    cfg = WaveConfig(omega_src=7.0, T=4.0, snapshot_every=1)
    res = solve_forward(g.G.ones(), g, cfg)
    c = g.G.ones()
    energies = [
        discrete_energy(u0, u1, c, g, res.tau) for (_, u0), (_, u1) in zip(res.snapshots[:-1], res.snapshots[1:])
    ]
    return energies[-1] / max(energies)


def suite_forward() -> list[Check]:
    checks = [
        _order_check("forward", "mms-variable-c", forward_mms_errors()),
        _order_check("forward", "plane-wave", plane_wave_errors()),
    ]
    r = energy_ratio()
    checks.append(Check("forward", "absorbing-energy", r < 0.05, r, "< 0.05", "final/peak energy, c = 1"))
    return checks


# ---------------------------------------------------------------------------
# null reconstruction


def null_reconstruction(first_tail: str = "homogeneous", T: float = 12.0):
    """Reconstruct from ``c = 1`` data on the 2D two-target geometry without targets."""
    from .pipeline import reconstruct_scenario
    from .scenarios import load_scenario

    sc = load_scenario("test1_2d").replace(**{"boxes": [], "noise.sigma": 0.0, "wave.T": T, "algo.first_tail": first_tail})
    c, state = reconstruct_scenario(sc, noise=False)
    return float(np.abs(c - 1.0).max()), state


def suite_null() -> list[Check]:
    checks = []
    for mode in ("homogeneous", "harmonic", "exact"):
        dev, state = null_reconstruction(mode)
        checks.append(
            Check("null", f"null-{mode}", dev <= 0.05, dev, "<= 0.05", f"max |c - 1|, stop n={state.stop_n}")
        )
    return checks


# ---------------------------------------------------------------------------
# bounds


def bounds_experiment(n: int = 64, s: float = 2.0, samples: int = 100, seed: int = 0) -> dict:
    """Sandwich ``w_d <= w <= w_1`` for an inclusion with ``1 <= c <= d`` on the unit cube.

    The point source sits outside the cube, so the Dirichlet problem with
    ``w = w_1`` on the boundary is well posed.  ``w_1`` is a supersolution and
    ``w_d`` a subsolution, hence the discrete maximum principle brackets ``w``.
    """
    d = 4.0
    g = Grid((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 1.0 / (n - 1))
    x0 = (0.5, 0.5, -0.3)
    P = g.points()
    w1 = point_source_field(P, x0, s).reshape(g.shape)
    wd = point_source_field(P, x0, s, c=d).reshape(g.shape)
    X, Y, Z = g.mesh()
    c = 1.0 + (d - 1.0) * np.exp(-((X - 0.5) ** 2 + (Y - 0.5) ** 2 + (Z - 0.5) ** 2) / 0.05)
    w = solve_pseudofreq_field(g, c, s, w1)
    rng = np.random.default_rng(seed)
    interior = np.argwhere(g.interior_mask())
    pick = interior[rng.choice(len(interior), size=samples, replace=False)]
    idx = tuple(pick.T)
    lower = float(np.max((wd[idx] - w[idx]) / w1[idx]))  # <= 0 when w >= w_d
    upper = float(np.max((w[idx] - w1[idx]) / w1[idx]))  # <= 0 when w <= w_1
    strict = bool(np.all(w[idx] > wd[idx]))

    w_const = solve_pseudofreq_field(g, np.full(g.shape, d), s, wd)
    r = np.linalg.norm(P - np.asarray(x0), axis=1).reshape(g.shape)
    far = g.interior_mask() & (r >= 5 * g.mesh_size)
    rel = float(np.max(np.abs(w_const[far] - wd[far]) / wd[far]))
    return {"lower_violation": lower, "upper_violation": upper, "strict_lower": strict, "const_rel_err": rel}


def suite_bounds() -> list[Check]:
    r = bounds_experiment()
    worst = max(r["lower_violation"], r["upper_violation"])
    return [
        Check("bounds", "sandwich", worst <= 0.02, worst, "<= 0.02", "max bound violation / w_1 at 100 points"),
        Check("bounds", "constant-c", r["const_rel_err"] <= 0.01, r["const_rel_err"], "<= 0.01", "c = d vs w_d"),
    ]


SUITES = {
    "cwf": suite_cwf,
    "elliptic": suite_elliptic,
    "transform": suite_transform,
    "forward": suite_forward,
    "null": suite_null,
    "bounds": suite_bounds,
}


def verify(suite: str = "all") -> dict:
    """Run one suite (or ``all``) and return a JSON-serialisable report."""
    names = list(SUITES) if suite == "all" else [suite]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        from .errors import ConfigurationError

        raise ConfigurationError(f"unknown suite {unknown[0]!r}; choose from {sorted(SUITES)} or 'all'")
    checks: list[Check] = []
    timings = {}
    for name in names:
        t0 = time.perf_counter()
        try:
            checks.extend(SUITES[name]())
        except Exception as exc:  # failures are report content
            checks.append(Check(name, "suite-error", False, float("nan"), "no exception", repr(exc)))
        timings[name] = time.perf_counter() - t0
    return {
        "suite": suite,
        "passed": all(c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
        "seconds": timings,
    }
