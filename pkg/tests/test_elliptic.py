import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfrecon.elliptic import (
    EllipticProblem,
    PecletWarning,
    point_source_field,
    solve_dirichlet,
    solve_drift_dirichlet,
    solve_first_tail,
    solve_pseudofreq_field,
)
from pfrecon.errors import ConfigurationError, SolverError
from pfrecon.grids import Grid
from pfrecon.verify import (
    bounds_experiment,
    mms_errors_drift,
    mms_errors_first_tail,
    mms_errors_helmholtz,
    mms_errors_poisson,
    observed_order,
)


def test_discrete_harmonic_boundary_data_reproduced():
    g = Grid((-1.0, 0.0), (1.0, 1.5), 0.1)
    X, Y = g.mesh()
    u = X**2 - Y**2
    out = solve_drift_dirichlet(g, None, 0.0, u)
    assert np.abs(out - u).max() < 1e-11


def test_drift_manufactured_solution():
    g_errs = []
    for n in (16, 32):
        g = Grid((0.0, 0.0), (1.0, 1.0), 1.0 / n)
        X, Y = g.mesh()
        q = np.sin(X) * np.cos(Y)
        b = (1.0, -1.0)
        f = -2 * q + b[0] * np.cos(X) * np.cos(Y) - b[1] * np.sin(X) * np.sin(Y)
        g_errs.append(np.abs(solve_drift_dirichlet(g, [np.full(g.shape, b[0]), np.full(g.shape, b[1])], f, q) - q).max())
    assert 1.8 <= observed_order(*g_errs) <= 2.2


@pytest.mark.parametrize("errs", [mms_errors_poisson, mms_errors_drift, mms_errors_helmholtz, mms_errors_first_tail])
def test_mms_orders(errs):
    assert 1.8 <= observed_order(*errs()) <= 2.2


@given(seed=st.integers(0, 10_000))
def test_maximum_principle(seed):
    g = Grid((0.0, 0.0), (1.0, 1.0), 1.0 / 12)
    rng = np.random.default_rng(seed)
    data = rng.random(g.shape)
    u = solve_dirichlet(EllipticProblem(g, 0.0, data))
    bnd = ~g.interior_mask()
    assert u.min() >= data[bnd].min() - 1e-12
    assert u.max() <= data[bnd].max() + 1e-12


@given(seed=st.integers(0, 10_000), s=st.floats(0.5, 8.0))
def test_pseudofreq_field_positive(seed, s):
    g = Grid((0.0, 0.0), (1.0, 1.0), 1.0 / 12)
    rng = np.random.default_rng(seed)
    c = 1.0 + 5 * rng.random(g.shape)
    w = solve_pseudofreq_field(g, c, s, 0.01 + rng.random(g.shape))
    assert np.all(w > 0)


def test_peclet_warning_and_strict_mode():
    g = Grid((0.0, 0.0), (1.0, 1.0), 0.1)
    drift = [np.full(g.shape, 50.0), np.zeros(g.shape)]
    with pytest.warns(PecletWarning):
        solve_drift_dirichlet(g, drift, 0.0, np.zeros(g.shape))
    with pytest.raises(ConfigurationError, match="Peclet"):
        solve_drift_dirichlet(g, drift, 0.0, np.zeros(g.shape), strict=True)


def test_iterative_and_direct_agree():
    g = Grid((0.0, 0.0), (1.0, 1.0), 1.0 / 24)
    X, Y = g.mesh()
    c = 1 + X * Y
    bnd = np.exp(-X) + Y
    a = solve_pseudofreq_field(g, c, 2.0, bnd, method="direct")
    b = solve_pseudofreq_field(g, c, 2.0, bnd, tol=1e-12, method="iterative")
    assert np.abs(a - b).max() < 1e-9
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PecletWarning)
        p = EllipticProblem(g, 1.0, np.zeros(g.shape), drift=[np.full(g.shape, 3.0), np.zeros(g.shape)])
        assert np.abs(solve_dirichlet(p, method="direct") - solve_dirichlet(p, tol=1e-12, method="iterative")).max() < 1e-9


def test_nonconvergence_reports_residual():
    g = Grid((0.0, 0.0), (1.0, 1.0), 1.0 / 40)
    X, Y = g.mesh()
    p = EllipticProblem(g, np.sin(7 * X), np.zeros(g.shape), zeroth_order=np.zeros(g.shape))
    with pytest.raises(SolverError) as exc:
        solve_dirichlet(p, tol=1e-30, method="iterative")
    assert exc.value.residual > 0


def test_constant_first_tail():
    g = Grid((0.0, 0.0), (1.0, 1.0), 0.125)
    k, sbar = 0.37, 3.0
    p, V = solve_first_tail(g, np.full(g.shape, k), sbar)
    assert np.allclose(p, -(sbar**2) * k, atol=1e-12)
    assert np.allclose(V, -sbar * k, atol=1e-12)


def test_coefficient_below_one_rejected():
    g = Grid((0.0, 0.0), (1.0, 1.0), 0.25)
    with pytest.raises(ConfigurationError):
        solve_pseudofreq_field(g, np.full(g.shape, 0.9), 1.0, np.ones(g.shape))


def test_constant_c_matches_fundamental_solution_and_unit_consistency():
    g = Grid((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 1.0 / 24)
    x0 = (0.5, 0.5, -0.3)
    P = g.points()
    for d in (1.0, 2.5):
        wd = point_source_field(P, x0, 2.0, c=d).reshape(g.shape)
        w = solve_pseudofreq_field(g, np.full(g.shape, d), 2.0, wd)
        assert np.abs(w - wd).max() / wd.max() < 5e-3
    w1 = solve_pseudofreq_field(g, np.ones(g.shape), 2.0, point_source_field(P, x0, 2.0).reshape(g.shape))
    wd1 = solve_pseudofreq_field(g, np.full(g.shape, 1.0), 2.0, point_source_field(P, x0, 2.0, c=1.0).reshape(g.shape))
    assert np.array_equal(w1, wd1)


def test_sandwich_small_grid():
    r = bounds_experiment(n=24, samples=50)
    assert r["lower_violation"] <= 0.02 and r["upper_violation"] <= 0.02
