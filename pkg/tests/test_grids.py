import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pfrecon.grids import (
    BOUNDARY_TAGS,
    Grid,
    GridSpec,
    boundary_mask,
    boundary_regions,
    gradient,
    l2_norm,
    l2_relative_diff,
    laplacian,
    mollify,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def unit_grid(n=11):
    return Grid((0.0, 0.0), (1.0, 1.0), 1.0 / (n - 1))


def test_gradient_of_linear_field_is_exact():
    g = unit_grid()
    X, Y = g.mesh()
    gx, gy = gradient(3 * X - 2 * Y, g)
    assert np.allclose(gx, 3.0, atol=1e-12) and np.allclose(gy, -2.0, atol=1e-12)


def test_gradient_of_constant_vanishes():
    g = unit_grid()
    assert all(np.all(d == 0) for d in gradient(np.full(g.shape, 7.5), g))


def test_gradient_is_second_order():
    errs = []
    for h in (0.1, 0.05):
        g = Grid((0.0, 0.0), (1.0, 1.0), h)
        X, Y = g.mesh()
        gx, gy = gradient(np.sin(X) * np.cos(Y), g)
        errs.append(max(np.abs(gx - np.cos(X) * np.cos(Y)).max(), np.abs(gy + np.sin(X) * np.sin(Y)).max()))
    assert 3.5 < errs[0] / errs[1] < 4.5


def test_laplacian_stencil_exact_on_quadratics():
    g = unit_grid()
    X, Y = g.mesh()
    inner = g.interior_mask()
    assert np.allclose(laplacian(X**2 - Y**2, g)[inner], 0.0, atol=1e-10)
    assert np.allclose(laplacian(X**2 + Y**2, g)[inner], 4.0, atol=1e-10)


def test_laplacian_of_trig_field_converges():
    errs = []
    for h in (0.1, 0.05):
        g = Grid((0.0, 0.0), (1.0, 1.0), h)
        X, Y = g.mesh()
        f = np.sin(X) * np.sin(Y)
        inner = g.interior_mask()
        errs.append(np.abs(laplacian(f, g) - (-2 * f))[inner].max())
    assert 3.5 < errs[0] / errs[1] < 4.5


@given(a=finite, b=finite, seed=st.integers(0, 2**16))
def test_operators_are_linear(a, b, seed):
    g = Grid((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 0.25)
    rng = np.random.default_rng(seed)
    f, k = rng.normal(size=g.shape), rng.normal(size=g.shape)
    lhs = laplacian(a * f + b * k, g)
    scale = 1 + abs(a) + abs(b)
    assert np.allclose(lhs, a * laplacian(f, g) + b * laplacian(k, g), atol=1e-10 * scale * 100)
    for gl, gf, gk in zip(gradient(a * f + b * k, g), gradient(f, g), gradient(k, g)):
        assert np.allclose(gl, a * gf + b * gk, atol=1e-10 * scale * 10)


@given(coef=arrays(float, 6, elements=st.floats(-3, 3)))
def test_laplacian_of_any_quadratic_is_exact(coef):
    g = Grid((-1.0, 0.0), (1.0, 2.0), 0.25)
    X, Y = g.mesh()
    a, b, c, d, e, f = coef
    u = a * X**2 + b * Y**2 + c * X * Y + d * X + e * Y + f
    assert np.allclose(laplacian(u, g)[g.interior_mask()], 2 * a + 2 * b, atol=1e-9)


def test_l2_relative_diff_oracles():
    g = unit_grid(6)
    a = np.full(g.shape, 2.0)
    assert l2_relative_diff(a, a, g) == 0.0
    assert math.isclose(l2_relative_diff(a, np.ones(g.shape), g), 0.5, rel_tol=1e-14)
    with pytest.raises(ZeroDivisionError):
        l2_relative_diff(np.zeros(g.shape), a, g)


def test_l2_relative_diff_matches_direct_sum():
    g = Grid((0.0, 0.0), (1.0, 1.0), 0.25)  # 5 x 5
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=g.shape), rng.normal(size=g.shape)
    w1 = np.array([0.5, 1, 1, 1, 0.5]) * 0.25
    w = np.outer(w1, w1)
    num = sum(w[i, j] * (a[i, j] - b[i, j]) ** 2 for i in range(5) for j in range(5))
    den = sum(w[i, j] * a[i, j] ** 2 for i in range(5) for j in range(5))
    assert abs(l2_relative_diff(a, b, g) - math.sqrt(num / den)) < 1e-12


@given(t=st.floats(0.0, 5.0), seed=st.integers(0, 1000))
def test_l2_relative_diff_scales_linearly(t, seed):
    g = unit_grid(7)
    rng = np.random.default_rng(seed)
    a, d = 1.0 + rng.random(g.shape), rng.normal(size=g.shape)
    base = l2_relative_diff(a, a + d, g)
    assert math.isclose(l2_relative_diff(a, a + t * d, g), t * base, rel_tol=1e-10, abs_tol=1e-14)


def test_l2_norm_of_constant():
    g = Grid((0.0, 0.0), (2.0, 3.0), 0.5)
    assert math.isclose(l2_norm(np.ones(g.shape), g), math.sqrt(6.0), rel_tol=1e-14)


@pytest.mark.parametrize("stencil", ["mean", "lazy"])
def test_mollify_constants_and_identity(stencil):
    f = np.full((6, 7), 3.25)
    assert np.allclose(mollify(f, 4, stencil), f, rtol=0, atol=1e-14)
    rng = np.random.default_rng(0)
    r = rng.normal(size=(5, 5))
    assert np.array_equal(mollify(r, 0, stencil), r)


def test_mollify_mean_spike_hand_evaluated():
    f = np.zeros((7, 7))
    f[3, 3] = 1.0
    out = mollify(f, 1, "mean")
    assert out[3, 3] == pytest.approx(0.2)
    for ij in [(2, 3), (4, 3), (3, 2), (3, 4)]:
        assert out[ij] == pytest.approx(0.2)
    assert out.sum() == pytest.approx(1.0)


def test_mollify_lazy_spike_hand_evaluated():
    f = np.zeros((7, 7))
    f[3, 3] = 1.0
    out = mollify(f, 1, "lazy")
    assert out[3, 3] == pytest.approx(0.5)
    assert out[2, 3] == pytest.approx(0.125)


@given(seed=st.integers(0, 10_000), passes=st.integers(0, 4), stencil=st.sampled_from(["mean", "lazy"]), dim=st.sampled_from([2, 3]))
def test_mollify_preserves_sum(seed, passes, stencil, dim):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(5, 6, 4)[:dim])
    assert abs(mollify(f, passes, stencil).sum() - f.sum()) < 1e-11


def test_mollify_rejects_negative_passes():
    with pytest.raises(ValueError):
        mollify(np.zeros((3, 3)), -1)


@pytest.mark.parametrize("dim,side", [(2, "hi"), (2, "lo"), (3, "lo"), (3, "hi")])
def test_boundary_regions_partition_the_boundary(dim, side):
    g = Grid((0.0,) * dim, (1.0,) * dim, 0.125)
    regions = boundary_regions(g, side)
    bnd = boundary_mask(g)
    total = np.zeros(g.shape, int)
    for tag, m in regions.items():
        assert tag in BOUNDARY_TAGS
        total += m
    assert np.array_equal(total, bnd.astype(int))
    face = [slice(None)] * dim
    face[-1] = -1 if side == "hi" else 0
    inner_face = regions["backscatter"][tuple(face)]
    assert inner_face.sum() > 0


def test_gridspec_rejects_bad_geometry():
    with pytest.raises(ValueError):
        GridSpec((0.0, 0.0), (1.0, 1.0), 0.1, (0.0, 0.2), (0.5, 0.8))  # Omega touches G
    with pytest.raises(ValueError):
        GridSpec((0.0, 0.0), (1.0, 1.0), 0.1, (0.15, 0.2), (0.5, 0.8))  # face not on a node


def test_gridspec_restrict_extend_roundtrip():
    gs = GridSpec((-1.0, -1.0), (1.0, 1.0), 0.25, (-0.5, -0.5), (0.5, 0.5))
    f = np.arange(gs.omega.size, dtype=float).reshape(gs.omega.shape)
    big = gs.extend(f, 1.0)
    assert np.array_equal(gs.restrict(big), f)
    assert np.all(big[~gs.omega_mask()] == 1.0)
