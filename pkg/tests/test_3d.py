"""Invariants of the 3D belt scenarios (the c = 80 body is not expected to be imaged)."""
import numpy as np
import pytest

from pfrecon.pipeline import make_boundary_data, reconstruct_scenario, simulate_traces
from pfrecon.recon import ForwardModel
from pfrecon.scenarios import load_scenario


@pytest.fixture(scope="module")
def test5():
    return load_scenario("test5_3d")


@pytest.fixture(scope="module")
def test5_short(test5):
    return test5.replace(**{"algo.sgrid": {"s_min": 8.6, "s_max": 8.8, "h": 0.05}, "algo.lam": None})


@pytest.mark.slow
def test_test5_clamped_range(test5):
    c, state = reconstruct_scenario(test5)
    assert c.min() >= 1.0 and c.max() <= 10.0
    for cn in state.interval_c.values():
        assert cn.min() >= 1.0 and cn.max() <= 10.0


def test_test5_deterministic(test5_short):
    data = make_boundary_data(test5_short)
    a, _ = reconstruct_scenario(test5_short, data=data)
    b, _ = reconstruct_scenario(test5_short, data=make_boundary_data(test5_short))
    assert np.array_equal(a, b)


def test_test5_laplace_fields_positive(test5_short):
    sc = test5_short
    tr = simulate_traces(sc)
    from pfrecon.laplace import laplace_transform

    for s in (sc.sgrid.s_min, sc.sgrid.s_max):
        assert np.all(laplace_transform(tr.true, s) > 0)
        assert np.all(laplace_transform(tr.homogeneous, s) > 0)
    model = ForwardModel(sc.grid, sc.wave)
    assert np.all(model.laplace_field(sc.true_c("G"), sc.sgrid.s_max) > 0)


def test_belt_geometry_inside_omega():
    sc = load_scenario("test3_3d")
    fp = sc.footprint(0)
    assert fp.sum() > 0 and not fp[0].any() and not fp[-1].any()
    assert sc.grid.mesh_size == pytest.approx(0.04)
