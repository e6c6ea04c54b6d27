"""First iterate with the exact tail.

With the tail computed from the true medium and noiseless data, one step of the
layer-stripping update already recovers both targets.  This isolates the
``q``-solve and the coefficient formula from the tail estimate.

    python3 demos/02_exact_tail.py
"""

from pfrecon.cwf import compute_cwf
from pfrecon.grids import l2_relative_diff
from pfrecon.pipeline import make_boundary_data
from pfrecon.recon import ForwardModel, ReconState, init_first_tail, inner_step
from pfrecon.scenarios import load_scenario

sc = load_scenario("test1_2d").replace(**{"algo.first_tail": "exact"})
data = make_boundary_data(sc, noise=False)
model = ForwardModel(sc.grid, sc.wave)

V = init_first_tail("exact", data, model, sc.algo, true_c=sc.true_c("G"))
state = ReconState.start(sc.grid.omega.shape, V)
cw = compute_cwf(1, sc.sgrid, sc.algo.lam)
_, c11, _ = inner_step(state, 1, 1, data.dirichlet(1), cw, sc.algo, model, update_tail=False)

ct = sc.true_c("omega")
print(f"relative L2 error of c_11: {l2_relative_diff(ct, c11, sc.grid.omega):.3f}")
for k, box in enumerate(sc.boxes):
    print(f"  {box.name:9s} true c = {box.c}, max reconstructed = {c11[sc.footprint(k)].max():.3f}")

# coarse text image: rows are depth (top = backscattering side)
print("\nc_11 (digits = round(c), '.' = 1):")
for j in range(c11.shape[1] - 1, -1, -2):
    row = "".join("." if v < 1.5 else str(min(int(round(v)), 9)) for v in c11[::2, j])
    print("  " + row)
