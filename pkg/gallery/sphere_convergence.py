"""Refinement study on the radius-2 sphere.

The round sphere of radius 2 is a self-shrinker, so H - <x,n>/2 vanishes
on it. On icospheres the discrete residual and the operator identities
LH = H, L<V,n> = <V,n>/2 converge to zero; this script prints the errors
per level and writes a log-log plot with the fitted order.

    python3 gallery/sphere_convergence.py [outdir]
"""

import sys
from pathlib import Path

from shrinkerlab import gen_mesh, shrinker_residual, verify_identity
from shrinkerlab.plotting import plot_refinement

out = Path(sys.argv[1] if len(sys.argv) > 1 else "gallery_out")
h, res = [], []
print(f"{'subdiv':>6} {'h':>9} {'residual':>10} {'LH=H':>10} {'Lw=w/2':>10}")
for s in range(2, 6):
    m = gen_mesh("icosphere", resolution=s, radius=2.0)
    r = shrinker_residual(m).linf
    lh = verify_identity(m, "LH_eq_H").relative_l2
    lw = verify_identity(m, "Lw_eq_halfw", V=(1, 0, 0)).relative_l2
    h.append(m.mean_edge_length)
    res.append(r)
    print(f"{s:>6} {h[-1]:9.4f} {r:10.3e} {lh:10.3e} {lw:10.3e}")

slope = plot_refinement(h, res, out / "sphere_residual.svg", label="residual_linf")
print(f"observed order {slope:.2f}; plot in {out / 'sphere_residual.svg'}")
