"""Empirical constants in the curvature estimates.

On a mean convex shrinker the ratio |A| / (H |x|) over the ball of radius
R stays bounded; on the cylinder it is 1/sqrt(2) times a decaying factor.
The flat disk has H = 0, so its audit is reported as outside the
hypothesis rather than as a large constant. The cutoff identity and the
hand-derived scan constants on the cylinder close the script.

    python3 gallery/curvature_audits.py
"""

import numpy as np

from shrinkerlab import (
    audit_mean_convex_estimate,
    cylinder_fit,
    gen_mesh,
    make_analytic,
    scan_phi_f_max,
    verify_cutoff_identity,
)

cyl = make_analytic("cylinder", n=2, k=1, half_length=8.0)
for name, s in (("exact cylinder", cyl), ("tube mesh", gen_mesh("tube")),
                ("sphere mesh", gen_mesh("icosphere", resolution=4, radius=2.0)),
                ("disk mesh", gen_mesh("disk"))):
    r = audit_mean_convex_estimate(s, 8, 0.5)
    C = "none (empty region)" if r.empirical_C is None else f"{r.empirical_C:.4f}"
    print(f"{name:>15}: C = {C}  H >= 0.5 violated: {r.hypothesis['violated']}")

for kind in ("disk", "tube", "icosphere"):
    f = cylinder_fit(gen_mesh(kind))
    print(f"cylinder fit of {kind}: k = {f.k}, radius {f.radius:.4f}")

print("cutoff identity, relative error:",
      f"{verify_cutoff_identity(cyl, (0, 0, 0), 2).relative_error:.1e} (exact),",
      f"{verify_cutoff_identity(gen_mesh('tube', resolution=64), (0, 0, 0), 2).relative_error:.1e} (mesh)")
c = scan_phi_f_max(cyl, (0, 0, 0.5), 2, 0.5)
print(f"scan constants: k = {c.k}, h = {np.nanmax(c.h):.12g}, f = {np.nanmax(c.f):.12g}, "
      f"bound ratio {c.bound_ratio:.4e}")
