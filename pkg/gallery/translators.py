"""Translating solitons: grim reaper plane and bowl.

Checks H + <e3, n> = 0 on meshes of both translators, sweeps the ball
radius in the translator curvature audit, and settles which right-hand
side the identity for (Lap + <e3, grad> + |A|^2)|A|^2 takes.

    python3 gallery/translators.py [outdir]
"""

import sys
from pathlib import Path

from shrinkerlab import gen_mesh, make_analytic, translator_residual, translator_sweep, verify_identity
from shrinkerlab.plotting import plot_sweep

out = Path(sys.argv[1] if len(sys.argv) > 1 else "gallery_out")
for r in (12, 24, 48):
    print(f"grim reaper res {r}: residual {translator_residual(gen_mesh('grim_reaper', resolution=r)).linf:.3e}")
for r in (20, 40, 80):
    f = translator_residual(gen_mesh("bowl", resolution=r))
    print(f"bowl res {r}: residual linf {f.linf:.3e}  l2 {f.l2:.3e}")

rep = verify_identity(make_analytic("grim_reaper"), "Lfrak_A2")
for name, summary in rep.candidates.items():
    print(f"candidate {name}: residual {summary['linf']:.2e}")
print("winner:", rep.winner)

rows = translator_sweep(make_analytic("grim_reaper"), [0.25, 0.5, 1.0, 1.5, 2.0])
plot_sweep([r["R"] for r in rows], [r["empirical_C"] for r in rows], [r["violated"] for r in rows],
           out / "translator_sweep.svg")
for r in rows:
    print(f"R {r['R']:.2f}: C {r['empirical_C']}  violated {r['violated']}")
