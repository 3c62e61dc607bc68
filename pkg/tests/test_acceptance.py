"""Acceptance suite.

Each test checks one criterion and prints a single line

    [PASS] criterion N: <name> | <measured values>

(or ``[FAIL]``) to the terminal, then asserts. Run it on its own with

    python3 -m pytest tests/test_acceptance.py -v
"""

import math
import time

import numpy as np
import pytest

from shrinkerlab.analytic import make_analytic
from shrinkerlab.audit import audit_mean_convex_estimate, scan_phi_f_max, verify_cutoff_identity
from shrinkerlab.cli import main
from shrinkerlab.entropy import entropy, f_gradient
from shrinkerlab.flow import FlowConfig, mean_radius, monitor_entropy, run_flow, sphere_ode_radius
from shrinkerlab.generate import gen_mesh
from shrinkerlab.soliton import cylinder_fit, shrinker_residual, translator_residual, verify_identity

SQRT2 = math.sqrt(2.0)
SHRINKERS = [("sphere", {"n": 2}), ("sphere", {"n": 3}), ("cylinder", {"n": 2, "k": 1}),
             ("cylinder", {"n": 3, "k": 1}), ("cylinder", {"n": 3, "k": 2}),
             ("cylinder", {"n": 2, "k": 0}), ("hyperplane", {})]
CYLINDERS = [(n, k) for n in (1, 2, 3, 4) for k in range(1, n + 1)]


@pytest.fixture
def report(capsys):
    def emit(number, name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} | {detail}")
        assert ok, detail

    return emit


def _order(h, e):
    return [math.log(e[i] / e[i + 1]) / math.log(h[i] / h[i + 1]) for i in range(len(e) - 1)]


def test_1_residual_convergence(report):
    t = time.perf_counter()
    meshes = [gen_mesh("icosphere", resolution=s, radius=2.0) for s in (3, 4, 5)]
    res = [shrinker_residual(m).linf for m in meshes]
    h = [m.mean_edge_length for m in meshes]
    orders = _order(h, res)
    dt = time.perf_counter() - t
    ok = min(orders) >= 1.5 and res[-1] < 5e-3 and dt < 10
    report(1, "shrinker residual convergence", ok,
           f"Linf {res[0]:.3e} {res[1]:.3e} {res[2]:.3e}; order {min(orders):.2f} (>=1.5); "
           f"subdiv5 < 5e-3; {dt:.1f}s (<10s)")


def test_2_identity_suite(report):
    worst = 0.0
    for kind, params in SHRINKERS:
        s = make_analytic(kind, **params)
        for which in ("LH_eq_H", "Lw_eq_halfw"):
            worst = max(worst, verify_identity(s, which).residual.linf)
    ratios = []
    # same levels as the residual criterion; V = e1 is transverse to the tube axis
    for kind, levels, kw in (("icosphere", (3, 4, 5), {"radius": 2.0}), ("tube", (16, 32, 64), {})):
        meshes = [gen_mesh(kind, resolution=r, **kw) for r in levels]
        for which in ("LH_eq_H", "Lw_eq_halfw"):
            err = [verify_identity(m, which, V=(1, 0, 0)).relative_l2 for m in meshes]
            ratios += [err[i] / err[i + 1] for i in range(len(err) - 1)]
    simons = max(verify_identity(make_analytic("cylinder", n=n, k=k), "Simons_shrinker").residual.linf
                 for n, k in CYLINDERS)
    ok = worst < 1e-12 and min(ratios) >= 1.5 and simons == 0.0
    report(2, "identity suite", ok,
           f"analytic max error {worst:.1e} (<1e-12); min mesh refinement ratio {min(ratios):.2f} "
           f"(>=1.5); Simons on cylinders {simons:.1e} (==0)")


def test_3_entropy_oracles(report):
    t = time.perf_counter()
    sphere = entropy(gen_mesh("icosphere", resolution=4, radius=2.0))
    tube = entropy(gen_mesh("tube", length=20.0))
    disk = entropy(gen_mesh("disk", radius=10.0))
    grads = [np.abs(f_gradient(make_analytic(k, **p), np.zeros(make_analytic(k, **p).ambient_dim), 1.0)).max()
             for k, p in SHRINKERS if k != "hyperplane"]
    dt = time.perf_counter() - t
    e = [abs(sphere.lam - 4 / math.e) / (4 / math.e),
         abs(tube.lam - math.sqrt(2 * math.pi / math.e)) / math.sqrt(2 * math.pi / math.e),
         abs(disk.lam - 1.0)]
    ok = max(e) < 0.01 and max(grads) < 1e-4 and dt < 30
    report(3, "entropy oracles", ok,
           f"sphere {sphere.lam:.5f} ({e[0]:.2%}), tube {tube.lam:.5f} ({e[1]:.2%}, truncation "
           f"{tube.truncation_error:.1e}), disk {disk.lam:.5f} ({e[2]:.2%}) (<1%); "
           f"max |dF| {max(grads):.1e} (<1e-4); {dt:.1f}s (<30s)")


def test_4_sphere_law(report):
    cfg = FlowConfig(stepper="explicit", dt=1e-3, max_steps=100, residual_tol=None,
                     displacement_tol=None, growth_stop=None)
    errs = []
    for r0 in (1.6, 1.8, 2.2, 2.5):
        m = gen_mesh("icosphere", resolution=4, radius=r0)
        tr = run_flow(m, cfg)
        exact = float(sphere_ode_radius(r0, 0.1))
        errs.append(abs(mean_radius(tr.final) - exact) / exact)
    ico = gen_mesh("icosphere", resolution=4, radius=2.0)
    res = shrinker_residual(ico).linf
    tr = run_flow(ico, FlowConfig(stepper="explicit", dt=1e-3, max_steps=1, residual_tol=None,
                                  displacement_tol=None))
    step = np.abs(tr.final.vertices - ico.vertices).max()
    ok = max(errs) < 0.01 and step <= res * 1e-3 * (1 + 1e-9)
    report(4, "rescaled-flow sphere law", ok,
           f"max ODE relative error over 100 steps {max(errs):.1e} (<1%); radius-2 step "
           f"{step:.1e} <= residual*dt {res * 1e-3:.1e}")


def test_5_gradient_flow(report):
    t = time.perf_counter()
    m = gen_mesh("icosphere", resolution=3, radius=2.0, perturbation=0.1, band=(2, 3), even=True,
                 zero_mean=True, seed=0)
    tr = run_flow(m, FlowConfig(dt=0.02))
    dt = time.perf_counter() - t
    s = tr.series
    chk = monitor_entropy(tr)
    drop = s["residual_linf"][0] / s["residual_linf"][-1]
    ok = chk.relative < 1e-3 and drop >= 10 and dt < 120
    report(5, "flow as gradient flow", ok,
           f"F violation {chk.relative:.1e}*F(0) (<1e-3); residual drop {drop:.1f}x (>=10) after "
           f"{tr.steps} steps ({tr.stop_reason}); {dt:.1f}s (<120s)")


def test_6_cutoff_machinery(report):
    closed = max(verify_cutoff_identity(make_analytic("sphere", n=2), (0, 0, 0), 3).relative_error,
                 verify_cutoff_identity(make_analytic("cylinder", n=2, k=1, half_length=8.0),
                                        (0, 0, 0), 2).relative_error)
    meshes = [gen_mesh("tube", resolution=r) for r in (16, 32, 64)]
    errs = [verify_cutoff_identity(m, (0, 0, 0), 2).relative_error for m in meshes]
    order = min(_order([m.mean_edge_length for m in meshes], errs))
    c = scan_phi_f_max(make_analytic("cylinder", n=2, k=1, half_length=8.0), (0, 0, 0.5), 2, 0.5)
    i = np.isfinite(c.h)
    const = (c.k == 0.125 and np.allclose(c.h[i], 8 / 3, rtol=0, atol=4 * np.spacing(8 / 3))
             and np.allclose(c.f[i], 4 / 3, rtol=0, atol=4 * np.spacing(4 / 3)))
    ratios = [scan_phi_f_max(m, (0, 0, 0.5), 2, 0.5).bound_ratio for m in meshes[1:]]
    drift = abs(ratios[1] - ratios[0]) / abs(ratios[1])
    ok = closed < 1e-12 and order >= 0.9 and const and all(map(math.isfinite, ratios)) and drift < 0.05
    report(6, "cutoff machinery", ok,
           f"closed-form error {closed:.1e} (<1e-12); mesh errors {errs[0]:.2e} {errs[1]:.2e} "
           f"{errs[2]:.2e}, order {order:.2f} (O(h)); k,h,f = {c.k}, {np.nanmax(c.h):.15g}, "
           f"{np.nanmax(c.f):.15g}; bound ratio drift {drift:.2%} (<5%)")


def test_7_audit_sanity(report):
    tube = audit_mean_convex_estimate(make_analytic("cylinder", n=2, k=1, half_length=8.0), 8, 0.5)
    disk = audit_mean_convex_estimate(gen_mesh("disk"), 8, 0.5)
    ks = [cylinder_fit(gen_mesh(kind, **kw)).k for kind, kw, _ in
          (("disk", {}, 0), ("tube", {}, 1), ("icosphere", {"resolution": 4, "radius": 2.0}, 2))]
    perturbed = [cylinder_fit(gen_mesh("tube", perturbation=0.02 * SQRT2, seed=s)).k for s in range(3)]
    ok = (tube.empirical_C <= 1 and disk.hypothesis["violated"] and ks == [0, 1, 2]
          and perturbed == [1, 1, 1])
    report(7, "audit sanity", ok,
           f"tube C {tube.empirical_C:.4f} (<=1); disk hypothesis violated={disk.hypothesis['violated']}; fitted k {ks} (==[0,1,2]); 2%-perturbed tube k {perturbed}")


def test_8_translator_suite(report):
    res = [translator_residual(gen_mesh("grim_reaper", resolution=r)).linf for r in (12, 24, 48)]
    rep = verify_identity(make_analytic("grim_reaper"), "Lfrak_A2")
    win = rep.candidates[rep.winner]["linf"]
    ok = res[1] < 5e-3 and res[0] > res[1] > res[2] and win < 1e-8
    report(8, "translator suite", ok,
           f"grim reaper Linf {res[0]:.2e} {res[1]:.2e} {res[2]:.2e} (default < 5e-3, "
           f"decreasing); winning right-hand side '{rep.winner}' residual {win:.1e} (<1e-8)")


RUNS = [
    ["verify", "--surface", "icosphere", "--subdiv", "3", "--identity", "shrinker"],
    ["verify", "--surface", "icosphere", "--subdiv", "3", "--identity", "LH"],
    ["entropy", "--surface", "icosphere", "--subdiv", "3"],
    ["flow", "--surface", "icosphere", "--subdiv", "2", "--perturbation", "0.1", "--band", "2", "3",
     "--even", "--zero-mean", "--seed", "3", "--dt", "0.02", "--max-steps", "20"],
    ["audit", "thm1", "--surface", "tube", "--format", "json", "--format", "csv"],
    ["audit", "translator", "--analytic", "grim_reaper", "--sweep", "0.5", "1", "2",
     "--format", "json", "--format", "csv", "--format", "svg"],
    ["audit", "scan", "--analytic", "cylinder", "--n", "2", "--k", "1"],
]


def test_9_determinism(report, tmp_path):
    digests = []
    for rep in ("a", "b"):
        out = tmp_path / rep
        codes = [main([*argv, "-d", str(out)]) for argv in RUNS]
        assert codes == [0] * len(RUNS)
        digests.append({p.name: p.read_bytes() for p in sorted(out.iterdir())
                        if not p.name.endswith(".manifest.json")})
    same = digests[0] == digests[1]
    differ = sorted(k for k in digests[0] if digests[0][k] != digests[1].get(k))
    report(9, "determinism", same,
           f"{len(digests[0])} data files from {len(RUNS)} runs byte-identical across reruns"
           + (f"; differing: {differ}" if differ else ""))
