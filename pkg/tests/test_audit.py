import math

import numpy as np
import pytest

from shrinkerlab.analytic import make_analytic
from shrinkerlab.audit import (
    audit_graphical_estimate,
    audit_mean_convex_estimate,
    audit_translator_estimate,
    check_growth_bound,
    cutoff_rhs,
    entropy_annotation,
    scan_phi_f_max,
    tau_decay_correlation,
    translator_sweep,
    verify_cutoff_identity,
)
from shrinkerlab.flow import FlowConfig, run_flow
from shrinkerlab.generate import gen_mesh

SQRT2 = math.sqrt(2)


def test_mean_convex_tube_exact(tube_exact, tube32):
    for s in (tube_exact, tube32):
        r = audit_mean_convex_estimate(s, 8, 0.5)
        assert not r.violated
        assert r.empirical_C <= 1.0
    r = audit_mean_convex_estimate(tube_exact, 8, 0.5, C=1.0)
    assert r.passed


def test_mean_convex_sphere_closed_form(sphere_exact):
    r = audit_mean_convex_estimate(sphere_exact, 4, 0.5)
    assert math.isclose(r.empirical_C, (1 / SQRT2) * (4 - 2) / 4, rel_tol=1e-12)


def test_mean_convex_negative_control(disk):
    r = audit_mean_convex_estimate(disk, 8, 0.5)
    assert r.violated
    assert r.hypothesis["fraction"] == 0.0
    assert r.empirical_C is None
    assert r.passed is None


def test_report_invariants(tube32):
    r = audit_mean_convex_estimate(tube32, 8, 0.5)
    assert r.empirical_C == np.nanmax(r.ratio)
    assert r.ratio[r.argmax] == r.empirical_C
    d = r.to_dict()
    assert d["evaluated"] == int(np.isfinite(r.ratio).sum())
    lines = r.ratio_csv().splitlines()
    assert lines[0] == "index,x0,x1,x2,ratio"
    assert len(lines) == d["evaluated"] + 1


def test_argmax_tie_lowest_index(sphere_exact):
    r = audit_mean_convex_estimate(sphere_exact, 4, 0.5)
    ties = np.flatnonzero(r.ratio == r.empirical_C)
    assert r.argmax == ties.min()


def test_mean_convex_refinement_stable():
    cs = [audit_mean_convex_estimate(gen_mesh("icosphere", resolution=s, radius=2.0), 4, 0.5).empirical_C
          for s in (3, 4)]
    assert abs(cs[1] - cs[0]) / cs[1] < 0.05


def test_graphical_plane_and_cap(sphere_exact, ico4):
    assert audit_graphical_estimate(make_analytic("hyperplane"), R=3, delta=0.9).empirical_C == 0
    for s in (sphere_exact, ico4):
        r = audit_graphical_estimate(s, R=1, delta=0.8, x0=(0, 0, 2))
        assert not r.violated
        assert math.isclose(r.empirical_C, 1 / SQRT2, rel_tol=1e-3)


def test_graphical_grim_reaper_band():
    s = make_analytic("grim_reaper")
    r = audit_graphical_estimate(s, R=4, delta=0.5)
    # w = cos x1 >= 1/2 only on |x1| <= pi/3; |A| = cos x1 <= 1
    assert r.violated
    assert 0.99 < r.empirical_C <= 1.0


def test_translator_plane_containing_direction():
    plane = make_analytic("hyperplane", normal=(1, 0, 0))
    r = audit_translator_estimate(plane, V=(1, 0, 0), R=2, delta=0.5)
    assert r.empirical_C == 0


def test_translator_sweep_grim_reaper():
    s = make_analytic("grim_reaper")
    rows = translator_sweep(s, [0.5, 1.0, 1.5, 2.0], delta=0.5)
    # at the waist |A|^2 = w^2, so C(R) = 1 / (1/R + 1/R^2) = R^2 / (R + 1)
    for row in rows[:2]:
        assert math.isclose(row["empirical_C"], row["R"] ** 2 / (row["R"] + 1), rel_tol=1e-9)
    assert [r["violated"] for r in rows] == [False, False, True, True]


def test_translator_bowl_finite():
    r = audit_translator_estimate(make_analytic("bowl"), R=4, delta=0.5)
    assert math.isfinite(r.empirical_C)
    assert "translator_residual_linf" in r.to_dict()


def test_cutoff_identity_closed_form(sphere_exact, tube_exact):
    r = verify_cutoff_identity(sphere_exact, (0, 0, 0), 3)
    assert np.abs(r.lhs).max() < 1e-12 and np.abs(r.rhs).max() < 1e-12
    r = verify_cutoff_identity(tube_exact, (0, 0, 0), 2)
    assert r.relative_error < 1e-12
    assert r.bound_violations == 0
    r = verify_cutoff_identity(make_analytic("cylinder", n=3, k=2), (0, 0, 0, 1.0), 2.5)
    assert r.relative_error < 1e-12


def test_cutoff_identity_mesh_first_order():
    errs = [verify_cutoff_identity(gen_mesh("tube", resolution=r), (0, 0, 0), 2).relative_error
            for r in (16, 32)]
    assert errs[1] < errs[0] / 1.5


def test_cutoff_rhs_sphere_zero():
    x = np.array([[2.0, 0, 0], [0, 0, 2.0]])
    rhs = cutoff_rhs(x, x / 2, np.ones(2), np.zeros(3), 3.0, 2)
    assert np.allclose(rhs, 0.0)


def test_cutoff_empty_region(ico3):
    r = verify_cutoff_identity(ico3, (10, 0, 0), 1)
    assert r.empty
    assert r.to_dict()["empty"]


def test_cutoff_warns_off_shrinker():
    r = verify_cutoff_identity(gen_mesh("icosphere", resolution=3, radius=1.5), (0, 0, 0), 3)
    assert not r.shrinker_ok
    assert r.warnings


def test_scan_tube_constants(tube_exact):
    c = scan_phi_f_max(tube_exact, (0, 0, 0.5), 2, 0.5)
    i = np.isfinite(c.h)
    assert c.k == 0.125
    # exact up to a few ulps (v = 1/H with H = 1/sqrt 2 in floating point)
    assert np.allclose(c.h[i], 8 / 3, rtol=0, atol=4 * np.spacing(8 / 3))
    assert np.allclose(c.f[i], 4 / 3, rtol=0, atol=4 * np.spacing(4 / 3))
    assert c.check()
    assert c.v_equation_residual < 1e-12
    assert math.isclose(c.F_max, 4 / 3 * np.max(c.phi[i]), rel_tol=1e-12)


def test_scan_sphere_constants(sphere_exact):
    c = scan_phi_f_max(sphere_exact, (0, 0, 0), 2.5, 0.5)
    i = np.isfinite(c.h)
    assert np.allclose(c.h[i], 8 / 7, rtol=0, atol=1e-15)
    assert np.allclose(c.f[i], 4 / 7, rtol=0, atol=1e-15)


def test_scan_boundary_of_precondition(tube_exact):
    c = scan_phi_f_max(tube_exact, (0, 0, 0.5), 2, 1 / SQRT2)
    i = np.isfinite(c.h)
    assert np.allclose(c.h[i], 2 * 2.0, rtol=1e-12)


def test_scan_rejects_small_H(sphere_exact):
    with pytest.raises(ValueError, match="undefined"):
        scan_phi_f_max(sphere_exact, (0, 0, 0), 2.5, 1.5)


def test_scan_refinement_stable():
    ratios = [scan_phi_f_max(gen_mesh("tube", resolution=r), (0, 0, 0.5), 2, 0.5).bound_ratio
              for r in (32, 64)]
    assert abs(ratios[1] - ratios[0]) / ratios[1] < 0.05


def test_growth_bound(tube_exact, sphere_exact):
    r = check_growth_bound(tube_exact, 10)
    assert math.isclose(r.empirical_C, (1 / SQRT2) / (1 + SQRT2), rel_tol=1e-2)
    r = check_growth_bound(sphere_exact, 4)
    assert math.isclose(r.empirical_C, (1 / SQRT2) / 3, rel_tol=1e-12)


def test_tau_decay_correlation_along_flow():
    m = gen_mesh("tube", resolution=24, perturbation=0.05, seed=0, band=(1.5, 2.5))
    tr = run_flow(m, FlowConfig(dt=0.01, max_steps=40, monitor_every=8, keep_snapshots=True,
                                residual_tol=None, growth_stop=None))
    out = tau_decay_correlation(tr.snapshots)
    assert len(out["residual_linf"]) == len(tr.snapshots)
    assert -1 <= out["rho"] <= 1
    with pytest.raises(ValueError):
        tau_decay_correlation(tr.snapshots[:2])


def test_entropy_annotation():
    assert entropy_annotation(1.5)["below_threshold"]
    assert not entropy_annotation(2.5)["below_threshold"]
