import math

import numpy as np
import pytest

from shrinkerlab.analytic import make_analytic
from shrinkerlab.entropy import (
    EntropySearch,
    FParams,
    cylinder_entropy_closed_form,
    entropy,
    f_functional,
    f_gradient,
    quadrature_points,
)
from shrinkerlab.generate import gen_mesh


def test_closed_forms():
    assert cylinder_entropy_closed_form(2, 0) == 1.0
    assert math.isclose(cylinder_entropy_closed_form(2, 1), math.sqrt(2 * math.pi / math.e))
    assert math.isclose(cylinder_entropy_closed_form(2, 2), 4 / math.e)


def test_quadrature_weights_sum_to_area(ico3):
    for rule in ("gauss3", "centroid"):
        _, w = quadrature_points(ico3, rule)
        assert math.isclose(w.sum(), ico3.total_area, rel_tol=1e-12)
    with pytest.raises(ValueError):
        quadrature_points(ico3, "simpson")


def test_gauss_rule_beats_centroid():
    for s in (2, 3):
        m = gen_mesh("icosphere", resolution=s, radius=2.0)
        g = abs(f_functional(m, np.zeros(3), 1.0) - 4 / math.e)
        c = abs(f_functional(m, np.zeros(3), 1.0, rule="centroid") - 4 / math.e)
        assert g < c


def test_f_invariances(ico3):
    shift = np.array([1.0, -2.0, 0.5])
    moved = ico3.transformed(translation=shift)
    a = f_functional(ico3, np.zeros(3), 1.3)
    assert math.isclose(a, f_functional(moved, shift, 1.3), rel_tol=1e-12)
    # parabolic scaling: F(cM, c x0, c^2 t0) = F(M, x0, t0)
    big = ico3.transformed(scale=2.0)
    assert math.isclose(a, f_functional(big, np.zeros(3), 4 * 1.3), rel_tol=1e-12)


def test_f_rejects_bad_scale(ico3):
    with pytest.raises(ValueError):
        f_functional(ico3, np.zeros(3), 0.0)
    with pytest.raises(ValueError):
        FParams(np.zeros(3), -1.0)


@pytest.mark.parametrize("kind,params", [("sphere", {"n": 2}), ("cylinder", {"n": 2, "k": 1}),
                                         ("cylinder", {"n": 3, "k": 1})])
def test_shrinkers_critical_at_unit_scale(kind, params):
    s = make_analytic(kind, **params)
    assert np.abs(f_gradient(s, np.zeros(s.ambient_dim), 1.0)).max() < 1e-4


def test_sphere_entropy_mesh():
    r = entropy(gen_mesh("icosphere", resolution=3, radius=2.0))
    assert abs(r.lam - 4 / math.e) / (4 / math.e) < 0.01
    assert r.truncation_error == 0.0
    assert np.linalg.norm(r.argmax.x0) < 1e-2
    assert abs(r.argmax.t0 - 1) < 0.05
    assert r.profile and r.evaluations > 0


def test_analytic_sphere_entropy():
    r = entropy(make_analytic("sphere", n=2))
    assert abs(r.lam - 4 / math.e) < 1e-6


def test_flat_entropy():
    r = entropy(gen_mesh("disk"))
    assert abs(r.lam - 1) < 0.01
    exact = entropy(make_analytic("hyperplane"))
    assert abs(exact.lam - 1) < 1e-9
    # tangential translations and the scale leave F unchanged on a plane
    assert len(exact.flat_directions) >= 2


def test_search_validation():
    with pytest.raises(ValueError):
        EntropySearch(t_min=2.0, t_max=1.0)
    with pytest.raises(ValueError):
        EntropySearch(starts=0)
    assert len(EntropySearch(n_t=5).grid()) == 5


def test_result_serialization(ico3):
    r = entropy(ico3, EntropySearch(n_t=5, starts=2))
    d = r.to_dict()
    assert set(d) >= {"lambda", "argmax", "evaluations", "truncation_error", "note"}
    assert r.profile_csv().splitlines()[0] == "t0,F"
    assert len(r.profile_csv().splitlines()) == len(r.profile) + 1
