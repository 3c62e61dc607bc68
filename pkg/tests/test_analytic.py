import math

import numpy as np
import pytest
import sympy as sp

from shrinkerlab.analytic import CATALOG, make_analytic
from shrinkerlab.bowl import BowlStepError, bowl_profile, series
from shrinkerlab.calculus import SurfaceCalculus, jet


@pytest.mark.parametrize("n,k", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
def test_cylinder_is_shrinker(n, k):
    s = make_analytic("cylinder", n=n, k=k)
    u, _ = s.parameter_grid(16)
    x, nu = s.position(u), s.normal(u)
    H = s.mean_curvature(u)
    assert np.allclose(H, 0.5 * np.einsum("ij,ij->i", x, nu), atol=1e-13)
    assert np.allclose(H, math.sqrt(k / 2), atol=1e-13)
    assert np.allclose(s.A_norm2(u), 0.5, atol=1e-13)
    assert np.allclose(np.linalg.norm(nu, axis=1), 1.0)


def test_sphere_shorthand():
    s = make_analytic("sphere", n=2)
    assert (s.n, s.k) == (2, 2)
    assert math.isclose(s.radius, 2.0)


def test_catalog_errors():
    with pytest.raises(ValueError):
        make_analytic("torus")
    with pytest.raises(ValueError):
        make_analytic("cylinder", n=2, k=3)
    with pytest.raises(ValueError):
        make_analytic("grim_reaper", half_width=2.0)
    with pytest.raises(ValueError):
        make_analytic("hyperplane", normal=(0, 0, 0))


def test_grim_reaper_closed_forms():
    s = make_analytic("grim_reaper")
    u, _ = s.parameter_grid(32)
    c = np.cos(u[:, 0])
    assert np.allclose(s.mean_curvature(u), -c, atol=1e-14)
    assert np.allclose(s.A_norm2(u), c * c, atol=1e-14)
    assert np.allclose(s.gradA_norm2(u), c * c * np.sin(u[:, 0]) ** 2, atol=1e-14)
    # translator equation H = -<e, n>
    assert np.allclose(s.mean_curvature(u), -s.normal(u)[:, -1], atol=1e-14)


def test_hyperplane_flat():
    s = make_analytic("hyperplane", normal=(1, 1, 0), offset=0.5)
    u, w = s.parameter_grid(8)
    assert np.allclose(s.position(u) @ s.nu, 0.5)
    assert np.allclose(s.A_norm2(u), 0.0)
    assert np.all(w > 0)


def test_gaussian_area_closed_forms():
    assert math.isclose(make_analytic("sphere", n=2).gaussian_area(np.zeros(3), 1.0),
                        4 / math.e, rel_tol=1e-10)
    tube = make_analytic("cylinder", n=2, k=1, half_length=40.0)
    assert math.isclose(tube.gaussian_area(np.zeros(3), 1.0), math.sqrt(2 * math.pi / math.e),
                        rel_tol=1e-10)
    assert math.isclose(make_analytic("hyperplane").gaussian_area(np.zeros(3), 2.0), 1.0,
                        rel_tol=1e-12)


def test_bowl_profile_series_and_richardson():
    p = bowl_profile(4.0, 0.01)
    u, du = series(p.r[:20])
    assert np.allclose(p.u[:20], u, atol=1e-8)
    assert np.allclose(p.du[:20], du, atol=1e-8)
    assert p.error_estimate < p.tol
    with pytest.raises(BowlStepError) as err:
        bowl_profile(4.0, 1.0, tol=1e-14)
    assert 0 < err.value.suggested_step < 1.0
    with pytest.raises(ValueError):
        bowl_profile(-1.0, 0.1)


def test_bowl_translator_equation():
    s = make_analytic("bowl")
    u, _ = s.parameter_grid(24)
    res = s.mean_curvature(u) + s.normal(u)[:, -1]
    assert np.abs(res).max() < 1e-5
    assert np.all(s.mean_curvature(u) < 0)


def test_jet_of_quadratic():
    x0, x1 = sp.symbols("x0 x1")
    pts = np.array([[1.0, 2.0], [0.5, -1.0]])
    val, grad, hess = jet(x0**2 * x1, (x0, x1), pts)
    assert np.allclose(val, pts[:, 0] ** 2 * pts[:, 1])
    assert np.allclose(grad[:, 0], 2 * pts[:, 0] * pts[:, 1])
    assert np.allclose(hess[:, 0, 1], 2 * pts[:, 0])


def test_surface_laplacian_of_coordinates_on_sphere():
    s = make_analytic("sphere", n=2)
    u, _ = s.parameter_grid(12)
    calc = SurfaceCalculus(s, u)
    sym = calc.symbols
    for c in range(3):
        # Lap x_c = -H n_c
        assert np.allclose(calc.laplacian(sym[c]), -calc.H * calc.normal[:, c], atol=1e-13)


def test_every_catalog_kind_builds():
    for kind in CATALOG:
        params = {"n": 2, "k": 1} if kind == "cylinder" else {}
        s = make_analytic(kind, **params)
        u, w = s.parameter_grid(8)
        assert u.shape[1] == s.n
        assert np.all(np.isfinite(s.position(u)))
