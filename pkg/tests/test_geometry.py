import math

import numpy as np
import pytest

from shrinkerlab.generate import gen_mesh
from shrinkerlab.geometry import (
    cotangent_stiffness,
    mixed_voronoi_areas,
    tangential_gradient,
    vertex_geometry,
)
from shrinkerlab.mesh import MeshError, TriangleMesh
from shrinkerlab.operators import assemble_operators


def test_voronoi_areas_sum_to_total(ico3, tube32):
    for m in (ico3, tube32):
        assert np.isclose(mixed_voronoi_areas(m).sum(), m.total_area, rtol=1e-12)


def test_stiffness_annihilates_constants(ico3):
    S = cotangent_stiffness(ico3)
    assert np.abs(S @ np.ones(ico3.n_vertices)).max() < 1e-12
    assert abs(S - S.T).max() < 1e-14


def test_sphere_curvatures(ico4):
    g = vertex_geometry(ico4)
    assert np.allclose(g.H, 1.0, atol=1e-4)
    assert np.allclose(g.A2, 0.5, atol=1e-3)
    x = ico4.vertices / 2.0
    assert np.abs(np.einsum("ij,ij->i", g.normals, x) - 1).max() < 1e-6
    assert np.allclose(g.principal_curvatures, 0.5, atol=2e-3)


def test_tube_principal_directions(tube32):
    g = vertex_geometry(tube32)
    inner = tube32.interior_mask(1.0)
    k = g.principal_curvatures[inner]
    assert np.allclose(k[:, 0], 0.0, atol=5e-3)
    assert np.allclose(k[:, 1], 1 / math.sqrt(2), atol=5e-3)
    axial = g.principal_directions[inner][:, 0]
    assert np.allclose(np.abs(axial[:, 2]), 1.0, atol=1e-2)


def test_trace_of_shape_is_H(ico3):
    g = vertex_geometry(ico3)
    assert np.allclose(np.trace(g.shape, axis1=1, axis2=2), g.H, atol=1e-12)
    amb = g.shape_ambient()
    assert np.allclose(np.einsum("iab,ib->ia", amb, g.normals), 0.0, atol=1e-12)


def test_plane_is_flat(disk):
    g = vertex_geometry(disk)
    inner = disk.interior_mask(1.0)
    assert np.abs(g.H[inner]).max() < 1e-12
    assert np.abs(g.A2[inner]).max() < 1e-12


def test_low_valence_raises():
    v = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]]
    f = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]]
    m = TriangleMesh(v, f)
    vertex_geometry(m)  # valence 3 is fine
    bad = TriangleMesh(v, f[:2], boundary=np.zeros(4, dtype=bool))
    with pytest.raises(MeshError, match="valence"):
        vertex_geometry(bad)


def test_tangential_gradient_of_linear_function(ico4):
    f = ico4.vertices[:, 2]
    g = tangential_gradient(ico4, f)
    n = ico4.vertices / 2.0
    exact = np.array([0, 0, 1.0]) - n[:, 2:3] * n
    assert np.abs(g - exact).max() < 1e-2


def test_operator_row_sums_and_stability_shift(ico3):
    g = vertex_geometry(ico3)
    ops = assemble_operators(ico3, g)
    one = np.ones(ico3.n_vertices)
    assert np.abs(ops.laplacian @ one).max() < 1e-10
    assert np.abs(ops.drift @ one).max() < 1e-10
    assert np.abs(ops.stability @ one - g.A2 - 0.5).max() < 1e-10
    assert np.abs(ops.translator @ one - g.A2).max() < 1e-10


def test_laplacian_of_coordinates_is_mean_curvature_vector(ico4):
    ops = assemble_operators(ico4)
    lap = np.stack([ops.laplacian @ ico4.vertices[:, c] for c in range(3)], axis=1)
    # Lap x = -H n = -x/2 on the radius-2 sphere; the tangential part is a
    # discretization error, the normal part is accurate
    n = ico4.vertices / 2
    assert np.abs(np.einsum("ij,ij->i", lap, n) + 1).max() < 1e-4
    assert np.abs(lap + ico4.vertices / 2).max() < 1e-2


def test_drift_of_radial_function_vanishes_on_sphere(ico3):
    ops = assemble_operators(ico3)
    r2 = np.sum(ico3.vertices**2, axis=1)
    assert np.abs(ops.drift @ r2).max() < 1e-10


def test_translator_direction_normalized(grim):
    ops = assemble_operators(grim, direction=(0, 0, 5.0))
    assert np.allclose(ops.direction, [0, 0, 1])


def test_perturbed_mesh_still_consistent():
    m = gen_mesh("icosphere", resolution=3, perturbation=0.05, seed=2)
    g = vertex_geometry(m)
    assert np.all(np.isfinite(g.H))
    assert np.all(g.area > 0)
