"""Discrete drift Laplacian, shrinker stability operator and translator
operator as sparse matrices on vertex scalar fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .geometry import VertexGeometry, cotangent_stiffness, gradient_operators, vertex_geometry
from .mesh import MeshError, TriangleMesh


@dataclass(frozen=True, eq=False)
class DriftOperators:
    """Assembled operators on one mesh.

    Attributes
    ----------
    laplacian : Lap, cotangent weights over mixed Voronoi areas
    gradient : tangential gradient, one (V, V) matrix per ambient axis
    drift : f -> 1/2 <x, grad f>
    drift_laplacian : Lap - 1/2 <x, grad .>
    stability : drift_laplacian + |A|^2 + 1/2
    translator : Lap + <e, grad .> + |A|^2
    """

    laplacian: sparse.csr_matrix
    stiffness: sparse.csr_matrix
    gradient: tuple
    drift: sparse.csr_matrix
    drift_laplacian: sparse.csr_matrix
    stability: sparse.csr_matrix
    translator: sparse.csr_matrix
    area: np.ndarray
    A2: np.ndarray
    direction: np.ndarray

    def grad(self, f):
        return np.stack([g @ f for g in self.gradient], axis=1)

    def apply(self, name, f):
        return getattr(self, name) @ np.asarray(f, dtype=float)


def assemble_operators(mesh: TriangleMesh, geometry: VertexGeometry | None = None,
                       direction=(0.0, 0.0, 1.0)) -> DriftOperators:
    """Build the discrete operators for ``mesh``.

    The drift term composes the tangential gradient with the pointwise map
    ``g -> <x, g>/2`` at the full vertex position.
    """
    if geometry is None:
        geometry = vertex_geometry(mesh)
    area = geometry.area
    bad = np.flatnonzero(~(area > 0))
    if len(bad):
        raise MeshError(f"vertex {bad[0]} has zero area weight", vertices=bad)
    S = cotangent_stiffness(mesh)
    lap = (sparse.diags(1.0 / area) @ S).tocsr()
    G = gradient_operators(mesh, geometry.normals)
    x = mesh.vertices
    drift = (0.5 * sum(sparse.diags(x[:, c]) @ G[c] for c in range(3))).tocsr()
    e = np.asarray(direction, dtype=float)
    e = e / np.linalg.norm(e)
    A2 = geometry.A2
    dl = (lap - drift).tocsr()
    stab = (dl + sparse.diags(A2 + 0.5)).tocsr()
    trans = (lap + sum(e[c] * G[c] for c in range(3)) + sparse.diags(A2)).tocsr()
    return DriftOperators(
        laplacian=lap, stiffness=S, gradient=G, drift=drift, drift_laplacian=dl,
        stability=stab, translator=trans, area=area, A2=A2, direction=e,
    )
