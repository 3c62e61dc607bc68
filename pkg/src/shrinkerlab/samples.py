"""Uniform view of a surface as weighted point samples.

Residuals, entropy and audits accept either a :class:`TriangleMesh` or a
catalog entry; both are reduced to positions, normals, curvatures and
quadrature weights here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import AnalyticHypersurface
from .geometry import VertexGeometry, vertex_geometry
from .mesh import TriangleMesh

DEFAULT_COLLAR = 1.0


@dataclass(frozen=True, eq=False)
class SurfaceSamples:
    x: np.ndarray
    normals: np.ndarray
    H: np.ndarray
    A2: np.ndarray
    weights: np.ndarray
    mask: np.ndarray
    n: int
    source: str
    mesh: TriangleMesh | None = None
    geometry: VertexGeometry | None = None
    surface: AnalyticHypersurface | None = None
    u: np.ndarray | None = None

    @property
    def A_norm(self):
        return np.sqrt(self.A2)

    @property
    def mesh_size(self):
        return None if self.mesh is None else self.mesh.mean_edge_length

    @property
    def count(self):
        return int(self.mask.sum())


def sample_surface(surface, geometry=None, collar=DEFAULT_COLLAR, grid=64):
    """Reduce a mesh or catalog entry to :class:`SurfaceSamples`.

    For meshes, ``mask`` excludes boundary vertices, the collar around
    them and vertices whose quadric fit was rank deficient.
    """
    if isinstance(surface, SurfaceSamples):
        return surface
    if isinstance(surface, TriangleMesh):
        g = vertex_geometry(surface) if geometry is None else geometry
        mask = surface.interior_mask(collar) & ~g.flagged
        return SurfaceSamples(
            x=surface.vertices, normals=g.normals, H=g.H, A2=g.A2, weights=g.area,
            mask=mask, n=2, source="mesh", mesh=surface, geometry=g,
        )
    if isinstance(surface, AnalyticHypersurface):
        u, w = surface.parameter_grid(grid)
        return SurfaceSamples(
            x=surface.position(u), normals=surface.normal(u), H=surface.mean_curvature(u),
            A2=surface.A_norm2(u), weights=w, mask=np.ones(len(u), dtype=bool),
            n=surface.n, source="analytic", surface=surface, u=u,
        )
    raise TypeError(f"cannot sample {type(surface).__name__}")
