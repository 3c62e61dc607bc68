"""Triangle meshes in 3-space with topology checks and cached derived data."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.spatial import cKDTree


class MeshError(ValueError):
    """Invalid mesh input.

    ``edges`` lists offending (i, j) vertex pairs when the failure is
    topological, ``vertices`` lists offending vertex indices otherwise.
    """

    def __init__(self, message, edges=None, vertices=None):
        super().__init__(message)
        self.edges = [] if edges is None else [tuple(int(v) for v in e) for e in edges]
        self.vertices = [] if vertices is None else [int(v) for v in vertices]


DEFAULT_AREA_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Oriented manifold triangle mesh.

    Parameters
    ----------
    vertices : (V, 3) array_like
    faces : (F, 3) array_like of int
        Consistently oriented triangles.
    boundary : (V,) array_like of bool, optional
        Boundary flag per vertex. Defaults to the topological boundary
        (vertices on edges with a single incident face).
    area_floor : float
        Faces with area below this value are rejected.
    """

    vertices: np.ndarray
    faces: np.ndarray
    boundary: np.ndarray | None = None
    area_floor: float = DEFAULT_AREA_FLOOR
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        f = np.array(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError("vertices must have shape (V, 3)")
        if f.ndim != 2 or f.shape[1] != 3:
            raise MeshError("faces must have shape (F, 3)")
        if len(f) == 0:
            raise MeshError("mesh has no faces")
        if f.min() < 0 or f.max() >= len(v):
            raise MeshError("face index out of range")
        if np.any((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])):
            raise MeshError("face with repeated vertex")
        if not np.all(np.isfinite(v)):
            raise MeshError("non-finite vertex coordinates")
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        self._check_topology()
        if self.boundary is None:
            b = self.topological_boundary
        else:
            b = np.array(self.boundary, dtype=bool)
            if b.shape != (len(v),):
                raise MeshError("boundary flag must have one entry per vertex")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "boundary", b)
        small = np.flatnonzero(self.face_areas < self.area_floor)
        if len(small):
            raise MeshError(
                f"{len(small)} face(s) below area floor {self.area_floor:g}",
                vertices=np.unique(f[small]),
            )

    def _check_topology(self):
        he = self.halfedges
        key = np.sort(he, axis=1)
        uniq, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
        bad = uniq[counts > 2]
        if len(bad):
            raise MeshError(
                f"non-manifold: {len(bad)} edge(s) shared by more than two faces, "
                f"first {tuple(int(x) for x in bad[0])}",
                edges=bad,
            )
        # a shared edge must appear once in each direction
        _, dir_counts = np.unique(he, axis=0, return_counts=True)
        if np.any(dir_counts > 1):
            dup = np.unique(he, axis=0)[dir_counts > 1]
            raise MeshError(
                "inconsistent orientation across shared edge(s)", edges=dup
            )

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @cached_property
    def halfedges(self):
        f = self.faces
        return np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])

    @cached_property
    def edges(self):
        """Unique undirected edges, shape (E, 2), sorted per row."""
        return np.unique(np.sort(self.halfedges, axis=1), axis=0)

    @cached_property
    def edge_face_count(self):
        key = np.sort(self.halfedges, axis=1)
        _, counts = np.unique(key, axis=0, return_counts=True)
        return counts

    @cached_property
    def topological_boundary(self):
        b = np.zeros(self.n_vertices, dtype=bool)
        b[self.edges[self.edge_face_count == 1].ravel()] = True
        return b

    @property
    def is_closed(self):
        return bool(np.all(self.edge_face_count == 2))

    @cached_property
    def face_cross(self):
        v = self.vertices
        f = self.faces
        return np.cross(v[f[:, 1]] - v[f[:, 0]], v[f[:, 2]] - v[f[:, 0]])

    @cached_property
    def face_areas(self):
        return 0.5 * np.linalg.norm(self.face_cross, axis=1)

    @cached_property
    def face_normals(self):
        c = self.face_cross
        return c / np.linalg.norm(c, axis=1, keepdims=True)

    @cached_property
    def vertex_normals(self):
        """Area-weighted average of incident face normals."""
        acc = np.zeros_like(self.vertices)
        for j in range(3):
            np.add.at(acc, self.faces[:, j], self.face_cross)
        nrm = np.linalg.norm(acc, axis=1, keepdims=True)
        nrm[nrm == 0] = 1.0
        return acc / nrm

    @property
    def total_area(self):
        return float(self.face_areas.sum())

    @cached_property
    def edge_lengths(self):
        e = self.edges
        return np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1)

    @property
    def mean_edge_length(self):
        return float(self.edge_lengths.mean())

    @cached_property
    def adjacency(self):
        e = self.edges
        n = self.n_vertices
        data = np.ones(2 * len(e))
        a = sparse.csr_matrix(
            (data, (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])), shape=(n, n)
        )
        a.sort_indices()
        return a

    @cached_property
    def valence(self):
        return np.diff(self.adjacency.indptr)

    def one_ring(self, i):
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    @cached_property
    def face_quality(self):
        """4*sqrt(3)*area / sum of squared edge lengths; 1 for equilateral."""
        v = self.vertices
        f = self.faces
        l2 = (
            np.sum((v[f[:, 1]] - v[f[:, 0]]) ** 2, axis=1)
            + np.sum((v[f[:, 2]] - v[f[:, 1]]) ** 2, axis=1)
            + np.sum((v[f[:, 0]] - v[f[:, 2]]) ** 2, axis=1)
        )
        return 4.0 * np.sqrt(3.0) * self.face_areas / l2

    def interior_mask(self, collar=1.0):
        """Vertices farther than ``collar`` from every boundary vertex."""
        b = self.boundary
        if not b.any() or collar <= 0:
            return ~b
        tree = cKDTree(self.vertices[b])
        d, _ = tree.query(self.vertices)
        return (d >= collar) & ~b

    def with_vertices(self, vertices):
        """Same connectivity and boundary flags, new positions."""
        return TriangleMesh(
            vertices, self.faces, boundary=self.boundary,
            area_floor=self.area_floor, meta=dict(self.meta),
        )

    def transformed(self, rotation=None, translation=None, scale=1.0):
        x = np.asarray(self.vertices) * scale
        if rotation is not None:
            x = x @ np.asarray(rotation).T
        if translation is not None:
            x = x + np.asarray(translation)
        return self.with_vertices(x)
