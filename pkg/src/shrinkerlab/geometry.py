"""Per-vertex differential geometry of triangle meshes.

Mean curvature comes from the cotangent mean-curvature vector, the
shape operator from a least-squares quadric fit over the one-ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse

from .mesh import MeshError, TriangleMesh


def _corner_cotangents(mesh):
    """Cotangent of the angle at each corner, shape (F, 3)."""
    v = mesh.vertices
    f = mesh.faces
    cot = np.empty(f.shape)
    for c in range(3):
        i, j, k = f[:, c], f[:, (c + 1) % 3], f[:, (c + 2) % 3]
        a = v[j] - v[i]
        b = v[k] - v[i]
        cot[:, c] = np.einsum("ij,ij->i", a, b) / np.linalg.norm(np.cross(a, b), axis=1)
    return cot


def cotangent_stiffness(mesh):
    """Symmetric matrix ``W - D`` with ``W_ij = (cot a + cot b)/2``.

    Rows sum to zero; ``(W - D) f`` at vertex i is
    ``sum_j W_ij (f_j - f_i)``.
    """
    f = mesh.faces
    cot = _corner_cotangents(mesh)
    rows, cols, vals = [], [], []
    for c in range(3):
        # corner c is opposite edge (c+1, c+2)
        j, k = f[:, (c + 1) % 3], f[:, (c + 2) % 3]
        w = 0.5 * cot[:, c]
        rows += [j, k]
        cols += [k, j]
        vals += [w, w]
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    n = mesh.n_vertices
    W = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return (W - sparse.diags(np.asarray(W.sum(axis=1)).ravel())).tocsr()


def mixed_voronoi_areas(mesh):
    """Mixed Voronoi area per vertex; sums to the total mesh area."""
    v = mesh.vertices
    f = mesh.faces
    cot = _corner_cotangents(mesh)
    area = mesh.face_areas
    out = np.zeros(mesh.n_vertices)
    obtuse = cot < 0
    any_obtuse = obtuse.any(axis=1)
    for c in range(3):
        i, j, k = f[:, c], f[:, (c + 1) % 3], f[:, (c + 2) % 3]
        lij2 = np.sum((v[j] - v[i]) ** 2, axis=1)
        lik2 = np.sum((v[k] - v[i]) ** 2, axis=1)
        vor = (lik2 * cot[:, (c + 1) % 3] + lij2 * cot[:, (c + 2) % 3]) / 8.0
        contrib = np.where(
            any_obtuse, np.where(obtuse[:, c], area / 2, area / 4), vor
        )
        np.add.at(out, i, contrib)
    return out


def tangent_frames(normals):
    """Orthonormal tangent frames, shape (V, 2, 3), with t1 x t2 = n."""
    n = np.asarray(normals)
    ref = np.zeros_like(n)
    use_y = np.abs(n[:, 0]) > 0.9
    ref[~use_y, 0] = 1.0
    ref[use_y, 1] = 1.0
    t1 = ref - np.einsum("ij,ij->i", ref, n)[:, None] * n
    t1 /= np.linalg.norm(t1, axis=1, keepdims=True)
    t2 = np.cross(n, t1)
    return np.stack([t1, t2], axis=1)


def _neighborhoods(mesh, min_count=5):
    """One-ring neighbour lists, widened to the two-ring where the one-ring
    has fewer than ``min_count`` vertices. Returns padded (V, K) indices and
    a validity mask."""
    adj = mesh.adjacency
    val = mesh.valence
    small = np.flatnonzero(val < min_count)
    lists = [adj.indices[adj.indptr[i]:adj.indptr[i + 1]] for i in range(mesh.n_vertices)]
    if len(small):
        two = (adj @ adj).tocsr()
        for i in small:
            nb = two.indices[two.indptr[i]:two.indptr[i + 1]]
            lists[i] = nb[nb != i]
    K = max(len(x) for x in lists)
    idx = np.zeros((mesh.n_vertices, K), dtype=np.int64)
    mask = np.zeros((mesh.n_vertices, K), dtype=bool)
    for i, nb in enumerate(lists):
        idx[i, : len(nb)] = nb
        mask[i, : len(nb)] = True
    return idx, mask


def fit_shape_operators(mesh, normals, frames, rcond=1e-10):
    """Quadric fit ``c = (L a^2 + 2 M ab + N b^2)/2 + d a + e b`` of neighbour
    heights over each vertex's tangent plane.

    Returns the shape operator ``A = dn`` in each tangent frame, shape
    (V, 2, 2), the fitted slope ``(d, e)``, shape (V, 2), and a mask of
    rank-deficient fits.
    """
    idx, mask = _neighborhoods(mesh)
    x = mesh.vertices
    d = x[idx] - x[:, None, :]
    a = np.einsum("ikc,ic->ik", d, frames[:, 0])
    b = np.einsum("ikc,ic->ik", d, frames[:, 1])
    c = np.einsum("ikc,ic->ik", d, normals)
    hbar = np.sqrt(np.sum(np.where(mask, a * a + b * b, 0.0), axis=1) / mask.sum(axis=1))
    hbar[hbar == 0] = 1.0
    a = a / hbar[:, None]
    b = b / hbar[:, None]
    w = mask.astype(float)
    M = np.stack([0.5 * a * a, a * b, 0.5 * b * b, a, b], axis=-1) * w[..., None]
    N = np.einsum("ikp,ikq->ipq", M, M)
    rhs = np.einsum("ikp,ik->ip", M, c * w)
    ev = np.linalg.eigvalsh(N)
    flagged = (ev[:, 0] <= rcond * ev[:, -1]) | (mask.sum(axis=1) < 5)
    N[flagged] += np.eye(5)
    coef = np.linalg.solve(N, rhs[..., None])[..., 0]
    coef[flagged] = 0.0
    hb2 = hbar**2
    hess = np.empty((len(x), 2, 2))
    hess[:, 0, 0] = coef[:, 0] / hb2
    hess[:, 0, 1] = hess[:, 1, 0] = coef[:, 1] / hb2
    hess[:, 1, 1] = coef[:, 2] / hb2
    g = coef[:, 3:5] / hbar[:, None]
    # Weingarten map of the fitted graph, in an orthonormal basis:
    # A = -G^{-1/2} Hess G^{-1/2} / W with G = I + g g^T
    g2 = np.sum(g * g, axis=1)
    W = np.sqrt(1 + g2)
    # G^{-1/2} = I - (1 - 1/W) g g^T / |g|^2
    with np.errstate(invalid="ignore", divide="ignore"):
        fac = np.where(g2 > 0, (1 - 1 / W) / g2, 0.0)
    Gi = np.eye(2)[None] - fac[:, None, None] * np.einsum("ip,iq->ipq", g, g)
    A = -np.einsum("ipq,iqr,irs->ips", Gi, hess, Gi) / W[:, None, None]
    A = 0.5 * (A + np.swapaxes(A, 1, 2))
    return A, g, flagged


@dataclass(frozen=True, eq=False)
class VertexGeometry:
    """Per-vertex normals, curvatures and area weights.

    ``shape`` is the shape operator in the orthonormal tangent frame
    ``frames[i] = (t1, t2)``; its trace equals ``H``.
    """

    normals: np.ndarray
    frames: np.ndarray
    H: np.ndarray
    shape: np.ndarray
    area: np.ndarray
    flagged: np.ndarray
    mean_curvature_vector: np.ndarray

    @cached_property
    def A2(self):
        return np.einsum("ipq,ipq->i", self.shape, self.shape)

    @property
    def A_norm(self):
        return np.sqrt(self.A2)

    @cached_property
    def principal_curvatures(self):
        return np.linalg.eigvalsh(self.shape)

    @cached_property
    def principal_directions(self):
        """Ambient principal directions, shape (V, 2, 3), ascending curvature."""
        _, vec = np.linalg.eigh(self.shape)
        return np.einsum("ipk,ipc->ikc", vec, self.frames)

    def shape_ambient(self):
        """Shape operator as a symmetric 3x3 tensor per vertex."""
        F = self.frames
        return np.einsum("ipa,ipq,iqb->iab", F, self.shape, F)


def vertex_geometry(mesh: TriangleMesh) -> VertexGeometry:
    """Normals, mean curvature, shape operator and area weights.

    Raises
    ------
    MeshError
        If an interior vertex has valence below 3 or a zero area weight.
    """
    low = np.flatnonzero((mesh.valence < 3) & ~mesh.boundary)
    if len(low):
        raise MeshError(f"interior vertex {low[0]} has valence < 3", vertices=low)
    area = mixed_voronoi_areas(mesh)
    zero = np.flatnonzero(area <= 0)
    if len(zero):
        raise MeshError(f"vertex {zero[0]} has zero area weight", vertices=zero)
    # area-weighted normals are only first-order accurate on irregular
    # meshes; tilt them by the slope of a first quadric fit
    n0 = mesh.vertex_normals
    f0 = tangent_frames(n0)
    _, slope, bad = fit_shape_operators(mesh, n0, f0)
    slope[bad] = 0.0
    normals = n0 - slope[:, :1] * f0[:, 0] - slope[:, 1:] * f0[:, 1]
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    S = cotangent_stiffness(mesh)
    hn = -(S @ mesh.vertices) / area[:, None]  # = H n
    H = np.einsum("ij,ij->i", hn, normals)
    frames = tangent_frames(normals)
    A, _, flagged = fit_shape_operators(mesh, normals, frames)
    # keep the fitted deviatoric part, take the trace from the cotangent H
    tr = A[:, 0, 0] + A[:, 1, 1]
    A = A + 0.5 * (H - tr)[:, None, None] * np.eye(2)[None]
    return VertexGeometry(
        normals=normals, frames=frames, H=H, shape=A, area=area,
        flagged=flagged, mean_curvature_vector=-hn,
    )


def gradient_operators(mesh, normals=None):
    """Sparse maps from vertex scalars to tangential vertex gradients.

    Per-face gradients of the piecewise-linear interpolant are averaged to
    vertices with face-area weights, then projected to the tangent plane.
    Returns three (V, V) matrices, one per ambient component.
    """
    if normals is None:
        normals = mesh.vertex_normals
    v = mesh.vertices
    f = mesh.faces
    fa = mesh.face_areas
    fn = mesh.face_normals
    nv = mesh.n_vertices
    vert_area = np.zeros(nv)
    for c in range(3):
        np.add.at(vert_area, f[:, c], fa)
    grads = []
    for c in range(3):
        j, k = f[:, (c + 1) % 3], f[:, (c + 2) % 3]
        grads.append(np.cross(fn, v[k] - v[j]) / (2 * fa)[:, None])
    mats = []
    for comp in range(3):
        rows, cols, vals = [], [], []
        for cv in range(3):
            for ci in range(3):
                rows.append(f[:, cv])
                cols.append(f[:, ci])
                vals.append(fa * grads[ci][:, comp] / vert_area[f[:, cv]])
        mats.append(
            sparse.csr_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                shape=(nv, nv),
            )
        )
    P = np.eye(3)[None] - np.einsum("ia,ib->iab", normals, normals)
    return tuple(
        sum(sparse.diags(P[:, a, b]) @ mats[b] for b in range(3)).tocsr() for a in range(3)
    )


def tangential_gradient(mesh, field, normals=None):
    """Tangential gradient of a vertex scalar field, shape (V, 3)."""
    field = np.asarray(field, dtype=float)
    if field.shape != (mesh.n_vertices,):
        raise ValueError("field must have one value per vertex")
    G = gradient_operators(mesh, normals)
    return np.stack([g @ field for g in G], axis=1)
