"""Mesh generators for the test surfaces.

``gen_mesh`` builds an icosphere, a truncated tube, a flat disk, a
grim-reaper patch or a bowl cap, optionally displaced along the exact
normal by a band-limited random field.
"""

from __future__ import annotations

import math

import numpy as np

from .bowl import bowl_profile
from .mesh import DEFAULT_AREA_FLOOR, MeshError, TriangleMesh

_ICO_PHI = (1 + math.sqrt(5)) / 2
_ICO_VERTICES = np.array(
    [
        [-1, _ICO_PHI, 0], [1, _ICO_PHI, 0], [-1, -_ICO_PHI, 0], [1, -_ICO_PHI, 0],
        [0, -1, _ICO_PHI], [0, 1, _ICO_PHI], [0, -1, -_ICO_PHI], [0, 1, -_ICO_PHI],
        [_ICO_PHI, 0, -1], [_ICO_PHI, 0, 1], [-_ICO_PHI, 0, -1], [-_ICO_PHI, 0, 1],
    ],
    dtype=float,
)
_ICO_FACES = np.array(
    [
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ]
)


def icosphere(radius=2.0, subdiv=3):
    """Vertices, faces of a subdivided icosahedron projected to a sphere.

    Vertex count is ``10 * 4**subdiv + 2``.
    """
    v = _ICO_VERTICES / np.linalg.norm(_ICO_VERTICES[0])
    f = _ICO_FACES.copy()
    for _ in range(subdiv):
        e = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
        uniq, inv = np.unique(e, axis=0, return_inverse=True)
        inv = inv.ravel()
        mid = v[uniq[:, 0]] + v[uniq[:, 1]]
        mid /= np.linalg.norm(mid, axis=1, keepdims=True)
        base = len(v)
        v = np.vstack([v, mid])
        nf = len(f)
        a = base + inv[:nf]
        b = base + inv[nf:2 * nf]
        c = base + inv[2 * nf:]
        f = np.vstack([
            np.c_[f[:, 0], a, c],
            np.c_[f[:, 1], b, a],
            np.c_[f[:, 2], c, b],
            np.c_[a, b, c],
        ])
    return radius * v, f, v.copy()


def _strip(ia, ang_a, ib, ang_b):
    """Triangulate the band between two closed rings of points.

    Rings are given by vertex indices and increasing angles. Triangles are
    counter-clockwise when ring ``a`` is inside ring ``b`` in the polar
    (radius, angle) sense.
    """
    na, nb = len(ia), len(ib)
    if na == 1:
        return [(ia[0], ib[j], ib[(j + 1) % nb]) for j in range(nb)]
    a0 = ang_a[0]
    # unwrap ring b so that it starts at the point angularly closest to a0
    rel = np.mod(ang_b - a0 + math.pi, 2 * math.pi) - math.pi
    j0 = int(np.argmin(np.abs(rel)))
    order = [(j0 + j) % nb for j in range(nb)]
    bb = [a0 + rel[j0]]
    for j in range(1, nb):
        bb.append(bb[0] + np.mod(ang_b[order[j]] - ang_b[order[0]], 2 * math.pi))
    bb.append(bb[0] + 2 * math.pi)
    aa = list(np.mod(ang_a - a0, 2 * math.pi) + a0) + [a0 + 2 * math.pi]
    tris = []
    i = j = 0
    while i < na or j < nb:
        if i == na:
            adv_b = True
        elif j == nb:
            adv_b = False
        else:
            adv_b = bb[j + 1] < aa[i + 1]
        A = ia[i % na]
        B = ib[order[j % nb]]
        if adv_b:
            tris.append((A, B, ib[order[(j + 1) % nb]]))
            j += 1
        else:
            tris.append((A, B, ia[(i + 1) % na]))
            i += 1
    return tris


def tube(radius=math.sqrt(2.0), length=10.0, resolution=32):
    """Staggered-ring tube around the x3-axis, centred at the origin."""
    m = int(resolution)
    if m < 6:
        raise MeshError("tube needs at least 6 points per ring")
    h = 2 * math.pi * radius / m
    n_rings = max(2, int(round(length / (h * math.sqrt(3) / 2))) + 1)
    z = np.linspace(-length / 2, length / 2, n_rings)
    verts, normals, tris = [], [], []
    rings = []
    for j, zj in enumerate(z):
        ang = (np.arange(m) + 0.5 * (j % 2)) * 2 * math.pi / m
        idx = np.arange(m) + j * m
        rings.append((idx, ang))
        verts.append(np.c_[radius * np.cos(ang), radius * np.sin(ang), np.full(m, zj)])
        normals.append(np.c_[np.cos(ang), np.sin(ang), np.zeros(m)])
    for j in range(n_rings - 1):
        (ia, aa), (ib, ab) = rings[j], rings[j + 1]
        # z plays the role of the radius: reverse to face outward
        tris += [(a, c, b) for a, b, c in _strip(ia, aa, ib, ab)]
    v = np.vstack(verts)
    boundary = np.zeros(len(v), dtype=bool)
    boundary[rings[0][0]] = True
    boundary[rings[-1][0]] = True
    return v, np.array(tris), np.vstack(normals), boundary


def _polar_rings(radii, spacing):
    idx_rings = []
    count = 0
    for r in radii:
        m = 1 if r == 0 else max(6, int(round(2 * math.pi * r / spacing)))
        ang = np.arange(m) * 2 * math.pi / m
        if m > 1:
            ang = ang + (len(idx_rings) % 2) * math.pi / m
        idx = np.arange(count, count + m)
        count += m
        idx_rings.append((idx, ang, r))
    return idx_rings


def _polar_mesh(radii, spacing):
    rings = _polar_rings(radii, spacing)
    rr, aa = [], []
    for idx, ang, r in rings:
        rr.append(np.full(len(idx), r))
        aa.append(ang)
    rr = np.concatenate(rr)
    aa = np.concatenate(aa)
    tris = []
    for (ia, anga, _), (ib, angb, _) in zip(rings[:-1], rings[1:]):
        tris += _strip(ia, anga, ib, angb)
    boundary = np.zeros(len(rr), dtype=bool)
    boundary[rings[-1][0]] = True
    return rr, aa, np.array(tris), boundary


def disk(radius=10.0, resolution=40):
    """Flat disk in the x3 = 0 plane with ``resolution`` rings."""
    n = int(resolution)
    if n < 2:
        raise MeshError("disk needs at least 2 rings")
    radii = np.linspace(0, radius, n + 1)
    rr, aa, f, b = _polar_mesh(radii, radius / n)
    v = np.c_[rr * np.cos(aa), rr * np.sin(aa), np.zeros_like(rr)]
    nrm = np.tile([0.0, 0.0, 1.0], (len(v), 1))
    return v, f, nrm, b


def bowl(r_max=4.0, resolution=40, step=0.01):
    """Cap of the translating bowl, rings equally spaced in arclength."""
    prof = bowl_profile(r_max, step)
    w = np.sqrt(1 + prof.du**2)
    s = np.r_[0.0, np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(prof.r))]
    n = int(resolution)
    if n < 2:
        raise MeshError("bowl needs at least 2 rings")
    s_rings = np.linspace(0, s[-1], n + 1)
    radii = np.interp(s_rings, s, prof.r)
    rr, aa, f, b = _polar_mesh(radii, s[-1] / n)
    from .analytic import BowlSoliton

    surf = BowlSoliton(prof)
    u = np.c_[rr, aa]
    return surf.position(u), f, surf.normal(u), b


def grim_reaper(half_width=1.3, length=6.0, resolution=24):
    """Patch of the grim-reaper plane ``x3 = -log cos x1`` over
    ``|x1| <= half_width``, ``|x2| <= length/2``.

    Rows are equally spaced in arclength along the curve.
    """
    m = int(resolution)
    if m < 3:
        raise MeshError("grim reaper needs resolution >= 3")
    s_max = math.asinh(math.tan(half_width))
    s = np.linspace(-s_max, s_max, m)
    ds = s[1] - s[0]
    dy = ds * math.sqrt(3) / 2
    n_rows = max(2, int(round(length / dy)) + 1)
    y = np.linspace(-length / 2, length / 2, n_rows)
    pts, rows = [], []
    count = 0
    for j, yj in enumerate(y):
        if j % 2:
            sj = np.r_[s[0], 0.5 * (s[:-1] + s[1:]), s[-1]]
        else:
            sj = s
        rows.append(np.arange(count, count + len(sj)))
        count += len(sj)
        pts.append(np.c_[sj, np.full(len(sj), yj)])
    pts = np.vstack(pts)
    tris = []
    for j in range(n_rows - 1):
        a, b = rows[j], rows[j + 1]
        sa, sb = pts[a, 0], pts[b, 0]
        i = k = 0
        while i < len(a) - 1 or k < len(b) - 1:
            if i == len(a) - 1:
                adv_b = True
            elif k == len(b) - 1:
                adv_b = False
            else:
                adv_b = sb[k + 1] < sa[i + 1]
            if adv_b:
                tris.append((a[i], b[k + 1], b[k]))
                k += 1
            else:
                tris.append((a[i], a[i + 1], b[k]))
                i += 1
    x1 = np.arctan(np.sinh(pts[:, 0]))
    v = np.c_[x1, pts[:, 1], -np.log(np.cos(x1))]
    nrm = np.c_[-np.sin(x1), np.zeros_like(x1), np.cos(x1)]
    boundary = np.zeros(len(v), dtype=bool)
    boundary[rows[0]] = True
    boundary[rows[-1]] = True
    boundary[[r[0] for r in rows]] = True
    boundary[[r[-1] for r in rows]] = True
    return v, np.array(tris), nrm, boundary


def smooth_field(points, seed=0, n_modes=24, band=(0.5, 1.5), even=False):
    """Band-limited random field: a sum of plane waves with wave numbers in
    ``band``. ``even=True`` drops phases so the field is invariant under
    ``x -> -x``."""
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_modes, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    k = rng.uniform(band[0], band[1], size=n_modes)
    amp = rng.normal(size=n_modes)
    phase = np.zeros(n_modes) if even else rng.uniform(0, 2 * math.pi, size=n_modes)
    arg = (points @ (dirs * k[:, None]).T) + phase
    return np.cos(arg) @ amp


_GENERATORS = {
    "icosphere": ("subdiv", 3),
    "tube": ("resolution", 32),
    "disk": ("resolution", 40),
    "grim_reaper": ("resolution", 24),
    "bowl": ("resolution", 40),
}
_ALIASES = {"sphere": "icosphere", "cylinder": "tube", "plane": "disk"}


def gen_mesh(kind, resolution=None, perturbation=0.0, seed=0, band=(0.5, 1.5),
             even=False, zero_mean=False, area_floor=DEFAULT_AREA_FLOOR, **params):
    """Generate a test mesh.

    Parameters
    ----------
    kind : {"icosphere", "tube", "disk", "grim_reaper", "bowl"}
    resolution : int, optional
        Subdivision level for the icosphere, points per ring for the tube,
        ring count for disk and bowl, points across the grim reaper.
    perturbation : float
        Maximum normal displacement. The field is normalized so that its
        largest magnitude over the vertices equals this amplitude.
    seed : int
        Seed of the perturbation field.
    band, even, zero_mean
        Wave-number band and parity of the field; ``zero_mean`` removes the
        area-weighted mean before normalization.
    **params
        Geometry parameters of the kind (``radius``, ``length``,
        ``half_width``, ``r_max``, ``step``).
    """
    kind = _ALIASES.get(kind, kind)
    if kind not in _GENERATORS:
        raise ValueError(f"unknown mesh kind {kind!r}")
    if perturbation < 0:
        raise ValueError("perturbation amplitude must be >= 0")
    key, default = _GENERATORS[kind]
    res = default if resolution is None else int(resolution)
    if kind == "icosphere":
        if res < 0:
            raise ValueError("subdivision level must be >= 0")
        v, f, nrm = icosphere(params.get("radius", 2.0), res)
        b = np.zeros(len(v), dtype=bool)
    else:
        builder = {"tube": tube, "disk": disk, "grim_reaper": grim_reaper, "bowl": bowl}[kind]
        v, f, nrm, b = builder(resolution=res, **params)
    meta = {"kind": kind, "resolution": res, "perturbation": float(perturbation),
            "seed": int(seed), "params": dict(params)}
    if perturbation > 0:
        base = TriangleMesh(v, f, boundary=b, area_floor=0.0)
        g = smooth_field(v, seed=seed, band=band, even=even)
        if zero_mean:
            from .geometry import mixed_voronoi_areas

            a = mixed_voronoi_areas(base)
            g = g - np.sum(a * g) / np.sum(a)
        g = g / np.max(np.abs(g))
        v = v + perturbation * g[:, None] * nrm
    try:
        return TriangleMesh(v, f, boundary=b, area_floor=area_floor, meta=meta)
    except MeshError as exc:
        raise MeshError(f"mesh generation failed: {exc}", edges=exc.edges, vertices=exc.vertices) from exc
