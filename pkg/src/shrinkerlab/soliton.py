"""Soliton residuals, operator identities, the tensor tau = A/H and
cylinder fitting.

Every entry point accepts a :class:`TriangleMesh` (optionally with a
precomputed :class:`VertexGeometry`) or a catalog entry from
:mod:`shrinkerlab.analytic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import AnalyticHypersurface, BowlSoliton, GeneralizedCylinder
from .calculus import SurfaceCalculus
from .mesh import TriangleMesh
from .operators import assemble_operators
from .samples import DEFAULT_COLLAR, sample_surface

IDENTITIES = ("LH_eq_H", "Lw_eq_halfw", "Simons_shrinker", "Lfrak_w_zero", "Lfrak_A2")
_NEEDS_GRADIENT_A = ("Simons_shrinker", "Lfrak_A2")
# candidate right-hand sides for the translator operator applied to |A|^2
LFRAK_A2_CANDIDATES = {
    "2|gradA|^2 - |A|^4": lambda gA2, A2: 2 * gA2 - A2 * A2,
    "2|gradA|^2 - |A|^2": lambda gA2, A2: 2 * gA2 - A2,
}
DEFAULT_H_FLOOR = 1e-6


def _wnorm(values, weights):
    w = weights.sum()
    if w <= 0:
        return 0.0
    return float(math.sqrt(np.sum(weights * values * values) / w))


@dataclass(frozen=True, eq=False)
class ResidualField:
    """Pointwise residual with interior summaries.

    ``l2`` is the area-weighted root mean square over ``mask``; ``linf``
    the maximum absolute value over ``mask``.
    """

    values: np.ndarray
    weights: np.ndarray
    mask: np.ndarray
    linf: float = field(init=False)
    l2: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        linf, l2 = self._summaries()
        object.__setattr__(self, "linf", linf)
        object.__setattr__(self, "l2", l2)

    def _summaries(self):
        v = self.values[self.mask]
        if v.size == 0:
            return 0.0, 0.0
        return float(np.max(np.abs(v))), _wnorm(v, self.weights[self.mask])

    def check(self):
        """True when the stored summaries match a fresh recomputation."""
        return (self.linf, self.l2) == self._summaries()

    @property
    def count(self):
        return int(self.mask.sum())

    def summary(self):
        return {"linf": self.linf, "l2": self.l2, "count": self.count}


def shrinker_residual(surface, geometry=None, collar=DEFAULT_COLLAR, grid=64) -> ResidualField:
    """``H - <x, n>/2`` at every vertex or sample."""
    s = sample_surface(surface, geometry, collar, grid)
    r = s.H - 0.5 * np.einsum("ij,ij->i", s.x, s.normals)
    return ResidualField(r, s.weights, s.mask)


def _unit(direction, dim):
    if direction is None:
        direction = np.eye(dim)[-1]
    d = np.asarray(direction, dtype=float)
    if d.shape != (dim,):
        raise ValueError(f"direction must have {dim} components")
    nrm = np.linalg.norm(d)
    if nrm == 0:
        raise ValueError("direction must be nonzero")
    return d / nrm


def translator_residual(surface, direction=None, geometry=None, collar=DEFAULT_COLLAR,
                        grid=64) -> ResidualField:
    """``H + <e, n>`` for the unit translation direction ``e`` (default: last axis)."""
    s = sample_surface(surface, geometry, collar, grid)
    e = _unit(direction, s.x.shape[1])
    r = s.H + s.normals @ e
    return ResidualField(r, s.weights, s.mask)


# ---------------------------------------------------------------- transport


def _one_ring_padded(mesh):
    adj = mesh.adjacency
    val = np.diff(adj.indptr)
    K = int(val.max())
    idx = np.zeros((mesh.n_vertices, K), dtype=np.int64)
    ok = np.arange(K)[None, :] < val[:, None]
    idx[ok] = adj.indices
    return idx, ok


def _rotate_onto(src, dst, vec):
    """Apply the minimal rotation taking unit ``src`` to unit ``dst`` to ``vec``."""
    v = np.cross(src, dst)
    c = np.sum(src * dst, axis=-1, keepdims=True)
    vxu = np.cross(v, vec)
    return vec + vxu + np.cross(v, vxu) / (1 + c)


def _transport_matrices(geometry, idx, ok):
    """``Q[i, k]`` maps frame coordinates at neighbour ``idx[i, k]`` to frame
    coordinates at ``i`` after parallel transport; shape (V, K, 2, 2)."""
    n = geometry.normals
    F = geometry.frames
    dst = np.broadcast_to(n[:, None, :], idx.shape + (3,))
    src = np.where(ok[..., None], n[idx], dst)  # padding slots: identity
    cols = [_rotate_onto(src, dst, F[idx][:, :, q]) for q in range(2)]
    Q = np.empty(idx.shape + (2, 2))
    for q in range(2):
        Q[..., q] = np.einsum("ipc,ikc->ikp", F, cols[q])
    return Q


def transported_differences(mesh, geometry, T):
    """Differences ``P_{j->i} T_j - T_i`` of a tangent (2, 2) tensor field
    along one-ring edges, with edge vectors in each vertex frame.

    Returns ``(D, E, ok, idx)`` with ``D`` of shape (V, K, 2, 2) and ``E`` of
    shape (V, K, 2).
    """
    idx, ok = _one_ring_padded(mesh)
    Q = _transport_matrices(geometry, idx, ok)
    Tj = np.einsum("ikpa,ikab,ikqb->ikpq", Q, T[idx], Q)
    D = (Tj - T[:, None]) * ok[..., None, None]
    dx = mesh.vertices[idx] - mesh.vertices[:, None]
    E = np.einsum("ikc,ipc->ikp", dx, geometry.frames) * ok[..., None]
    return D, E, ok, idx


def transported_gradient(mesh, geometry, T, valid=None):
    """Least-squares covariant gradient of a tangent tensor field.

    Returns ``grad`` of shape (V, 2, 2, 2) with ``grad[i, c]`` the derivative
    along frame direction ``c``, and ``|grad|^2`` per vertex. Neighbours
    outside ``valid`` are dropped.
    """
    D, E, ok, idx = transported_differences(mesh, geometry, T)
    if valid is not None:
        keep = ok & valid[idx]
        D = D * keep[..., None, None]
        E = E * keep[..., None]
    N = np.einsum("ikp,ikq->ipq", E, E)
    det = N[:, 0, 0] * N[:, 1, 1] - N[:, 0, 1] ** 2
    bad = ~(det > 1e-14 * np.maximum(np.einsum("ipp->i", N), 1e-300) ** 2)
    N[bad] = np.eye(2)
    rhs = np.einsum("ikc,ikpq->icpq", E, D)
    grad = np.einsum("icd,idpq->icpq", np.linalg.inv(N), rhs)
    grad[bad] = np.nan
    return grad, np.einsum("icpq,icpq->i", grad, grad)


# ---------------------------------------------------------------- identities


@dataclass(frozen=True, eq=False)
class IdentityReport:
    """Outcome of one operator identity check.

    ``relative_l2`` is ``residual.l2`` divided by the L2 norm of the
    reference field (for example ``H`` for ``LH_eq_H``); vertices where the
    reference is below ``floor`` are excluded from the normalization and
    counted in ``excluded``.
    """

    which: str
    source: str
    residual: ResidualField
    reference_l2: float
    relative_l2: float
    excluded: int = 0
    experimental: bool = False
    candidates: dict | None = None
    winner: str | None = None

    def to_dict(self):
        out = {
            "identity": self.which,
            "source": self.source,
            **{f"residual_{k}": v for k, v in self.residual.summary().items()},
            "reference_l2": self.reference_l2,
            "relative_l2": self.relative_l2,
            "excluded": self.excluded,
            "experimental": self.experimental,
        }
        if self.candidates is not None:
            out["candidates"] = self.candidates
            out["winner"] = self.winner
        return out


def _analytic_fields(surface, which, V, direction, grid):
    u, w = surface.parameter_grid(grid)
    calc = SurfaceCalculus(surface, u)
    H = calc.field("H")
    A2 = calc.field("A2")
    if which == "LH_eq_H":
        return calc.stability(H) - calc.H, calc.H, w, None
    if which == "Lw_eq_halfw":
        wv = calc.w_expr(V)
        val = calc.value(wv)
        return calc.stability(wv) - 0.5 * val, val, w, None
    if which == "Lfrak_w_zero":
        wv = calc.w_expr(V)
        return calc.translator_operator(wv, direction), calc.value(wv), w, None
    gA2 = surface.gradA_norm2(u)
    if which == "Simons_shrinker":
        lhs = calc.drift_laplacian(A2)
        a2 = calc.A2
        return lhs - (a2 - 2 * a2 * a2 + 2 * gA2), a2, w, None
    # the identity is for Lap + <e, grad> + |A|^2 applied to |A|^2
    lhs = calc.translator_operator(A2, direction)
    cands = {name: lhs - f(gA2, calc.A2) for name, f in LFRAK_A2_CANDIDATES.items()}
    return None, calc.A2, w, cands


def _mesh_fields(mesh, geometry, which, V, direction, collar):
    s = sample_surface(mesh, geometry, collar)
    g = s.geometry
    ops = assemble_operators(mesh, g, direction=_unit(direction, 3))
    if which == "LH_eq_H":
        return ops.stability @ g.H - g.H, g.H, s, None
    if which in ("Lw_eq_halfw", "Lfrak_w_zero"):
        wv = g.normals @ np.asarray(V, dtype=float)
        if which == "Lw_eq_halfw":
            return ops.stability @ wv - 0.5 * wv, wv, s, None
        return ops.translator @ wv, wv, s, None
    _, gA2 = transported_gradient(mesh, g, g.shape)
    A2 = g.A2
    if which == "Simons_shrinker":
        return ops.drift_laplacian @ A2 - (A2 - 2 * A2 * A2 + 2 * gA2), A2, s, None
    lhs = ops.translator @ A2
    cands = {name: lhs - f(gA2, A2) for name, f in LFRAK_A2_CANDIDATES.items()}
    return None, A2, s, cands


def verify_identity(surface, which, V=None, direction=None, geometry=None,
                    collar=DEFAULT_COLLAR, grid=64, floor=DEFAULT_H_FLOOR,
                    experimental=False, winner_tol=1e-8) -> IdentityReport:
    """Evaluate one operator identity pointwise.

    Parameters
    ----------
    which : {"LH_eq_H", "Lw_eq_halfw", "Simons_shrinker", "Lfrak_w_zero", "Lfrak_A2"}
    V : array_like
        Constant vector for the ``<V, n>`` identities.
    direction : array_like, optional
        Translation direction for the translator operator (default: last axis).
    experimental : bool
        Required for the two identities involving ``|grad A|^2`` on meshes,
        where that quantity comes from transported finite differences.
    winner_tol : float
        For ``Lfrak_A2``, a candidate right-hand side is accepted when its
        residual L-infinity is below this value.

    Notes
    -----
    ``Lfrak_A2`` reports both candidate right-hand sides of the translator
    Simons identity and names the one the data satisfy; when both or
    neither pass, ``winner`` is ``"indeterminate"``.
    """
    if which not in IDENTITIES:
        raise ValueError(f"unknown identity {which!r}; choose from {IDENTITIES}")
    if isinstance(surface, AnalyticHypersurface):
        dim = surface.ambient_dim
        V = _vector(V, dim)
        res, ref, w, cands = _analytic_fields(surface, which, V, direction, grid)
        mask = np.ones(len(w), dtype=bool)
        source = "analytic"
    elif isinstance(surface, TriangleMesh):
        if which in _NEEDS_GRADIENT_A and not experimental:
            raise ValueError(f"{which} on meshes needs experimental=True")
        res, ref, s, cands = _mesh_fields(surface, geometry, which, _vector(V, 3), direction, collar)
        w, mask = s.weights, s.mask
        source = "mesh"
    else:
        raise TypeError(f"cannot verify identities on {type(surface).__name__}")

    winner = None
    cand_summary = None
    if cands is not None:
        fields = {k: ResidualField(v, w, mask & np.isfinite(v)) for k, v in cands.items()}
        cand_summary = {k: f.summary() for k, f in fields.items()}
        passing = [k for k, f in fields.items() if f.linf < winner_tol]
        if len(passing) == 1:
            winner = passing[0]
            res = cands[winner]
        else:
            winner = "indeterminate"
            res = min(cands.values(), key=lambda v: np.max(np.abs(v[mask])))
    valid = mask & np.isfinite(res)
    keep = valid & (np.abs(ref) >= floor)
    excluded = int(valid.sum() - keep.sum())
    field_ = ResidualField(res, w, valid)
    ref_l2 = _wnorm(ref[keep], w[keep])
    rel = _wnorm(res[keep], w[keep]) / ref_l2 if ref_l2 > 0 else float("nan")
    return IdentityReport(
        which=which, source=source, residual=field_, reference_l2=ref_l2, relative_l2=rel,
        excluded=excluded, experimental=bool(experimental and source == "mesh"),
        candidates=cand_summary, winner=winner,
    )


def _vector(V, dim):
    if V is None:
        return np.eye(dim)[-1]
    v = np.asarray(V, dtype=float)
    if v.shape != (dim,):
        raise ValueError(f"V must have {dim} components")
    return v


# ---------------------------------------------------------------- tau = A / H


@dataclass(frozen=True, eq=False)
class TauField:
    """The tensor ``tau = A/H`` and its gradient norm.

    ``tau`` has shape (V, 2, 2) in the vertex frames for meshes, and holds
    the eigenvalues (M, n) for catalog entries. ``grad_norm`` is NaN where
    undefined.
    """

    tau: np.ndarray
    trace: np.ndarray
    grad_norm: np.ndarray
    valid: np.ndarray
    weights: np.ndarray
    excluded: int
    h_floor: float
    equation_residual: np.ndarray | None = None

    def summary(self):
        v = self.valid & np.isfinite(self.grad_norm)
        g = self.grad_norm[v]
        out = {
            "count": int(self.valid.sum()),
            "excluded": self.excluded,
            "h_floor": self.h_floor,
            "trace_error_max": float(np.max(np.abs(self.trace[self.valid] - 1))),
            "grad_norm_sup": float(g.max()) if g.size else float("nan"),
            "grad_norm_mean": _wmean(g, self.weights[v]),
        }
        if self.equation_residual is not None:
            e = self.equation_residual[v]
            e = e[np.isfinite(e)]
            out["equation_residual_linf"] = float(np.max(np.abs(e))) if e.size else float("nan")
        return out


def _wmean(v, w):
    return float(np.sum(v * w) / np.sum(w)) if np.sum(w) > 0 else float("nan")


def _tau_bowl_grad2(surface, u, eps=1e-5):
    # rotational surface: tau = diag(t1, t2) in (profile, rotation) directions;
    # |grad tau|^2 = t1_s^2 + t2_s^2 + 2 (t1 - t2)^2 (r_s / r)^2
    r = np.asarray(u, dtype=float)[..., 0]

    def t(rr):
        k = surface.principal_curvatures(np.stack([rr, np.zeros_like(rr)], axis=-1))
        return k / k.sum(axis=-1, keepdims=True)

    rp = np.minimum(r + eps, surface.r_max)
    rm = np.maximum(r - eps, 0.0)
    dt = (t(rp) - t(rm)) / (rp - rm)[:, None]
    p = surface._p(r)
    w = np.sqrt(1 + p * p)
    ts = dt / w[:, None]
    tt = t(r)
    with np.errstate(invalid="ignore", divide="ignore"):
        rot = np.where(r > 0, 2 * (tt[:, 0] - tt[:, 1]) ** 2 / (r * w) ** 2, 0.0)
    return np.sum(ts * ts, axis=1) + rot


def tau_field(surface, geometry=None, h_floor=DEFAULT_H_FLOOR, collar=DEFAULT_COLLAR,
              grid=64, experimental=False) -> TauField:
    """Compute ``tau = A/H`` where ``|H| >= h_floor``.

    For meshes ``|grad tau|`` uses one-ring least squares on differences
    taken after parallel transport of the neighbour frames. With
    ``experimental=True`` the mesh residual of
    ``Lap tau - <x, grad tau>/2 + <grad log H^2, grad tau>`` is returned
    (its Frobenius norm per vertex). On catalog entries with parallel
    ``A`` every term of that equation vanishes identically.

    Raises
    ------
    ValueError
        If no sample has ``|H| >= h_floor``.
    """
    if isinstance(surface, AnalyticHypersurface):
        u, w = surface.parameter_grid(grid)
        kap = surface.principal_curvatures(u)
        H = kap.sum(axis=-1)
        valid = np.abs(H) >= h_floor
        if not valid.any():
            raise ValueError("every sample has |H| below h_floor")
        with np.errstate(invalid="ignore", divide="ignore"):
            tau = np.where(valid[:, None], kap / H[:, None], np.nan)
        trace = tau.sum(axis=-1)
        eq = None
        if surface.tau_is_parallel():
            grad = np.where(valid, 0.0, np.nan)
            if isinstance(surface, GeneralizedCylinder):
                eq = np.where(valid, 0.0, np.nan)
        elif isinstance(surface, BowlSoliton):
            grad = np.where(valid, np.sqrt(np.abs(_tau_bowl_grad2(surface, u))), np.nan)
        else:
            grad = np.full(len(u), np.nan)
        return TauField(tau, trace, grad, valid, w, int((~valid).sum()), h_floor, eq)

    if not isinstance(surface, TriangleMesh):
        raise TypeError(f"cannot compute tau on {type(surface).__name__}")
    s = sample_surface(surface, geometry, collar)
    g = s.geometry
    H = g.H
    valid = s.mask & (np.abs(H) >= h_floor)
    if not valid.any():
        raise ValueError("every interior vertex has |H| below h_floor")
    # tau is needed on neighbours of valid vertices too, so use all usable ones
    usable = ~g.flagged & (np.abs(H) >= h_floor)
    Hs = np.where(usable, H, 1.0)
    tau = g.shape / Hs[:, None, None]
    tau[~usable] = np.nan
    trace = np.einsum("ipp->i", tau)
    gradT, g2 = transported_gradient(surface, g, np.nan_to_num(tau), valid=usable)
    grad = np.where(valid, np.sqrt(g2), np.nan)
    eq = None
    if experimental:
        eq = _tau_equation_mesh(surface, g, np.nan_to_num(tau), gradT, usable, H)
        eq = np.where(valid, eq, np.nan)
    excluded = int((s.mask & ~valid).sum())
    return TauField(tau, trace, grad, valid, g.area, excluded, h_floor, eq)


def _tau_equation_mesh(mesh, g, tau, gradT, usable, H):
    from .geometry import cotangent_stiffness, tangential_gradient

    D, _, ok, idx = transported_differences(mesh, g, tau)
    S = cotangent_stiffness(mesh)
    rows = np.repeat(np.arange(mesh.n_vertices), idx.shape[1])
    W = np.asarray(S[rows, idx.ravel()]).reshape(idx.shape) * (ok & usable[idx])
    lap = np.einsum("ik,ikpq->ipq", W, D) / g.area[:, None, None]
    x2 = np.einsum("ic,ipc->ip", mesh.vertices, g.frames)
    logh = np.log(np.where(usable, H * H, 1.0))
    gl = np.einsum("ic,ipc->ip", tangential_gradient(mesh, logh, g.normals), g.frames)
    res = lap + np.einsum("ic,icpq->ipq", gl - 0.5 * x2, gradT)
    return np.sqrt(np.einsum("ipq,ipq->i", res, res))


# ---------------------------------------------------------------- cylinder fit


@dataclass(frozen=True)
class CylinderFit:
    """Best generalized-cylinder model for a mesh.

    ``k`` is ``None`` when the curvature spectrum is ambiguous; ``axis``
    holds ``2 - k`` orthonormal rows spanning the flat directions.
    """

    k: int | None
    axis: np.ndarray
    center: np.ndarray
    radius: float
    deviation: float
    h_deviation: float
    spectrum: np.ndarray
    indeterminate: bool = False

    def to_dict(self):
        return {
            "k": self.k,
            "indeterminate": self.indeterminate,
            "axis": self.axis.tolist(),
            "center": self.center.tolist(),
            "radius": self.radius,
            "deviation": self.deviation,
            "h_deviation": self.h_deviation,
            "spectrum": self.spectrum.tolist(),
        }


def _fit_sphere(x):
    A = np.c_[2 * x, np.ones(len(x))]
    b = np.sum(x * x, axis=1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    c = sol[:3]
    d = np.linalg.norm(x - c, axis=1)
    r = float(d.mean())
    return c, r, float(np.max(np.abs(d - r)))


def _fit_cylinder(x, a):
    a = a / np.linalg.norm(a)
    basis = np.linalg.svd(np.eye(3) - np.outer(a, a))[0][:, :2].T
    p = x @ basis.T
    A = np.c_[2 * p, np.ones(len(p))]
    sol, *_ = np.linalg.lstsq(A, np.sum(p * p, axis=1), rcond=None)
    c = sol[:2] @ basis + a * float(np.mean(x @ a))
    d = np.linalg.norm((x - c) - np.outer((x - c) @ a, a), axis=1)
    r = float(d.mean())
    return c, r, float(np.max(np.abs(d - r)))


def cylinder_fit(mesh, geometry=None, collar=DEFAULT_COLLAR, zero_ratio=0.1,
                 flat_floor=1e-3, min_count=50) -> CylinderFit:
    """Classify a mesh as ``S^k x R^{2-k}`` and fit the model.

    The area-averaged ambient shape tensor has ``k + 1`` nonzero eigenvalues
    on a closed sphere or a full tube (its null space is the axis) and
    vanishes on a plane. An eigenvalue counts as zero when it is below
    ``zero_ratio`` times the largest; if some eigenvalue lies within a
    factor 5 of that threshold the spectrum is ambiguous and ``k`` is
    reported as indeterminate.

    Raises
    ------
    ValueError
        If fewer than ``min_count`` interior vertices remain.
    """
    s = sample_surface(mesh, geometry, collar)
    g = s.geometry
    m = s.mask
    if m.sum() < min_count:
        raise ValueError(f"only {int(m.sum())} interior vertices; need {min_count}")
    x = mesh.vertices[m]
    w = g.area[m]
    T = np.einsum("i,iab->ab", w, g.shape_ambient()[m]) / w.sum()
    ev, vec = np.linalg.eigh(T)
    order = np.argsort(-np.abs(ev))
    ev, vec = ev[order], vec[:, order]
    mags = np.abs(ev)
    top = mags[0]
    H = g.H[m]
    if top < flat_floor:
        k, indeterminate = 0, False
    else:
        thr = zero_ratio * top
        ratio = mags / thr
        indeterminate = bool(np.any((ratio > 0.2) & (ratio < 5)))
        nonzero = int(np.sum(mags >= thr))
        k = nonzero - 1 if nonzero >= 2 else None
        if k is None:
            indeterminate = True
    if indeterminate:
        return CylinderFit(None, np.zeros((0, 3)), np.zeros(3), float("nan"), float("nan"),
                           float("nan"), ev, True)
    if k == 2:
        c, r, dev = _fit_sphere(x)
        axis = np.zeros((0, 3))
    elif k == 1:
        a = vec[:, 2]
        c, r, dev = _fit_cylinder(x, a)
        axis = (a * np.sign(a[np.argmax(np.abs(a))]))[None]
    else:
        c = x.mean(axis=0)
        _, _, vt = np.linalg.svd(x - c)
        nrm = vt[2]
        dev = float(np.max(np.abs((x - c) @ nrm)))
        r = 0.0
        axis = vt[:2]
    hdev = float(np.max(np.abs(np.abs(H) - math.sqrt(k / 2))))
    return CylinderFit(k, axis, np.asarray(c, dtype=float), float(r), float(dev), hdev, ev, False)


__all__ = [
    "IDENTITIES", "LFRAK_A2_CANDIDATES", "ResidualField", "IdentityReport", "TauField",
    "CylinderFit", "shrinker_residual", "translator_residual", "verify_identity",
    "tau_field", "cylinder_fit", "transported_gradient",
]
