"""Empirical audits of curvature estimates for solitons.

Each audit checks a hypothesis on a ball (``H >= delta`` or
``<V, n> >= delta``), evaluates the ratio a curvature estimate bounds by a
constant, and reports its supremum over the valid subregion. Hypothesis
failures are reported, never raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy import stats

from .calculus import SurfaceCalculus
from .geometry import cotangent_stiffness
from .reports import csv_text
from .samples import DEFAULT_COLLAR, sample_surface
from .soliton import shrinker_residual, tau_field, translator_residual


def _argmax_first(values):
    """Index of the maximum; ties go to the lowest index, NaNs are skipped."""
    v = np.where(np.isfinite(values), values, -np.inf)
    if not np.isfinite(v).any():
        return None
    return int(np.argmax(v))


@dataclass(frozen=True, eq=False)
class AuditReport:
    """Hypothesis check plus a per-sample ratio field and its supremum.

    ``ratio`` is NaN outside the evaluation region; ``empirical_C`` is its
    maximum (``None`` when the region is empty).
    """

    name: str
    hypothesis: dict
    ratio: np.ndarray
    positions: np.ndarray
    empirical_C: float | None
    argmax: int | None
    C: float | None = None
    meta: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def violated(self):
        return bool(self.hypothesis.get("violated", False))

    @property
    def passed(self):
        if self.C is None or self.empirical_C is None:
            return None
        return bool(self.empirical_C <= self.C)

    def to_dict(self):
        out = {
            "audit": self.name,
            "hypothesis": self.hypothesis,
            "empirical_C": self.empirical_C,
            "argmax": self.argmax,
            "argmax_position": None if self.argmax is None else self.positions[self.argmax].tolist(),
            "evaluated": int(np.isfinite(self.ratio).sum()),
            "C": self.C,
            "passed": self.passed,
            **self.meta,
        }
        out.update(self.extra)
        return out

    def ratio_csv(self):
        dim = self.positions.shape[1]
        rows = ([int(i), *self.positions[i], self.ratio[i]]
                for i in np.flatnonzero(np.isfinite(self.ratio)))
        return csv_text(["index"] + [f"x{j}" for j in range(dim)] + ["ratio"], rows)


def _hypothesis(label, delta, region, holds):
    n_region = int(region.sum())
    n_hold = int((region & holds).sum())
    return {
        "condition": label,
        "delta": float(delta),
        "region_count": n_region,
        "holds_count": n_hold,
        "fraction": n_hold / n_region if n_region else float("nan"),
        "violated": n_hold < n_region,
    }


def _meta(s, **kw):
    out = {"source": s.source, "samples": s.count}
    if s.mesh_size is not None:
        out["mean_edge_length"] = s.mesh_size
    out.update({k: (float(v) if isinstance(v, (int, float, np.floating)) else v) for k, v in kw.items()})
    return out


def _finish(name, s, ratio, hyp, C, meta, extra=None):
    i = _argmax_first(ratio)
    emp = None if i is None else float(ratio[i])
    return AuditReport(name, hyp, ratio, s.x, emp, i, C, meta, extra or {})


def audit_mean_convex_estimate(surface, R, delta, C=None, geometry=None,
                               collar=DEFAULT_COLLAR, grid=64) -> AuditReport:
    """``|A| (R - |x|) / (R H)`` on ``B_{R-1}`` given ``H >= delta`` on ``B_R``.

    The estimate being audited is ``|A|(x) <= C R H(x) / (R - |x|)``.

    Raises
    ------
    ValueError
        If ``R <= 2`` or no interior sample lies in ``B_R``.
    """
    if not R > 2:
        raise ValueError("need R > 2")
    s = sample_surface(surface, geometry, collar, grid)
    r = np.linalg.norm(s.x, axis=1)
    region = s.mask & (r < R)
    if not region.any():
        raise ValueError("no interior sample inside B_R")
    holds = s.H >= delta
    hyp = _hypothesis("H >= delta", delta, region, holds)
    ev = s.mask & (r < R - 1) & holds
    ratio = np.full(len(r), np.nan)
    ratio[ev] = s.A_norm[ev] * (R - r[ev]) / (R * s.H[ev])
    return _finish("mean_convex", s, ratio, hyp, C, _meta(s, R=R, delta=delta, collar=collar))


def _center(x0, dim):
    if x0 is None:
        return np.zeros(dim)
    c = np.asarray(x0, dtype=float)
    if c.shape != (dim,):
        raise ValueError(f"x0 must have {dim} components")
    return c


def _unit_vector(V, dim):
    if V is None:
        return np.eye(dim)[-1]
    v = np.asarray(V, dtype=float)
    if v.shape != (dim,) or not np.linalg.norm(v) > 0:
        raise ValueError(f"V must be a nonzero vector with {dim} components")
    return v / np.linalg.norm(v)


def audit_graphical_estimate(surface, V=None, R=1.0, delta=0.5, x0=None, C=None,
                             geometry=None, collar=DEFAULT_COLLAR, grid=64) -> AuditReport:
    """``sup |A|`` over ``B_{R/2}(x0)`` given ``<V, n> >= delta`` on ``B_R(x0)``."""
    s = sample_surface(surface, geometry, collar, grid)
    dim = s.x.shape[1]
    V = _unit_vector(V, dim)
    c = _center(x0, dim)
    d = np.linalg.norm(s.x - c, axis=1)
    w = s.normals @ V
    region = s.mask & (d < R)
    holds = w >= delta
    hyp = _hypothesis("<V, n> >= delta", delta, region, holds)
    ev = s.mask & (d < R / 2) & holds
    ratio = np.full(len(d), np.nan)
    ratio[ev] = s.A_norm[ev]
    meta = _meta(s, R=R, delta=delta, collar=collar, V=V.tolist(), x0=c.tolist())
    return _finish("graphical", s, ratio, hyp, C, meta)


def audit_translator_estimate(surface, V=None, R=4.0, delta=0.5, x0=None, C=None,
                              direction=None, w_floor=1e-12, geometry=None,
                              collar=DEFAULT_COLLAR, grid=64) -> AuditReport:
    """``|A|^2 / ((1/R + 1/R^2) w^2)`` on ``B_{R/2}(x0)`` with ``w = <V, n>``.

    The translator residual is computed first and reported. Samples with
    ``w`` below ``w_floor`` are excluded and counted.
    """
    s = sample_surface(surface, geometry, collar, grid)
    dim = s.x.shape[1]
    V = _unit_vector(V, dim)
    c = _center(x0, dim)
    tr = translator_residual(s, direction)
    d = np.linalg.norm(s.x - c, axis=1)
    w = s.normals @ V
    region = s.mask & (d < R)
    hyp = _hypothesis("<V, n> >= delta", delta, region, w >= delta)
    half = s.mask & (d < R / 2)
    low = half & (w < w_floor)
    ev = half & ~low
    ratio = np.full(len(d), np.nan)
    ratio[ev] = s.A2[ev] / ((1 / R + 1 / R**2) * w[ev] ** 2)
    meta = _meta(s, R=R, delta=delta, collar=collar, V=V.tolist(), x0=c.tolist())
    extra = {"translator_residual_linf": tr.linf, "translator_residual_l2": tr.l2,
             "excluded_low_w": int(low.sum())}
    return _finish("translator", s, ratio, hyp, C, meta, extra)


def translator_sweep(surface, Rs, V=None, delta=0.5, x0=None, **kw):
    """Empirical translator constant as a function of ``R``.

    Returns a list of dicts with ``R``, ``empirical_C``, ``fraction`` (of
    ``B_R(x0)`` where the hypothesis holds) and ``violated``.
    """
    s = sample_surface(surface, kw.pop("geometry", None), kw.pop("collar", DEFAULT_COLLAR),
                       kw.pop("grid", 64))
    rows = []
    for R in Rs:
        rep = audit_translator_estimate(s, V=V, R=float(R), delta=delta, x0=x0, **kw)
        rows.append({
            "R": float(R),
            "empirical_C": rep.empirical_C,
            "fraction": rep.hypothesis["fraction"],
            "violated": rep.violated,
        })
    return rows


# ------------------------------------------------------------ cutoff machinery


@dataclass(frozen=True, eq=False)
class CutoffIdentityReport:
    """Surface Laplacian of the cutoff ``phi = ((rho^2 - |x - x0|^2)_+)^3``
    against its closed form on ``B_rho(x0)``.

    ``relative_error`` divides the largest pointwise difference by
    ``rho^4``, the scale of both sides.
    """

    region_count: int
    lhs: np.ndarray
    rhs: np.ndarray
    max_error: float
    relative_error: float
    bound_violations: int
    bound_max_ratio: float
    shrinker_residual_linf: float
    shrinker_ok: bool
    source: str
    warnings: list = field(default_factory=list)

    @property
    def empty(self):
        return self.region_count == 0

    def to_dict(self):
        return {
            "region_count": self.region_count,
            "empty": self.empty,
            "max_error": self.max_error,
            "relative_error": self.relative_error,
            "bound_violations": self.bound_violations,
            "bound_max_ratio": self.bound_max_ratio,
            "shrinker_residual_linf": self.shrinker_residual_linf,
            "shrinker_ok": self.shrinker_ok,
            "source": self.source,
            "warnings": self.warnings,
        }


def cutoff_rhs(x, normals, H, x0, rho, n):
    """``24 mu |(x-x0)^T|^2 - 6 n mu^2 + 6 mu^2 H <x - x0, n>``."""
    y = x - x0
    mu = rho * rho - np.sum(y * y, axis=1)
    yn = np.einsum("ij,ij->i", y, normals)
    yt2 = np.sum(y * y, axis=1) - yn * yn
    return 24 * mu * yt2 - 6 * n * mu * mu + 6 * mu * mu * H * yn


def verify_cutoff_identity(surface, x0=None, rho=2.0, geometry=None, collar=DEFAULT_COLLAR,
                           grid=64, residual_tol=1e-2) -> CutoffIdentityReport:
    """Compare the Laplacian of the cutoff with its closed form.

    Catalog entries differentiate ``phi`` exactly (symbolic ambient
    extension); meshes use the cotangent Laplacian. The bound
    ``|Lap phi| <= (24 + 6n) rho^4 + 3 rho^3 |x|`` is checked pointwise on
    the left-hand side.
    """
    s = sample_surface(surface, geometry, collar, grid)
    dim = s.x.shape[1]
    n = dim - 1
    c = _center(x0, dim)
    res = shrinker_residual(s)
    warnings = []
    ok = res.linf <= residual_tol
    if not ok:
        warnings.append(f"shrinker residual {res.linf:.3g} exceeds {residual_tol:g}")
    y = s.x - c
    region = s.mask & (np.sum(y * y, axis=1) < rho * rho)
    lhs = np.full(len(y), np.nan)
    rhs = np.full(len(y), np.nan)
    if region.any():
        if s.source == "analytic":
            calc = SurfaceCalculus(s.surface, s.u[region])
            xs = calc.symbols
            expr = (rho**2 - sum((xi - float(ci)) ** 2 for xi, ci in zip(xs, c))) ** 3
            lhs[region] = calc.laplacian(sp.sympify(expr))
        else:
            mu = np.maximum(rho * rho - np.sum(y * y, axis=1), 0.0)
            phi = mu**3
            S = cotangent_stiffness(s.mesh)
            lhs[region] = (S @ phi)[region] / s.weights[region]
        rhs[region] = cutoff_rhs(s.x[region], s.normals[region], s.H[region], c, rho, n)
    else:
        warnings.append("B_rho(x0) contains no interior sample")
    err = np.abs(lhs - rhs)[region]
    max_err = float(err.max()) if err.size else 0.0
    bound = (24 + 6 * n) * rho**4 + 3 * rho**3 * np.linalg.norm(s.x, axis=1)
    br = (np.abs(lhs) / bound)[region]
    return CutoffIdentityReport(
        region_count=int(region.sum()), lhs=lhs, rhs=rhs, max_error=max_err,
        relative_error=max_err / rho**4, bound_violations=int(np.sum(br > 1)),
        bound_max_ratio=float(br.max()) if br.size else 0.0,
        shrinker_residual_linf=res.linf, shrinker_ok=bool(ok), source=s.source,
        warnings=warnings,
    )


@dataclass(frozen=True, eq=False)
class CutoffScan:
    """Fields of the maximum-principle argument on ``B_rho(x0)``.

    ``v = 1/H``, ``v0 = 1/delta``, ``k = 1/(2 v0^2)``,
    ``h = v^2 / (1 - k v^2)``, ``f = |A|^2 h``, ``phi = (mu_+)^3`` with
    ``mu = rho^2 - |x - x0|^2`` and ``F = phi f``. Fields other than
    ``phi``, ``mu`` and ``F`` are NaN outside the ball; ``F`` is 0 there.
    """

    x0: np.ndarray
    rho: float
    delta: float
    R: float
    x: np.ndarray
    mu: np.ndarray
    phi: np.ndarray
    v: np.ndarray
    h: np.ndarray
    A2: np.ndarray
    f: np.ndarray
    F: np.ndarray
    y0: int | None
    hypothesis: dict
    v_equation_residual: float | None = None

    @property
    def v0(self):
        return 1.0 / self.delta

    @property
    def k(self):
        return 1.0 / (2 * self.v0**2)

    @property
    def F_max(self):
        return None if self.y0 is None else float(self.F[self.y0])

    @property
    def bound_ratio(self):
        if self.y0 is None:
            return None
        rho, R = self.rho, self.R
        return self.F_max / (rho**6 + R * rho**5 + R * R * rho**4)

    def check(self):
        """Recompute ``phi`` and ``f`` from stored inputs; True when identical."""
        y = self.x - self.x0
        mu = self.rho**2 - np.sum(y * y, axis=1)
        phi = np.maximum(mu, 0.0) ** 3
        inside = np.isfinite(self.h)
        f = self.A2[inside] * self.h[inside]
        return bool(np.array_equal(phi, self.phi) and np.array_equal(f, self.f[inside])
                    and np.all(self.F[mu <= 0] == 0))

    def to_dict(self):
        return {
            "x0": self.x0.tolist(),
            "rho": self.rho,
            "delta": self.delta,
            "R": self.R,
            "v0": self.v0,
            "k": self.k,
            "y0": self.y0,
            "y0_position": None if self.y0 is None else self.x[self.y0].tolist(),
            "F_max": self.F_max,
            "bound_ratio": self.bound_ratio,
            "hypothesis": self.hypothesis,
            "v_equation_residual": self.v_equation_residual,
        }


def _v_equation_residual(surface, u):
    """Max of ``|Lap v - <x, grad v>/2 - 2|grad v|^2/v - (|A|^2 - 1/2) v|``
    with ``v = 1/H`` on catalog shrinkers."""
    try:
        calc = SurfaceCalculus(surface, u)
        v = 1 / calc.field("H")
    except (NotImplementedError, ZeroDivisionError):
        return None
    if v.has(sp.zoo) or v == sp.zoo:
        return None
    val = calc.value(v)
    gv = calc.gradient(v)
    r = calc.drift_laplacian(v) - 2 * np.sum(gv * gv, axis=1) / val - (calc.A2 - 0.5) * val
    return float(np.max(np.abs(r))) if r.size else None


def scan_phi_f_max(surface, x0=None, rho=2.0, delta=0.5, geometry=None,
                   collar=DEFAULT_COLLAR, grid=64) -> CutoffScan:
    """Build ``F = phi f`` on ``B_rho(x0)`` and locate its maximum.

    ``R = |x0| + rho``. Ties in the maximum go to the lowest index.

    Raises
    ------
    ValueError
        If ``1 - k v^2 <= 0`` somewhere in the ball, so ``h`` is undefined.
    """
    s = sample_surface(surface, geometry, collar, grid)
    dim = s.x.shape[1]
    c = _center(x0, dim)
    R = float(np.linalg.norm(c)) + rho
    y = s.x - c
    mu = rho * rho - np.sum(y * y, axis=1)
    phi = np.maximum(mu, 0.0) ** 3
    region = s.mask & (mu > 0)
    hyp = _hypothesis("H >= delta", delta, region, s.H >= delta)
    k = delta * delta / 2
    v = np.full(len(mu), np.nan)
    h = np.full(len(mu), np.nan)
    f = np.full(len(mu), np.nan)
    with np.errstate(divide="ignore"):
        v[region] = 1.0 / s.H[region]
    den = 1 - k * v[region] ** 2
    if np.any(~(den > 0)):
        raise ValueError("1 - k v^2 <= 0 inside the ball: h is undefined (H too small)")
    h[region] = v[region] ** 2 / den
    f[region] = s.A2[region] * h[region]
    F = np.zeros(len(mu))
    F[region] = phi[region] * f[region]
    y0 = _argmax_first(np.where(region, F, np.nan))
    veq = None
    if s.source == "analytic" and region.any() and np.all(s.H[region] > 0):
        if abs(float(np.max(np.abs(shrinker_residual(s).values)))) < 1e-10:
            veq = _v_equation_residual(s.surface, s.u[region])
    return CutoffScan(c, float(rho), float(delta), R, s.x, mu, phi, v, h, s.A2, f, F, y0, hyp, veq)


def check_growth_bound(surface, R, C=None, geometry=None, collar=DEFAULT_COLLAR,
                       grid=64) -> AuditReport:
    """``|A| / (1 + |x|)`` on ``B_{R-1}``, given ``H > 0`` on ``B_R``."""
    s = sample_surface(surface, geometry, collar, grid)
    r = np.linalg.norm(s.x, axis=1)
    region = s.mask & (r < R)
    hyp = _hypothesis("H > 0", 0.0, region, s.H > 0)
    ev = s.mask & (r < R - 1)
    ratio = np.full(len(r), np.nan)
    ratio[ev] = s.A_norm[ev] / (1 + r[ev])
    return _finish("growth", s, ratio, hyp, C, _meta(s, R=R, collar=collar))


def tau_decay_correlation(snapshots, h_floor=1e-6, collar=DEFAULT_COLLAR):
    """Spearman rank correlation between the shrinker residual and
    ``sup |grad tau|`` over a sequence of meshes (flow snapshots).

    Returns a dict with the per-snapshot values, ``rho`` and ``pvalue``.
    """
    res, tau = [], []
    for item in snapshots:
        mesh = item[1] if isinstance(item, tuple) else item
        res.append(shrinker_residual(mesh, collar=collar).linf)
        tau.append(tau_field(mesh, h_floor=h_floor, collar=collar).summary()["grad_norm_sup"])
    if len(res) < 3:
        raise ValueError("need at least three snapshots")
    out = stats.spearmanr(res, tau)
    return {"residual_linf": res, "tau_grad_sup": tau,
            "rho": float(out.statistic), "pvalue": float(out.pvalue)}


def entropy_annotation(lam):
    """Entropy compared with the threshold 2 (annotation only)."""
    return {"lambda": float(lam), "threshold": 2.0, "below_threshold": bool(lam < 2)}


__all__ = [
    "AuditReport", "CutoffIdentityReport", "CutoffScan", "audit_mean_convex_estimate",
    "audit_graphical_estimate", "audit_translator_estimate", "translator_sweep",
    "verify_cutoff_identity", "cutoff_rhs", "scan_phi_f_max", "check_growth_bound",
    "tau_decay_correlation", "entropy_annotation",
]
