"""Gaussian-weighted area and its supremum over centres and scales.

``F(x0, t0) = (4 pi t0)^{-n/2} int exp(-|x - x0|^2 / (4 t0))``. Meshes
integrate per triangle; catalog entries use their own closed forms or
low-dimensional quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .analytic import AnalyticHypersurface
from .mesh import TriangleMesh
from .reports import csv_text

# barycentric nodes of the degree-2 Gauss rule on a triangle
_GAUSS3 = np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]])
RULES = ("gauss3", "centroid")


@dataclass(frozen=True)
class FParams:
    """Centre and scale of the Gaussian weight."""

    x0: tuple
    t0: float

    def __post_init__(self):
        if not self.t0 > 0:
            raise ValueError("t0 must be positive")
        object.__setattr__(self, "x0", tuple(float(c) for c in self.x0))


def quadrature_points(mesh: TriangleMesh, rule="gauss3"):
    """Quadrature nodes (P, 3) and weights (P,) for integrals over ``mesh``."""
    if rule not in RULES:
        raise ValueError(f"unknown quadrature rule {rule!r}; choose from {RULES}")
    tri = mesh.vertices[mesh.faces]
    area = mesh.face_areas
    if rule == "centroid":
        return tri.mean(axis=1), area
    pts = np.einsum("qc,fcd->fqd", _GAUSS3, tri).reshape(-1, 3)
    return pts, np.repeat(area / 3, 3)


def _gaussian(points, weights, x0, t0, n):
    d2 = np.sum((points - x0) ** 2, axis=1)
    return float((4 * math.pi * t0) ** (-n / 2) * np.sum(weights * np.exp(-d2 / (4 * t0))))


def f_functional(surface, x0, t0, rule="gauss3"):
    """Gaussian-weighted area of ``surface`` at centre ``x0`` and scale ``t0``.

    Parameters
    ----------
    surface : TriangleMesh or AnalyticHypersurface
    x0 : array_like
    t0 : float
    rule : {"gauss3", "centroid"}
        Triangle quadrature for meshes.
    """
    if not t0 > 0:
        raise ValueError("t0 must be positive")
    x0 = np.asarray(x0, dtype=float)
    if isinstance(surface, AnalyticHypersurface):
        return float(surface.gaussian_area(x0, t0))
    if isinstance(surface, TriangleMesh):
        pts, w = quadrature_points(surface, rule)
        return _gaussian(pts, w, x0, t0, 2)
    raise TypeError(f"cannot integrate over {type(surface).__name__}")


def f_gradient(surface, x0, t0, step=1e-3, rule="gauss3"):
    """Central-difference gradient of F in ``(x0, log t0)``."""
    x0 = np.asarray(x0, dtype=float)
    z = np.r_[x0, math.log(t0)]
    g = np.empty(len(z))
    for i in range(len(z)):
        e = np.zeros(len(z))
        e[i] = step
        fp = f_functional(surface, (z + e)[:-1], math.exp((z + e)[-1]), rule)
        fm = f_functional(surface, (z - e)[:-1], math.exp((z - e)[-1]), rule)
        g[i] = (fp - fm) / (2 * step)
    return g


def cylinder_entropy_closed_form(n, k):
    """Entropy of ``S^k x R^{n-k}`` with sphere radius ``sqrt(2k)``.

    ``(4 pi)^{-k/2} |S^k| (2k)^{k/2} e^{-k/2}``, and 1 for ``k = 0``.
    """
    if not (isinstance(k, (int, np.integer)) and isinstance(n, (int, np.integer))):
        raise ValueError("n and k must be integers")
    if n < 1 or not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n and n >= 1, got n={n}, k={k}")
    if k == 0:
        return 1.0
    omega = 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)
    return (4 * math.pi) ** (-k / 2) * omega * (2 * k) ** (k / 2) * math.exp(-k / 2)


@dataclass(frozen=True)
class EntropySearch:
    """Search settings for :func:`entropy`.

    The ``t0`` grid is ``n_t`` log-spaced values in ``[t_min, t_max]``; the
    ``starts`` best grid points seed Nelder-Mead ascents in
    ``(x0, log t0)``. Ascents stay inside ``[t_min, t_max]``, and on meshes
    above ``resolve_factor * h^2`` (``h`` the mean edge length), below
    which the triangle quadrature no longer resolves the Gaussian.
    """

    t_min: float = 1 / 16
    t_max: float = 16.0
    n_t: int = 17
    starts: int = 5
    xatol: float = 1e-6
    fatol: float = 1e-11
    maxiter: int = 600
    centroid_iters: int = 30
    rule: str = "gauss3"
    flat_step: float = 0.25
    flat_tol: float = 1e-6
    resolve_factor: float = 1.0

    def __post_init__(self):
        if not 0 < self.t_min <= self.t_max:
            raise ValueError("need 0 < t_min <= t_max")
        if self.n_t < 1 or self.starts < 1:
            raise ValueError("n_t and starts must be positive")

    def grid(self):
        return np.geomspace(self.t_min, self.t_max, self.n_t)


@dataclass(frozen=True, eq=False)
class EntropyResult:
    """Best F found by the search; a lower bound for the true supremum.

    ``profile`` lists ``(t0, F)`` at the centroid-initialized grid points.
    ``truncation_error`` is the Gaussian mass of the best-fit model outside
    a bounded mesh (``None`` when unknown, 0 for closed meshes).
    """

    lam: float
    argmax: FParams
    evaluations: int
    starts: list
    profile: list
    flat_directions: list = field(default_factory=list)
    truncation_error: float | None = None
    note: str = "best value found by multi-start local search; a lower bound for the supremum"

    def to_dict(self):
        return {
            "lambda": self.lam,
            "argmax": {"x0": list(self.argmax.x0), "t0": self.argmax.t0},
            "evaluations": self.evaluations,
            "starts": self.starts,
            "flat_directions": self.flat_directions,
            "truncation_error": self.truncation_error,
            "note": self.note,
        }

    def profile_csv(self):
        return csv_text(["t0", "F"], self.profile)


class _Evaluator:
    """Counts F evaluations; meshes reuse their quadrature nodes."""

    def __init__(self, surface, rule):
        self.surface = surface
        self.count = 0
        if isinstance(surface, TriangleMesh):
            self.pts, self.w = quadrature_points(surface, rule)
            self.n = 2
        elif isinstance(surface, AnalyticHypersurface):
            u, w = surface.parameter_grid(64)
            self.pts, self.w = surface.position(u), w
            self.n = surface.n
        else:
            raise TypeError(f"cannot integrate over {type(surface).__name__}")

    def __call__(self, x0, t0):
        self.count += 1
        if isinstance(self.surface, TriangleMesh):
            return _gaussian(self.pts, self.w, x0, t0, 2)
        return float(self.surface.gaussian_area(x0, t0))

    def centroid(self, t0, iters):
        """Fixed point of the Gaussian-weighted centroid at scale ``t0``."""
        x0 = np.sum(self.pts * self.w[:, None], axis=0) / self.w.sum()
        for _ in range(iters):
            d2 = np.sum((self.pts - x0) ** 2, axis=1)
            g = self.w * np.exp(-(d2 - d2.min()) / (4 * t0))
            new = np.sum(self.pts * g[:, None], axis=0) / g.sum()
            if np.linalg.norm(new - x0) < 1e-12:
                x0 = new
                break
            x0 = new
        return x0


def _truncation_error(mesh, x0, t0):
    """Gaussian mass of the fitted model outside a bounded mesh."""
    if mesh.is_closed:
        return 0.0
    from .soliton import cylinder_fit

    try:
        fit = cylinder_fit(mesh)
    except ValueError:
        return None
    if fit.k is None or fit.k == 2:
        return None
    bnd = mesh.vertices[mesh.topological_boundary]
    if fit.k == 0:
        nrm = np.cross(fit.axis[0], fit.axis[1])
        d = float((x0 - fit.center) @ nrm)
        p = x0 - d * nrm
        R = float(np.min(np.linalg.norm(bnd - p, axis=1)))
        return math.exp(-d * d / (4 * t0)) * math.exp(-R * R / (4 * t0))
    a = fit.axis[0]
    z = mesh.vertices @ a
    zlo, zhi = float(z.min()), float(z.max())
    z0 = float(x0 @ a)
    s = 2 * math.sqrt(t0)
    inside = 0.5 * (special.erf((zhi - z0) / s) - special.erf((zlo - z0) / s))
    # circle factor of the model tube
    th = np.linspace(0, 2 * math.pi, 512, endpoint=False)
    basis = np.linalg.svd(np.eye(3) - np.outer(a, a))[0][:, :2].T
    circ = fit.center + fit.radius * (np.cos(th)[:, None] * basis[0] + np.sin(th)[:, None] * basis[1])
    rho = circ - x0
    rho = rho - np.outer(rho @ a, a)
    c = (4 * math.pi * t0) ** -0.5 * fit.radius * np.mean(np.exp(-np.sum(rho**2, axis=1) / (4 * t0))) * 2 * math.pi
    return float(c * (1 - inside))


def entropy(surface, search: EntropySearch | None = None) -> EntropyResult:
    """Maximize F over ``(x0, t0)``.

    For each ``t0`` on a log grid the centre starts at the Gaussian-weighted
    centroid; the best ``search.starts`` grid points seed Nelder-Mead in
    ``(x0, log t0)`` (from scipy). Coordinates along which F changes by less
    than ``flat_tol`` under a step of ``flat_step`` at the optimum are listed
    in ``flat_directions``.

    Raises
    ------
    ValueError
        For empty surfaces.
    """
    search = search or EntropySearch()
    if isinstance(surface, TriangleMesh) and (surface.n_faces == 0 or surface.total_area <= 0):
        raise ValueError("surface is empty")
    ev = _Evaluator(surface, search.rule)
    dim = ev.pts.shape[1]
    t_lo = search.t_min
    if isinstance(surface, TriangleMesh):
        t_lo = max(t_lo, search.resolve_factor * surface.mean_edge_length**2)
    t_hi = max(search.t_max, t_lo)
    bounds = [(None, None)] * dim + [(math.log(t_lo), math.log(t_hi))]
    seeds = []
    profile = []
    for t in np.clip(search.grid(), t_lo, t_hi):
        x0 = ev.centroid(t, search.centroid_iters)
        f = ev(x0, t)
        profile.append((float(t), f))
        seeds.append((f, float(t), x0))
    order = sorted(range(len(seeds)), key=lambda i: (-seeds[i][0], i))[: search.starts]
    best = None
    starts = []
    for i in order:
        f0, t, x0 = seeds[i]
        z0 = np.r_[x0, math.log(t)]
        steps = 0.1 * np.eye(len(z0))
        if z0[-1] + 0.1 > bounds[-1][1]:
            steps[-1, -1] = -0.1
        simplex = np.vstack([z0] + [z0 + e for e in steps])

        def neg(z):
            return -ev(z[:-1], math.exp(z[-1]))

        res = optimize.minimize(
            neg, z0, method="Nelder-Mead", bounds=bounds,
            options={"xatol": search.xatol, "fatol": search.fatol, "maxiter": search.maxiter,
                     "initial_simplex": simplex},
        )
        fz = -float(res.fun)
        z = res.x
        if fz < f0:
            fz, z = f0, z0
        starts.append({"t0_start": t, "F_start": f0, "F_end": fz, "t0_end": math.exp(z[-1])})
        if best is None or fz > best[0]:
            best = (fz, z)
    lam, z = best
    x0, t0 = z[:-1], math.exp(z[-1])
    names = [f"x0[{j}]" for j in range(dim)] + ["log t0"]
    flats = []
    for j in range(len(z)):
        e = np.zeros(len(z))
        e[j] = search.flat_step
        fp = ev((z + e)[:-1], math.exp((z + e)[-1]))
        fm = ev((z - e)[:-1], math.exp((z - e)[-1]))
        if max(abs(fp - lam), abs(fm - lam)) < search.flat_tol:
            flats.append(names[j])
    trunc = _truncation_error(surface, x0, t0) if isinstance(surface, TriangleMesh) else 0.0
    return EntropyResult(
        lam=lam, argmax=FParams(tuple(x0), t0), evaluations=ev.count, starts=starts,
        profile=profile, flat_directions=flats, truncation_error=trunc,
    )


__all__ = [
    "FParams", "EntropySearch", "EntropyResult", "f_functional", "f_gradient",
    "cylinder_entropy_closed_form", "entropy", "quadrature_points",
]
