"""Closed-form catalog of solitons: generalized cylinders, hyperplanes,
the grim-reaper plane and the translating bowl.

Every entry is a hypersurface of ``R^{n+1}`` parametrized by ``u`` in
``R^n``. Evaluators are vectorized over leading axes of ``u``. The normal
is outward on spheres and cylinders and has positive last component on
graphs; mean curvature is ``H = div n``, so the round sphere has ``H > 0``.
"""

from __future__ import annotations

import math

import numpy as np
import sympy as sp
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

from .bowl import BowlProfile, bowl_profile


class AnalyticHypersurface:
    """Base class for catalog entries.

    Subclasses implement ``position``, ``normal``, ``principal_curvatures``,
    ``area_element``, ``gradA_norm2``, ``_grid_axes`` and
    ``gaussian_area``. ``symbolic_fields`` returns ambient extensions used
    by :mod:`shrinkerlab.calculus` for exact operator evaluation.
    """

    kind = "abstract"
    n: int

    @property
    def ambient_dim(self):
        return self.n + 1

    def mean_curvature(self, u):
        return self.principal_curvatures(u).sum(axis=-1)

    def A_norm2(self, u):
        return (self.principal_curvatures(u) ** 2).sum(axis=-1)

    def parameter_grid(self, m=64):
        """Parameter samples: ``m`` points along the first two parameter
        axes (one axis when ``n == 1``), the rest held at mid-range.

        Returns
        -------
        u : (M, n) ndarray
        weights : (M,) ndarray
            Quadrature weights (area element times parameter cell).
        """
        axes = self._grid_axes(m)
        mids = [0.5 * (a[0] + a[-1]) for a in axes]
        free = axes[: min(2, self.n)]
        mesh = np.meshgrid(*free, indexing="ij")
        cols = [g.ravel() for g in mesh]
        for j in range(len(free), self.n):
            cols.append(np.full(cols[0].shape, mids[j]))
        u = np.stack(cols, axis=-1)
        cell = 1.0
        for a in free:
            cell *= (a[-1] - a[0]) / max(len(a) - 1, 1) if len(a) > 1 else 1.0
        return u, self.area_element(u) * cell

    def describe(self):
        return {"kind": self.kind, "n": self.n}

    def symbolic_fields(self):
        raise NotImplementedError(f"no symbolic extension for {self.kind}")

    def tau_is_parallel(self):
        """True where A/H is known to be parallel (so all its derivatives vanish)."""
        return False


def _coords(n):
    return sp.symbols(f"x0:{n + 1}", real=True)


class GeneralizedCylinder(AnalyticHypersurface):
    """``S^k x R^{n-k}`` with sphere radius ``sqrt(2k)``.

    The sphere factor sits in the first ``k+1`` ambient coordinates, the
    axis in the remaining ``n-k``. ``k = 0`` is the hyperplane ``x_0 = 0``
    with normal ``e_0``.
    """

    kind = "cylinder"

    def __init__(self, n, k, half_length=5.0):
        if n < 1 or k < 0:
            raise ValueError("need n >= 1 and k >= 0")
        if k > n:
            raise ValueError(f"sphere index k={k} exceeds dimension n={n}")
        self.n = int(n)
        self.k = int(k)
        self.half_length = float(half_length)
        self.radius = math.sqrt(2 * k)

    def describe(self):
        return {"kind": self.kind, "n": self.n, "k": self.k, "radius": self.radius}

    def _sphere_point(self, theta):
        # hyperspherical coordinates on the unit k-sphere in R^{k+1}
        k = self.k
        out = np.empty(theta.shape[:-1] + (k + 1,))
        s = np.ones(theta.shape[:-1])
        for j in range(k):
            out[..., j] = s * np.cos(theta[..., j])
            s = s * np.sin(theta[..., j])
        out[..., k] = s
        return out

    def position(self, u):
        u = np.asarray(u, dtype=float)
        x = np.zeros(u.shape[:-1] + (self.n + 1,))
        if self.k == 0:
            x[..., 1:] = u
            return x
        x[..., : self.k + 1] = self.radius * self._sphere_point(u[..., : self.k])
        x[..., self.k + 1:] = u[..., self.k:]
        return x

    def normal(self, u):
        u = np.asarray(u, dtype=float)
        nrm = np.zeros(u.shape[:-1] + (self.n + 1,))
        if self.k == 0:
            nrm[..., 0] = 1.0
        else:
            nrm[..., : self.k + 1] = self._sphere_point(u[..., : self.k])
        return nrm

    def principal_curvatures(self, u):
        u = np.asarray(u, dtype=float)
        kap = np.zeros(u.shape[:-1] + (self.n,))
        if self.k:
            kap[..., : self.k] = 1.0 / self.radius
        return kap

    def mean_curvature(self, u):
        u = np.asarray(u, dtype=float)
        return np.full(u.shape[:-1], math.sqrt(self.k / 2))

    def A_norm2(self, u):
        u = np.asarray(u, dtype=float)
        return np.full(u.shape[:-1], 0.5 if self.k else 0.0)

    def gradA_norm2(self, u):
        return np.zeros(np.asarray(u).shape[:-1])

    def area_element(self, u):
        u = np.asarray(u, dtype=float)
        if self.k == 0:
            return np.ones(u.shape[:-1])
        el = np.full(u.shape[:-1], self.radius**self.k)
        for j in range(self.k - 1):
            el = el * np.sin(u[..., j]) ** (self.k - 1 - j)
        return np.abs(el)

    def _grid_axes(self, m):
        axes = []
        for j in range(self.n):
            if j < self.k - 1:
                h = math.pi / m
                axes.append(np.linspace(h / 2, math.pi - h / 2, m))
            elif j == self.k - 1:
                axes.append(np.linspace(0.0, 2 * math.pi, m, endpoint=False))
            else:
                axes.append(np.linspace(-self.half_length, self.half_length, m))
        return axes

    def gaussian_area(self, x0, t0):
        """F-functional by reduction to a 1-D integral over the sphere factor.

        The axis factor integrates to exactly 1 for any centre.
        """
        if t0 <= 0:
            raise ValueError("t0 must be positive")
        x0 = np.asarray(x0, dtype=float)
        if self.k == 0:
            return math.exp(-x0[0] ** 2 / (4 * t0))
        k, r = self.k, self.radius
        d = float(np.linalg.norm(x0[: k + 1]))
        omega = 2 * math.pi ** (k / 2) / math.gamma(k / 2)  # area of unit S^{k-1}
        scale = (4 * math.pi * t0) ** (-k / 2) * omega * r**k
        if d == 0.0:
            inner = math.exp(-(r * r) / (4 * t0)) * _beta_sin(k)
            return scale * inner

        def integrand(th):
            return math.exp(-(r * r + d * d - 2 * r * d * math.cos(th)) / (4 * t0)) * math.sin(th) ** (k - 1)

        val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=1e-15, epsrel=1e-13, limit=200)
        return scale * val

    def symbolic_fields(self):
        x = _coords(self.n)
        if self.k == 0:
            nrm = [sp.Integer(1)] + [sp.Integer(0)] * self.n
            return x, {"normal": nrm, "H": sp.Integer(0), "A2": sp.Integer(0)}
        y = x[: self.k + 1]
        rho = sp.sqrt(sum(c**2 for c in y))
        nrm = [c / rho for c in y] + [sp.Integer(0)] * (self.n - self.k)
        # H is extended by the parallel cylinder through each point; |A|^2 is
        # constant on the surface, and the constant extension keeps its
        # derivatives exactly zero instead of cancelling to round-off
        return x, {"normal": nrm, "H": self.k / rho, "A2": sp.Rational(1, 2)}

    def tau_is_parallel(self):
        return self.k > 0


def _beta_sin(k):
    # int_0^pi sin^{k-1}
    return math.sqrt(math.pi) * math.gamma(k / 2) / math.gamma((k + 1) / 2)


class Hyperplane(AnalyticHypersurface):
    """Hyperplane ``<x, normal> = offset`` in ``R^{n+1}``."""

    kind = "hyperplane"

    def __init__(self, normal=None, offset=0.0, n=2, half_length=5.0):
        if normal is None:
            normal = np.eye(n + 1)[-1]
        nu = np.asarray(normal, dtype=float)
        if nu.ndim != 1 or len(nu) < 2:
            raise ValueError("normal must be a vector in R^{n+1}, n >= 1")
        nrm = np.linalg.norm(nu)
        if not np.isfinite(nrm) or nrm == 0:
            raise ValueError("normal must be finite and nonzero")
        if not math.isfinite(offset):
            raise ValueError("offset must be finite")
        self.nu = nu / nrm
        self.n = len(nu) - 1
        self.offset = float(offset)
        self.half_length = float(half_length)
        # orthonormal basis of the complement, deterministic
        q, _ = np.linalg.qr(np.c_[self.nu, np.eye(self.n + 1)])
        basis = q[:, 1: self.n + 1].T
        self.basis = basis - np.outer(basis @ self.nu, self.nu)

    def describe(self):
        return {"kind": self.kind, "n": self.n, "normal": self.nu.tolist(), "offset": self.offset}

    def position(self, u):
        u = np.asarray(u, dtype=float)
        return self.offset * self.nu + u @ self.basis

    def normal(self, u):
        u = np.asarray(u, dtype=float)
        return np.broadcast_to(self.nu, u.shape[:-1] + (self.n + 1,)).copy()

    def principal_curvatures(self, u):
        return np.zeros(np.asarray(u).shape[:-1] + (self.n,))

    def gradA_norm2(self, u):
        return np.zeros(np.asarray(u).shape[:-1])

    def area_element(self, u):
        return np.ones(np.asarray(u).shape[:-1])

    def _grid_axes(self, m):
        return [np.linspace(-self.half_length, self.half_length, m) for _ in range(self.n)]

    def gaussian_area(self, x0, t0):
        if t0 <= 0:
            raise ValueError("t0 must be positive")
        d = float(np.dot(np.asarray(x0, dtype=float), self.nu)) - self.offset
        return math.exp(-d * d / (4 * t0))

    def symbolic_fields(self):
        x = _coords(self.n)
        nrm = [sp.Float(c) if c != 0 else sp.Integer(0) for c in self.nu]
        return x, {"normal": nrm, "H": sp.Integer(0), "A2": sp.Integer(0)}


class GrimReaperPlane(AnalyticHypersurface):
    """``x_n = -log cos x_0`` times ``R^{n-1}``: translator in direction ``e_n``.

    ``u[0]`` is ``x_0`` in ``(-pi/2, pi/2)``; the remaining parameters are
    the flat coordinates ``x_1 .. x_{n-1}``. With the upward normal,
    ``H = -cos x_0``, ``|A|^2 = cos^2 x_0`` and
    ``|grad A|^2 = cos^2 x_0 sin^2 x_0``.
    """

    kind = "grim_reaper"

    def __init__(self, n=2, half_width=1.3, half_length=5.0):
        if n < 1:
            raise ValueError("need n >= 1")
        if not 0 < half_width < math.pi / 2:
            raise ValueError("half_width must lie in (0, pi/2)")
        self.n = int(n)
        self.half_width = float(half_width)
        self.half_length = float(half_length)

    def describe(self):
        return {"kind": self.kind, "n": self.n, "half_width": self.half_width}

    def position(self, u):
        u = np.asarray(u, dtype=float)
        x = np.zeros(u.shape[:-1] + (self.n + 1,))
        x[..., : self.n] = u
        x[..., self.n] = -np.log(np.cos(u[..., 0]))
        return x

    def normal(self, u):
        u = np.asarray(u, dtype=float)
        nrm = np.zeros(u.shape[:-1] + (self.n + 1,))
        nrm[..., 0] = -np.sin(u[..., 0])
        nrm[..., self.n] = np.cos(u[..., 0])
        return nrm

    def principal_curvatures(self, u):
        u = np.asarray(u, dtype=float)
        kap = np.zeros(u.shape[:-1] + (self.n,))
        kap[..., 0] = -np.cos(u[..., 0])
        return kap

    def gradA_norm2(self, u):
        c = np.cos(np.asarray(u, dtype=float)[..., 0])
        return c * c * (1 - c * c)

    def area_element(self, u):
        return 1.0 / np.cos(np.asarray(u, dtype=float)[..., 0])

    def _grid_axes(self, m):
        a = self.half_width
        return [np.linspace(-a, a, m)] + [
            np.linspace(-self.half_length, self.half_length, m) for _ in range(self.n - 1)
        ]

    def gaussian_area(self, x0, t0):
        if t0 <= 0:
            raise ValueError("t0 must be positive")
        x0 = np.asarray(x0, dtype=float)
        a0, an = x0[0], x0[self.n]

        def integrand(s):
            c = math.cos(s)
            if c <= 0:
                return 0.0
            z = -math.log(c)
            return math.exp(-((s - a0) ** 2 + (z - an) ** 2) / (4 * t0)) / c

        val, _ = integrate.quad(integrand, -math.pi / 2, math.pi / 2, epsabs=1e-14, limit=400)
        return (4 * math.pi * t0) ** -0.5 * val

    def symbolic_fields(self):
        x = _coords(self.n)
        s = x[0]
        nrm = [-sp.sin(s)] + [sp.Integer(0)] * (self.n - 1) + [sp.cos(s)]
        return x, {
            "normal": nrm,
            "H": -sp.cos(s),
            "A2": sp.cos(s) ** 2,
            "gradA2": sp.cos(s) ** 2 * sp.sin(s) ** 2,
        }

    def tau_is_parallel(self):
        return True


def _fd_derivative(r, p):
    """Fourth-order finite-difference derivative of an odd function sampled
    on a uniform grid starting at 0."""
    h = r[1] - r[0]
    ext = np.r_[-p[2:0:-1], p]  # odd reflection through the axis
    d = np.empty_like(p)
    m = len(p)
    for i in range(m):
        j = i + 2
        if i <= m - 3:
            d[i] = (ext[j - 2] - 8 * ext[j - 1] + 8 * ext[j + 1] - ext[j + 2]) / (12 * h)
        else:
            # one-sided fourth-order stencil at the outer end
            s = ext[j - 4: j + 1]
            if i == m - 1:
                d[i] = (3 * s[0] - 16 * s[1] + 36 * s[2] - 48 * s[3] + 25 * s[4]) / (12 * h)
            else:
                s = ext[j - 3: j + 2]
                d[i] = (-s[0] + 6 * s[1] - 18 * s[2] + 10 * s[3] + 3 * s[4]) / (12 * h)
    return d


class BowlSoliton(AnalyticHypersurface):
    """Rotationally symmetric translator in ``R^3`` built from profile samples.

    Parameters ``u = (r, theta)``. ``u''`` is recovered from the ``u'``
    samples by finite differences, so geometric quantities (and hence the
    translator residual) carry the integration error of the profile.
    """

    kind = "bowl"
    n = 2

    def __init__(self, profile: BowlProfile | None = None, r_max=4.0, step=0.01):
        if profile is None:
            profile = bowl_profile(r_max, step)
        self.profile = profile
        r, u, p = profile.r, profile.u, profile.du
        q = _fd_derivative(r, p)
        self._u = CubicHermiteSpline(r, u, p)
        self._p = CubicHermiteSpline(r, p, q)
        self._q_samples = q
        self.r_max = float(r[-1])

    def describe(self):
        return {"kind": self.kind, "n": 2, "r_max": self.r_max, "step": float(self.profile.step)}

    def _profile(self, r):
        r = np.asarray(r, dtype=float)
        return self._u(r), self._p(r), self._p(r, 1)

    def position(self, u):
        u = np.asarray(u, dtype=float)
        r, th = u[..., 0], u[..., 1]
        return np.stack([r * np.cos(th), r * np.sin(th), self._u(r)], axis=-1)

    def normal(self, u):
        u = np.asarray(u, dtype=float)
        r, th = u[..., 0], u[..., 1]
        p = self._p(r)
        w = np.sqrt(1 + p * p)
        return np.stack([-p * np.cos(th) / w, -p * np.sin(th) / w, 1 / w], axis=-1)

    def principal_curvatures(self, u):
        u = np.asarray(u, dtype=float)
        r = u[..., 0]
        _, p, q = self._profile(r)
        w = np.sqrt(1 + p * p)
        with np.errstate(invalid="ignore", divide="ignore"):
            k_rot = np.where(r > 0, -p / (r * w), -q)
        return np.stack([-q / w**3, k_rot], axis=-1)

    def gradA_norm2(self, u):
        # surface of revolution: |grad A|^2 = k1_s^2 + 3 k2_s^2
        u = np.asarray(u, dtype=float)
        r = u[..., 0]
        _, p, q = self._profile(r)
        w2 = 1 + p * p
        w = np.sqrt(w2)
        with np.errstate(invalid="ignore", divide="ignore"):
            rs = np.where(r > 0, r, 1.0)
            qq = 2 * p * q * (1 - p / rs) + w2 * (-q / rs + p / rs**2)
            dk1 = -(qq / w**3 - 3 * p * q * q / w**5)
            dk2 = -(q / (rs * w) - p / (rs * rs * w) - p * p * q / (rs * w**3))
            val = (dk1**2 + 3 * dk2**2) / w2
        return np.where(r > 0, val, 0.0)

    def area_element(self, u):
        u = np.asarray(u, dtype=float)
        r = u[..., 0]
        return r * np.sqrt(1 + self._p(r) ** 2)

    def _grid_axes(self, m):
        return [np.linspace(0.0, self.r_max, m), np.linspace(0.0, 2 * math.pi, m, endpoint=False)]

    def gaussian_area(self, x0, t0, nr=400, ntheta=128):
        if t0 <= 0:
            raise ValueError("t0 must be positive")
        x0 = np.asarray(x0, dtype=float)
        g, gw = np.polynomial.legendre.leggauss(nr)
        r = 0.5 * self.r_max * (g + 1)
        wr = 0.5 * self.r_max * gw
        th = np.linspace(0, 2 * math.pi, ntheta, endpoint=False)
        R, T = np.meshgrid(r, th, indexing="ij")
        x = self.position(np.stack([R, T], axis=-1))
        e = np.exp(-np.sum((x - x0) ** 2, axis=-1) / (4 * t0))
        da = self.area_element(np.stack([R, T], axis=-1))
        val = np.sum(e * da * wr[:, None]) * (2 * math.pi / ntheta)
        return float((4 * math.pi * t0) ** -1 * val)


CATALOG = {
    "cylinder": GeneralizedCylinder,
    "sphere": GeneralizedCylinder,
    "hyperplane": Hyperplane,
    "grim_reaper": GrimReaperPlane,
    "bowl": BowlSoliton,
}


def make_analytic(kind, **params):
    """Build a catalog entry.

    ``make_analytic("cylinder", n=2, k=1)`` is the tube of radius sqrt(2);
    ``make_analytic("sphere", n=2)`` is shorthand for ``k = n``.
    """
    if kind == "sphere":
        params.setdefault("k", params.get("n", 2))
        params.setdefault("n", params["k"])
    if kind not in CATALOG:
        raise ValueError(f"unknown analytic kind {kind!r}; choose from {sorted(CATALOG)}")
    if kind in ("cylinder", "sphere"):
        n, k = params.get("n"), params.get("k")
        if n is None or k is None:
            raise ValueError("cylinder needs n and k")
        if n <= 0 or k < 0:
            raise ValueError("dimensions must be positive")
    return CATALOG[kind](**params)
