"""Exact surface calculus on catalog entries through ambient extensions.

For a function ``F`` defined on a neighbourhood of the hypersurface,

    grad_S F = DF - <DF, n> n,
    Lap_S F  = tr(D^2 F) - D^2 F(n, n) - H <DF, n>,

which holds for any extension (``H = div n``). Derivatives of the
extension are taken symbolically with sympy and evaluated in floating
point, so identities hold to round-off.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import sympy as sp


@lru_cache(maxsize=256)
def _compiled(expr, symbols):
    grad = [sp.diff(expr, s) for s in symbols]
    hess = [[sp.diff(g, s) for s in symbols] for g in grad]
    return (
        sp.lambdify(symbols, expr, "numpy"),
        sp.lambdify(symbols, grad, "numpy"),
        sp.lambdify(symbols, hess, "numpy"),
    )


def _broadcast(val, shape):
    return np.broadcast_to(np.asarray(val, dtype=float), shape).astype(float)


def jet(expr, symbols, x):
    """Value, ambient gradient and ambient Hessian of ``expr`` at points ``x``.

    Returns arrays of shape (M,), (M, d), (M, d, d).
    """
    f, g, h = _compiled(sp.sympify(expr), tuple(symbols))
    cols = [x[:, i] for i in range(x.shape[1])]
    m, d = x.shape
    val = _broadcast(f(*cols), (m,))
    grad = np.stack([_broadcast(gi, (m,)) for gi in g(*cols)], axis=-1)
    hess = np.stack(
        [np.stack([_broadcast(hij, (m,)) for hij in row], axis=-1) for row in h(*cols)], axis=-2
    )
    return val, grad, hess


class SurfaceCalculus:
    """Evaluate tangential gradients and Laplacians on catalog samples.

    Parameters
    ----------
    surface : AnalyticHypersurface
    u : (M, n) array
        Parameter samples.
    """

    def __init__(self, surface, u):
        self.surface = surface
        self.u = np.asarray(u, dtype=float)
        self.symbols, self.fields = surface.symbolic_fields()
        self.x = surface.position(self.u)
        self.normal = surface.normal(self.u)
        self.H = surface.mean_curvature(self.u)
        self.A2 = surface.A_norm2(self.u)

    def field(self, name):
        return self.fields[name]

    def w_expr(self, V):
        return sum(sp.Float(float(c)) * ni for c, ni in zip(V, self.fields["normal"]))

    def value(self, expr):
        return jet(expr, self.symbols, self.x)[0]

    def gradient(self, expr):
        _, g, _ = jet(expr, self.symbols, self.x)
        gn = np.einsum("ij,ij->i", g, self.normal)
        return g - gn[:, None] * self.normal

    def laplacian(self, expr):
        _, g, h = jet(expr, self.symbols, self.x)
        nrm = self.normal
        tr = np.trace(h, axis1=1, axis2=2)
        hnn = np.einsum("ij,ijk,ik->i", nrm, h, nrm)
        gn = np.einsum("ij,ij->i", g, nrm)
        return tr - hnn - self.H * gn

    def drift_laplacian(self, expr):
        """``Lap f - 1/2 <x, grad f>``."""
        return self.laplacian(expr) - 0.5 * np.einsum("ij,ij->i", self.x, self.gradient(expr))

    def stability(self, expr):
        """``L f = Lap f - 1/2 <x, grad f> + (|A|^2 + 1/2) f``."""
        return self.drift_laplacian(expr) + (self.A2 + 0.5) * self.value(expr)

    def translator_operator(self, expr, direction=None):
        """``Lap f + <e, grad f> + |A|^2 f`` with ``e`` the translation direction."""
        if direction is None:
            direction = np.eye(self.x.shape[1])[-1]
        drift = self.gradient(expr) @ np.asarray(direction, dtype=float)
        return self.laplacian(expr) + drift + self.A2 * self.value(expr)
