"""Profile of the rotationally symmetric translating bowl in 3-space.

The bowl is the graph of ``u(r)`` with

    u'' = (1 + u'^2) (1 - u'/r),    u(0) = u'(0) = 0,

which makes the rotated graph, with upward unit normal, satisfy
``H = -<e3, n>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class BowlStepError(ValueError):
    def __init__(self, message, suggested_step):
        super().__init__(message)
        self.suggested_step = suggested_step


@dataclass(frozen=True)
class BowlProfile:
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    step: float
    tol: float
    error_estimate: float


def _rhs(r, p):
    if r == 0.0:
        return 0.5
    return (1.0 + p * p) * (1.0 - p / r)


def series(r):
    """Small-r expansion ``(u, u')`` through order r^6 / r^5."""
    r = np.asarray(r, dtype=float)
    u = r**2 / 4 + r**4 / 128 + r**6 / 4608
    p = r / 2 + r**3 / 32 + r**5 / 768
    return u, p


def _integrate(h, n_steps):
    r = np.arange(n_steps + 1) * h
    u = np.empty(n_steps + 1)
    p = np.empty(n_steps + 1)
    u[0], p[0] = 0.0, 0.0
    # seed the first interval from the series to step past the axis
    u[1], p[1] = series(h)
    for i in range(1, n_steps):
        ri, ui, pi = r[i], u[i], p[i]
        k1u, k1p = pi, _rhs(ri, pi)
        k2u, k2p = pi + 0.5 * h * k1p, _rhs(ri + 0.5 * h, pi + 0.5 * h * k1p)
        k3u, k3p = pi + 0.5 * h * k2p, _rhs(ri + 0.5 * h, pi + 0.5 * h * k2p)
        k4u, k4p = pi + h * k3p, _rhs(ri + h, pi + h * k3p)
        u[i + 1] = ui + h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
        p[i + 1] = pi + h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        if not (math.isfinite(u[i + 1]) and math.isfinite(p[i + 1])):
            u[i + 1:] = np.inf
            p[i + 1:] = np.inf
            break
    return r, u, p


def bowl_profile(r_max, step, tol=1e-8):
    """Integrate the bowl profile with RK4 and Richardson extrapolation.

    The profile is integrated with steps ``h`` and ``h/2``; the difference
    gives an error estimate (RK4 is fourth order, so the extrapolated value
    is ``u_{h/2} + (u_{h/2} - u_h)/15``).

    Parameters
    ----------
    r_max : float
        Outer radius of the profile.
    step : float
        Sample spacing. Rounded down so that it divides ``r_max``.
    tol : float
        Accepted Richardson error estimate on ``u`` and ``u'``.

    Returns
    -------
    BowlProfile

    Raises
    ------
    BowlStepError
        If the two integrations disagree by more than ``tol``; the
        exception carries a suggested step.
    """
    if not (r_max > 0 and step > 0):
        raise ValueError("r_max and step must be positive")
    n_steps = max(2, int(math.ceil(r_max / step - 1e-9)))
    h = r_max / n_steps
    r, u1, p1 = _integrate(h, n_steps)
    _, u2, p2 = _integrate(h / 2, 2 * n_steps)
    u2, p2 = u2[::2], p2[::2]
    with np.errstate(invalid="ignore"):
        err = float(np.max(np.abs(np.r_[u2 - u1, p2 - p1])) * 16 / 15)
    if not math.isfinite(err) or err > tol:
        if math.isfinite(err) and err > 0:
            suggested = 0.5 * h * (tol / err) ** 0.25
        else:
            suggested = h / 8
        raise BowlStepError(
            f"Richardson disagreement {err:.3g} exceeds tol {tol:.3g}; "
            f"try step <= {suggested:.3g}",
            suggested,
        )
    u = u2 + (u2 - u1) / 15
    p = p2 + (p2 - p1) / 15
    return BowlProfile(r=r, u=u, du=p, step=h, tol=tol, error_estimate=err)
