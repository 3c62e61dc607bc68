"""Mean curvature flow and the rescaled flow on triangle meshes.

Velocities: ``-H n`` (mode ``"mcf"``) and ``-(H - <x, n>/2) n`` (mode
``"rescaled"``), whose fixed points are self-shrinkers. No remeshing
happens; a step that degrades triangle quality below the floor raises
:class:`FlowError`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .entropy import f_functional
from .geometry import VertexGeometry, cotangent_stiffness, vertex_geometry
from .mesh import MeshError, TriangleMesh
from .reports import csv_text

MODES = ("mcf", "rescaled")
STEPPERS = ("explicit", "semi_implicit")
SERIES = ("step", "time", "residual_linf", "residual_l2", "F01", "min_H", "max_A",
          "min_quality", "displacement")


class FlowError(RuntimeError):
    """A flow step failed; ``trajectory`` holds the run up to the failure."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class FlowConfig:
    """Flow settings.

    ``dt`` fixes the time step; when ``None`` it is ``dt_factor * h_min^2``
    with ``h_min`` the shortest edge of the initial mesh. ``residual_tol``
    (rescaled mode only) and ``displacement_tol`` stop the run; ``None``
    disables either test. In rescaled mode the run also stops once the
    monitored residual exceeds ``growth_stop`` times its running minimum
    and ``growth_floor`` in absolute terms: round spheres and cylinders are
    unstable fixed points (dilations and translations grow), so a run that
    has passed its closest approach is leaving the shrinker. The floor keeps
    round-off fluctuations on an exact shrinker from triggering the rule.
    """

    mode: str = "rescaled"
    stepper: str = "semi_implicit"
    dt: float | None = None
    dt_factor: float = 0.1
    max_steps: int = 1000
    residual_tol: float | None = 1e-3
    displacement_tol: float | None = 1e-8
    growth_stop: float | None = 2.0
    growth_floor: float = 1e-4
    monitor_every: int = 1
    quality_floor: float = 0.05
    collar: float = 1.0
    keep_snapshots: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.stepper not in STEPPERS:
            raise ValueError(f"stepper must be one of {STEPPERS}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.dt_factor > 0:
            raise ValueError("dt_factor must be positive")
        for name in ("residual_tol", "displacement_tol"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ValueError(f"{name} must be positive or None")
        if self.growth_stop is not None and not self.growth_stop > 1:
            raise ValueError("growth_stop must exceed 1 or be None")
        if not self.growth_floor >= 0:
            raise ValueError("growth_floor must be >= 0")
        if self.max_steps < 0 or self.monitor_every < 1:
            raise ValueError("max_steps must be >= 0 and monitor_every >= 1")

    def time_step(self, mesh):
        if self.dt is not None:
            return float(self.dt)
        return self.dt_factor * float(mesh.edge_lengths.min()) ** 2

    def to_dict(self):
        return asdict(self)


def _velocity(mesh, g, mode):
    x = mesh.vertices
    if mode == "mcf":
        return -g.H[:, None] * g.normals
    s = g.H - 0.5 * np.einsum("ij,ij->i", x, g.normals)
    return -s[:, None] * g.normals


def flow_step(mesh: TriangleMesh, geometry: VertexGeometry | None, config: FlowConfig,
              dt=None) -> TriangleMesh:
    """Advance ``mesh`` by one step; boundary vertices stay fixed.

    The semi-implicit stepper solves ``(M - dt S) d = dt M v`` for the
    increment ``d = x' - x``, with ``v`` the normal velocity, ``M`` the
    lumped area matrix and ``S`` the cotangent stiffness. Smoothing the
    increment rather than the position keeps the tangential part of the
    cotangent Laplacian out of the motion, so an exact shrinker moves by
    ``dt`` times its residual.

    Raises
    ------
    FlowError
        If the new mesh has a face below the quality floor or a degenerate
        face.
    """
    g = vertex_geometry(mesh) if geometry is None else geometry
    dt = config.time_step(mesh) if dt is None else dt
    x = mesh.vertices
    b = mesh.boundary
    vel = _velocity(mesh, g, config.mode)
    if config.stepper == "explicit":
        new = x + dt * vel
    else:
        S = cotangent_stiffness(mesh)
        free = (~b).astype(float)
        # boundary rows become identity rows with zero increment
        A = sparse.diags(free) @ (sparse.diags(g.area) - dt * S) + sparse.diags(1.0 - free)
        rhs = dt * g.area[:, None] * vel
        rhs[b] = 0.0
        new = x + spsolve(A.tocsc(), rhs)
    new = np.where(b[:, None], x, new)
    try:
        out = mesh.with_vertices(new)
    except MeshError as exc:
        raise FlowError(f"step produced an invalid mesh ({exc}); reduce dt") from exc
    q = float(out.face_quality.min())
    if q < config.quality_floor:
        raise FlowError(
            f"face quality {q:.3g} fell below the floor {config.quality_floor:g}; reduce dt"
        )
    return out


@dataclass(eq=False)
class FlowTrajectory:
    """Monitored run. ``series`` maps each name in ``SERIES`` to a list."""

    config: FlowConfig
    dt: float
    series: dict = field(default_factory=lambda: {k: [] for k in SERIES})
    snapshots: list = field(default_factory=list)
    final: TriangleMesh | None = None
    stop_reason: str = "running"
    steps: int = 0

    def record(self, step, time, mesh, g, displacement):
        x = mesh.vertices
        interior = mesh.interior_mask(self.config.collar) & ~g.flagged
        if not interior.any():
            interior = ~g.flagged
        r = (g.H - 0.5 * np.einsum("ij,ij->i", x, g.normals))[interior]
        w = g.area[interior]
        vals = {
            "step": step,
            "time": time,
            "residual_linf": float(np.max(np.abs(r))),
            "residual_l2": float(math.sqrt(np.sum(w * r * r) / np.sum(w))),
            "F01": f_functional(mesh, np.zeros(3), 1.0),
            "min_H": float(g.H[interior].min()),
            "max_A": float(np.sqrt(g.A2[interior].max())),
            "min_quality": float(mesh.face_quality.min()),
            "displacement": float(displacement),
        }
        for k in SERIES:
            self.series[k].append(vals[k])
        if self.config.keep_snapshots:
            self.snapshots.append((step, mesh))

    def to_csv(self):
        return csv_text(SERIES, zip(*(self.series[k] for k in SERIES)))

    def manifest(self):
        return {
            "config": self.config.to_dict(),
            "dt": self.dt,
            "steps": self.steps,
            "stop_reason": self.stop_reason,
            "monitors": len(self.series["step"]),
            "residual_min": min(self.series["residual_linf"]) if self.series["step"] else None,
            "final": {k: self.series[k][-1] for k in SERIES} if self.series["step"] else None,
        }


def run_flow(mesh: TriangleMesh, config: FlowConfig | None = None) -> FlowTrajectory:
    """Iterate :func:`flow_step` with monitors.

    Stops when the interior shrinker residual (rescaled mode) or the
    largest vertex displacement of a step drops below its tolerance, or
    after ``max_steps``. The stop reason is recorded in the trajectory.

    Raises
    ------
    FlowError
        Propagated from :func:`flow_step`, with ``trajectory`` attached and
        ``stop_reason == "error"``.
    """
    config = config or FlowConfig()
    dt = config.time_step(mesh)
    traj = FlowTrajectory(config=config, dt=dt)
    g = vertex_geometry(mesh)
    traj.record(0, 0.0, mesh, g, 0.0)
    current = mesh
    disp = float("inf")
    for step in range(1, config.max_steps + 1):
        if config.mode == "rescaled" and config.residual_tol is not None \
                and traj.series["residual_linf"][-1] < config.residual_tol \
                and traj.series["step"][-1] == step - 1:
            traj.stop_reason = "residual_tol"
            break
        try:
            nxt = flow_step(current, g, config, dt)
            g_next = vertex_geometry(nxt)
        except (FlowError, MeshError) as exc:
            traj.stop_reason = "error"
            traj.final = current
            traj.steps = step - 1
            raise FlowError(f"step {step}: {exc}", trajectory=traj) from exc
        disp = float(np.max(np.linalg.norm(nxt.vertices - current.vertices, axis=1)))
        current, g = nxt, g_next
        traj.steps = step
        last = step == config.max_steps
        small = config.displacement_tol is not None and disp < config.displacement_tol
        if step % config.monitor_every == 0 or last or small:
            traj.record(step, step * dt, current, g, disp)
        if small:
            traj.stop_reason = "displacement_tol"
            break
        res = traj.series["residual_linf"]
        if config.mode == "rescaled" and config.growth_stop is not None \
                and res[-1] > max(config.growth_stop * min(res), config.growth_floor):
            traj.stop_reason = "residual_growth"
            break
    else:
        traj.stop_reason = "max_steps"
        if config.mode == "rescaled" and config.residual_tol is not None \
                and traj.series["residual_linf"][-1] < config.residual_tol:
            traj.stop_reason = "residual_tol"
    traj.final = current
    return traj


@dataclass(frozen=True)
class MonotonicityCheck:
    """Largest increase between consecutive entries of a series."""

    max_violation: float
    index: int | None
    initial: float

    @property
    def relative(self):
        return self.max_violation / abs(self.initial) if self.initial else float("inf")


def monitor_entropy(trajectory) -> MonotonicityCheck:
    """Maximal upward step of the ``F01`` series (0 when nonincreasing).

    Accepts a :class:`FlowTrajectory` or any sequence of values.
    """
    vals = np.asarray(
        trajectory.series["F01"] if isinstance(trajectory, FlowTrajectory) else trajectory,
        dtype=float,
    )
    if len(vals) < 2:
        return MonotonicityCheck(0.0, None, float(vals[0]) if len(vals) else 0.0)
    inc = np.diff(vals)
    i = int(np.argmax(inc))
    if inc[i] <= 0:
        return MonotonicityCheck(0.0, None, float(vals[0]))
    return MonotonicityCheck(float(inc[i]), i + 1, float(vals[0]))


def mean_radius(mesh, center=None):
    c = np.zeros(3) if center is None else np.asarray(center)
    return float(np.mean(np.linalg.norm(mesh.vertices - c, axis=1)))


def sphere_ode_radius(r0, t, mode="rescaled"):
    """Exact radius of a round sphere in ``R^3`` under either flow.

    Rescaled: ``r' = -(2/r - r/2)``, so ``r^2 = 4 + (r0^2 - 4) e^t``.
    MCF: ``r' = -2/r``, so ``r^2 = r0^2 - 4t``.
    """
    t = np.asarray(t, dtype=float)
    if mode == "rescaled":
        return np.sqrt(4 + (r0 * r0 - 4) * np.exp(t))
    return np.sqrt(np.maximum(r0 * r0 - 4 * t, 0.0))
