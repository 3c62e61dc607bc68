"""Command-line front end.

Every run resolves its flags into an :class:`ExperimentConfig`, validates
it against the shipped JSON schema, writes its data files and then a
manifest ``<name>.manifest.json`` echoing the config. A manifest's
``config`` entry can be passed back with ``--config`` to repeat the run.

Exit status: 0 on success, 1 when ``--strict`` is set and an audit
hypothesis is violated (or the empirical constant exceeds ``--C``), 2 on
usage or operational errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import audit as au
from .analytic import AnalyticHypersurface, make_analytic
from .entropy import EntropySearch, entropy
from .flow import SERIES, FlowConfig, FlowError, mean_radius, monitor_entropy, run_flow
from .generate import gen_mesh
from .mesh import MeshError, TriangleMesh
from .meshio import read_mesh, write_mesh
from .plotting import ReportError, plot_profile, plot_reports, plot_series, plot_sweep
from .reports import write_csv, write_json, write_manifest
from .soliton import (
    cylinder_fit,
    shrinker_residual,
    tau_field,
    translator_residual,
    verify_identity,
)

log = logging.getLogger("shrinkerlab")

OUTPUT_ENV = "SHRINKERLAB_OUTPUT_DIR"
COMMANDS = ("gen", "verify", "entropy", "flow", "audit", "plot")
AUDITS = ("thm1", "graphical", "translator", "cutoff", "scan", "growth")
IDENTITY_ALIASES = {
    "LH": "LH_eq_H",
    "Lw": "Lw_eq_halfw",
    "simons": "Simons_shrinker",
    "Lfrak_w": "Lfrak_w_zero",
    "Lfrak_A2": "Lfrak_A2",
}
RESIDUALS = ("shrinker", "translator", "tau", "cylinder_fit")
VERIFY_CHOICES = tuple(sorted(set(IDENTITY_ALIASES) | set(IDENTITY_ALIASES.values()))) + RESIDUALS
GEN_PARAMS = {
    "icosphere": ("radius",),
    "tube": ("radius", "length"),
    "disk": ("radius",),
    "grim_reaper": ("half_width", "length"),
    "bowl": ("r_max", "step"),
}
GEN_ALIASES = {"sphere": "icosphere", "cylinder": "tube", "plane": "disk"}
ANALYTIC_PARAMS = {
    "cylinder": ("n", "k", "half_length"),
    "sphere": ("n",),
    "hyperplane": ("n", "offset", "half_length"),
    "grim_reaper": ("n", "half_width", "half_length"),
    "bowl": ("r_max", "step"),
}
DEFAULT_FORMATS = {
    "gen": ["off"],
    "flow": ["json", "csv", "off"],
}


class UsageError(ValueError):
    """Invalid invocation or configuration (exit status 2)."""


@dataclass
class ExperimentConfig:
    """Fully resolved description of one run.

    ``surface`` is ``None`` or a dict with ``source`` in ``{"generated",
    "file", "analytic"}`` plus ``kind``, ``path``, ``params``,
    ``resolution``, ``perturbation``, ``seed``, ``band``, ``even`` and
    ``zero_mean``. ``params`` carries operation parameters (``R``,
    ``delta``, ``V``, ``x0``, ``rho``, ...). ``flow`` and ``entropy`` hold
    :class:`FlowConfig` and :class:`EntropySearch` fields.
    """

    command: str
    action: str | None = None
    surface: dict | None = None
    params: dict = field(default_factory=dict)
    flow: dict | None = None
    entropy: dict | None = None
    output_dir: str = "."
    name: str | None = None
    formats: list = field(default_factory=lambda: ["json", "csv"])
    strict: bool = False
    inputs: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        validate_config(data)
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except ValueError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    @property
    def run_name(self):
        if self.name:
            return self.name
        return "_".join(p for p in (self.command, self.action) if p)


def load_schema():
    text = resources.files("shrinkerlab").joinpath("data/experiment.schema.json").read_text()
    return json.loads(text)


def validate_config(data):
    """Raise :class:`UsageError` if ``data`` violates the schema."""
    try:
        jsonschema.validate(data, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"config violates schema at {where}: {exc.message}") from exc


# ------------------------------------------------------------------ parsing


def _surface_options(p, required=True):
    g = p.add_argument_group("surface")
    src = g.add_mutually_exclusive_group(required=required)
    src.add_argument("--input", "-i", metavar="PATH", help="OFF or OBJ mesh file")
    src.add_argument("--surface", metavar="KIND",
                     help="generated mesh: icosphere, tube, disk, grim_reaper, bowl")
    src.add_argument("--analytic", metavar="KIND",
                     help="closed-form entry: cylinder, sphere, hyperplane, grim_reaper, bowl")
    _shape_options(g)


def _shape_options(g):
    g.add_argument("--radius", type=float)
    g.add_argument("--length", type=float)
    g.add_argument("--half-width", type=float)
    g.add_argument("--half-length", type=float)
    g.add_argument("--r-max", type=float)
    g.add_argument("--step", type=float, help="bowl profile integration step")
    g.add_argument("--n", type=int, help="analytic dimension")
    g.add_argument("--k", type=int, help="sphere factor of an analytic cylinder")
    g.add_argument("--offset", type=float)
    g.add_argument("--subdiv", type=int, help="icosphere subdivision level")
    g.add_argument("--resolution", type=int)
    g.add_argument("--perturbation", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--band", type=float, nargs=2, default=[0.5, 1.5], metavar=("LO", "HI"))
    g.add_argument("--even", action="store_true", help="perturbation even under x -> -x")
    g.add_argument("--zero-mean", action="store_true", help="remove the perturbation mean")


def _common(p):
    p.add_argument("--output-dir", "-d", help=f"output directory (default ${OUTPUT_ENV} or .)")
    p.add_argument("--name", help="prefix of the output files")
    p.add_argument("--format", dest="formats", action="append",
                   choices=("json", "csv", "svg", "off", "obj"),
                   help="output format, repeatable")
    p.add_argument("--collar", type=float, help="distance excluded next to the boundary")
    p.add_argument("--grid", type=int, help="parameter grid size for analytic inputs")


def build_parser():
    p = argparse.ArgumentParser(prog="shrinkerlab",
                                description="Numerical checks for self-shrinkers and translators.")
    p.add_argument("--config", metavar="JSON", help="run an experiment config (flags are ignored)")
    p.add_argument("--print-config", action="store_true",
                   help="print the resolved config and exit")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command")

    g = sub.add_parser("gen", help="generate a mesh")
    g.add_argument("kind", help="icosphere, tube, disk, grim_reaper, bowl")
    g.add_argument("-o", "--output", help="mesh path (.off or .obj)")
    _shape_options(g.add_argument_group("shape"))
    _common(g)

    v = sub.add_parser("verify", help="residuals and operator identities")
    _surface_options(v)
    v.add_argument("--identity", required=True, choices=VERIFY_CHOICES)
    v.add_argument("--V", type=float, nargs="+", help="constant vector of <V, n>")
    v.add_argument("--direction", type=float, nargs="+", help="translation direction")
    v.add_argument("--experimental", action="store_true",
                   help="allow mesh identities that need grad A")
    v.add_argument("--h-floor", type=float)
    _common(v)

    e = sub.add_parser("entropy", help="Gaussian entropy search")
    _surface_options(e)
    for name in ("t_min", "t_max"):
        e.add_argument("--" + name.replace("_", "-"), type=float)
    e.add_argument("--n-t", type=int)
    e.add_argument("--starts", type=int)
    e.add_argument("--rule", choices=("gauss3", "centroid"))
    _common(e)

    f = sub.add_parser("flow", help="rescaled flow or mean curvature flow")
    _surface_options(f)
    f.add_argument("--mode", choices=("rescaled", "mcf"))
    f.add_argument("--stepper", choices=("explicit", "semi_implicit"))
    f.add_argument("--dt", type=float)
    f.add_argument("--max-steps", type=int)
    f.add_argument("--residual-tol", type=float)
    f.add_argument("--displacement-tol", type=float)
    f.add_argument("--growth-stop", type=float)
    f.add_argument("--growth-floor", type=float)
    f.add_argument("--monitor-every", type=int)
    f.add_argument("--quality-floor", type=float)
    _common(f)

    a = sub.add_parser("audit", help="curvature-estimate audits")
    a.add_argument("kind", choices=AUDITS)
    _surface_options(a)
    a.add_argument("--R", type=float)
    a.add_argument("--delta", type=float)
    a.add_argument("--rho", type=float)
    a.add_argument("--C", type=float, help="constant to test the empirical one against")
    a.add_argument("--V", type=float, nargs="+")
    a.add_argument("--x0", type=float, nargs="+")
    a.add_argument("--direction", type=float, nargs="+")
    a.add_argument("--sweep", type=float, nargs="+", metavar="R",
                   help="translator audit: radii of the C(R) sweep")
    a.add_argument("--strict", action="store_true",
                   help="exit 1 when the hypothesis is violated or C is exceeded")
    _common(a)

    pl = sub.add_parser("plot", help="SVG plots of reports")
    pl.add_argument("reports", nargs="*")
    pl.add_argument("--metric", default="residual_linf",
                    help="refinement plots: report field on the vertical axis")
    _common(pl)
    return p


def _surface_spec(ns):
    shape = {k: getattr(ns, k, None) for k in
             ("radius", "length", "half_width", "half_length", "r_max", "step", "n", "k", "offset")}
    shape = {k: v for k, v in shape.items() if v is not None}
    if ns.command == "gen":
        source, kind = "generated", ns.kind
    elif ns.input:
        source, kind = "file", None
    elif ns.surface:
        source, kind = "generated", ns.surface
    else:
        source, kind = "analytic", ns.analytic
    spec = {"source": source, "kind": kind, "path": getattr(ns, "input", None), "params": {},
            "resolution": None, "perturbation": ns.perturbation, "seed": ns.seed,
            "band": list(ns.band), "even": ns.even, "zero_mean": ns.zero_mean}
    if source == "file":
        if shape or ns.subdiv is not None or ns.resolution is not None:
            raise UsageError("shape options do not apply to --input")
        return spec
    if source == "generated":
        kind = GEN_ALIASES.get(kind, kind)
        spec["kind"] = kind
        allowed = GEN_PARAMS.get(kind)
        if allowed is None:
            raise UsageError(f"unknown mesh kind {kind!r}; choose from {sorted(GEN_PARAMS)}")
        if ns.subdiv is not None and kind != "icosphere":
            raise UsageError("--subdiv applies to icospheres only")
        spec["resolution"] = ns.subdiv if ns.subdiv is not None else ns.resolution
    else:
        allowed = ANALYTIC_PARAMS.get(kind)
        if allowed is None:
            raise UsageError(f"unknown analytic kind {kind!r}; choose from {sorted(ANALYTIC_PARAMS)}")
        if ns.subdiv is not None or ns.resolution is not None or ns.perturbation:
            raise UsageError("resolution and perturbation do not apply to analytic surfaces")
    extra = sorted(set(shape) - set(allowed))
    if extra:
        raise UsageError(f"options {extra} do not apply to {kind}")
    spec["params"] = shape
    return spec


def _vec(x):
    return None if x is None else [float(c) for c in x]


def config_from_args(ns) -> ExperimentConfig:
    """Resolve parsed flags into a config (defaults made explicit)."""
    out_dir = ns.output_dir or os.environ.get(OUTPUT_ENV) or "."
    params = {}
    for k in ("collar", "grid"):
        if getattr(ns, k, None) is not None:
            params[k] = getattr(ns, k)
    cfg = ExperimentConfig(command=ns.command, output_dir=out_dir, name=ns.name)
    cfg.formats = list(ns.formats) if ns.formats else list(DEFAULT_FORMATS.get(ns.command, ["json", "csv"]))
    if ns.command == "plot":
        cfg.inputs = list(ns.reports)
        params["metric"] = ns.metric
        if not ns.formats:
            cfg.formats = ["svg", "json"]
        cfg.params = params
        return cfg
    cfg.surface = _surface_spec(ns)
    if ns.command == "gen":
        if ns.output:
            out = Path(ns.output)
            suffix = out.suffix.lower().lstrip(".")
            if suffix not in ("off", "obj"):
                raise UsageError("mesh output must end in .off or .obj")
            cfg.output_dir = str(out.parent) if str(out.parent) else "."
            cfg.name = out.stem
            cfg.formats = [suffix]
    elif ns.command == "verify":
        cfg.action = IDENTITY_ALIASES.get(ns.identity, ns.identity)
        params.update(V=_vec(ns.V), direction=_vec(ns.direction), experimental=ns.experimental)
        if ns.h_floor is not None:
            params["h_floor"] = ns.h_floor
    elif ns.command == "entropy":
        opts = {k: getattr(ns, k) for k in ("t_min", "t_max", "n_t", "starts", "rule")}
        cfg.entropy = asdict(EntropySearch(**{k: v for k, v in opts.items() if v is not None}))
    elif ns.command == "flow":
        opts = {k: getattr(ns, k) for k in ("mode", "stepper", "dt", "max_steps", "residual_tol",
                                              "displacement_tol", "growth_stop", "growth_floor",
                                              "monitor_every", "quality_floor")}
        cfg.flow = FlowConfig(**{k: v for k, v in opts.items() if v is not None}).to_dict()
    elif ns.command == "audit":
        cfg.action = ns.kind
        cfg.strict = ns.strict
        defaults = {"thm1": {"R": 8.0, "delta": 0.5}, "graphical": {"R": 1.0, "delta": 0.5},
                    "translator": {"R": 4.0, "delta": 0.5}, "cutoff": {"rho": 2.0},
                    "scan": {"rho": 2.0, "delta": 0.5}, "growth": {"R": 10.0}}[ns.kind]
        for k in ("R", "delta", "rho"):
            val = getattr(ns, k)
            if val is not None:
                params[k] = val
            elif k in defaults:
                params[k] = defaults[k]
        params.update(C=ns.C, V=_vec(ns.V), x0=_vec(ns.x0), direction=_vec(ns.direction),
                      sweep=_vec(ns.sweep))
    cfg.params = params
    return cfg


# ---------------------------------------------------------------- execution


def build_surface(spec):
    if spec is None:
        raise UsageError("this command needs a surface")
    src = spec["source"]
    if src == "file":
        if not spec.get("path"):
            raise UsageError("file surfaces need a path")
        path = Path(spec["path"])
        if not path.exists():
            raise UsageError(f"input file {path} does not exist")
        return read_mesh(path)
    params = dict(spec.get("params") or {})
    if src == "analytic":
        return make_analytic(spec["kind"], **params)
    return gen_mesh(spec["kind"], resolution=spec.get("resolution"),
                    perturbation=spec.get("perturbation", 0.0), seed=spec.get("seed", 0),
                    band=tuple(spec.get("band", (0.5, 1.5))), even=spec.get("even", False),
                    zero_mean=spec.get("zero_mean", False), **params)


def _describe(surface):
    if isinstance(surface, AnalyticHypersurface):
        return surface.describe()
    out = {"vertices": surface.n_vertices, "faces": surface.n_faces,
           "mean_edge_length": surface.mean_edge_length, "closed": surface.is_closed}
    out.update({k: v for k, v in surface.meta.items() if k in ("kind", "resolution", "perturbation",
                                                                  "seed", "params")})
    return out


def _sampling(params):
    return {k: params[k] for k in ("collar", "grid") if k in params}


class _Run:
    """Collects outputs of one run under ``output_dir/name``."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.dir = Path(cfg.output_dir)
        self.name = cfg.run_name
        self.outputs = []
        self.notes = []

    def path(self, suffix):
        return self.dir / f"{self.name}{suffix}"

    def json(self, data, suffix=".json"):
        if "json" in self.cfg.formats:
            self.outputs.append(write_json(self.path(suffix), data))

    def csv(self, header, rows, suffix=".csv"):
        if "csv" in self.cfg.formats:
            self.outputs.append(write_csv(self.path(suffix), header, rows))

    def svg(self, fn, *args, suffix):
        if "svg" in self.cfg.formats:
            self.outputs.append(fn(*args, self.path(suffix)))

    def mesh(self, mesh, suffix=""):
        for fmt in ("off", "obj"):
            if fmt in self.cfg.formats:
                self.outputs.append(write_mesh(mesh, self.path(f"{suffix}.{fmt}")))


def _field_rows(values, mask):
    return ([int(i), values[i]] for i in np.flatnonzero(mask))


def _run_gen(run, surface):
    if not isinstance(surface, TriangleMesh):
        raise UsageError("gen produces meshes only")
    if not any(f in run.cfg.formats for f in ("off", "obj")):
        raise UsageError("gen needs --format off or obj")
    run.mesh(surface)
    run.json({"kind": "mesh", "surface": _describe(surface)})
    return 0


def _run_verify(run, surface):
    cfg, p = run.cfg, run.cfg.params
    which = cfg.action
    smp = _sampling(p)
    out = {"kind": "verify", "identity": which, "surface": _describe(surface)}
    if isinstance(surface, TriangleMesh):
        out["mean_edge_length"] = surface.mean_edge_length
    if which in ("shrinker", "translator"):
        r = shrinker_residual(surface, **smp) if which == "shrinker" else \
            translator_residual(surface, direction=p.get("direction"), **smp)
        out.update(residual_linf=r.linf, residual_l2=r.l2, count=r.count)
        run.csv(["index", "residual"], _field_rows(r.values, r.mask))
    elif which == "tau":
        kw = {"h_floor": p["h_floor"]} if "h_floor" in p else {}
        t = tau_field(surface, experimental=p.get("experimental", False), **kw, **smp)
        out.update(t.summary())
        run.csv(["index", "grad_norm"], _field_rows(t.grad_norm, t.valid))
    elif which == "cylinder_fit":
        if not isinstance(surface, TriangleMesh):
            raise UsageError("cylinder_fit needs a mesh")
        kw = {"collar": p["collar"]} if "collar" in p else {}
        out.update(cylinder_fit(surface, **kw).to_dict())
    else:
        kw = {"floor": p["h_floor"]} if "h_floor" in p else {}
        rep = verify_identity(surface, which, V=p.get("V"), direction=p.get("direction"),
                              experimental=p.get("experimental", False), **kw, **smp)
        d = rep.to_dict()
        out.update(d)
        out["residual_linf"] = rep.residual.linf
        out["residual_l2"] = rep.residual.l2
        run.csv(["index", "residual"], _field_rows(rep.residual.values, rep.residual.mask))
    run.json(out)
    return 0


def _run_entropy(run, surface):
    res = entropy(surface, EntropySearch(**run.cfg.entropy))
    out = {"kind": "entropy", "surface": _describe(surface), **res.to_dict(),
           "profile": [[t, f] for t, f in res.profile], "threshold": au.entropy_annotation(res.lam)}
    run.json(out)
    run.csv(["t0", "F"], res.profile, suffix="_profile.csv")
    if res.profile:
        t, F = zip(*res.profile)
        run.svg(plot_profile, t, F, suffix="_profile.svg")
    return 0


def _run_flow(run, surface):
    if not isinstance(surface, TriangleMesh):
        raise UsageError("flow needs a mesh")
    config = FlowConfig(**run.cfg.flow)
    status = 0
    try:
        traj = run_flow(surface, config)
    except FlowError as exc:
        traj = exc.trajectory
        run.notes.append(str(exc))
        log.error("%s", exc)
        status = 2
        if traj is None:
            return status
    mono = monitor_entropy(traj)
    out = {"kind": "flow", "surface": _describe(surface), **traj.manifest(),
           "mean_radius": {"initial": mean_radius(surface), "final": mean_radius(traj.final)},
           "entropy_monotonicity": {"max_violation": mono.max_violation, "index": mono.index,
                                    "relative": mono.relative}}
    out.pop("config", None)
    out["error"] = run.notes[-1] if status else None
    run.json(out)
    run.csv(list(SERIES), zip(*(traj.series[k] for k in SERIES)))
    if "svg" in run.cfg.formats:
        for name in SERIES[2:]:
            run.svg(plot_series, traj.series["step"], traj.series[name], name, suffix=f"_{name}.svg")
    run.mesh(traj.final, suffix="_final")
    return status


def _run_audit(run, surface):
    cfg, p = run.cfg, run.cfg.params
    smp = _sampling(p)
    kind = cfg.action
    if kind == "thm1":
        rep = au.audit_mean_convex_estimate(surface, p["R"], p["delta"], C=p.get("C"), **smp)
    elif kind == "graphical":
        rep = au.audit_graphical_estimate(surface, V=p.get("V"), R=p["R"], delta=p["delta"],
                                          x0=p.get("x0"), C=p.get("C"), **smp)
    elif kind == "translator":
        rep = au.audit_translator_estimate(surface, V=p.get("V"), R=p["R"], delta=p["delta"],
                                           x0=p.get("x0"), C=p.get("C"),
                                           direction=p.get("direction"), **smp)
    elif kind == "growth":
        rep = au.check_growth_bound(surface, p["R"], C=p.get("C"), **smp)
    elif kind == "cutoff":
        rep = au.verify_cutoff_identity(surface, x0=p.get("x0"), rho=p["rho"], **smp)
        out = {"kind": "audit", "audit": "cutoff", "surface": _describe(surface), **rep.to_dict()}
        run.json(out)
        run.csv(["lhs", "rhs"], zip(rep.lhs, rep.rhs))
        return 1 if cfg.strict and (not rep.shrinker_ok or rep.bound_violations) else 0
    elif kind == "scan":
        scan = au.scan_phi_f_max(surface, x0=p.get("x0"), rho=p["rho"], delta=p["delta"], **smp)
        out = {"kind": "audit", "audit": "scan", "surface": _describe(surface), **scan.to_dict(),
               "consistent": scan.check()}
        inside = np.flatnonzero(scan.mu > 0)
        run.json(out)
        run.csv(["index", "mu", "phi", "v", "h", "f", "F"],
                ([int(i), scan.mu[i], scan.phi[i], scan.v[i], scan.h[i], scan.f[i], scan.F[i]]
                 for i in inside))
        return 1 if cfg.strict and scan.hypothesis["violated"] else 0
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(f"unknown audit {kind!r}")
    out = {"kind": "audit", "surface": _describe(surface), **rep.to_dict()}
    if kind == "translator" and p.get("sweep"):
        rows = au.translator_sweep(surface, p["sweep"], V=p.get("V"), delta=p["delta"],
                                   x0=p.get("x0"), direction=p.get("direction"), **smp)
        out["sweep"] = rows
        run.csv(["R", "empirical_C", "fraction", "violated"],
                ([r["R"], r["empirical_C"], r["fraction"], str(r["violated"])] for r in rows),
                suffix="_sweep.csv")
        run.svg(plot_sweep, [r["R"] for r in rows], [r["empirical_C"] for r in rows],
                [r["violated"] for r in rows], suffix="_sweep.svg")
    run.json(out)
    if "csv" in cfg.formats:
        path = run.path("_ratio.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(rep.ratio_csv())
        run.outputs.append(path)
    bad = rep.violated or rep.passed is False
    return 1 if cfg.strict and bad else 0


def _run_plot(run):
    cfg = run.cfg
    try:
        paths, extra = plot_reports(cfg.inputs, run.dir, metric=cfg.params.get("metric", "residual_linf"),
                                    prefix=run.name)
    except ReportError as exc:
        raise UsageError(str(exc)) from exc
    run.outputs.extend(paths)
    if extra:
        run.json({"kind": "plot", **extra}, suffix="_summary.json")
    return 0


RUNNERS = {"gen": _run_gen, "verify": _run_verify, "entropy": _run_entropy,
           "flow": _run_flow, "audit": _run_audit}


def execute(cfg: ExperimentConfig):
    """Run ``cfg``; returns ``(status, output paths, manifest path)``."""
    validate_config(cfg.to_dict())
    run = _Run(cfg)
    if cfg.command == "plot":
        status = _run_plot(run)
    else:
        surface = build_surface(cfg.surface)
        status = RUNNERS[cfg.command](run, surface)
    man = write_manifest(run.dir, cfg.to_dict(), run.outputs, status, run.notes,
                         name=f"{run.name}.manifest.json")
    return status, run.outputs, man


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * ns.verbose, format="%(levelname)s: %(message)s")
    try:
        if ns.config:
            path = Path(ns.config)
            if not path.exists():
                raise UsageError(f"config file {path} does not exist")
            cfg = ExperimentConfig.from_json(path.read_text())
        elif ns.command is None:
            parser.print_usage(sys.stderr)
            raise UsageError("a command or --config is required")
        else:
            cfg = config_from_args(ns)
        validate_config(cfg.to_dict())
        if ns.print_config:
            print(cfg.to_json())
            return 0
        status, outputs, man = execute(cfg)
    except (UsageError, MeshError, ValueError, OSError) as exc:
        print(f"shrinkerlab: error: {exc}", file=sys.stderr)
        return 2
    for p in outputs:
        print(p)
    print(man)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
