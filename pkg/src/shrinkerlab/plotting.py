"""Deterministic SVG plots of reports.

Figures use fixed dimensions, a fixed font and axis policy, a fixed SVG
hash salt and no date metadata, so equal inputs give byte-equal files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .flow import SERIES
from .reports import read_csv, read_json

FIGSIZE = (6.0, 4.0)
_RC = {
    "svg.hashsalt": "shrinkerlab",
    "svg.fonttype": "path",
    "font.family": "DejaVu Sans",
    "font.size": 9.0,
    "axes.grid": True,
    "grid.alpha": 0.3,
}
PLOT_KINDS = ("refinement", "entropy", "sweep", "flow")


class ReportError(ValueError):
    """Empty, unreadable or mixed report input."""


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _figure():
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=FIGSIZE)
        ax = fig.add_subplot()
        ax.grid(True, alpha=0.3)
    return fig, ax


def loglog_slope(h, values):
    """Least-squares slope of ``log values`` against ``log h``."""
    h = np.asarray(h, dtype=float)
    v = np.asarray(values, dtype=float)
    ok = (h > 0) & (v > 0) & np.isfinite(h) & np.isfinite(v)
    if ok.sum() < 2:
        raise ReportError("a slope needs at least two positive points")
    return float(np.polyfit(np.log(h[ok]), np.log(v[ok]), 1)[0])


def plot_refinement(h, values, path, label="residual"):
    """Log-log plot of ``values`` against mesh size with the fitted order."""
    order = np.argsort(h)
    h = np.asarray(h, dtype=float)[order]
    v = np.asarray(values, dtype=float)[order]
    slope = loglog_slope(h, v)
    fig, ax = _figure()
    ax.loglog(h, v, "o-", label=label)
    ax.set_xlabel("mean edge length h")
    ax.set_ylabel(label)
    ax.set_title(f"{label} under refinement")
    ax.annotate(f"slope {slope:.3f}", xy=(0.05, 0.9), xycoords="axes fraction")
    ax.legend(loc="lower right")
    _save(fig, path)
    return slope


def plot_profile(t0, F, path, argmax=None):
    fig, ax = _figure()
    ax.semilogx(t0, F, "o-")
    if argmax is not None:
        ax.axvline(argmax, color="0.5", linestyle="--")
    ax.set_xlabel("t0")
    ax.set_ylabel("F")
    ax.set_title("Gaussian area along the scale grid")
    return _save(fig, path)


def plot_sweep(R, C, violated, path):
    R = np.asarray(R, dtype=float)
    C = np.array([math.nan if c is None else c for c in C], dtype=float)
    bad = np.asarray(violated, dtype=bool)
    fig, ax = _figure()
    ax.plot(R, C, "-", color="C0")
    ax.plot(R[~bad], C[~bad], "o", color="C0", label="hypothesis holds")
    if bad.any():
        ax.plot(R[bad], C[bad], "x", color="C3", label="hypothesis violated")
    ax.set_xlabel("R")
    ax.set_ylabel("empirical C")
    ax.set_title("empirical constant against ball radius")
    ax.legend(loc="upper left")
    return _save(fig, path)


def plot_series(x, y, name, path, xlabel="step"):
    fig, ax = _figure()
    y = np.asarray(y, dtype=float)
    if name.startswith("residual") and np.all(y > 0):
        ax.semilogy(x, y, "-")
    else:
        ax.plot(x, y, "-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(name)
    ax.set_title(f"flow monitor: {name}")
    return _save(fig, path)


def report_kind(path):
    """Classify a report file; raises :class:`ReportError` when empty or
    unrecognized."""
    path = Path(path)
    if not path.exists():
        raise ReportError(f"report {path} does not exist")
    if path.stat().st_size == 0:
        raise ReportError(f"report {path} is empty")
    if path.suffix.lower() == ".csv":
        header, cols = read_csv(path)
        if tuple(header) == SERIES:
            if not cols["step"]:
                raise ReportError(f"flow monitor {path} has no rows")
            return "flow"
        raise ReportError(f"unrecognized CSV header in {path}")
    try:
        data = read_json(path)
    except ValueError as exc:
        raise ReportError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not data:
        raise ReportError(f"report {path} is empty")
    kind = data.get("kind")
    if kind == "verify" and data.get("mean_edge_length") is not None:
        return "refinement"
    if kind == "entropy":
        if not data.get("profile"):
            raise ReportError(f"entropy report {path} has no profile")
        return "entropy"
    if kind == "audit" and data.get("sweep"):
        return "sweep"
    raise ReportError(f"report {path} has no plottable content")


def plot_reports(paths, outdir, metric="residual_linf", prefix="refinement"):
    """Plot reports written by this tool.

    All inputs must be of one kind: verify reports from meshes (one
    refinement plot with the fitted order), entropy reports (one profile
    each), translator sweeps (one C(R) plot each) or flow monitor CSVs (one
    SVG per series). Returns the SVG paths and, for refinement plots, the
    fitted slope.
    """
    paths = [Path(p) for p in paths]
    if not paths:
        raise ReportError("no reports given")
    kinds = {report_kind(p) for p in paths}
    if len(kinds) > 1:
        raise ReportError(f"mixed report kinds: {sorted(kinds)}")
    kind = kinds.pop()
    outdir = Path(outdir)
    out = []
    if kind == "refinement":
        data = [read_json(p) for p in paths]
        if len(data) < 2:
            raise ReportError("a refinement plot needs at least two reports")
        h = [d["mean_edge_length"] for d in data]
        v = [d.get(metric) for d in data]
        if any(x is None for x in v):
            raise ReportError(f"metric {metric!r} missing from a report")
        target = outdir / f"{prefix}_{metric}.svg"
        slope = plot_refinement(h, v, target, label=metric)
        return [target], {"metric": metric, "mean_edge_length": h, "values": v, "slope": slope}
    for p in paths:
        if kind == "entropy":
            d = read_json(p)
            t, F = zip(*d["profile"])
            out.append(plot_profile(t, F, outdir / f"{p.stem}_profile.svg", d["argmax"]["t0"]))
        elif kind == "sweep":
            rows = read_json(p)["sweep"]
            out.append(plot_sweep([r["R"] for r in rows], [r["empirical_C"] for r in rows],
                                  [r["violated"] for r in rows], outdir / f"{p.stem}_sweep.svg"))
        else:
            _, cols = read_csv(p)
            for name in SERIES[2:]:
                out.append(plot_series(cols["step"], cols[name], name,
                                       outdir / f"{p.stem}_{name}.svg"))
    return out, {}
