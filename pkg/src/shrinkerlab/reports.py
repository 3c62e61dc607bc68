"""Deterministic JSON/CSV writers and run manifests.

Data files carry no timestamps and print floats with a fixed number of
significant digits, so identical runs produce identical bytes. The
manifest is the one place a wall-clock time appears.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import platform
import sys
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path

import numpy as np

DIGITS = 12
MANIFEST_NAME = "manifest.json"


def format_number(x, digits=DIGITS):
    """Float text with ``digits`` significant digits; ints pass through."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits}g}"


def canonical(obj, digits=DIGITS):
    """Plain JSON-ready copy with floats rounded to ``digits`` significant
    digits. NaN and infinities become ``None``; tuples and arrays become
    lists."""
    if isinstance(obj, dict):
        return {str(k): canonical(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return [canonical(v, digits) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{digits}g}")
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, digits=DIGITS):
    return json.dumps(canonical(obj, digits), indent=2, sort_keys=True) + "\n"


def write_json(path, obj, digits=DIGITS):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj, digits))
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def csv_text(header, rows, digits=DIGITS):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else ("" if v is None else format_number(v, digits))
                    for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, digits=DIGITS):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(header, rows, digits))
    return path


def read_csv(path):
    """Header and numeric columns of a CSV written by :func:`write_csv`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return [], {}
    header = rows[0]
    cols = {h: [] for h in header}
    for r in rows[1:]:
        for h, v in zip(header, r):
            cols[h].append(float(v) if v not in ("", "nan") else math.nan)
    return header, cols


def sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _version(pkg):
    try:
        return metadata.version(pkg)
    except metadata.PackageNotFoundError:
        return None


def manifest(config, outputs, status=0, notes=None):
    """Manifest dict: resolved config, output hashes, versions, timestamp."""
    return {
        "tool": "shrinkerlab",
        "version": _version("shrinkerlab"),
        "config": config,
        "outputs": {Path(p).name: sha256(p) for p in outputs},
        "status": status,
        "notes": notes or [],
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "libraries": {k: _version(k) for k in ("numpy", "scipy", "sympy", "matplotlib")},
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def write_manifest(directory, config, outputs, status=0, notes=None, name=MANIFEST_NAME):
    path = Path(directory) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    # the manifest is not a data file, so full precision is kept
    path.write_text(dumps(manifest(config, outputs, status, notes), digits=17))
    return path
