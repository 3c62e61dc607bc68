"""ASCII OFF and OBJ reading and writing."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .mesh import MeshError, TriangleMesh

FORMATS = (".off", ".obj")


def _format(path):
    ext = Path(path).suffix.lower()
    if ext not in FORMATS:
        raise ValueError(f"unknown mesh extension {ext!r}; use one of {FORMATS}")
    return ext


def _tokens(text):
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line


def _parse_off(text):
    lines = _tokens(text)
    head = next(lines, "")
    if not head.startswith("OFF"):
        raise MeshError("OFF file must start with 'OFF'")
    rest = head[3:].split()
    counts = rest if rest else next(lines).split()
    nv, nf = int(counts[0]), int(counts[1])
    v = np.array([[float(x) for x in next(lines).split()[:3]] for _ in range(nv)]).reshape(nv, 3)
    faces = []
    for _ in range(nf):
        parts = next(lines).split()
        m = int(parts[0])
        idx = [int(p) for p in parts[1: m + 1]]
        faces += [(idx[0], idx[j], idx[j + 1]) for j in range(1, m - 1)]
    return v, np.array(faces, dtype=np.int64).reshape(-1, 3)


def _parse_obj(text):
    verts, faces = [], []
    for line in _tokens(text):
        parts = line.split()
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            idx = []
            for p in parts[1:]:
                i = int(p.split("/")[0])
                idx.append(i - 1 if i > 0 else len(verts) + i)
            faces += [(idx[0], idx[j], idx[j + 1]) for j in range(1, len(idx) - 1)]
        # normals, texture coordinates and groups are ignored
    return np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3)


def read_mesh(path, area_floor=None) -> TriangleMesh:
    """Read an OFF or OBJ file; polygons are fan-triangulated.

    Raises
    ------
    MeshError
        For malformed or non-manifold input (the error lists the edges).
    ValueError
        For unknown extensions.
    """
    ext = _format(path)
    text = Path(path).read_text()
    try:
        v, f = _parse_off(text) if ext == ".off" else _parse_obj(text)
    except (StopIteration, IndexError, ValueError) as exc:
        raise MeshError(f"malformed {ext[1:].upper()} file {path}: {exc}") from exc
    kw = {} if area_floor is None else {"area_floor": area_floor}
    return TriangleMesh(v, f, **kw)


def write_mesh(mesh: TriangleMesh, path, digits=17):
    """Write ``mesh`` as OFF or OBJ with ``digits`` significant digits."""
    ext = _format(path)
    fmt = f"%.{int(digits)}g"
    lines = []
    if ext == ".off":
        lines.append("OFF")
        lines.append(f"{mesh.n_vertices} {mesh.n_faces} 0")
        lines += [" ".join(fmt % c for c in p) for p in mesh.vertices]
        lines += [f"3 {a} {b} {c}" for a, b, c in mesh.faces]
    else:
        lines += ["v " + " ".join(fmt % c for c in p) for p in mesh.vertices]
        lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    Path(path).write_text("\n".join(lines) + "\n")
    return Path(path)
