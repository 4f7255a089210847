"""Domain JSON ingestion and plain-text mesh / field export."""
from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np

from .curves import CurveLoop, DomainSpec
from .errors import OrientationWarning, ParseError
from .remesh import RemeshedMesh


def _num(x) -> str:
    return format(float(x), ".17g")


def domain_from_dict(doc) -> DomainSpec:
    """Build a domain from the parsed JSON document, fixing loop orientation.

    Loops whose orientation disagrees with their role are reversed and an
    :class:`OrientationWarning` is issued.
    """
    if not isinstance(doc, dict) or not isinstance(doc.get("curves"), list):
        raise ParseError('top level must be an object with a "curves" array')
    loops = []
    for i, entry in enumerate(doc["curves"]):
        if not isinstance(entry, dict):
            raise ParseError(f"curve {i}: expected an object")
        role = entry.get("role", "outer")
        if role not in ("outer", "hole"):
            raise ParseError(f'curve {i}: role must be "outer" or "hole", got {role!r}')
        try:
            segs = np.array(entry["segments"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"curve {i}: bad or missing segments ({exc})") from None
        if segs.ndim != 3 or segs.shape[1:] != (4, 2):
            raise ParseError(f"curve {i}: each segment needs four [x, y] control points")
        loop = CurveLoop(segs, role)
        want = "CCW" if role == "outer" else "CW"
        if loop.orientation != want:
            warnings.warn(f"curve {i}: {role} loop was {loop.orientation}, reversed to {want}",
                          OrientationWarning, stacklevel=3)
            loop = loop.reversed()
        loops.append(loop)
    return DomainSpec(loops)


def parse_domain(path) -> DomainSpec:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return domain_from_dict(doc)


def domain_to_dict(domain: DomainSpec) -> dict:
    return {"curves": [{"role": c.role, "segments": c.segments.tolist()} for c in domain]}


def write_domain(domain: DomainSpec, path) -> None:
    Path(path).write_text(json.dumps(domain_to_dict(domain), indent=1) + "\n")


# --------------------------------------------------------------------------
# mesh text format
#
#   # comment / header lines
#   v x y kind curve_id theta      kind is b (boundary) or s (spine)
#   f i j k [l]                    1-based, CCW


def write_mesh(mesh: RemeshedMesh, path, config: dict | None = None) -> None:
    meta = dict(mesh.meta)
    meta.update(config or {})
    n = len(mesh.points)
    lines = [
        "# medialparam mesh",
        f"# vertices {n} boundary {mesh.n_boundary} spine {n - mesh.n_boundary} "
        f"faces {len(mesh.faces)} quads {len(mesh.quads)} triangles {len(mesh.triangles)}",
    ]
    for key in sorted(meta):
        val = meta[key]
        lines.append(f"# {key} {_num(val) if isinstance(val, (float, np.floating)) else val}")
    lines.append("# spine_kind " + " ".join(mesh.spine_kind))
    for v in range(n):
        x, y = mesh.points[v]
        if v < mesh.n_boundary:
            lines.append(f"v {_num(x)} {_num(y)} b {int(mesh.curve_id[v])} {_num(mesh.theta[v])}")
        else:
            lines.append(f"v {_num(x)} {_num(y)} s -1 -1")
    for f in mesh.faces:
        lines.append("f " + " ".join(str(i + 1) for i in f))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_meta(value: str):
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return None if value == "None" else value


def read_mesh(path) -> RemeshedMesh:
    """Inverse of :func:`write_mesh`."""
    pts, cids, thetas, faces, meta, kinds = [], [], [], [], {}, []
    n_b = 0
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        tok = line.split()
        if not tok:
            continue
        if tok[0] == "#":
            if len(tok) >= 2 and tok[1] == "spine_kind":
                kinds = tok[2:]
            elif len(tok) == 3 and lineno > 1:  # line 1 is the title
                meta[tok[1]] = _parse_meta(tok[2])
            continue
        if tok[0] == "v" and len(tok) == 6:
            pts.append((float(tok[1]), float(tok[2])))
            cids.append(int(tok[4]))
            thetas.append(float(tok[5]))
            if tok[3] == "b":
                n_b += 1
        elif tok[0] == "f" and len(tok) in (4, 5):
            faces.append(tuple(int(t) - 1 for t in tok[1:]))
        else:
            raise ParseError(f"{path}: line {lineno}: cannot parse {line!r}")
    cids_arr = np.array(cids, dtype=int)
    loops, start = [], 0
    while start < n_b:
        end = start
        while end < n_b and cids_arr[end] == cids_arr[start]:
            end += 1
        loops.append(np.arange(start, end))
        start = end
    limbs = sorted((f[0], f[-1]) for f in faces)
    spine_edges = sorted({(min(f[2], f[3]), max(f[2], f[3])) for f in faces if len(f) == 4})
    return RemeshedMesh(np.array(pts, dtype=float).reshape(-1, 2), cids_arr,
                        np.array(thetas, dtype=float), n_b, loops, limbs, faces,
                        spine_edges, kinds, meta)


def write_field_csv(grid, path) -> None:
    """CSV with header ``x,y,F``, one row per grid point."""
    rows = ["x,y,F"]
    for (x, y), val in zip(grid.points, grid.values.ravel()):
        rows.append(f"{_num(x)},{_num(y)},{_num(val)}")
    Path(path).write_text("\n".join(rows) + "\n")
