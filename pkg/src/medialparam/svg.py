"""Layered SVG rendering of the pipeline stages (deterministic output)."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .dipole import IN
from .medial import EdgeLabel, LabeledTess

SPINE_COLOR = "#d62728"
BOUNDARY_COLOR = "#000000"
LIMB_COLOR = "#2ca02c"
OUT_COLOR = "#b0b0b0"
FACE_COLOR = "#4c72b0"
CONTOUR_COLOR = "#9467bd"


def _n(x) -> str:
    return format(float(x), ".17g")


def _pts(poly) -> str:
    # SVG's y axis points down; flip so the picture matches the math frame
    return " ".join(f"{_n(x)},{_n(-y)}" for x, y in poly)


def _chains(edges):
    """Greedy chaining of undirected segments (vertex pairs) into polylines."""
    adj: dict = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for v in adj:
        adj[v].sort()
    used, chains = set(), []
    starts = sorted(adj, key=lambda v: (len(adj[v]) == 2, v))
    for s in starts:
        for w in adj[s]:
            if frozenset((s, w)) in used:
                continue
            chain = [s, w]
            used.add(frozenset((s, w)))
            cur = w
            while len(adj[cur]) == 2:
                nxt = next((x for x in adj[cur] if frozenset((cur, x)) not in used), None)
                if nxt is None:
                    break
                used.add(frozenset((cur, nxt)))
                chain.append(nxt)
                cur = nxt
            chains.append(chain)
    return chains


def render_svg(artifacts, contours=None) -> str:
    """SVG document for a pipeline run.

    Layers (``<g id=...>``): ``sites`` (In filled, Out hollow), ``voronoi``
    with one sub-group per edge label (the spine in red), ``faces`` and, when
    contours are given, ``contours``.
    """
    lt: LabeledTess = artifacts.labeled
    sites = artifacts.sites
    mesh = artifacts.mesh
    contours = contours if contours is not None else getattr(artifacts, "contours", None)
    x0, y0, x1, y1 = artifacts.domain.bbox()
    pad = 0.05 * max(x1 - x0, y1 - y0)
    x0, y0, x1, y1 = x0 - pad, y0 - pad, x1 + pad, y1 + pad
    w = 0.0015 * max(x1 - x0, y1 - y0)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_n(x0)} {_n(-y1)} '
        f'{_n(x1 - x0)} {_n(y1 - y0)}" width="800" height="{_n(800 * (y1 - y0) / (x1 - x0))}">',
    ]

    in_view = ((sites.points[:, 0] >= x0) & (sites.points[:, 0] <= x1)
               & (sites.points[:, 1] >= y0) & (sites.points[:, 1] <= y1))
    out.append(f'<g id="sites" stroke="#333333" stroke-width="{_n(w * 0.5)}">')
    for p, lab, ok in zip(sites.points, sites.labels, in_view):
        if ok:
            fill = "#333333" if lab == IN else "none"
            out.append(f'<circle cx="{_n(p[0])}" cy="{_n(-p[1])}" r="{_n(1.5 * w)}" fill="{fill}"/>')
    out.append("</g>")

    out.append('<g id="voronoi" fill="none">')
    layers = [(EdgeLabel.OUT, "voronoi-out", OUT_COLOR, 0.5),
              (EdgeLabel.BOUNDARY, "voronoi-boundary", BOUNDARY_COLOR, 1.0),
              (EdgeLabel.LIMB, "voronoi-limbs", LIMB_COLOR, 0.6),
              (EdgeLabel.SPINE, "spine", SPINE_COLOR, 1.5)]
    for label, gid, color, width in layers:
        pairs = [tuple(int(v) for v in lt.edges[e, :2]) for e in np.flatnonzero(lt.edge_label == label)]
        out.append(f'<g id="{gid}" stroke="{color}" stroke-width="{_n(width * w)}">')
        for chain in _chains(pairs):
            poly = np.clip(lt.verts[chain], [x0, y0], [x1, y1])
            out.append(f'<polyline points="{_pts(poly)}"/>')
        out.append("</g>")
    out.append("</g>")

    if mesh is not None:
        out.append(f'<g id="faces" fill="{FACE_COLOR}" fill-opacity="0.12" stroke="{FACE_COLOR}" '
                   f'stroke-width="{_n(0.5 * w)}">')
        for f in range(len(mesh.faces)):
            out.append(f'<polygon points="{_pts(mesh.face_points(f))}"/>')
        out.append("</g>")

    if contours:
        out.append(f'<g id="contours" fill="none" stroke="{CONTOUR_COLOR}" stroke-width="{_n(w)}">')
        for r in sorted(contours):
            for cid in sorted(contours[r]):
                for poly in contours[r][cid]:
                    out.append(f'<polyline data-r="{_n(r)}" data-curve="{cid}" points="{_pts(poly)}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(artifacts, path, contours=None) -> None:
    Path(path).write_text(render_svg(artifacts, contours))
