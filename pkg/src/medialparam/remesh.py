"""Interpolative re-meshing of the labelled Voronoi graph into quads and triangles.

Every spine edge is replaced by its midpoint.  Inside each In cell the chain
of spine edges is matched to the cell's boundary chain by normalised arc
length: a midpoint at chain fraction ``t`` produces a boundary vertex at
fraction ``1 - t`` of the boundary chain (the two chains run in opposite
directions around the cell).  Walking each boundary loop then yields one
face per boundary edge: a quad when the two limbs end on different spine
vertices, a triangle when they share one.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .dipole import IN
from .errors import FaceStructureError, SelfIntersectionError, TopologyError
from .medial import EdgeLabel, LabeledTess, VertexType

_MID, _VERT = "mid", "v"


@dataclass(frozen=True, eq=False)
class RemeshedMesh:
    """Quad/triangle mesh between the boundary loops and the spine.

    Vertices ``0 .. n_boundary-1`` lie on the boundary (grouped per loop, in
    traversal order), the rest on the spine.  ``theta`` is the normalised arc
    length along the vertex's loop (-1 for spine vertices), ``curve_id`` is
    -1 for spine vertices.  ``limbs[k] = (b, s)`` joins boundary vertex ``b``
    to spine vertex ``s``; faces are CCW index tuples starting with the two
    boundary vertices.
    """

    points: np.ndarray
    curve_id: np.ndarray
    theta: np.ndarray
    n_boundary: int
    loops: list
    limbs: list
    faces: list = field(default_factory=list)
    spine_edges: list = field(default_factory=list)
    spine_kind: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def bverts(self) -> np.ndarray:
        return self.points[: self.n_boundary]

    @property
    def sverts(self) -> np.ndarray:
        return self.points[self.n_boundary:]

    def is_spine(self, v) -> bool:
        return v >= self.n_boundary

    @property
    def quads(self) -> list:
        return [f for f in self.faces if len(f) == 4]

    @property
    def triangles(self) -> list:
        return [f for f in self.faces if len(f) == 3]

    def face_points(self, f) -> np.ndarray:
        return self.points[list(self.faces[f])]

    def face_curve(self, f) -> int:
        return int(self.curve_id[self.faces[f][0]])

    def loop_of(self, curve_id) -> np.ndarray:
        return next(lp for lp in self.loops if self.curve_id[lp[0]] == curve_id)

    def boundary_polyline(self, curve_id) -> np.ndarray:
        return self.points[self.loop_of(curve_id)]

    def spine_type(self, s) -> str:
        """'pole', 'branch' or 'interior' for spine vertex ``s`` (global index)."""
        return self.spine_kind[s - self.n_boundary]


def _signed_area(poly) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


class _LoopIndex:
    """Arc-length bookkeeping on the old boundary cycles."""

    def __init__(self, lt: LabeledTess):
        self.verts = lt.verts
        self.edge_pos = {}   # edge -> (curve, start arclength, length)
        self.vert_pos = {}   # vertex -> (curve, arclength)
        self.perimeter = {}
        for loop in lt.boundary_loops:
            s = 0.0
            for k, e in enumerate(loop.edges):
                a, b = loop.verts[k], loop.verts[(k + 1) % len(loop.verts)]
                ln = float(np.linalg.norm(lt.verts[b] - lt.verts[a]))
                self.vert_pos[a] = (loop.curve_id, s)
                self.edge_pos[e] = (loop.curve_id, s, ln)
                s += ln
            self.perimeter[loop.curve_id] = s


def _split_cell(lt: LabeledTess, c: int):
    """Rotate cell ``c`` so its boundary run comes first.

    Returns (vertex loop, edge loop, run length m).  The loop then reads
    boundary chain i -> j, limb j -> a, spine a -> ... -> z, limb z -> i.
    """
    cv, ce = lt.cells[c], lt.cell_edges[c]
    lab = [lt.edge_label[e] for e in ce]
    n = len(ce)
    is_b = [x == EdgeLabel.BOUNDARY for x in lab]
    starts = [k for k in range(n) if is_b[k] and not is_b[k - 1]]
    if len(starts) != 1:
        raise FaceStructureError(f"cell {c} has {len(starts)} boundary chains (expected 1)", face=c)
    k0 = starts[0]
    cv, ce, lab = cv[k0:] + cv[:k0], ce[k0:] + ce[:k0], lab[k0:] + lab[:k0]
    m = sum(1 for x in lab if x == EdgeLabel.BOUNDARY)
    rest = lab[m:]
    if (len(rest) < 2 or rest[0] != EdgeLabel.LIMB or rest[-1] != EdgeLabel.LIMB
            or any(x != EdgeLabel.SPINE for x in rest[1:-1])):
        names = ",".join(EdgeLabel(x).name.lower() for x in rest)
        raise FaceStructureError(f"cell {c}: expected limb, spine..., limb after the boundary "
                                 f"chain, found [{names}]", face=c)
    return cv, ce, m


def _chain_point(lt, ce_boundary, frac):
    """Point and loop arc position at fraction ``frac`` of a boundary chain."""
    lens = np.array([lt.edge_length(e) for e in ce_boundary])
    total = float(lens.sum())
    target = frac * total
    acc = 0.0
    for e, ln in zip(ce_boundary, lens):
        if acc + ln >= target or e == ce_boundary[-1]:
            return e, (target - acc), ln
        acc += ln
    raise AssertionError("unreachable")


def _cell_points(lt: LabeledTess, index: _LoopIndex, c: int, vtype: dict):
    """Interpolated boundary points of one In cell: list of (curve, pos, xy, key)."""
    cv, ce, m = _split_cell(lt, c)
    bchain = ce[:m]
    spine_e = ce[m + 1:-1]
    chain_v = cv[m + 1:]           # a, ..., z
    if not spine_e:
        return []
    lens = np.array([lt.edge_length(e) for e in spine_e])
    total = float(lens.sum())
    if total <= 0.0:
        raise FaceStructureError(f"cell {c}: spine chain has zero length", face=c)
    cum = np.concatenate([[0.0], np.cumsum(lens)])
    stops = []
    for k, e in enumerate(spine_e):
        stops.append(((cum[k] + 0.5 * lens[k]) / total, (_MID, int(e))))
        if k + 1 < len(spine_e) and vtype.get(chain_v[k + 1]) == VertexType.BRANCH:
            stops.append((cum[k + 1] / total, (_VERT, int(chain_v[k + 1]))))
    out = []
    for t, key in stops:
        e, along, ln = _chain_point(lt, bchain, 1.0 - t)
        va, vb = lt.edges[e, :2]
        a, b = (va, vb) if lt.cell_labels[lt.edges[e, 2]] == IN else (vb, va)
        w = 0.0 if ln == 0.0 else along / ln
        xy = (1 - w) * lt.verts[a] + w * lt.verts[b]
        curve, start, _ = index.edge_pos[e]
        out.append((curve, start + along, xy, key))
    return out


def _kept_vertices(lt: LabeledTess, index: _LoopIndex, vtype: dict, sval: np.ndarray):
    """Old boundary vertices that survive: limb feet of polar and branch vertices."""
    bset = lt.boundary_vertices()
    keys = defaultdict(set)
    for e in lt.E_L:
        va, vb = (int(x) for x in lt.edges[e, :2])
        foot, head = (va, vb) if va in bset else (vb, va)
        if head in bset:
            continue  # limb between two boundary vertices carries no spine information
        val = sval[head]
        if val == 0 or val >= 3:
            keys[foot].add((_VERT, head))
        elif val == 1:
            se = next(int(f) for f in lt.E_S if head in lt.edges[f, :2])
            keys[foot].add((_MID, se))
    out = []
    for foot, ks in sorted(keys.items()):
        if len(ks) != 1:
            raise TopologyError(f"boundary vertex {foot} has limbs to several spine features")
        curve, pos = index.vert_pos[foot]
        out.append((curve, pos, lt.verts[foot].copy(), ks.pop()))
    return out


def interpolative_remesh(lt: LabeledTess) -> RemeshedMesh:
    """Corner-cut the spine and boundary together and build the face list."""
    vtype = lt.spine_vertex_type
    sval = lt.spine_valency()
    spine_edges = lt.E_S
    # every spine edge needs an In cell on both sides
    for e in spine_edges:
        cl, cr = lt.edges[e, 2:]
        if cr < 0 or lt.cell_labels[cl] != IN or lt.cell_labels[cr] != IN:
            raise TopologyError(f"spine edge {e} lacks two incident In cells")
    index = _LoopIndex(lt)
    pts = []
    for c in np.flatnonzero(lt.cell_labels == IN):
        pts += _cell_points(lt, index, int(c), vtype)
    pts += _kept_vertices(lt, index, vtype, sval)

    by_curve = defaultdict(list)
    for curve, pos, xy, key in pts:
        by_curve[curve].append((pos, xy, key))

    points, curve_ids, thetas, loops, limb_key = [], [], [], [], []
    for loop in lt.boundary_loops:
        items = sorted(by_curve.get(loop.curve_id, []), key=lambda it: it[0])
        if len(items) < 3:
            raise TopologyError(f"curve {loop.curve_id}: fewer than 3 remeshed boundary vertices")
        poly = np.array([it[1] for it in items])
        seg = np.linalg.norm(np.roll(poly, -1, axis=0) - poly, axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seg[:-1])])
        theta = cum / seg.sum()
        if np.any(np.diff(theta) <= 0):
            k = int(np.flatnonzero(np.diff(theta) <= 0)[0])
            raise TopologyError(f"curve {loop.curve_id}: coincident remeshed boundary "
                                f"vertices at position {k}")
        start = len(points)
        loops.append(np.arange(start, start + len(items)))
        for (pos, xy, key), th in zip(items, theta):
            points.append(xy)
            curve_ids.append(loop.curve_id)
            thetas.append(th)
            limb_key.append(key)

    n_b = len(points)
    spine_id, spine_kind = {}, []
    for key in limb_key:
        if key not in spine_id:
            spine_id[key] = len(points)
            kind, ref = key
            if kind == _MID:
                va, vb = lt.edges[ref, :2]
                points.append(0.5 * (lt.verts[va] + lt.verts[vb]))
            else:
                points.append(lt.verts[ref].copy())
            spine_kind.append("branch" if kind == _VERT and vtype.get(ref) == VertexType.BRANCH
                              else "interior")
            curve_ids.append(-1)
            thetas.append(-1.0)
    limbs = [(b, spine_id[key]) for b, key in enumerate(limb_key)]
    meta = {"epsilon": lt.epsilon, "n_spine_edges_in": len(spine_edges)}
    mesh = RemeshedMesh(np.array(points), np.array(curve_ids), np.array(thetas), n_b,
                        loops, limbs, spine_kind=spine_kind, meta=meta)
    return build_faces(mesh)


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    return (orient(p1, p2, q1) * orient(p1, p2, q2) < 0
            and orient(q1, q2, p1) * orient(q1, q2, p2) < 0)


def build_faces(mesh: RemeshedMesh) -> RemeshedMesh:
    """One face per boundary edge: quad ``[b_k, b_k+1, s_k+1, s_k]`` or
    triangle ``[b_k, b_k+1, s]`` when both limbs share their spine end."""
    limb_of = dict(mesh.limbs)
    P = mesh.points
    faces, spine_edges = [], set()
    kind = list(mesh.spine_kind)
    for loop in mesh.loops:
        n = len(loop)
        for k in range(n):
            b0, b1 = int(loop[k]), int(loop[(k + 1) % n])
            s0, s1 = limb_of[b0], limb_of[b1]
            if s0 == s1:
                face = (b0, b1, s0)
                kind[s0 - mesh.n_boundary] = "pole"
            else:
                if _segments_cross(P[b0], P[s0], P[b1], P[s1]):
                    raise SelfIntersectionError(f"limbs at boundary vertices {b0} and {b1} cross",
                                                index=b0)
                face = (b0, b1, s1, s0)
                spine_edges.add((min(s0, s1), max(s0, s1)))
            if _signed_area(P[list(face)]) <= 0:
                raise SelfIntersectionError(f"face at boundary vertex {b0} is not CCW", index=b0)
            faces.append(face)
    return RemeshedMesh(mesh.points, mesh.curve_id, mesh.theta, mesh.n_boundary, mesh.loops,
                        mesh.limbs, faces, sorted(spine_edges), kind, dict(mesh.meta))


def _components(mesh: RemeshedMesh):
    parent = list(range(len(mesh.points)))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for f in mesh.faces:
        for v in f[1:]:
            parent[find(v)] = find(f[0])
    return find


def mesh_stats(mesh: RemeshedMesh) -> dict:
    """Face counts, spine valencies, loop sizes and Euler characteristic per component."""
    limb_count = defaultdict(int)
    for _, s in mesh.limbs:
        limb_count[s] += 1
    spine_deg = defaultdict(int)
    for a, b in mesh.spine_edges:
        spine_deg[a] += 1
        spine_deg[b] += 1
    valency = {s: limb_count[s] + spine_deg[s] for s in range(mesh.n_boundary, len(mesh.points))}

    find = _components(mesh)
    edges = set()
    for f in mesh.faces:
        for a, b in zip(f, f[1:] + f[:1]):
            edges.add((min(a, b), max(a, b)))
    comp_v, comp_e, comp_f = defaultdict(int), defaultdict(int), defaultdict(int)
    for v in range(len(mesh.points)):
        comp_v[find(v)] += 1
    for a, _ in edges:
        comp_e[find(a)] += 1
    for f in mesh.faces:
        comp_f[find(f[0])] += 1
    roots = sorted(comp_f)
    euler = [comp_v[r] - comp_e[r] + comp_f[r] for r in roots]
    return {
        "n_quads": len(mesh.quads),
        "n_triangles": len(mesh.triangles),
        "n_boundary": mesh.n_boundary,
        "n_spine": len(mesh.points) - mesh.n_boundary,
        "n_limbs": len(mesh.limbs),
        "spine_valency": valency,
        "spine_kind": {s: mesh.spine_type(s) for s in valency},
        "loop_lengths": [len(lp) for lp in mesh.loops],
        "euler": euler,
        "euler_total": sum(euler),
    }
