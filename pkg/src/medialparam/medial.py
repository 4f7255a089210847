"""Edge classification of the labelled Voronoi tessellation.

Cells inherit the In/Out label of their dipole site.  Edges between two Out
cells (and frame edges) are ``OUT``, edges between an In and an Out cell
approximate the boundary, and In-In edges are split into limbs (touching the
boundary) and spine edges (the discrete medial axis).
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .dipole import IN, OUT, SiteSet
from .errors import InvalidArgumentError, TopologyError
from .voronoi import VoronoiTess


class EdgeLabel(IntEnum):
    OUT = 0
    BOUNDARY = 1
    LIMB = 2
    SPINE = 3


class VertexType(IntEnum):
    INTERIOR = 0
    BRANCH = 1
    POLAR = 2


@dataclass(frozen=True)
class BoundaryLoop:
    """Closed boundary cycle of one input curve.

    ``edges[k]`` runs from ``verts[k]`` to ``verts[k+1]`` with the In cell on
    its left, so outer loops come out CCW and holes CW.
    """

    curve_id: int
    verts: list
    edges: list


@dataclass(frozen=True, eq=False)
class LabeledTess:
    """Voronoi graph with per-edge labels.

    ``verts``, ``edges`` and ``cells`` mirror :class:`VoronoiTess` but may be
    re-indexed after short-edge collapse; ``edges[e] = (va, vb, left, right)``.
    """

    tess: VoronoiTess
    sites: SiteSet
    verts: np.ndarray
    edges: np.ndarray
    cells: list
    cell_edges: list
    cell_labels: np.ndarray
    edge_label: np.ndarray
    boundary_loops: list
    spine_vertex_type: dict = field(default_factory=dict)
    epsilon: float | None = None
    n_collapsed: int = 0

    def _idx(self, label):
        return [int(e) for e in np.flatnonzero(self.edge_label == label)]

    @property
    def E_B(self) -> list:
        return self._idx(EdgeLabel.BOUNDARY)

    @property
    def E_L(self) -> list:
        return self._idx(EdgeLabel.LIMB)

    @property
    def E_S(self) -> list:
        return self._idx(EdgeLabel.SPINE)

    @property
    def E_out(self) -> list:
        return self._idx(EdgeLabel.OUT)

    def edge_length(self, e) -> float:
        va, vb = self.edges[e, :2]
        return float(np.linalg.norm(self.verts[va] - self.verts[vb]))

    def spine_valency(self) -> np.ndarray:
        val = np.zeros(len(self.verts), dtype=int)
        for e in self.E_S:
            val[self.edges[e, 0]] += 1
            val[self.edges[e, 1]] += 1
        return val

    def boundary_vertices(self) -> set:
        return {int(v) for e in self.E_B for v in self.edges[e, :2]}

    def boundary_polyline(self, curve_id: int) -> np.ndarray:
        loop = next(b for b in self.boundary_loops if b.curve_id == curve_id)
        return self.verts[loop.verts]

    def vertices_of_type(self, kind: VertexType) -> list:
        return sorted(v for v, t in self.spine_vertex_type.items() if t == kind)


def label_cells(tess: VoronoiTess, sites: SiteSet) -> np.ndarray:
    """Cell ``c`` takes the label of site ``c``."""
    if len(tess.cells) != len(sites):
        raise InvalidArgumentError("tessellation and site set differ in size")
    return np.asarray(sites.labels, dtype=int).copy()


def _edge_labels(edges, cell_labels):
    """OUT / BOUNDARY / In-In classification, then limbs by the boundary-touch rule."""
    labels = np.empty(len(edges), dtype=int)
    for e, (_, _, cl, cr) in enumerate(edges):
        left = cell_labels[cl]
        right = OUT if cr < 0 else cell_labels[cr]
        if left == IN and right == IN:
            labels[e] = EdgeLabel.SPINE
        elif left == OUT and right == OUT:
            labels[e] = EdgeLabel.OUT
        else:
            labels[e] = EdgeLabel.BOUNDARY
    on_boundary = np.zeros(int(edges[:, :2].max()) + 1 if len(edges) else 0, dtype=bool)
    bnd = labels == EdgeLabel.BOUNDARY
    on_boundary[edges[bnd, 0]] = True
    on_boundary[edges[bnd, 1]] = True
    limb = (labels == EdgeLabel.SPINE) & (on_boundary[edges[:, 0]] | on_boundary[edges[:, 1]])
    labels[limb] = EdgeLabel.LIMB
    return labels


def _boundary_loops(edges, labels, cell_labels, sites: SiteSet):
    succ = {}
    for e in np.flatnonzero(labels == EdgeLabel.BOUNDARY):
        va, vb, cl, cr = (int(x) for x in edges[e])
        a, b, cell = (va, vb, cl) if cell_labels[cl] == IN else (vb, va, cr)
        if a in succ:
            raise TopologyError(f"boundary vertex {a} has two outgoing boundary edges "
                                f"({succ[a][1]} and {e}); the curve is under-sampled")
        succ[a] = (b, int(e), cell)
    seen = set()
    by_curve = {}
    for start in sorted(succ):
        if start in seen:
            continue
        verts, loop_edges, curves = [], [], set()
        v = start
        while v not in seen:
            if v not in succ:
                raise TopologyError(f"boundary chain ends at vertex {v}")
            seen.add(v)
            b, e, cell = succ[v]
            verts.append(v)
            loop_edges.append(e)
            curves.add(int(sites.curve_ids[cell]))
            v = b
        if v != start:
            raise TopologyError(f"boundary chain from vertex {start} does not close")
        if len(curves) != 1:
            raise TopologyError(f"boundary cycle at vertex {start} mixes curves {sorted(curves)}")
        cid = curves.pop()
        if cid in by_curve:
            raise TopologyError(f"curve {cid} produced more than one boundary cycle")
        by_curve[cid] = (verts, loop_edges)

    loops = []
    for cid in sorted(set(int(c) for c in sites.curve_ids)):
        if cid not in by_curve:
            raise TopologyError(f"curve {cid} has no boundary cycle")
        verts, loop_edges = by_curve[cid]
        if len(verts) < 3:
            raise TopologyError(f"boundary cycle of curve {cid} has fewer than 3 edges")
        # start at the edge separating the dipole of the curve's first sample
        first = int(np.flatnonzero((sites.curve_ids == cid) & (sites.labels == IN))[0])
        partner = first + 1
        k0 = next((k for k, e in enumerate(loop_edges)
                   if {int(edges[e, 2]), int(edges[e, 3])} == {first, partner}),
                  next((k for k, e in enumerate(loop_edges) if first in edges[e, 2:]), 0))
        loops.append(BoundaryLoop(cid, verts[k0:] + verts[:k0], loop_edges[k0:] + loop_edges[:k0]))
    return loops


def _type_vertices(edges, labels, n_verts):
    val = np.zeros(n_verts, dtype=int)
    spine = labels == EdgeLabel.SPINE
    np.add.at(val, edges[spine, 0], 1)
    np.add.at(val, edges[spine, 1], 1)
    on_boundary = np.zeros(n_verts, dtype=bool)
    bnd = labels == EdgeLabel.BOUNDARY
    on_boundary[edges[bnd, :2].ravel()] = True
    types = {}
    for v in np.flatnonzero(val):
        types[int(v)] = (VertexType.POLAR if val[v] == 1 else
                         VertexType.INTERIOR if val[v] == 2 else VertexType.BRANCH)
    # a limb ending on a vertex with no spine edge: the spine collapsed to a point
    for e in np.flatnonzero(labels == EdgeLabel.LIMB):
        for v in edges[e, :2]:
            if not on_boundary[v] and val[v] == 0:
                types[int(v)] = VertexType.POLAR
    return dict(sorted(types.items()))


def classify_edges(tess: VoronoiTess, cell_labels, sites: SiteSet) -> LabeledTess:
    """Label every edge and assemble one oriented boundary cycle per curve."""
    cell_labels = np.asarray(cell_labels, dtype=int)
    labels = _edge_labels(tess.edges, cell_labels)
    loops = _boundary_loops(tess.edges, labels, cell_labels, sites)
    return LabeledTess(tess, sites, tess.verts.copy(), tess.edges.copy(),
                       [list(c) for c in tess.cells], [list(c) for c in tess.cell_edges],
                       cell_labels, labels, loops)


def default_epsilon(lt: LabeledTess, scale: float = 0.01) -> float:
    """``scale`` times the median limb length."""
    limbs = lt.E_L
    if not limbs:
        raise TopologyError("no limb edges; cannot derive a collapse threshold")
    return scale * float(np.median([lt.edge_length(e) for e in limbs]))


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, v):
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root


def _clean_loop(loop_v, loop_e, find, dead):
    """Drop collapsed edges from a cell loop."""
    out_v, out_e = [], []
    for v, e in zip(loop_v, loop_e):
        if e in dead:
            continue
        out_v.append(find(v))
        out_e.append(e)
    return out_v, out_e


def collapse_short_edges(lt: LabeledTess, epsilon: float | None = None) -> LabeledTess:
    """Merge the endpoints of every non-Out edge shorter than ``epsilon``.

    Edges are processed shortest first; each collapse moves the merged
    vertex to the edge midpoint, which can create new short edges, so the
    queue is refreshed for every edge touching the merged vertex.  An edge is
    skipped if removing it would leave one of its cells with fewer than
    three vertices.  Limb/spine labels are re-derived on the collapsed graph.
    """
    if epsilon is None:
        epsilon = default_epsilon(lt)
    if not epsilon > 0:
        raise InvalidArgumentError(f"epsilon must be positive, got {epsilon}")
    verts = lt.verts.copy()
    edges = lt.edges
    uf = _UnionFind(len(verts))
    incident: dict = {}
    for e, (va, vb, _, _) in enumerate(edges):
        incident.setdefault(int(va), set()).add(e)
        incident.setdefault(int(vb), set()).add(e)
    cell_size = [len(c) for c in lt.cells]
    dead: set = set()

    def length(e):
        a, b = uf.find(int(edges[e, 0])), uf.find(int(edges[e, 1]))
        return float(np.hypot(*(verts[a] - verts[b])))

    candidates = [e for e in range(len(edges)) if lt.edge_label[e] != EdgeLabel.OUT]
    heap = [(length(e), e) for e in candidates]
    heap = [item for item in heap if item[0] < epsilon]
    heapq.heapify(heap)
    while heap:
        ln, e = heapq.heappop(heap)
        if e in dead:
            continue
        cur = length(e)
        if cur != ln:
            if cur < epsilon:
                heapq.heappush(heap, (cur, e))
            continue
        cl, cr = int(edges[e, 2]), int(edges[e, 3])
        if cell_size[cl] <= 3 or (cr >= 0 and cell_size[cr] <= 3):
            continue
        a, b = uf.find(int(edges[e, 0])), uf.find(int(edges[e, 1]))
        verts[a] = 0.5 * (verts[a] + verts[b])
        uf.parent[b] = a
        dead.add(e)
        cell_size[cl] -= 1
        if cr >= 0:
            cell_size[cr] -= 1
        merged = (incident.pop(a, set()) | incident.pop(b, set())) - dead
        # an edge parallel to the collapsed one degenerates as well
        for f in sorted(merged):
            if uf.find(int(edges[f, 0])) == uf.find(int(edges[f, 1])):
                dead.add(f)
                cell_size[int(edges[f, 2])] -= 1
                if edges[f, 3] >= 0:
                    cell_size[int(edges[f, 3])] -= 1
        merged -= dead
        incident[a] = merged
        for f in sorted(merged):
            if lt.edge_label[f] != EdgeLabel.OUT:
                lf = length(f)
                if lf < epsilon:
                    heapq.heappush(heap, (lf, f))

    if not dead:
        return LabeledTess(lt.tess, lt.sites, lt.verts, lt.edges, lt.cells, lt.cell_edges,
                           lt.cell_labels, lt.edge_label, lt.boundary_loops,
                           lt.spine_vertex_type, epsilon, lt.n_collapsed)

    # compact vertices and edges
    roots = sorted({uf.find(int(x)) for x in edges[:, :2].ravel()})
    new_v = {r: k for k, r in enumerate(roots)}
    keep = [e for e in range(len(edges)) if e not in dead]
    new_e = {e: k for k, e in enumerate(keep)}
    new_edges = np.array([(new_v[uf.find(int(edges[e, 0]))], new_v[uf.find(int(edges[e, 1]))],
                           edges[e, 2], edges[e, 3]) for e in keep], dtype=int)
    new_verts = verts[roots]
    cells, cell_edges = [], []
    for c, (lv, le) in enumerate(zip(lt.cells, lt.cell_edges)):
        cv, ce = _clean_loop(lv, le, uf.find, dead)
        if len(cv) < 3:
            raise TopologyError(f"collapse reduced cell {c} below three vertices")
        cells.append([new_v[v] for v in cv])
        cell_edges.append([new_e[e] for e in ce])
    labels = _edge_labels(new_edges, lt.cell_labels)
    loops = _boundary_loops(new_edges, labels, lt.cell_labels, lt.sites)
    return LabeledTess(lt.tess, lt.sites, new_verts, new_edges, cells, cell_edges,
                       lt.cell_labels, labels, loops, {}, epsilon, lt.n_collapsed + len(dead))


def type_spine_vertices(lt: LabeledTess) -> LabeledTess:
    """Type each spine vertex by its spine-only valency (1 polar, 2 interior,
    more than 2 branch).  A limb end with no spine edge at all is polar."""
    types = _type_vertices(lt.edges, lt.edge_label, len(lt.verts))
    return LabeledTess(lt.tess, lt.sites, lt.verts, lt.edges, lt.cells, lt.cell_edges,
                       lt.cell_labels, lt.edge_label, lt.boundary_loops, types,
                       lt.epsilon, lt.n_collapsed)


def build_medial(tess: VoronoiTess, sites: SiteSet, epsilon: float | None = None,
                 epsilon_scale: float = 0.01) -> LabeledTess:
    """label -> classify -> collapse -> type, in one call."""
    lt = classify_edges(tess, label_cells(tess, sites), sites)
    if epsilon is None:
        epsilon = default_epsilon(lt, epsilon_scale)
    return type_spine_vertices(collapse_short_edges(lt, epsilon))
