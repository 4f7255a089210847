"""Delaunay triangulation (Bowyer-Watson) and its clipped Voronoi dual.

Unbounded hull edges are handled with ghost triangles that share a symbolic
vertex at infinity, so every predicate is evaluated on real input points
with the exact routines in :mod:`medialparam.predicates`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, DegenerateSitesError, InvalidArgumentError
from .predicates import incircle_ccw, orient2d

GHOST = -1


@dataclass(frozen=True, eq=False)
class Triangulation:
    """``triangles[t]`` is a CCW index triple, ``adjacency[t][k]`` the triangle
    across edge ``(triangles[t][k], triangles[t][k+1])`` or -1 on the hull."""

    points: np.ndarray
    triangles: np.ndarray
    adjacency: np.ndarray
    seed: int = 0

    def __len__(self):
        return len(self.triangles)

    def edges(self) -> set:
        out = set()
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                out.add((min(u, v), max(u, v)))
        return out


class _BowyerWatson:
    def __init__(self, pts):
        self.p = pts
        self.tv: list[list[int]] = []
        self.tn: list[list[int]] = []
        self.alive: list[bool] = []
        self.last = 0
        self.turn = 0

    def _add(self, a, b, c):
        self.tv.append([a, b, c])
        self.tn.append([-1, -1, -1])
        self.alive.append(True)
        return len(self.tv) - 1

    def init(self, i0, i1, i2):
        if orient2d(self.p[i0], self.p[i1], self.p[i2]) < 0:
            i1, i2 = i2, i1
        t = self._add(i0, i1, i2)
        verts = (i0, i1, i2)
        ghosts = [self._add(verts[(k + 1) % 3], verts[k], GHOST) for k in range(3)]
        for k in range(3):
            self.tn[t][k] = ghosts[k]
            self.tn[ghosts[k]][0] = t
        # ghost k = (v[k+1], v[k], G); its edge (v[k], G) faces edge (G, v[k])
        # of ghost k-1 = (v[k], v[k-1], G)
        for k in range(3):
            g, g_prev = ghosts[k], ghosts[(k - 1) % 3]
            self.tn[g][1] = g_prev
            self.tn[g_prev][2] = g
        self.last = t

    def conflict(self, t, q):
        a, b, c = self.tv[t]
        p = self.p
        if c == GHOST:
            o = orient2d(p[a], p[b], q)
            if o > 0:
                return True
            if o < 0:
                return False
            pa, pb = p[a], p[b]
            ex, ey = pb[0] - pa[0], pb[1] - pa[1]
            return ((q[0] - pa[0]) * ex + (q[1] - pa[1]) * ey > 0
                    and (q[0] - pb[0]) * ex + (q[1] - pb[1]) * ey < 0)
        return incircle_ccw(p[a], p[b], p[c], q) > 0

    def locate(self, q):
        t = self.last
        p = self.p
        limit = 4 * len(self.tv) + 16
        for _ in range(limit):
            v = self.tv[t]
            if v[2] == GHOST:
                return t
            self.turn = (self.turn + 1) % 3
            moved = False
            for j in range(3):
                k = (j + self.turn) % 3
                if orient2d(p[v[k]], p[v[(k + 1) % 3]], q) < 0:
                    t = self.tn[t][k]
                    moved = True
                    break
            if not moved:
                return t
        for t, ok in enumerate(self.alive):  # pragma: no cover - walk safety net
            if ok and self.conflict(t, q):
                return t
        raise DegenerateInputError("point location failed")

    def insert(self, i):
        q = self.p[i]
        seed = self.locate(q)
        if not self.conflict(seed, q):
            v = self.tv[seed]
            if any(vi != GHOST and self.p[vi] == q for vi in v):
                raise DegenerateSitesError(f"site {i} duplicates site "
                                           f"{next(vi for vi in v if vi != GHOST and self.p[vi] == q)}")
            for t, ok in enumerate(self.alive):  # pragma: no cover
                if ok and self.conflict(t, q):
                    seed = t
                    break
            else:
                raise DegenerateInputError(f"no conflict triangle for site {i}")
        cavity = {seed}
        stack = [seed]
        boundary = []
        while stack:
            t = stack.pop()
            for k in range(3):
                n = self.tn[t][k]
                if n in cavity:
                    continue
                if self.conflict(n, q):
                    cavity.add(n)
                    stack.append(n)
                else:
                    boundary.append((t, k, n))
        open_edges = {}
        new = []
        for t, k, n in sorted(boundary):
            v = self.tv[t]
            u, w = v[k], v[(k + 1) % 3]
            if u == GHOST:
                tri = (w, i, GHOST)
            elif w == GHOST:
                tri = (i, u, GHOST)
            else:
                tri = (u, w, i)
            nt = self._add(*tri)
            new.append(nt)
            for kk in range(3):
                a, b = tri[kk], tri[(kk + 1) % 3]
                if (a, b) == (u, w):
                    self.tn[nt][kk] = n
                    nv = self.tv[n]
                    for m in range(3):
                        if nv[m] == w and nv[(m + 1) % 3] == u:
                            self.tn[n][m] = nt
                            break
                else:
                    mate = open_edges.pop((b, a), None)
                    if mate is None:
                        open_edges[(a, b)] = (nt, kk)
                    else:
                        mt, mk = mate
                        self.tn[nt][kk] = mt
                        self.tn[mt][mk] = nt
        if open_edges:
            raise DegenerateInputError("cavity retriangulation left unmatched edges")
        for t in cavity:
            self.alive[t] = False
        self.last = next((t for t in new if self.tv[t][2] != GHOST), self.last)


def delaunay(sites, seed: int = 0) -> Triangulation:
    """Delaunay triangulation of ``sites`` (array (n, 2) or a SiteSet).

    Sites are inserted in a random order drawn from ``seed``.  Cocircular
    points are never treated as conflicting, so ties resolve by insertion
    order, which is fixed by the seed.  The result is canonicalised (each
    triangle rotated to start at its smallest index, triangles sorted).
    """
    pts_arr = np.asarray(getattr(sites, "points", sites), dtype=float)
    n = len(pts_arr)
    if n < 3:
        raise DegenerateInputError("need at least 3 sites")
    pts = [(float(x), float(y)) for x, y in pts_arr]
    order = list(np.random.default_rng(seed).permutation(n))
    i0 = order[0]
    j = next((j for j in range(1, n) if pts[order[j]] != pts[i0]), None)
    if j is None:
        raise DegenerateInputError("all sites coincide")
    order[1], order[j] = order[j], order[1]
    j = next((j for j in range(2, n) if orient2d(pts[order[0]], pts[order[1]], pts[order[j]]) != 0), None)
    if j is None:
        raise DegenerateInputError("all sites are collinear")
    order[2], order[j] = order[j], order[2]

    bw = _BowyerWatson(pts)
    bw.init(order[0], order[1], order[2])
    for i in order[3:]:
        bw.insert(int(i))

    live = [t for t, ok in enumerate(bw.alive) if ok and bw.tv[t][2] != GHOST]
    canon = []
    for t in live:
        v = bw.tv[t]
        r = v.index(min(v))
        canon.append((tuple(v[r:] + v[:r]), t, r))
    canon.sort()
    new_id = {t: k for k, (_, t, _) in enumerate(canon)}
    tris = np.array([c[0] for c in canon], dtype=int).reshape(-1, 3)
    adj = np.full((len(canon), 3), -1, dtype=int)
    for k, (_, t, r) in enumerate(canon):
        for m in range(3):
            nb = bw.tn[t][(m + r) % 3]
            adj[k, m] = new_id.get(nb, -1)
    return Triangulation(pts_arr.copy(), tris, adj, seed)


def circumcenter(a, b, c) -> np.ndarray:
    bx, by = b[0] - a[0], b[1] - a[1]
    cx, cy = c[0] - a[0], c[1] - a[1]
    d = 2.0 * (bx * cy - by * cx)
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    return np.array([a[0] + (cy * b2 - by * c2) / d, a[1] + (bx * c2 - cx * b2) / d])


# --------------------------------------------------------------------------
# Voronoi dual


@dataclass(frozen=True, eq=False)
class VoronoiTess:
    """Clipped Voronoi tessellation.

    ``edges[e] = (va, vb, cell_left, cell_right)``; ``cell_right`` is -1 for
    edges on the clipping frame.  ``cells[c]`` is the CCW vertex loop of site
    ``c`` and ``cell_edges[c][k]`` the edge leaving ``cells[c][k]``.
    ``vert_sites[v]`` lists the sites defining a circumcentre vertex and is
    empty for frame-clip vertices and frame corners.
    """

    sites: np.ndarray
    verts: np.ndarray
    vert_sites: list
    edges: np.ndarray
    cells: list
    cell_edges: list
    frame: tuple
    circumcenters: np.ndarray
    triangulation: Triangulation = field(repr=False)

    def cell_area(self, c: int) -> float:
        loop = self.verts[self.cells[c]]
        x, y = loop[:, 0], loop[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def frame_area(self) -> float:
        x0, y0, x1, y1 = self.frame
        return (x1 - x0) * (y1 - y0)

    def with_vertex(self, v: int, position) -> "VoronoiTess":
        verts = self.verts.copy()
        verts[v] = position
        return VoronoiTess(self.sites, verts, self.vert_sites, self.edges, self.cells,
                           self.cell_edges, self.frame, self.circumcenters, self.triangulation)


def _clip(p, d, smin, smax, frame):
    """Liang-Barsky clip of ``p + s d`` to the frame; returns (s0, s1) or None."""
    x0, y0, x1, y1 = frame
    s0, s1 = smin, smax
    for pk, dk, lo, hi in ((p[0], d[0], x0, x1), (p[1], d[1], y0, y1)):
        if dk == 0.0:
            if pk < lo or pk > hi:
                return None
            continue
        a, b = (lo - pk) / dk, (hi - pk) / dk
        if a > b:
            a, b = b, a
        s0, s1 = max(s0, a), min(s1, b)
        if s0 > s1:
            return None
    return s0, s1


def _perimeter_param(pt, frame):
    x0, y0, x1, y1 = frame
    w, h = x1 - x0, y1 - y0
    x, y = pt
    dists = (abs(y - y0), abs(x - x1), abs(y - y1), abs(x - x0))
    side = int(np.argmin(dists))
    if side == 0:
        return x - x0
    if side == 1:
        return w + (y - y0)
    if side == 2:
        return w + h + (x1 - x)
    return 2 * w + h + (y1 - y)


def _frame_edges(ring, frame_hits, verts, pts):
    """Frame segments between consecutive ring vertices, with owning cells.

    Ownership is seeded by a nearest-site query at the midpoint of the longest
    segment, then carried around the ring: crossing a frame vertex swaps the
    owner to the other cell of each Voronoi edge ending there.  This avoids
    nearest-site ties on tiny segments near frame corners.
    """
    m = len(ring)
    lengths = [np.linalg.norm(verts[ring[(k + 1) % m][1]] - verts[ring[k][1]]) for k in range(m)]
    k0 = int(np.argmax(lengths))
    va, vb = ring[k0][1], ring[(k0 + 1) % m][1]
    mid = 0.5 * (verts[va] + verts[vb])
    owner = int(np.argmin(np.sum((pts - mid) ** 2, axis=1)))
    out = []
    for j in range(m):
        k = (k0 + j) % m
        va, vb = ring[k][1], ring[(k + 1) % m][1]
        out.append((va, vb, owner, -1))
        pairs = list(frame_hits.get(vb, ()))
        while pairs:
            hit = next((p for p in pairs if owner in p), None)
            if hit is None:
                raise DegenerateInputError(f"inconsistent cell ownership at frame vertex {vb}")
            pairs.remove(hit)
            owner = hit[1] if hit[0] == owner else hit[0]
    return out


def voronoi_dual(tri: Triangulation, frame_scale: float = 2.0) -> VoronoiTess:
    """Voronoi diagram dual to ``tri``, clipped to the site bounding box scaled
    by ``frame_scale`` about its centre."""
    if frame_scale < 1.5:
        raise InvalidArgumentError(f"frame_scale must be >= 1.5, got {frame_scale}")
    pts = tri.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    centre, half = 0.5 * (lo + hi), 0.5 * (hi - lo) * frame_scale
    half = np.maximum(half, 1e-3 * half.max())
    frame = (centre[0] - half[0], centre[1] - half[1], centre[0] + half[0], centre[1] + half[1])

    T = len(tri.triangles)
    cc = np.array([circumcenter(*pts[t]) for t in tri.triangles]).reshape(-1, 2)

    verts: list = []
    vert_sites: list = []
    circ_vid: dict = {}

    def circ_vertex(t):
        if t not in circ_vid:
            circ_vid[t] = len(verts)
            verts.append(cc[t])
            vert_sites.append(tuple(int(i) for i in tri.triangles[t]))
        return circ_vid[t]

    on_frame: dict = {}

    def clip_vertex(pt, frame):
        x0, y0, x1, y1 = frame
        key = (min(max(float(pt[0]), x0), x1), min(max(float(pt[1]), y0), y1))
        if key not in on_frame:
            on_frame[key] = len(verts)
            verts.append(np.array(key))
            vert_sites.append(())
        return on_frame[key]

    frame_hits: dict = {}  # frame vertex -> cell pairs of the edges ending there
    edges = []
    for t in range(T):
        for k in range(3):
            n = tri.adjacency[t, k]
            if n != -1 and n < t:
                continue
            a, b = int(tri.triangles[t, k]), int(tri.triangles[t, (k + 1) % 3])
            # walk the bisector of a, b from the right triangle n to t; a
            # point-direction form anchored at the site midpoint stays accurate
            # even when a circumcentre is astronomically far away
            mid = 0.5 * (pts[a] + pts[b])
            u = np.array([-(pts[b, 1] - pts[a, 1]), pts[b, 0] - pts[a, 0]])
            u /= np.hypot(*u)
            s_hi = float(np.dot(cc[t] - mid, u))
            s_lo = -math.inf if n == -1 else min(float(np.dot(cc[n] - mid, u)), s_hi)
            span = _clip(mid, u, s_lo, s_hi, frame)
            if span is None:
                continue
            s0, s1 = span
            if s0 == s_lo:
                va = circ_vertex(n)
            else:
                va = clip_vertex(mid + s0 * u, frame)
                frame_hits.setdefault(va, []).append((a, b))
            if s1 == s_hi:
                vb = circ_vertex(t)
            else:
                vb = clip_vertex(mid + s1 * u, frame)
                frame_hits.setdefault(vb, []).append((a, b))
            edges.append((va, vb, a, b))

    x0, y0, x1, y1 = frame
    corners = [clip_vertex(c, frame) for c in ((x0, y0), (x1, y0), (x1, y1), (x0, y1))]
    ring = sorted((_perimeter_param(verts[v], frame), v) for v in set(frame_hits) | set(corners))
    edges += _frame_edges(ring, frame_hits, verts, pts)

    verts_arr = np.array(verts)
    edges_arr = np.array(edges, dtype=int)
    outgoing: list[dict] = [dict() for _ in range(len(pts))]
    for e, (va, vb, cl, cr) in enumerate(edges_arr):
        outgoing[cl][int(va)] = (int(vb), e)
        if cr >= 0:
            outgoing[cr][int(vb)] = (int(va), e)
    cells, cell_edges = [], []
    for c in range(len(pts)):
        nxt = outgoing[c]
        if not nxt:
            raise DegenerateInputError(f"site {c} has an empty Voronoi cell")
        start = min(nxt)
        loop, loop_e = [start], []
        v = start
        while True:
            if v not in nxt:
                raise DegenerateInputError(f"cell {c} is open at vertex {v}")
            v, e = nxt[v]
            loop_e.append(e)
            if v == start:
                break
            loop.append(v)
            if len(loop) > len(nxt):
                raise DegenerateInputError(f"cell {c} does not close")
        if len(loop_e) != len(nxt):
            raise DegenerateInputError(f"cell {c} boundary is not a single loop")
        cells.append(loop)
        cell_edges.append(loop_e)
    return VoronoiTess(pts, verts_arr, vert_sites, edges_arr, cells, cell_edges, frame, cc, tri)


@dataclass
class VoronoiReport:
    passed: bool
    checked: int
    worst_vertex: int | None
    worst_violation: float
    failures: list
    area_error: float

    def __bool__(self):
        return self.passed


def verify_voronoi(tess: VoronoiTess, rtol: float = 1e-9) -> VoronoiReport:
    """Brute-force check of every circumcentre vertex.

    Each vertex must be equidistant (relative ``rtol``) to its defining sites
    and no site may be strictly closer.  Cells must also tile the frame.
    """
    sites = tess.sites
    worst, worst_v, failures, checked = 0.0, None, [], 0
    for v, defs in enumerate(tess.vert_sites):
        if not defs:
            continue
        checked += 1
        x = tess.verts[v]
        d_def = np.linalg.norm(sites[list(defs)] - x, axis=1)
        r = float(d_def.max())
        if r == 0.0:
            continue
        d_all = float(np.sqrt(np.min(np.sum((sites - x) ** 2, axis=1))))
        viol = max((r - float(d_def.min())) / r, (float(d_def.min()) - d_all) / r)
        if viol > worst:
            worst, worst_v = viol, v
        if viol > rtol:
            failures.append(v)
    area = sum(tess.cell_area(c) for c in range(len(tess.cells)))
    area_err = abs(area - tess.frame_area) / tess.frame_area
    ok = not failures and area_err <= 1e-6
    return VoronoiReport(ok, checked, worst_v, worst, failures, area_err)
