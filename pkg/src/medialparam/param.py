"""Medial coordinates (curve, theta, r) on a remeshed domain, and the dipole field.

``r = 1`` on the boundary and ``r = 0`` on the spine, so a disk reduces to
ordinary polar coordinates about its centre.  ``theta`` is normalised arc
length along the reconstructed boundary loop.
"""
from __future__ import annotations

import bisect
import math
import weakref
from dataclasses import dataclass

import numpy as np

from .dipole import SiteSet
from .errors import InvalidArgumentError, InversionError
from .predicates import orient2d
from .remesh import RemeshedMesh

_UV_TOL = 1e-9
_RESIDUAL_TOL = 1e-9
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class ParamPoint:
    curve_id: int
    theta: float
    r: float

    @property
    def angle(self) -> float:
        """``theta`` mapped to [-pi, pi)."""
        return 2.0 * math.pi * self.theta - math.pi


@dataclass(frozen=True)
class FieldSample:
    point: tuple
    value: float


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Regular grid of field values; ``values[j, i]`` belongs to ``(xs[i], ys[j])``."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    @property
    def points(self) -> np.ndarray:
        gx, gy = np.meshgrid(self.xs, self.ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def __iter__(self):
        for (x, y), val in zip(self.points, self.values.ravel()):
            yield FieldSample((float(x), float(y)), float(val))

    def __len__(self):
        return self.values.size


# --------------------------------------------------------------------------
# implicit field


def implicit_F(p, sites: SiteSet, chunk: int = 4096):
    """``min |p - outer site| - min |p - inner site|``.

    Positive inside the domain, negative outside, zero on the reconstructed
    boundary.  Accepts one point or an (m, 2) array.
    """
    if len(sites) == 0:
        raise InvalidArgumentError("empty site set")
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    pts = p.reshape(-1, 2)
    inner, outer = sites.inner, sites.outer
    out = np.empty(len(pts))
    for start in range(0, len(pts), chunk):
        q = pts[start:start + chunk]
        d_out = np.sqrt(np.min(((q[:, None, :] - outer[None]) ** 2).sum(-1), axis=1))
        d_in = np.sqrt(np.min(((q[:, None, :] - inner[None]) ** 2).sum(-1), axis=1))
        out[start:start + chunk] = d_out - d_in
    return float(out[0]) if single else out


def sample_field(sites: SiteSet, frame, resolution: int) -> FieldGrid:
    """Evaluate :func:`implicit_F` on a ``resolution`` x ``resolution`` grid over
    ``frame = (xmin, ymin, xmax, ymax)``."""
    if resolution < 2:
        raise InvalidArgumentError(f"resolution must be >= 2, got {resolution}")
    x0, y0, x1, y1 = frame
    xs, ys = np.linspace(x0, x1, resolution), np.linspace(y0, y1, resolution)
    grid = FieldGrid(xs, ys, np.zeros((resolution, resolution)))
    grid.values[:] = implicit_F(grid.points, sites).reshape(resolution, resolution)
    return grid


# --------------------------------------------------------------------------
# bilinear faces


def forward_bilinear(face_pts, u: float, v: float) -> np.ndarray:
    """Evaluate ``(1-v)((1-u) b0 + u b1) + v((1-u) s0 + u s1)``.

    ``face_pts`` is ``[b0, b1, s1, s0]`` or the triangle ``[b0, b1, s]``,
    which is the same map with ``s0 = s1 = s``.
    """
    f = np.asarray(face_pts, dtype=float)
    b0, b1 = f[0], f[1]
    s1, s0 = (f[2], f[3]) if len(f) == 4 else (f[2], f[2])
    return (1 - v) * ((1 - u) * b0 + u * b1) + v * ((1 - u) * s0 + u * s1)


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _in_unit(x) -> bool:
    return -_UV_TOL <= x <= 1 + _UV_TOL


def _diameter(f) -> float:
    return float(max(np.linalg.norm(a - b) for a in f for b in f))


def inverse_bilinear(face_pts, p) -> tuple[float, float]:
    """Local coordinates ``(u, v)`` of ``p`` in a quad or triangle face.

    For quads the map is inverted through the quadratic in ``u`` obtained by
    eliminating ``v``; triangles use barycentric coordinates (``v`` is the
    weight of the spine apex).  Raises :class:`InversionError` if no root
    lands in the unit square or the residual exceeds 1e-9 times the face
    diameter.
    """
    f = np.asarray(face_pts, dtype=float)
    p = np.asarray(p, dtype=float)
    diam = _diameter(f)
    if len(f) == 3:
        b0, b1, s = f
        det = _cross(b1 - b0, s - b0)
        if det == 0.0:
            raise InversionError("degenerate triangle")
        l1 = _cross(p - b0, s - b0) / det
        v = _cross(b1 - b0, p - b0) / det
        u = 0.0 if v >= 1.0 else l1 / (1.0 - v)
        candidates = [(u, v)]
    elif len(f) == 4:
        b0, b1, s1, s0 = f
        B, C, D = b1 - b0, s0 - b0, b0 - b1 + s1 - s0
        q = p - b0
        a2 = _cross(B, D)
        a1 = _cross(B, C) - _cross(q, D)
        a0 = -_cross(q, C)
        scale = max(abs(a2), abs(a1), abs(a0), 1e-300)
        if abs(a2) <= 1e-12 * scale:
            roots = [-a0 / a1] if a1 != 0.0 else []
        else:
            disc = a1 * a1 - 4 * a2 * a0
            if disc < 0:
                disc = 0.0 if disc > -1e-12 * a1 * a1 else disc
            if disc < 0:
                roots = []
            else:
                sq = math.sqrt(disc)
                qq = -0.5 * (a1 + math.copysign(sq, a1))
                roots = [qq / a2] + ([a0 / qq] if qq != 0.0 else [])
        candidates = []
        for u in roots:
            w = C + u * D
            den = float(np.dot(w, w))
            if den == 0.0:
                continue
            candidates.append((u, float(np.dot(q - u * B, w)) / den))
    else:
        raise InvalidArgumentError("faces have 3 or 4 vertices")

    valid = [(u, v) for u, v in candidates if _in_unit(u) and _in_unit(v)]
    if not valid:
        raise InversionError(f"point {p.tolist()} has no preimage in the face")
    best = None
    for u, v in valid:
        u, v = min(max(u, 0.0), 1.0), min(max(v, 0.0), 1.0)
        res = float(np.linalg.norm(forward_bilinear(f, u, v) - p))
        if best is None or res < best[2]:
            best = (u, v, res)
    if best[2] > _RESIDUAL_TOL * max(diam, 1e-300):
        raise InversionError(f"inverse bilinear residual {best[2]:.3g} too large")
    return best[0], best[1]


# --------------------------------------------------------------------------
# point location


def _point_in_closed_polygon(p, poly) -> bool:
    n = len(poly)
    inside = False
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        if orient2d(a, b, p) == 0 and min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) \
                and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]):
            return True
        if (a[1] > p[1]) != (b[1] > p[1]):
            x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            if p[0] < x:
                inside = not inside
    return inside


def _polygon_distance(p, poly) -> float:
    a = poly
    d = np.roll(poly, -1, axis=0) - a
    t = np.clip(np.einsum("ij,ij->i", p - a, d) / np.maximum(np.einsum("ij,ij->i", d, d), 1e-300), 0, 1)
    return float(np.min(np.linalg.norm(a + t[:, None] * d - p, axis=1)))


class FaceLocator:
    """Uniform grid over face bounding boxes."""

    def __init__(self, mesh: RemeshedMesh):
        self.mesh = mesh
        self.polys = [mesh.points[list(f)] for f in mesh.faces]
        lo = np.array([p.min(axis=0) for p in self.polys])
        hi = np.array([p.max(axis=0) for p in self.polys])
        self.lo, self.hi = lo.min(axis=0), hi.max(axis=0)
        size = float(np.mean(np.max(hi - lo, axis=1)))
        span = self.hi - self.lo
        self.cell = max(size, float(span.max()) / 512, 1e-12)
        self.shape = np.maximum(np.ceil(span / self.cell).astype(int), 1)
        self.buckets: dict = {}
        for f in range(len(self.polys)):
            i0, j0 = self._key(lo[f])
            i1, j1 = self._key(hi[f])
            for i in range(i0, i1 + 1):
                for j in range(j0, j1 + 1):
                    self.buckets.setdefault((i, j), []).append(f)
        self.face_lo, self.face_hi = lo, hi

    def _key(self, p):
        k = np.floor((np.asarray(p) - self.lo) / self.cell).astype(int)
        k = np.clip(k, 0, self.shape - 1)
        return int(k[0]), int(k[1])

    def locate(self, p):
        p = (float(p[0]), float(p[1]))
        if not (self.lo[0] <= p[0] <= self.hi[0] and self.lo[1] <= p[1] <= self.hi[1]):
            return None
        cands = self.buckets.get(self._key(p), ())
        for f in cands:
            if (self.face_lo[f, 0] <= p[0] <= self.face_hi[f, 0]
                    and self.face_lo[f, 1] <= p[1] <= self.face_hi[f, 1]
                    and _point_in_closed_polygon(p, self.polys[f])):
                return f
        # rounding can push a point computed on an outer edge just outside
        tol = _EDGE_TOL * float(np.hypot(*(self.hi - self.lo)))
        near = [f for f in cands if _polygon_distance(p, self.polys[f]) <= tol]
        return min(near) if near else None


_LOCATORS: "weakref.WeakKeyDictionary[RemeshedMesh, FaceLocator]" = weakref.WeakKeyDictionary()


def _locator(mesh: RemeshedMesh) -> FaceLocator:
    loc = _LOCATORS.get(mesh)
    if loc is None:
        loc = _LOCATORS[mesh] = FaceLocator(mesh)
    return loc


def locate_face(p, mesh: RemeshedMesh):
    """Index of the face whose closed region contains ``p`` (lowest index on
    shared edges), or ``None`` outside the mesh.  Points within 1e-12 times the
    mesh diagonal of an outer edge count as on it."""
    return _locator(mesh).locate(p)


# --------------------------------------------------------------------------
# medial coordinates


def _face_offsets(mesh: RemeshedMesh) -> dict:
    offsets, acc = {}, 0
    for loop in mesh.loops:
        offsets[int(mesh.curve_id[loop[0]])] = acc
        acc += len(loop)
    return offsets


def to_param(p, mesh: RemeshedMesh, with_local: bool = False):
    """(curve, theta, r) of a point inside the mesh.

    With ``with_local=True`` returns ``(ParamPoint, face, u, v)``.
    """
    f = locate_face(p, mesh)
    if f is None:
        raise InversionError(f"point {list(map(float, p))} lies outside every face")
    u, v = inverse_bilinear(mesh.face_points(f), p)
    face = mesh.faces[f]
    t0, t1 = float(mesh.theta[face[0]]), float(mesh.theta[face[1]])
    if t1 <= t0:
        t1 += 1.0
    theta = (t0 + u * (t1 - t0)) % 1.0
    q = ParamPoint(int(mesh.curve_id[face[0]]), theta, 1.0 - v)
    return (q, f, u, v) if with_local else q


def eval_param(q: ParamPoint, mesh: RemeshedMesh) -> np.ndarray:
    """Point with medial coordinates ``q`` (inverse of :func:`to_param`)."""
    if not 0.0 <= q.r <= 1.0:
        raise InvalidArgumentError(f"r must lie in [0, 1], got {q.r}")
    offsets = _face_offsets(mesh)
    if q.curve_id not in offsets:
        raise InvalidArgumentError(f"unknown curve {q.curve_id}")
    loop = mesh.loop_of(q.curve_id)
    thetas = [float(t) for t in mesh.theta[loop]]
    theta = q.theta % 1.0
    k = bisect.bisect_right(thetas, theta) - 1
    if k > 0 and thetas[k] == theta:
        k -= 1  # on a limb: take the lower-indexed face
    t0 = thetas[k]
    t1 = thetas[k + 1] if k + 1 < len(thetas) else 1.0
    u = (theta - t0) / (t1 - t0)
    return forward_bilinear(mesh.face_points(offsets[q.curve_id] + k), u, 1.0 - q.r)


def iso_contour(mesh: RemeshedMesh, r: float, curve_id: int) -> list:
    """Polylines of constant ``r`` in the fan of faces attached to ``curve_id``.

    Closed polylines repeat their first point at the end.  ``r = 1`` gives the
    boundary loop and ``r = 0`` the spine (each spine segment once).
    """
    if not 0.0 <= r <= 1.0:
        raise InvalidArgumentError(f"r must lie in [0, 1], got {r}")
    offsets = _face_offsets(mesh)
    if curve_id not in offsets:
        raise InvalidArgumentError(f"unknown curve {curve_id}")
    n = len(mesh.loop_of(curve_id))
    faces = range(offsets[curve_id], offsets[curve_id] + n)
    if r > 0.0:
        v = 1.0 - r
        pts = [forward_bilinear(mesh.face_points(f), 0.0, v) for f in faces]
        return [np.array(pts + [pts[0]])]
    return _spine_polylines(mesh, faces)


def _spine_polylines(mesh, faces):
    adj: dict = {}
    seen_v = []
    for f in faces:
        face = mesh.faces[f]
        spine = [face[2]] if len(face) == 3 else [face[3], face[2]]
        for s in spine:
            if s not in adj:
                adj[s] = set()
                seen_v.append(s)
        if len(spine) == 2:
            a, b = spine
            adj[a].add(b)
            adj[b].add(a)
    used = set()
    lines = []

    def walk(start, nxt):
        path = [start, nxt]
        used.add(frozenset((start, nxt)))
        prev, cur = start, nxt
        while len(adj[cur]) == 2:
            cand = [w for w in adj[cur] if frozenset((cur, w)) not in used]
            if not cand:
                break
            prev, cur = cur, cand[0]
            used.add(frozenset((prev, cur)))
            path.append(cur)
        return path

    for s in seen_v:
        if len(adj[s]) != 2:
            for w in sorted(adj[s]):
                if frozenset((s, w)) not in used:
                    lines.append(walk(s, w))
            if not adj[s]:
                lines.append([s])
    for s in seen_v:  # closed spine loops (annulus-like regions)
        for w in sorted(adj[s]):
            if frozenset((s, w)) not in used:
                lines.append(walk(s, w))
    return [mesh.points[line] for line in lines]
