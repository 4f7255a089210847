"""Closed composite cubic Bezier loops, arc-length sampling and winding numbers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import AmbiguousPointError, InvalidArgumentError, ValidationError

EQUAL_COUNT = "equal"
LENGTH_DEPENDENT = "length"

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_TABLE_INTERVALS = 32


# --------------------------------------------------------------------------
# single cubic segments


def bezier_point(ctrl: np.ndarray, t):
    """Evaluate cubic Bezier(s) ``ctrl`` (4, 2) at scalar or array ``t``."""
    t = np.asarray(t, dtype=float)[..., None]
    mt = 1.0 - t
    return (mt**3 * ctrl[0] + 3 * mt**2 * t * ctrl[1]
            + 3 * mt * t**2 * ctrl[2] + t**3 * ctrl[3])


def bezier_derivative(ctrl: np.ndarray, t):
    t = np.asarray(t, dtype=float)[..., None]
    mt = 1.0 - t
    return 3.0 * (mt**2 * (ctrl[1] - ctrl[0]) + 2 * mt * t * (ctrl[2] - ctrl[1])
                  + t**2 * (ctrl[3] - ctrl[2]))


def _speed(ctrl, t):
    d = bezier_derivative(ctrl, t)
    return np.hypot(d[..., 0], d[..., 1])


def _gl(ctrl, a, b):
    half = 0.5 * (b - a)
    return half * float(np.dot(_GL_W, _speed(ctrl, half * _GL_X + 0.5 * (a + b))))


def _adaptive_length(ctrl, a, b, whole, tol, depth=0):
    m = 0.5 * (a + b)
    left, right = _gl(ctrl, a, m), _gl(ctrl, m, b)
    if abs(left + right - whole) <= tol or depth > 30:
        return left + right
    return (_adaptive_length(ctrl, a, m, left, 0.5 * tol, depth + 1)
            + _adaptive_length(ctrl, m, b, right, 0.5 * tol, depth + 1))


def segment_length(ctrl: np.ndarray, a: float = 0.0, b: float = 1.0,
                   rtol: float = 1e-9) -> float:
    """Arc length of a cubic between parameters ``a`` and ``b``.

    Adaptive Gauss-Legendre subdivision; ``rtol`` is relative to the result.
    """
    if b <= a:
        return 0.0
    whole = _gl(ctrl, a, b)
    scale = max(whole, float(np.abs(ctrl[1:] - ctrl[:-1]).sum()) * (b - a))
    return _adaptive_length(ctrl, a, b, whole, rtol * scale)


def split_bezier(ctrl: np.ndarray, t: float = 0.5):
    p01 = (1 - t) * ctrl[0] + t * ctrl[1]
    p12 = (1 - t) * ctrl[1] + t * ctrl[2]
    p23 = (1 - t) * ctrl[2] + t * ctrl[3]
    p012 = (1 - t) * p01 + t * p12
    p123 = (1 - t) * p12 + t * p23
    mid = (1 - t) * p012 + t * p123
    return (np.array([ctrl[0], p01, p012, mid]),
            np.array([mid, p123, p23, ctrl[3]]))


# --------------------------------------------------------------------------
# loops and domains


@dataclass(frozen=True, eq=False)
class CurveLoop:
    """Closed G1 chain of cubic Bezier segments.

    ``segments`` has shape (k, 4, 2).  ``role`` is ``"outer"`` or ``"hole"``;
    outer loops run counter-clockwise and holes clockwise so that the bounded
    material is always on the left.
    """

    segments: np.ndarray
    role: str = "outer"
    _tables: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        segs = np.array(self.segments, dtype=float)
        if segs.ndim != 3 or segs.shape[1:] != (4, 2) or len(segs) == 0:
            raise ValidationError("segments must be an array of shape (k, 4, 2)")
        if not np.all(np.isfinite(segs)):
            raise ValidationError("non-finite control point")
        if self.role not in ("outer", "hole"):
            raise ValidationError(f"unknown curve role {self.role!r}")
        segs.setflags(write=False)
        object.__setattr__(self, "segments", segs)

    def __len__(self):
        return len(self.segments)

    @property
    def signed_area(self) -> float:
        # Green's theorem; 8-point Gauss-Legendre is exact for the degree-5 integrand
        total = 0.0
        u = 0.5 * (_GL_X + 1.0)
        for ctrl in self.segments:
            p = bezier_point(ctrl, u)
            d = bezier_derivative(ctrl, u)
            total += 0.25 * float(np.dot(_GL_W, p[:, 0] * d[:, 1] - p[:, 1] * d[:, 0]))
        return total

    @property
    def orientation(self) -> str:
        return "CCW" if self.signed_area > 0 else "CW"

    def reversed(self) -> "CurveLoop":
        return CurveLoop(self.segments[::-1, ::-1].copy(), self.role)

    def with_role(self, role: str) -> "CurveLoop":
        return CurveLoop(self.segments.copy(), role)

    def _length_tables(self):
        if not self._tables:
            grid = np.linspace(0.0, 1.0, _TABLE_INTERVALS + 1)
            for ctrl in self.segments:
                cum = np.zeros(len(grid))
                for k in range(_TABLE_INTERVALS):
                    cum[k + 1] = cum[k] + segment_length(ctrl, grid[k], grid[k + 1])
                self._tables.append(cum)
        return self._tables

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.array([tab[-1] for tab in self._length_tables()])

    @property
    def perimeter(self) -> float:
        return float(self.segment_lengths.sum())

    def locate_arclength(self, s: float) -> tuple[int, float]:
        """Return (segment, t) at arc length ``s`` from the loop start."""
        tables = self._length_tables()
        seg_cum = np.concatenate([[0.0], np.cumsum([tab[-1] for tab in tables])])
        s = min(max(s, 0.0), seg_cum[-1])
        k = min(int(np.searchsorted(seg_cum, s, side="right")) - 1, len(tables) - 1)
        local = s - seg_cum[k]
        tab, ctrl = tables[k], self.segments[k]
        j = min(int(np.searchsorted(tab, local, side="right")) - 1, _TABLE_INTERVALS - 1)
        t0 = j / _TABLE_INTERVALS
        span = tab[j + 1] - tab[j]
        t = t0 + (local - tab[j]) / span / _TABLE_INTERVALS if span > 0 else t0
        # Newton on L(t) = local
        for _ in range(50):
            err = tab[j] + segment_length(ctrl, t0, t) - local if t >= t0 else \
                tab[j] - segment_length(ctrl, t, t0) - local
            sp = float(_speed(ctrl, t))
            if sp <= 0:
                break
            step = err / sp
            t = min(max(t - step, 0.0), 1.0)
            if abs(step) < 1e-10:
                break
        return k, t

    def point(self, k: int, t: float) -> np.ndarray:
        return bezier_point(self.segments[k], t)

    def tangent(self, k: int, t: float) -> np.ndarray:
        ctrl = self.segments[k]
        d = bezier_derivative(ctrl, t)
        n = math.hypot(d[0], d[1])
        if n < 1e-300:
            # coincident control points: fall back to the chord direction
            d = ctrl[3] - ctrl[0] if t < 0.5 else ctrl[3] - ctrl[0]
            n = math.hypot(d[0], d[1])
        return d / n

    def polyline(self, per_segment: int = 16) -> np.ndarray:
        """Flattened vertices (without repeating the first point)."""
        t = np.linspace(0.0, 1.0, per_segment, endpoint=False)
        return np.concatenate([bezier_point(c, t) for c in self.segments])

    def bbox(self) -> tuple[float, float, float, float]:
        pts = self.segments.reshape(-1, 2)
        return (pts[:, 0].min(), pts[:, 1].min(), pts[:, 0].max(), pts[:, 1].max())


def _segments_cross(a, b, c, d):
    """Proper or touching intersection mask for segment arrays a-b vs c-d."""
    def orient(p, q, r):
        return ((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
                - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return (o1 * o2 <= 0) & (o3 * o4 <= 0) & ~((o1 == 0) & (o2 == 0))


def _closed_polyline_intersects(pa, pb=None):
    """True if closed polylines cross (or ``pa`` crosses itself)."""
    a0, a1 = pa, np.roll(pa, -1, axis=0)
    if pb is None:
        b0, b1 = a0, a1
    else:
        b0, b1 = pb, np.roll(pb, -1, axis=0)
    hit = _segments_cross(a0[:, None], a1[:, None], b0[None, :], b1[None, :])
    if pb is None:
        n = len(pa)
        i, j = np.indices((n, n))
        adjacent = (np.abs(i - j) <= 1) | (np.abs(i - j) == n - 1)
        hit &= ~adjacent
    return bool(hit.any())


def check_loop(loop: CurveLoop, name: str = "loop", g1_tol: float = 1e-6) -> None:
    """Validate closure, G1 joins and simplicity; raise ValidationError."""
    segs = loop.segments
    scale = max(np.ptp(segs[..., 0]), np.ptp(segs[..., 1]), 1e-300)
    k = len(segs)
    for i in range(k):
        cur, nxt = segs[i], segs[(i + 1) % k]
        if np.linalg.norm(cur[3] - nxt[0]) > 1e-9 * scale:
            raise ValidationError(f"{name}: segment {i} does not join segment {(i + 1) % k}")
        t_in = next((cur[3] - cur[j] for j in (2, 1, 0)
                     if np.linalg.norm(cur[3] - cur[j]) > 1e-12 * scale), None)
        t_out = next((nxt[j] - nxt[0] for j in (1, 2, 3)
                      if np.linalg.norm(nxt[j] - nxt[0]) > 1e-12 * scale), None)
        if t_in is None or t_out is None:
            raise ValidationError(f"{name}: degenerate segment at join {i}")
        t_in = t_in / np.linalg.norm(t_in)
        t_out = t_out / np.linalg.norm(t_out)
        cross = t_in[0] * t_out[1] - t_in[1] * t_out[0]
        if abs(cross) > g1_tol or np.dot(t_in, t_out) <= 0:
            raise ValidationError(f"{name}: join {i} -> {(i + 1) % k} is not G1")
    if _closed_polyline_intersects(loop.polyline()):
        raise ValidationError(f"{name}: loop self-intersects")


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """Compact planar region bounded by disjoint simple loops.

    Validation runs eagerly: closure, G1 joins, simplicity, pairwise
    disjointness, orientation (outer CCW, hole CW) and nesting.
    """

    curves: tuple
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        if not self.curves:
            raise ValidationError("domain has no curves")
        if self.validate:
            self._validate()

    def _validate(self):
        polys = []
        for i, loop in enumerate(self.curves):
            check_loop(loop, f"curve {i}")
            want = "CCW" if loop.role == "outer" else "CW"
            if loop.orientation != want:
                raise ValidationError(f"curve {i}: {loop.role} loop must be {want}")
            polys.append(loop.polyline())
        for i in range(len(polys)):
            for j in range(i + 1, len(polys)):
                if _closed_polyline_intersects(polys[i], polys[j]):
                    raise ValidationError(f"curves {i} and {j} intersect")
        for i, loop in enumerate(self.curves):
            others = [c for j, c in enumerate(self.curves) if j != i]
            w = sum(loop_winding(loop.segments[0, 0], c) for c in others) if others else 0
            expected = 1 if loop.role == "hole" else 0
            if w != expected:
                raise ValidationError(
                    f"curve {i}: {loop.role} loop is not nested correctly (winding {w})")

    def __len__(self):
        return len(self.curves)

    def __iter__(self) -> Iterator[CurveLoop]:
        return iter(self.curves)

    def __getitem__(self, i) -> CurveLoop:
        return self.curves[i]

    def bbox(self):
        boxes = np.array([c.bbox() for c in self.curves])
        return (boxes[:, 0].min(), boxes[:, 1].min(), boxes[:, 2].max(), boxes[:, 3].max())

    @property
    def diagonal(self) -> float:
        x0, y0, x1, y1 = self.bbox()
        return math.hypot(x1 - x0, y1 - y0)


# --------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class Sample:
    position: np.ndarray
    tangent: np.ndarray
    curve_id: int
    param: float


@dataclass(frozen=True, eq=False)
class Samples:
    """Struct-of-arrays sample set; ``samples[i]`` yields a :class:`Sample`."""

    positions: np.ndarray
    tangents: np.ndarray
    curve_ids: np.ndarray
    params: np.ndarray

    def __len__(self):
        return len(self.positions)

    def __getitem__(self, i) -> Sample:
        return Sample(self.positions[i], self.tangents[i], int(self.curve_ids[i]),
                      float(self.params[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def loop_indices(self, curve_id: int) -> np.ndarray:
        return np.flatnonzero(self.curve_ids == curve_id)

    @staticmethod
    def concat(parts: Sequence["Samples"]) -> "Samples":
        return Samples(np.concatenate([p.positions for p in parts]),
                       np.concatenate([p.tangents for p in parts]),
                       np.concatenate([p.curve_ids for p in parts]),
                       np.concatenate([p.params for p in parts]))


def sample_curve(curve: CurveLoop, n: int | None = None, strategy: str = EQUAL_COUNT,
                 h_ref: float | None = None, curve_id: int = 0) -> Samples:
    """Equal arc-length samples with analytic unit tangents.

    ``strategy`` is ``"equal"`` (exactly ``n`` samples) or ``"length"``
    (``round(perimeter / h_ref)`` samples, at least 8).
    """
    if strategy == EQUAL_COUNT:
        if n is None or n < 8:
            raise InvalidArgumentError(f"need at least 8 samples per curve, got {n}")
        count = int(n)
    elif strategy == LENGTH_DEPENDENT:
        if h_ref is None or not h_ref > 0:
            raise InvalidArgumentError(f"h_ref must be positive, got {h_ref}")
        count = max(8, int(round(curve.perimeter / h_ref)))
    else:
        raise InvalidArgumentError(f"unknown sampling strategy {strategy!r}")
    perimeter = curve.perimeter
    params = np.arange(count) / count
    pos = np.empty((count, 2))
    tan = np.empty((count, 2))
    for i, frac in enumerate(params):
        k, t = curve.locate_arclength(frac * perimeter)
        pos[i] = curve.point(k, t)
        tan[i] = curve.tangent(k, t)
    return Samples(pos, tan, np.full(count, curve_id, dtype=int), params)


def sample_domain(domain: DomainSpec, n: int, strategy: str = EQUAL_COUNT) -> Samples:
    """Sample every loop.

    With length-dependent sampling ``n`` is the count on the longest loop and
    the other loops get the same target spacing.
    """
    if n is None or n < 8:
        raise InvalidArgumentError(f"need at least 8 samples, got {n}")
    h_ref = None
    if strategy == LENGTH_DEPENDENT:
        h_ref = max(c.perimeter for c in domain) / n
    parts = [sample_curve(c, n, strategy, h_ref, curve_id=i) for i, c in enumerate(domain)]
    return Samples.concat(parts)


# --------------------------------------------------------------------------
# winding numbers


def _chord_angle(ctrl, p):
    a = ctrl[0] - p
    b = ctrl[3] - p
    return math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])


def _segment_angle(ctrl, p, tol, depth=0):
    x0, y0 = ctrl[:, 0].min(), ctrl[:, 1].min()
    x1, y1 = ctrl[:, 0].max(), ctrl[:, 1].max()
    if p[0] < x0 or p[0] > x1 or p[1] < y0 or p[1] > y1:
        # the control hull excludes p, so the curve sweeps the chord's angle
        return _chord_angle(ctrl, p)
    if max(x1 - x0, y1 - y0) <= tol or depth > 60:
        raise AmbiguousPointError(f"point ({p[0]:g}, {p[1]:g}) lies on a boundary curve")
    left, right = split_bezier(ctrl)
    return _segment_angle(left, p, tol, depth + 1) + _segment_angle(right, p, tol, depth + 1)


def loop_winding(p, loop: CurveLoop, tol: float | None = None) -> int:
    p = np.asarray(p, dtype=float)
    if tol is None:
        x0, y0, x1, y1 = loop.bbox()
        tol = 1e-12 * math.hypot(x1 - x0, y1 - y0)
    total = sum(_segment_angle(ctrl, p, tol) for ctrl in loop.segments)
    return int(round(total / (2 * math.pi)))


def winding_number(p, domain: DomainSpec) -> int:
    """Total winding number of ``p`` around all loops of ``domain``.

    ``p`` is inside the compact domain iff the result is 1.  Raises
    :class:`AmbiguousPointError` for points within ``1e-12 * diagonal`` of a
    curve.
    """
    tol = 1e-12 * domain.diagonal
    return sum(loop_winding(p, loop, tol) for loop in domain)


def winding_numbers(points, domain: DomainSpec) -> np.ndarray:
    """Vectorised :func:`winding_number` for an (m, 2) array."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    tol = 1e-12 * domain.diagonal
    total = np.zeros(len(pts))
    for loop in domain:
        for ctrl in loop.segments:
            lo, hi = ctrl.min(axis=0), ctrl.max(axis=0)
            inside = np.all((pts >= lo) & (pts <= hi), axis=1)
            a = ctrl[0] - pts
            b = ctrl[3] - pts
            ang = np.arctan2(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0],
                             a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1])
            for i in np.flatnonzero(inside):
                ang[i] = _segment_angle(ctrl, pts[i], tol)
            total += ang
    return np.rint(total / (2 * math.pi)).astype(int)
