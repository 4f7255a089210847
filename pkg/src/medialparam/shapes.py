"""Builders for common G1 Bezier domains (circles, capsules, stars, ...)."""
from __future__ import annotations

import math

import numpy as np

from .curves import CurveLoop, DomainSpec


def arc_segments(center, radius, a0, a1, max_sweep=math.pi / 2):
    """Cubic approximation of a circular arc from angle ``a0`` to ``a1``.

    The arc runs counter-clockwise when ``a1 > a0`` and clockwise otherwise.
    """
    cx, cy = center
    sweep = a1 - a0
    n = max(1, int(math.ceil(abs(sweep) / max_sweep - 1e-12)))
    step = sweep / n
    k = 4.0 / 3.0 * math.tan(step / 4.0)
    segs = []
    for i in range(n):
        t0, t1 = a0 + i * step, a0 + (i + 1) * step
        p0 = np.array([cx + radius * math.cos(t0), cy + radius * math.sin(t0)])
        p3 = np.array([cx + radius * math.cos(t1), cy + radius * math.sin(t1)])
        d0 = np.array([-math.sin(t0), math.cos(t0)]) * radius * k
        d1 = np.array([-math.sin(t1), math.cos(t1)]) * radius * k
        segs.append([p0, p0 + d0, p3 - d1, p3])
    return segs


def line_segment(p, q):
    p, q = np.asarray(p, float), np.asarray(q, float)
    return [p, p + (q - p) / 3.0, p + 2.0 * (q - p) / 3.0, q]


def circle(radius=1.0, center=(0.0, 0.0), role="outer", start=0.0) -> CurveLoop:
    segs = arc_segments(center, radius, start, start + 2 * math.pi)
    loop = CurveLoop(np.array(segs), "outer")
    return loop if role == "outer" else loop.reversed().with_role("hole")


def capsule(half_length=1.0, radius=1.0, max_sweep=math.pi / 16) -> CurveLoop:
    """Stadium around the segment y = 0, |x| <= half_length (starts at a join).

    The caps use short cubic pieces (radial error about 1e-9 at the default
    sweep) so the analytic medial segment is a sharp reference.
    """
    a, r = half_length, radius
    segs = [line_segment((-a, -r), (a, -r))]
    segs += arc_segments((a, 0.0), r, -math.pi / 2, math.pi / 2, max_sweep)
    segs.append(line_segment((a, r), (-a, r)))
    segs += arc_segments((-a, 0.0), r, math.pi / 2, 3 * math.pi / 2, max_sweep)
    return CurveLoop(np.array(segs), "outer")


def from_parametric(fn, dfn, n_segments, role="outer") -> CurveLoop:
    """Hermite (C1) cubic interpolation of a closed curve ``fn(t)``, t in [0, 2pi).

    ``dfn`` is the derivative.  The loop is reversed afterwards if needed so
    that outer loops are CCW and holes CW.
    """
    ts = np.linspace(0.0, 2 * math.pi, n_segments + 1)
    h = ts[1] - ts[0]
    segs = []
    for t0, t1 in zip(ts[:-1], ts[1:]):
        p0, p1 = np.asarray(fn(t0), float), np.asarray(fn(t1 % (2 * math.pi)), float)
        d0, d1 = np.asarray(dfn(t0), float), np.asarray(dfn(t1 % (2 * math.pi)), float)
        segs.append([p0, p0 + d0 * h / 3.0, p1 - d1 * h / 3.0, p1])
    segs = np.array(segs)
    segs[-1, 3] = segs[0, 0]
    loop = CurveLoop(segs, "outer")
    ccw = loop.orientation == "CCW"
    if (role == "outer") != ccw:
        loop = loop.reversed()
    return loop.with_role(role)


def ellipse(a, b, center=(0.0, 0.0), angle=0.0, role="outer", n_segments=16) -> CurveLoop:
    cx, cy = center
    ca, sa = math.cos(angle), math.sin(angle)

    def fn(t):
        x, y = a * math.cos(t), b * math.sin(t)
        return (cx + ca * x - sa * y, cy + sa * x + ca * y)

    def dfn(t):
        x, y = -a * math.sin(t), b * math.cos(t)
        return (ca * x - sa * y, sa * x + ca * y)

    return from_parametric(fn, dfn, n_segments, role)


def star(lobes=5, radius=2.0, amplitude=0.35, center=(0.0, 0.0), role="outer",
         n_segments=60) -> CurveLoop:
    """Smooth star ``r(t) = radius * (1 + amplitude * cos(lobes * t))``."""
    cx, cy = center

    def r(t):
        return radius * (1 + amplitude * math.cos(lobes * t))

    def dr(t):
        return -radius * amplitude * lobes * math.sin(lobes * t)

    def fn(t):
        return (cx + r(t) * math.cos(t), cy + r(t) * math.sin(t))

    def dfn(t):
        return (dr(t) * math.cos(t) - r(t) * math.sin(t),
                dr(t) * math.sin(t) + r(t) * math.cos(t))

    return from_parametric(fn, dfn, n_segments, role)


def rounded_polygon(vertices, radius, role="outer") -> CurveLoop:
    """Polygon with every corner replaced by a tangent circular arc."""
    v = np.asarray(vertices, dtype=float)
    area = 0.5 * np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1])
    if area < 0:
        v = v[::-1]
    n = len(v)
    corners = []
    for i in range(n):
        prev, cur, nxt = v[i - 1], v[i], v[(i + 1) % n]
        d_in = (cur - prev) / np.linalg.norm(cur - prev)
        d_out = (nxt - cur) / np.linalg.norm(nxt - cur)
        turn = math.atan2(d_in[0] * d_out[1] - d_in[1] * d_out[0], float(np.dot(d_in, d_out)))
        cut = radius * math.tan(abs(turn) / 2.0)
        t_in, t_out = cur - d_in * cut, cur + d_out * cut
        # centre lies on the left for convex (left) turns, right for reflex turns
        side = 1.0 if turn > 0 else -1.0
        normal = np.array([-d_in[1], d_in[0]]) * side
        center = t_in + normal * radius
        a0 = math.atan2(t_in[1] - center[1], t_in[0] - center[0])
        corners.append((t_in, t_out, center, a0, turn))
    segs = []
    for i in range(n):
        t_in, t_out, center, a0, turn = corners[i]
        segs += arc_segments(center, radius, a0, a0 + turn)
        nxt_in = corners[(i + 1) % n][0]
        if np.linalg.norm(nxt_in - t_out) > 1e-12:
            segs.append(line_segment(t_out, nxt_in))
    segs = np.array(segs)
    for i in range(len(segs)):
        segs[i, 3] = segs[(i + 1) % len(segs), 0]
    loop = CurveLoop(segs, "outer")
    return loop if role == "outer" else loop.reversed().with_role("hole")


# --------------------------------------------------------------------------
# fixture domains


def disk_domain(radius=1.0) -> DomainSpec:
    return DomainSpec([circle(radius)])


def capsule_domain() -> DomainSpec:
    return DomainSpec([capsule(1.0, 1.0)])


def annulus_domain(r_outer=2.0, r_inner=1.0) -> DomainSpec:
    return DomainSpec([circle(r_outer), circle(r_inner, role="hole")])


def star_domain() -> DomainSpec:
    return DomainSpec([star()])


def star_with_hole_domain() -> DomainSpec:
    return DomainSpec([star(radius=2.5, amplitude=0.3), circle(0.6, role="hole")])


def ellipse_with_hole_domain(angle_deg=10.0) -> DomainSpec:
    return DomainSpec([ellipse(4.0, 2.5),
                       ellipse(1.5, 0.7, angle=math.radians(angle_deg), role="hole")])


def l_with_holes_domain() -> DomainSpec:
    outline = rounded_polygon([(0, 0), (6, 0), (6, 2.4), (2.4, 2.4), (2.4, 6), (0, 6)], 0.5)
    holes = [circle(0.45, c, role="hole") for c in ((1.2, 1.2), (4.3, 1.2), (1.2, 4.3))]
    return DomainSpec([outline] + holes)


def three_component_domain() -> DomainSpec:
    """Three disjoint ellipses with perimeters roughly 5 : 2.3 : 1."""
    return DomainSpec([ellipse(5.0, 3.0, center=(0.0, 0.0)),
                       ellipse(2.2, 1.4, center=(9.0, 0.0), angle=0.4),
                       ellipse(1.0, 0.6, center=(8.5, 4.0), angle=-0.3)])


FIXTURES = {
    "capsule": capsule_domain,
    "disk": disk_domain,
    "star": star_domain,
    "star_with_hole": star_with_hole_domain,
    "ellipse_with_hole": ellipse_with_hole_domain,
    "l_with_holes": l_with_holes_domain,
    "three_components": three_component_domain,
}
