"""Exact-sign orientation and incircle predicates.

A floating point evaluation is tried first and accepted when its magnitude
clears a static forward error bound (Shewchuk's "A" bounds).  Otherwise the
determinant is re-evaluated exactly: every double is a dyadic rational, so the
inputs are rescaled to a common power of two and the determinant is computed
with Python integers.
"""
from __future__ import annotations

import sys

from .errors import InvalidArgumentError

_EPS = sys.float_info.epsilon / 2.0  # unit roundoff, 2**-53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _to_ints(*coords: float) -> list[int]:
    ratios = [float(c).as_integer_ratio() for c in coords]
    den = max(d for _, d in ratios)
    return [n * (den // d) for n, d in ratios]


def orient2d_exact(a, b, c) -> int:
    ax, ay, bx, by, cx, cy = _to_ints(a[0], a[1], b[0], b[1], c[0], c[1])
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def orient2d(a, b, c) -> int:
    """Sign of the signed area of triangle ``abc``.

    +1 for counter-clockwise, -1 for clockwise, 0 for collinear points.  The
    sign is exact for all finite inputs.
    """
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    detsum = abs(detleft) + abs(detright)
    if abs(det) > _CCW_BOUND * detsum:
        return 1 if det > 0 else -1
    return orient2d_exact(a, b, c)


def incircle_exact(a, b, c, d) -> int:
    ax, ay, bx, by, cx, cy, dx, dy = _to_ints(a[0], a[1], b[0], b[1],
                                              c[0], c[1], d[0], d[1])
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    return _sign(det)


def _incircle(a, b, c, d) -> int:
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    det = (alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy)
           + clift * (adxbdy - bdxady))
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    if abs(det) > _ICC_BOUND * permanent:
        return 1 if det > 0 else -1
    return incircle_exact(a, b, c, d)


def incircle(a, b, c, d) -> int:
    """+1 if ``d`` is strictly inside the circumcircle of CCW triangle ``abc``.

    Returns 0 for cocircular points and -1 outside.  Raises
    :class:`InvalidArgumentError` when ``abc`` is not counter-clockwise.
    """
    if orient2d(a, b, c) != 1:
        raise InvalidArgumentError("incircle requires a counter-clockwise triangle")
    return _incircle(a, b, c, d)


# used by the triangulator, which already guarantees CCW input
incircle_ccw = _incircle
