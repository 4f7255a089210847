from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from medialparam.errors import InvalidArgumentError
from medialparam.predicates import incircle, incircle_ccw, orient2d


def sign(x):
    return (x > 0) - (x < 0)


def orient_rational(a, b, c):
    ax, ay, bx, by, cx, cy = map(Fraction, (*a, *b, *c))
    return sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle_rational(a, b, c, d):
    rows = []
    for p in (a, b, c):
        dx, dy = Fraction(p[0]) - Fraction(d[0]), Fraction(p[1]) - Fraction(d[1])
        rows.append((dx, dy, dx * dx + dy * dy))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    det = a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)
    return sign(det)


def test_orient_basic():
    assert orient2d((0, 0), (1, 0), (0, 1)) == 1
    assert orient2d((0, 0), (0, 1), (1, 0)) == -1
    assert orient2d((0, 0), (1, 1), (2, 2)) == 0


def test_orient_collinear_float_trap():
    # classic case where naive evaluation gets the sign wrong
    a, b = (0.5, 0.5), (12.0, 12.0)
    for k in range(50):
        c = (0.5 + k * 2.0**-53, 0.5)
        assert orient2d(a, b, c) == orient_rational(a, b, c)


def test_incircle_basic():
    a, b, c = (0, 0), (1, 0), (0, 1)
    assert incircle(a, b, c, (0.5, 0.5)) == 1
    assert incircle(a, b, c, (1, 1)) == 0
    assert incircle(a, b, c, (2, 2)) == -1


def test_incircle_requires_ccw():
    with pytest.raises(InvalidArgumentError):
        incircle((0, 0), (0, 1), (1, 0), (0.2, 0.2))


def test_near_degenerate_matches_rational(rng):
    for _ in range(2000):
        a, b = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        t = rng.uniform(-1, 2)
        c = a + t * (b - a) + rng.uniform(-1e-14, 1e-14, 2)
        a, b, c = tuple(a), tuple(b), tuple(c)
        assert orient2d(a, b, c) == orient_rational(a, b, c)


def test_near_cocircular_matches_rational(rng):
    for _ in range(1000):
        ang = np.sort(rng.uniform(0, 2 * np.pi, 4))
        pts = [(np.cos(t) + rng.uniform(-1e-14, 1e-14), np.sin(t)) for t in ang]
        a, b, c, d = pts
        if orient2d(a, b, c) != 1:
            continue
        assert incircle_ccw(a, b, c, d) == incircle_rational(a, b, c, d)


coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)


@settings(max_examples=300, deadline=None)
@given(point, point, point)
def test_orient_property(a, b, c):
    s = orient2d(a, b, c)
    assert s == orient_rational(a, b, c)
    assert orient2d(b, c, a) == s
    assert orient2d(b, a, c) == -s


@settings(max_examples=300, deadline=None)
@given(point, point, point, point)
def test_incircle_property(a, b, c, d):
    if orient_rational(a, b, c) <= 0:
        return
    assert incircle_ccw(a, b, c, d) == incircle_rational(a, b, c, d)
