import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lslab import geom
from lslab.geom import NORTH, make_grid
from lslab.lang import ParseError, parse_measure, parse_region


def test_lebesgue():
    g = make_grid(4, 9)
    mu = parse_measure("lebesgue").resolve(10, g)
    assert np.all(mu.density == 1) and not mu.atoms


def test_sum_with_atom():
    g = make_grid(4, 9)
    mu = parse_measure("sum(lebesgue, atom(0,0,1))").resolve(10, g)
    assert mu.total_mass() == pytest.approx(4 * math.pi + 1)
    assert np.array_equal(mu.atom_points[0], NORTH)


def test_scaled_cap_resolves_per_lambda():
    expr = parse_measure("scaled(log-lambda, cap(0,0,inv-lambda))")
    assert expr.axial_breaks(20) == (1 / 20,)
    for lam in (10, 40):
        g = make_grid(16, 8, theta_breaks=expr.axial_breaks(lam))
        mu = expr.resolve(lam, g)
        assert mu.total_mass() == pytest.approx(math.log(lam) * geom.vol_ball(1 / lam), rel=1e-12)


def test_scalar_products_and_forms():
    r = parse_region("cap(0, 0, 2*inv-lambda)").resolve(8)
    assert r.radius == pytest.approx(0.25)
    r = parse_region("cap(pi, 0, const:0.5*pow:-0.5)").resolve(16)
    assert r.radius == pytest.approx(0.125) and np.array_equal(r.center, geom.SOUTH)
    r = parse_region("cap(0,0,inv-log-lambda)").resolve(math.e**2)
    assert r.radius == pytest.approx(0.5)


def test_region_grammar():
    r = parse_region("inter(not(band(0.1, 0.5)), union(tube(1.5707963, 0, 0.2), all))").resolve(10)
    assert isinstance(r, geom.Intersection)
    pts = geom.fibonacci_sphere(200)
    band = geom.Band(0.1, 0.5)
    assert np.array_equal(r.contains(pts), ~band.contains(pts))


@pytest.mark.parametrize(
    "text,pos",
    [
        ("cap(0,0)", 7),
        ("cap(0,0,1", 9),
        ("sphere", 0),
        ("cap(0,0,x)", 8),
        ("all all", 4),
    ],
)
def test_region_errors_report_position(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_region(text)
    assert exc.value.pos == pos
    assert "position" in str(exc.value)


def test_measure_errors():
    with pytest.raises(ParseError):
        parse_measure("scaled(2)")
    with pytest.raises(ParseError):
        parse_measure("atom(0,0)")


@given(st.floats(0.01, 3.1), st.floats(0, 6.2), st.floats(0.01, 3.1))
def test_cap_literals_roundtrip(theta, phi, radius):
    r = parse_region(f"cap({theta!r}, {phi!r}, {radius!r})").resolve()
    assert r.radius == radius
    assert np.allclose(r.center, geom.point(theta, phi))
