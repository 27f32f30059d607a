import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lslab import geom
from lslab.geom import (
    NORTH,
    SOUTH,
    All,
    Band,
    Cap,
    Complement,
    Condition,
    Intersection,
    Measure,
    SamplingError,
    Tube,
    Union,
    density_report,
    geodesic_distance,
    lebesgue,
    make_grid,
    point,
    region_indicator,
    rotation_to,
    tube_distance,
)

EQUATOR = np.array([1.0, 0.0, 0.0])
angles = st.tuples(st.floats(0, math.pi), st.floats(0, 2 * math.pi))


def test_make_grid_examples():
    assert make_grid(2, 4).weights.sum() == pytest.approx(4 * math.pi, abs=1e-12)
    g = make_grid(16, 33)
    assert g.integrate(np.ones(g.size)) == pytest.approx(4 * math.pi, abs=1e-12)
    z = g.nodes[:, 2]
    assert g.integrate(z**2) == pytest.approx(4 * math.pi / 3, abs=1e-12)
    with pytest.raises(ValueError):
        make_grid(1, 8)
    with pytest.raises(ValueError):
        make_grid(4, 3)


def test_grid_layout_and_weights():
    g = make_grid(6, 11, theta_breaks=(0.4, 2.0))
    assert g.shape == (18, 11)
    assert g.size == 18 * 11 == g.nodes.shape[0]
    assert np.all(g.weights > 0)
    assert np.allclose(np.linalg.norm(g.nodes, axis=1), 1.0, atol=1e-15)
    assert g.weights.sum() == pytest.approx(4 * math.pi, abs=1e-12)


def test_grid_exactness_for_polynomials():
    # degree 9 in x,y,z: x^3 y^2 z^4 integrates to 4pi * 2!!... via known moments
    g = make_grid(8, 12)
    x, y, z = g.nodes.T
    val = g.integrate(x**2 * y**2 * z**2)
    assert val == pytest.approx(4 * math.pi / 105, abs=1e-13)
    assert abs(g.integrate(x**3 * y * z**5)) < 1e-13


def test_frame_rotates_nodes():
    R = rotation_to(geom.unit([1.0, 2.0, -0.5]))
    g = make_grid(5, 9, frame=R)
    assert np.allclose(g.nodes, g.local_nodes @ R.T)
    assert np.allclose(R @ NORTH, geom.unit([1.0, 2.0, -0.5]))


def test_geodesic_distance_examples():
    assert geodesic_distance(NORTH, NORTH) == 0.0
    assert geodesic_distance(NORTH, SOUTH) == pytest.approx(math.pi, abs=1e-15)
    assert geodesic_distance(NORTH, EQUATOR) == pytest.approx(math.pi / 2, abs=1e-15)
    # stable for nearly coincident points where arccos loses everything
    p = point(1e-9, 0.0)
    assert geodesic_distance(NORTH, p) == pytest.approx(1e-9, rel=1e-6)


@given(angles, angles)
def test_geodesic_distance_symmetric_in_range(a, b):
    pa, pb = point(*a), point(*b)
    d = geodesic_distance(pa, pb)
    assert 0 <= d <= math.pi
    assert d == pytest.approx(float(geodesic_distance(pb, pa)), abs=1e-15)
    assert d + float(geodesic_distance(pa, -pb)) == pytest.approx(math.pi, abs=1e-12)


def test_tube_distance_examples():
    assert tube_distance(EQUATOR, NORTH) == pytest.approx(0.0, abs=1e-15)
    assert tube_distance(NORTH, NORTH) == pytest.approx(math.pi / 2, abs=1e-15)
    assert tube_distance(point(math.pi / 3, 0.7), NORTH) == pytest.approx(math.pi / 6, abs=1e-14)


def test_point_snaps_poles():
    assert np.array_equal(point(math.pi, 0.0), SOUTH)
    assert np.array_equal(point(0.0, 1.3), NORTH)


def test_region_indicator_examples():
    g = make_grid(40, 81, theta_breaks=(math.pi / 2,))
    assert region_indicator(All(), g).total_mass() == pytest.approx(4 * math.pi, abs=1e-10)
    assert region_indicator(Cap(NORTH, math.pi / 2), g).total_mass() == pytest.approx(2 * math.pi, abs=1e-10)
    z = point(1.0, 2.0)
    cap = region_indicator(Cap(z, 0.3), g).total_mass()
    comp = region_indicator(Complement(Cap(z, 0.3)), g).total_mass()
    assert cap + comp == pytest.approx(4 * math.pi, abs=1e-12)


def test_cap_mass_matches_closed_form_on_broken_grid():
    s = 0.37
    g = make_grid(20, 8, theta_breaks=(s,))
    assert region_indicator(Cap(NORTH, s), g).total_mass() == pytest.approx(geom.vol_ball(s), abs=1e-12)


def test_cap_mass_converges_off_axis():
    z = point(1.2, 0.4)
    errs = []
    for n in (32, 64, 128):
        g = make_grid(n, 2 * n + 1)
        errs.append(abs(region_indicator(Cap(z, 0.5), g).total_mass() - geom.vol_ball(0.5)))
    assert errs[-1] < 0.02 and errs[-1] < errs[0]


@st.composite
def regions(draw, depth=2):
    kind = draw(st.sampled_from(["cap", "tube", "band", "all"] + (["not", "union", "inter"] if depth else [])))
    if kind == "cap":
        return Cap(point(*draw(angles)), draw(st.floats(0.05, math.pi)))
    if kind == "tube":
        return Tube(point(*draw(angles)), draw(st.floats(0.05, 1.5)))
    if kind == "band":
        a = draw(st.floats(0, 3.0))
        return Band(a, draw(st.floats(a + 0.05, math.pi)))
    if kind == "all":
        return All()
    if kind == "not":
        return Complement(draw(regions(depth - 1)))
    A, B = draw(regions(depth - 1)), draw(regions(depth - 1))
    return Union(A, B) if kind == "union" else Intersection(A, B)


GRID = make_grid(12, 25)


@settings(max_examples=60, deadline=None)
@given(regions())
def test_partition_additivity(region):
    m = region_indicator(region, GRID).total_mass() + region_indicator(Complement(region), GRID).total_mass()
    assert m == pytest.approx(4 * math.pi, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(regions(), st.integers(0, 2**32 - 1))
def test_rotation_commutes_with_membership(region, seed):
    R = geom.random_rotation(np.random.default_rng(seed))
    pts = GRID.nodes
    assert np.array_equal(region.rotate(R).contains(pts @ R.T), region.contains(pts))


def test_region_validation():
    with pytest.raises(ValueError):
        Cap(NORTH, 0.0)
    with pytest.raises(ValueError):
        Tube(NORTH, math.pi / 2)
    with pytest.raises(ValueError):
        Band(1.0, 0.5)


def test_measure_algebra():
    g = make_grid(4, 9)
    mu = lebesgue(g).with_atom(NORTH, 2.0)
    assert mu.total_mass() == pytest.approx(4 * math.pi + 2.0)
    assert (mu + mu).total_mass() == pytest.approx(2 * mu.total_mass())
    assert mu.scaled(0.5).total_mass() == pytest.approx(0.5 * mu.total_mass())
    assert lebesgue(g).is_axisymmetric()
    assert not mu.is_axisymmetric()
    assert not region_indicator(Cap(EQUATOR, 1.0), g).is_axisymmetric()
    with pytest.raises(ValueError):
        Measure(g, -np.ones(g.size))
    with pytest.raises(ValueError):
        lebesgue(g) + lebesgue(make_grid(4, 10))


def test_density_report_examples():
    assert density_report(All(), "dense", 4, 1).worst_ratio == pytest.approx(1.0, abs=1e-12)
    lam = 8.0
    z = point(0.9, 1.9)
    rep = density_report(Complement(Cap(z, 10 / lam)), Condition.REL_DENSE, lam, 1)
    assert rep.worst_ratio == 0.0
    # pointwise membership: the error is a boundary-cell effect, O(grid spacing / radius)
    errs = []
    for n in (64, 256):
        g = make_grid(n, 2 * n + 1)
        errs.append(abs(density_report(lebesgue(g), "sparse", 4, 1, centers=1000).worst_ratio - 1.0))
    assert errs[1] < 0.01 and errs[1] < errs[0] / 4


def test_density_report_reliability_and_errors():
    rep = density_report(All(), "dense", 4, 1)
    assert rep.reliable and rep.n_centers > 0
    explicit = density_report(All(), "dense", 4, 1, centers=np.array([NORTH]))
    assert not explicit.reliable
    with pytest.raises(SamplingError):
        density_report(All(), "dense", 4, 1, centers=10)
    with pytest.raises(SamplingError):
        density_report(All(), "dense", 1e4, 1)
    with pytest.raises(ValueError):
        density_report(All(), "dense", 0.5, 1)


def test_symdense_sums_antipodal_balls():
    assert density_report(All(), "symdense", 4, 1).worst_ratio == pytest.approx(2.0, abs=1e-12)
    hemi = Cap(NORTH, math.pi / 2)
    # a ball and its antipode always see complementary halves
    assert density_report(hemi, "symdense", 4, 1).worst_ratio == pytest.approx(1.0, abs=0.02)
    assert density_report(hemi, "dense", 4, 1).worst_ratio == 0.0


def test_density_report_rotation_invariant():
    region = Union(Cap(point(0.4, 0.3), 0.6), Tube(point(1.0, 2.0), 0.2))
    base = density_report(region, "dense", 6, 1, centers=np.array([point(0.5, 0.2), point(2.0, 1.0)]))
    for seed in range(3):
        R = geom.random_rotation(np.random.default_rng(seed))
        pts = np.array([point(0.5, 0.2), point(2.0, 1.0)]) @ R.T
        rot = density_report(region.rotate(R), "dense", 6, 1, centers=pts, frame=R)
        assert rot.worst_ratio == pytest.approx(base.worst_ratio, abs=1e-9)


def test_tgcc_report_on_hemisphere():
    rep = density_report(Cap(NORTH, math.pi / 2), "tgcc", 64, 1, resolution=(8, 256))
    # every great circle spends half its length in a hemisphere
    assert rep.worst_ratio == pytest.approx(0.5, abs=0.02)


def test_tube_volume_law():
    for lam in (1e2, 1e4, 1e6):
        w = lam**-0.5
        assert geom.vol_tube(w) * math.sqrt(lam) / (4 * math.pi) == pytest.approx(1.0, rel=1 / lam)


def test_report_row_fields():
    row = density_report(All(), "dense", 4, 1).as_row()
    assert set(row) >= {"condition", "lambda", "r", "worst_ratio", "witness_theta", "witness_phi", "reliable"}
