import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lslab import geom
from lslab.extremal import exact_grid
from lslab.geom import NORTH, fibonacci_sphere, lebesgue, make_grid, point
from lslab.kernels import MultiplierSpec
from lslab.rng import SplitMix64
from lslab.spectrum import (
    SpectralFunction,
    band_basis,
    band_limit_degree,
    basis_matrix,
    beam,
    beam_closed_form,
    eigenfrequency,
    eigenspace_basis,
    embed,
    evaluate,
    evaluate_at,
    gradient_norm_samples,
    harmonic_extension,
    lp_norm,
    parse_basis,
    projector_closed_form,
    projector_testfn,
    random_band_function,
    zonal,
    zonal_closed_form,
)

C0 = 1 / math.sqrt(4 * math.pi)


def random_points(n, seed):
    return geom.unit(SplitMix64(seed).normal(3 * n).reshape(n, 3))


def test_basis_examples():
    b = band_basis(1)
    assert b.nmax == 0 and b.dim == 1
    b = band_basis(10)
    assert b.nmax == 9 and b.dim == 100
    assert eigenspace_basis(5).dim == 11
    assert parse_basis("band:10") == band_basis(10)
    assert parse_basis("eig:5").label() == "eig:5"
    with pytest.raises(ValueError):
        parse_basis("disc:3")


@given(st.floats(1, 500))
def test_band_membership_is_exact(lam):
    N = band_limit_degree(lam)
    assert N * (N + 1) <= lam * lam < (N + 1) * (N + 2)
    b = band_basis(lam)
    assert b.dim == (N + 1) ** 2
    # ordering: n ascending, k from -n to n
    assert np.all(np.diff(b.degrees) >= 0)
    assert b.index(N, -N) == N * N and b.index(N, N) == (N + 1) ** 2 - 1


def test_constant_function():
    g = make_grid(4, 9)
    f = SpectralFunction(band_basis(1), [1.0])
    assert np.allclose(evaluate(f, g), C0, atol=1e-15)
    assert lp_norm(f, 2, lebesgue(g)) == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(gradient_norm_samples(f, g), 0.0, atol=1e-15)


def test_linearity():
    g = make_grid(20, 41)
    f, h = random_band_function(12, 1), random_band_function(12, 2)
    assert np.max(np.abs(evaluate(f + h, g) - evaluate(f, g) - evaluate(h, g))) < 1e-12
    assert np.max(np.abs(evaluate(2.5 * f, g) - 2.5 * evaluate(f, g))) < 1e-12


def test_grid_synthesis_matches_pointwise():
    f = random_band_function(15, 3)
    for frame in (None, geom.rotation_to(point(0.7, 2.2))):
        g = exact_grid(f.basis.nmax, frame=frame)
        assert np.max(np.abs(evaluate(f, g).ravel() - evaluate_at(f, g.nodes))) < 1e-12


@pytest.mark.parametrize("n", [0, 1, 7, 33, 64])
def test_addition_theorem(n):
    Y = basis_matrix(eigenspace_basis(n), random_points(10, n))
    assert np.max(np.abs(np.sum(np.abs(Y) ** 2, axis=1) - (2 * n + 1) / (4 * math.pi))) < 1e-10


@pytest.mark.parametrize("n", [3, 40, 256])
def test_eigenspace_orthonormal(n):
    b = eigenspace_basis(n)
    g = make_grid(n + 1, 2 * n + 1)
    Y = basis_matrix(b, g.nodes)
    G = (Y.T * g.weights) @ Y.conj()
    assert np.max(np.abs(G - np.eye(b.dim))) < 1e-10


def test_y53_norm():
    b = eigenspace_basis(5)
    c = np.zeros(b.dim)
    c[b.index(5, 3)] = 1.0
    g = make_grid(6, 11)
    assert lp_norm(SpectralFunction(b, c), 2, lebesgue(g)) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("n", [2, 5, 16])
def test_parity(n):
    f = random_band_function(None, n, basis=eigenspace_basis(n))
    x = random_points(10, 100 + n)
    assert np.max(np.abs(evaluate_at(f, -x) - (-1) ** n * evaluate_at(f, x))) < 1e-10


def test_sup_norm_law():
    ns = [16, 32, 64, 128, 256]
    sups = [abs(complex(evaluate_at(zonal(n, NORTH), NORTH))) for n in ns]
    slope = np.polyfit(np.log([eigenfrequency(n) for n in ns]), np.log(sups), 1)[0]
    assert 0.45 <= slope <= 0.55


def test_zonal_examples():
    n = 12
    xi = point(0.8, 1.1)
    Z = zonal(n, xi)
    lam = eigenfrequency(n)
    assert complex(evaluate_at(Z, xi)).real == pytest.approx((2 * n + 1) / (4 * math.pi) / math.sqrt(lam), rel=1e-12)
    assert complex(evaluate_at(Z, -xi)).real == pytest.approx((-1) ** n * complex(evaluate_at(Z, xi)).real, rel=1e-12)
    g = exact_grid(n, oversample=2)
    assert lp_norm(Z, 2, lebesgue(g)) == pytest.approx(math.sqrt((2 * n + 1) / (4 * math.pi) / lam), rel=1e-12)
    pts = random_points(50, 5)
    assert np.max(np.abs(evaluate_at(Z, pts) - zonal_closed_form(n, xi, pts))) < 1e-13
    vals = np.abs(evaluate(zonal(n, NORTH), g))
    assert lp_norm(zonal(n, NORTH), math.inf, lebesgue(g)) <= abs(complex(evaluate_at(zonal(n, NORTH), NORTH))) + 1e-14
    assert vals.max() <= abs(complex(evaluate_at(zonal(n, NORTH), NORTH))) + 1e-14


def test_zonal_l2_limit():
    n = 4096
    assert math.sqrt((2 * n + 1) / (4 * math.pi) / eigenfrequency(n)) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-3)


def test_beam_examples():
    axis = point(0.4, 2.0)
    for n in (5, 64):
        G = beam(n, axis)
        pts = random_points(40, n)
        assert np.max(np.abs(evaluate_at(G, pts) - beam_closed_form(n, axis, pts))) < 1e-12
        g = exact_grid(n, frame=G.frame)
        assert lp_norm(G, 2, lebesgue(g)) == pytest.approx(1.0, abs=1e-10)
        # constant modulus c_n on the great circle, (sin)^n decay off it
        circle = np.array([geom.rotation_to(axis) @ point(math.pi / 2, a) for a in np.linspace(0, 6, 7)])
        mods = np.abs(evaluate_at(G, circle))
        assert np.allclose(mods, mods[0], rtol=1e-12)
        off = geom.rotation_to(axis) @ point(math.pi / 2 - 0.3, 1.0)
        assert abs(complex(evaluate_at(G, off))) == pytest.approx(mods[0] * math.cos(0.3) ** n, rel=1e-10)


def test_beam_tube_mass():
    for n in (64, 256):
        G = beam(n, NORTH)
        w = 3 / math.sqrt(n)
        g = exact_grid(n, geom.Tube(NORTH, w))
        inside = lp_norm(G, 2, geom.region_indicator(geom.Tube(NORTH, w), g)) ** 2
        assert inside >= 0.99


def test_beam_l4_scaling_converges():
    vals = []
    for n in (64, 128, 256):
        g = make_grid(2 * n + 2, 8)
        vals.append(lp_norm(beam(n, NORTH), 4, lebesgue(g)) ** 4 / math.sqrt(n))
    assert abs(vals[2] / vals[1] - 1) < abs(vals[1] / vals[0] - 1) + 1e-3
    assert abs(vals[2] / vals[1] - 1) < 0.01


def test_projector_examples():
    psi = MultiplierSpec.plateau(0.5, 1.0)
    for lam in (16, 32):
        y = point(1.0, 0.3)
        f = projector_testfn(lam, y, psi)
        fy = complex(evaluate_at(f, y)).real
        assert lam**2 / (8 * math.pi) * 0.9 <= fy <= lam**2 / (2 * math.pi)
        pts = random_points(30, lam)
        assert np.max(np.abs(evaluate_at(f, pts) - projector_closed_form(lam, y, psi, pts))) < 1e-11
    hard = MultiplierSpec.hard(1.0)
    f = projector_testfn(10, NORTH, hard)
    assert complex(evaluate_at(f, NORTH)).real == pytest.approx(100 / (4 * math.pi), rel=1e-12)


def test_random_band_function():
    f, g = random_band_function(10, 7), random_band_function(10, 7)
    assert np.array_equal(f.coeffs, g.coeffs)
    assert f.l2_norm() == pytest.approx(1.0, abs=1e-12)
    h = random_band_function(10, 8)
    assert abs(np.vdot(f.coeffs, h.coeffs)) < 0.5


def test_gradient_y10():
    b = eigenspace_basis(1)
    c = np.zeros(3)
    c[b.index(1, 0)] = 1.0
    g = make_grid(6, 8)
    grad = gradient_norm_samples(SpectralFunction(b, c), g)
    expect = math.sqrt(3 / (4 * math.pi)) * np.abs(np.sin(g.theta))[:, None]
    assert np.max(np.abs(grad - expect)) < 1e-14


@pytest.mark.parametrize("lam,seed", [(6, 1), (20, 2), (40, 3)])
def test_gradient_matches_fd(lam, seed):
    f = random_band_function(lam, seed)
    R = geom.rotation_to(point(0.9, 0.4))
    g = make_grid(f.basis.nmax + 2, 2 * f.basis.nmax + 3, frame=R)
    grad = gradient_norm_samples(f, g).ravel()
    idx = np.random.default_rng(seed).choice(g.size, 20, replace=False)
    h = 1e-4
    for i in idx:
        x = g.nodes[i]
        e1 = geom.unit(np.cross(x, [0.3, -0.5, 0.8]))
        e2 = np.cross(x, e1)
        comps = []
        for e in (e1, e2):
            pts = np.array([math.cos(s * h) * x + math.sin(s * h) * e for s in (-2, -1, 1, 2)])
            v = evaluate_at(f, pts)
            comps.append((v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h))
        fd = math.sqrt(sum(abs(c) ** 2 for c in comps))
        assert grad[i] == pytest.approx(fd, rel=1e-6)


def test_harmonic_extension():
    f = random_band_function(8, 4)
    assert np.array_equal(harmonic_extension(f, 0.0).coeffs, f.coeffs)
    b = eigenspace_basis(6)
    c = np.zeros(b.dim)
    c[b.index(6, -2)] = 1.0
    h = harmonic_extension(SpectralFunction(b, c), 0.1)
    assert h.coeffs[b.index(6, -2)].real == pytest.approx(math.exp(0.1 * eigenfrequency(6)), rel=1e-15)
    with pytest.raises(ValueError):
        harmonic_extension(f, 2.0)


def test_embed_preserves_values():
    f = random_band_function(None, 3, basis=eigenspace_basis(4))
    F = embed(f, band_basis(9))
    pts = random_points(20, 1)
    assert np.max(np.abs(evaluate_at(F, pts) - evaluate_at(f, pts))) < 1e-13


def test_json_roundtrip():
    f = beam(7, point(1.0, 1.0))
    g = SpectralFunction.from_json(json.dumps(f.to_json()))
    assert np.array_equal(g.coeffs, f.coeffs) and np.array_equal(g.frame, f.frame)
    h = random_band_function(5, 1)
    doc = h.to_json()
    assert doc["kind"] == "band" and doc["lambda_or_n"] == 5 and "frame" not in doc
    assert np.array_equal(SpectralFunction.from_json(doc).coeffs, h.coeffs)


def test_lp_norm_with_atoms_and_sup():
    g = make_grid(4, 9)
    f = SpectralFunction(band_basis(1), [1.0])
    mu = lebesgue(g).with_atom(NORTH, 3.0)
    assert lp_norm(f, 2, mu) == pytest.approx(math.sqrt(1 + 3 * C0**2), rel=1e-14)
    assert lp_norm(f, math.inf, mu) == pytest.approx(C0, rel=1e-14)
    with pytest.raises(ValueError):
        lp_norm(f, 0.5, mu)


def test_coefficient_validation():
    with pytest.raises(ValueError):
        SpectralFunction(band_basis(2), [1.0])
    with pytest.raises(ValueError):
        SpectralFunction(band_basis(1), [np.nan])


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 20), st.integers(0, 1000))
def test_rotated_frame_equals_rotated_points(n, seed):
    """A function in frame R evaluated at R x equals the frame-free function at x."""
    f = random_band_function(None, seed, basis=eigenspace_basis(n))
    R = geom.random_rotation(np.random.default_rng(seed))
    rot = SpectralFunction(f.basis, f.coeffs, R)
    x = random_points(5, seed)
    assert np.max(np.abs(evaluate_at(rot, x @ R.T) - evaluate_at(f, x))) < 1e-11
