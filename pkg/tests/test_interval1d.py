import math

import numpy as np
import pytest

from lslab.experiments import slope_fit
from lslab.interval1d import (
    MODEL,
    IntervalBasis,
    IntervalMeasure,
    carleson2,
    dirichlet_counterexample,
    heat_diag,
    interval_gram,
    lebesgue,
    lp_norm,
    near_boundary_mass,
    near_boundary_sweep,
    neumann_heat_diag,
    simpson_weights,
)


def test_bases():
    assert IntervalBasis("dirichlet", 5.7).dim == 5
    assert IntervalBasis("neumann", 5.7).dim == 6
    with pytest.raises(ValueError):
        IntervalBasis("robin", 3)
    with pytest.raises(ValueError):
        IntervalBasis("neumann", 0.5)


@pytest.mark.parametrize("bc", ["dirichlet", "neumann"])
def test_orthonormal(bc):
    b = IntervalBasis(bc, 16)
    G = interval_gram(b, lebesgue(16))
    assert np.max(np.abs(G - np.eye(b.dim))) < 1e-10


def test_simpson():
    w = simpson_weights(8)
    assert w.sum() == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        simpson_weights(7)


def test_dirichlet_atom_is_invisible():
    b = IntervalBasis("dirichlet", 10)
    G = interval_gram(b, lebesgue(10).with_atom(0.0, 1.0))
    assert np.max(np.abs(G - np.eye(b.dim))) < 1e-10


def test_neumann_rank_one_closed_form():
    b = IntervalBasis("neumann", 10)
    val = carleson2(b, lebesgue(10).with_atom(0.0, 1.0))
    assert val == pytest.approx(1 + 1 / math.pi + 20 / math.pi, abs=1e-10)


def test_counterexample_table():
    lams = [8, 16, 32, 64, 128, 256]
    rows = dirichlet_counterexample(lams)
    assert all(r["model"] == MODEL for r in rows)
    dir_vals = [r["carleson2"] for r in rows if r["bc"] == "dirichlet"]
    assert max(dir_vals) <= 1 + 1e-12
    neu = [r["carleson2"] for r in rows if r["bc"] == "neumann"]
    # excess over Lebesgue is the rank-one term (1 + 2 floor(lam))/pi
    assert slope_fit(lams, np.array(neu) - 1).slope == pytest.approx(1.0, abs=0.05)
    assert dirichlet_counterexample([99])[0]["sparsity_ratio"] == pytest.approx(100.0)
    with pytest.raises(ValueError):
        dirichlet_counterexample([1])


def test_coarse_grid_rejected():
    with pytest.raises(ValueError):
        interval_gram(IntervalBasis("dirichlet", 10), IntervalMeasure(40))


def test_measure_validation():
    with pytest.raises(ValueError):
        IntervalMeasure(4, density=-np.ones(5))
    with pytest.raises(ValueError):
        IntervalMeasure(4, atoms=[(4.0, 1.0)])


def test_near_boundary_examples():
    b = IntervalBasis("dirichlet", 1)
    delta = 0.1
    ratio = near_boundary_mass(b, [1.0], delta, 2)
    assert ratio == pytest.approx(math.sqrt(delta**3 / 3) / math.sqrt(math.pi / 2), rel=2e-3)
    assert ratio < delta
    n = IntervalBasis("neumann", 4)
    c = np.zeros(n.dim)
    c[0] = 1.0
    for p in (2, 4):
        assert near_boundary_mass(n, c, 0.2, p) == pytest.approx((0.2 / (4 * math.pi)) ** (1 / p), rel=1e-12)
    with pytest.raises(ValueError):
        near_boundary_mass(b, [1.0], 1.5, 2)


def test_lp_norm_l2_is_coefficient_norm():
    b = IntervalBasis("neumann", 12)
    c = np.linspace(-1, 1, b.dim)
    assert lp_norm(b, c, 2) == pytest.approx(np.linalg.norm(c), rel=1e-12)


def test_near_boundary_sweep_bounded():
    rows = near_boundary_sweep(n_funcs=10)
    assert len(rows) == 8
    assert all(np.isfinite(r["max_ratio_over_delta"]) and r["max_ratio_over_delta"] < 1 for r in rows)


def test_heat_diag():
    assert heat_diag(50.0, np.array([0.3]))[0] == pytest.approx(1 / math.pi, rel=1e-12)
    rows = neumann_heat_diag([1e-4, 1e-3, 1e-2])
    interior = [r["diag_times_sqrt_t"] for r in rows if r["x"] == pytest.approx(math.pi / 2)]
    for v in interior:
        assert v == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=0.1)
    assert max(interior) / min(interior) <= 4
    d = neumann_heat_diag([1e-3, 1e-1], x_list=(0.0,), bc="dirichlet")
    assert all(r["diag_times_sqrt_t"] == 0.0 for r in d)
    with pytest.raises(ValueError):
        heat_diag(0.0, 1.0)
