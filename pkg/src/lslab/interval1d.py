"""Boundary-condition model on ``[0, pi]`` with explicit eigenfunctions.

Dirichlet modes ``sqrt(2/pi) sin(kx)``, ``k = 1..floor(lam)``; Neumann modes
``1/sqrt(pi)`` and ``sqrt(2/pi) cos(kx)``, ``k = 1..floor(lam)``.  The band
uses eigenfrequency ``k`` exactly.  Every table this module emits carries
``model=interval-1d``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from lslab.linalg import hermitian_eigs
from lslab.rng import SplitMix64
from lslab.specfun import gauss_legendre_nodes

MODEL = "interval-1d"
BCS = ("dirichlet", "neumann")


@dataclass(frozen=True)
class IntervalBasis:
    bc: str
    lam: float

    def __post_init__(self):
        if self.bc not in BCS:
            raise ValueError(f"boundary condition must be one of {BCS}")
        if self.lam < 1:
            raise ValueError("band limit must be >= 1")

    @property
    def frequencies(self):
        top = int(math.floor(self.lam))
        return np.arange(1, top + 1) if self.bc == "dirichlet" else np.arange(0, top + 1)

    @property
    def dim(self):
        return self.frequencies.size

    def evaluate(self, x):
        """``E[i, j] = e_j(x_i)``."""
        x = np.asarray(x, dtype=float)
        k = self.frequencies
        if self.bc == "dirichlet":
            return math.sqrt(2.0 / math.pi) * np.sin(np.outer(x, k))
        E = math.sqrt(2.0 / math.pi) * np.cos(np.outer(x, k))
        E[:, 0] = 1.0 / math.sqrt(math.pi)
        return E


def simpson_weights(m):
    """Composite Simpson weights on ``m`` (even) intervals of ``[0, pi]``."""
    if m < 2 or m % 2:
        raise ValueError("Simpson needs an even number of intervals")
    h = math.pi / m
    w = np.full(m + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * h / 3.0


@dataclass
class IntervalMeasure:
    """Density samples on the uniform grid of ``n_intervals`` + atoms ``(z, mass)``."""

    n_intervals: int
    density: np.ndarray = None
    atoms: list = field(default_factory=list)

    def __post_init__(self):
        if self.density is None:
            self.density = np.ones(self.n_intervals + 1)
        self.density = np.asarray(self.density, dtype=float)
        if self.density.size != self.n_intervals + 1 or np.any(self.density < 0):
            raise ValueError("density must be nonnegative with one sample per grid point")
        if any(m < 0 or not 0 <= z <= math.pi for z, m in self.atoms):
            raise ValueError("atoms need mass >= 0 and position in [0, pi]")

    @property
    def x(self):
        return np.linspace(0.0, math.pi, self.n_intervals + 1)

    def with_atom(self, z, mass):
        return IntervalMeasure(self.n_intervals, self.density, self.atoms + [(float(z), float(mass))])


def lebesgue(lam, factor=8):
    """Lebesgue measure on the smallest admissible grid for band ``lam``."""
    m = factor * max(int(math.floor(lam)), 1)
    return IntervalMeasure(m + (m % 2))


def interval_gram(basis, measure):
    """``G_jk = int e_j e_k dmu`` (real symmetric)."""
    if measure.n_intervals < 8 * int(math.floor(basis.lam)):
        raise ValueError("interval grid must have >= 8*floor(lam) intervals")
    E = basis.evaluate(measure.x)
    w = simpson_weights(measure.n_intervals) * measure.density
    G = (E.T * w) @ E
    if measure.atoms:
        z = np.array([a for a, _ in measure.atoms])
        m = np.array([b for _, b in measure.atoms])
        Ea = basis.evaluate(z)
        G += (Ea.T * m) @ Ea
    return 0.5 * (G + G.T)


def carleson2(basis, measure):
    return float(hermitian_eigs(interval_gram(basis, measure))[-1])


def sparsity_ratio(lam, z=0.0, mass=1.0):
    """``mu(B(z, 1/lam)) / vol(B(z, 1/lam))`` for ``mu = dV + mass*delta_z`` at the endpoint."""
    r = 1.0 / lam
    return (r + mass) / r


def dirichlet_counterexample(lam_list, z=0.0):
    """Carleson constants of ``dV + delta_z`` under both boundary conditions."""
    rows = []
    for lam in lam_list:
        if lam < 2:
            raise ValueError("lambda must be >= 2")
        mu = lebesgue(lam).with_atom(z, 1.0)
        for bc in BCS:
            rows.append(
                {
                    "model": MODEL,
                    "bc": bc,
                    "lambda": float(lam),
                    "carleson2": carleson2(IntervalBasis(bc, lam), mu),
                    "sparsity_ratio": sparsity_ratio(lam, z),
                }
            )
    return rows


def _gl_panels(a, b, panels, q=32):
    x, w = gauss_legendre_nodes(q)
    edges = np.linspace(a, b, panels + 1)
    h = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + h[:, None] * x).ravel(), (h[:, None] * w).ravel()


def lp_norm(basis, coeffs, p, a=0.0, b=math.pi):
    """``||f||_{L^p(a, b)}`` by panel Gauss-Legendre (panels of width <= 1/(2 lam))."""
    panels = max(1, int(math.ceil((b - a) * 2.0 * basis.lam)))
    x, w = _gl_panels(a, b, panels)
    f = basis.evaluate(x) @ np.asarray(coeffs)
    return float(np.sum(w * np.abs(f) ** p) ** (1.0 / p))


def near_boundary_mass(basis, coeffs, delta, p):
    """``||f||_{L^p(0, delta/lam)} / ||f||_{L^p(0, pi)}``."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return lp_norm(basis, coeffs, p, 0.0, delta / basis.lam) / lp_norm(basis, coeffs, p)


def random_coeffs(basis, seed):
    c = SplitMix64(seed).normal(basis.dim)
    return c / np.linalg.norm(c)


def near_boundary_sweep(lam_list=(16, 64), delta_list=(0.05, 0.2), p_list=(2, 4), n_funcs=50, seed=0):
    """Per configuration: max and median of ``ratio/delta`` over random Dirichlet functions."""
    rows = []
    for lam in lam_list:
        basis = IntervalBasis("dirichlet", lam)
        funcs = [random_coeffs(basis, seed + i) for i in range(n_funcs)]
        for delta in delta_list:
            for p in p_list:
                r = np.array([near_boundary_mass(basis, c, delta, p) / delta for c in funcs])
                rows.append(
                    {
                        "model": MODEL,
                        "lambda": float(lam),
                        "delta": float(delta),
                        "p": float(p),
                        "max_ratio_over_delta": float(r.max()),
                        "median_ratio_over_delta": float(np.median(r)),
                    }
                )
    return rows


def heat_diag(t, x, bc="neumann"):
    """``p(t, x, x) = sum_k exp(-k^2 t) e_k(x)^2`` truncated where ``k^2 t > 40``."""
    if not 0 < t:
        raise ValueError("t must be > 0")
    K = int(math.ceil(math.sqrt(40.0 / t))) + 1
    basis = IntervalBasis(bc, K)
    k = basis.frequencies
    e = basis.evaluate(np.atleast_1d(x))
    return (e**2) @ np.exp(-(k.astype(float) ** 2) * t)


def neumann_heat_diag(t_list, x_list=(0.0, math.pi / 2), bc="neumann"):
    rows = []
    for t in t_list:
        vals = heat_diag(t, np.array(x_list, dtype=float), bc)
        for x, v in zip(x_list, vals):
            rows.append({"model": MODEL, "bc": bc, "t": float(t), "x": float(x), "diag_times_sqrt_t": float(v * math.sqrt(t))})
    return rows
