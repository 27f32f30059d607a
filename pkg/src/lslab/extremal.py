"""Concentration (Gram) matrices and extremal constants over band spaces.

For ``f = sum_a alpha_a Y_a`` the Gram matrix ``G_ab = int Y_a conj(Y_b) dmu``
gives ``int |f|^2 dmu = conj(alpha)^H G conj(alpha)``, so the p = 2 Carleson
(largest) and Logvinenko-Sereda (smallest) constants are extreme eigenvalues
and the extremizer has coefficients ``conj(v)`` for an eigenvector ``v``.
General ``p`` is handled by projected-gradient search on the unit sphere of
coefficients, which only ever produces feasible-point bounds.
"""

import json
from dataclasses import dataclass

import numpy as np

from lslab import specfun
from lslab.geom import lebesgue, make_grid, region_indicator, unit
from lslab.kernels import MultiplierSpec
from lslab.linalg import hermitian_eigs, symmetric_eigs
from lslab.rng import SplitMix64
from lslab.spectrum import (
    SpectralFunction,
    basis_matrix,
    beam,
    evaluate,
    evaluate_at,
    projector_testfn,
    zonal,
)
from lslab.specfun import tri

MODE_SKIP = 1e-14


class GridTooCoarseError(ValueError):
    pass


@dataclass
class ExtremalResult:
    value: float
    extremizer: SpectralFunction
    certified: bool
    iterations: int
    p: float = 2.0
    measure_spec: str = ""

    def to_json(self, extremizer_ref=None):
        return {
            "basis": self.extremizer.basis.label(),
            "measure_spec": self.measure_spec,
            "p": self.p,
            "value": self.value,
            "certified": self.certified,
            "iterations": self.iterations,
            "extremizer_ref": extremizer_ref,
        }

    def save(self, path, extremizer_path=None):
        """Write the summary JSON; the extremizer goes to its own file if given."""
        ref = None
        if extremizer_path is not None:
            with open(extremizer_path, "w") as fh:
                json.dump(self.extremizer.to_json(), fh)
            ref = str(extremizer_path)
        with open(path, "w") as fh:
            json.dump(self.to_json(ref), fh, indent=2)


# -- grids ---------------------------------------------------------------------------------


def exact_grid(nmax, region=None, frame=None, oversample=1, theta_breaks=None):
    """Default policy ``n_theta = N+2``, ``n_phi = 2N+3`` (times ``oversample``).

    When a region's boundaries are latitude circles in the grid frame they
    become panel breaks, so the indicator is integrated exactly.
    """
    frame = np.eye(3) if frame is None else np.asarray(frame, dtype=float)
    if theta_breaks is None:
        theta_breaks = ()
        if region is not None:
            local = region.rotate(frame.T) if not np.array_equal(frame, np.eye(3)) else region
            theta_breaks = local.axial_breaks() or ()
    return make_grid(oversample * (nmax + 2), oversample * (2 * nmax + 3), theta_breaks, frame)


def _check_exact(basis, grid):
    if grid.n_theta < basis.nmax + 1 or grid.n_phi < 2 * basis.nmax + 1:
        raise GridTooCoarseError(
            f"grid ({grid.n_theta}, {grid.n_phi}) is not exact for degree {2 * basis.nmax}"
        )


# -- Gram assembly -------------------------------------------------------------------------


def _theta_table(basis, theta):
    """``T[i, a] = sign_a * N_{n_a}^{|k_a|}(theta_i)``."""
    tab = specfun.alf_table(basis.nmax, theta, nmin=basis.nmin)
    rows = np.array([tri(int(n), abs(int(k))) for n, k in zip(basis.degrees, basis.orders)]) - tri(basis.nmin, 0)
    sign = np.where((basis.orders < 0) & (np.abs(basis.orders) % 2 == 1), -1.0, 1.0)
    return tab[rows].T * sign


def _gram_product(basis, measure):
    """Density part on a grid sharing the basis frame: per-latitude azimuthal
    DFT of the density, then one small product per pair of orders."""
    grid = measure.grid
    T = _theta_table(basis, grid.theta)
    rho = measure.density.reshape(grid.shape)
    D = grid.w_phi * np.fft.fft(rho, axis=1)
    mags = np.abs(D).max(axis=0)
    active = mags > MODE_SKIP * max(mags.max(), 1e-300)
    orders = np.unique(basis.orders)
    groups = {int(k): np.nonzero(basis.orders == k)[0] for k in orders}
    G = np.zeros((basis.dim, basis.dim), complex)
    for ka in orders:
        ia = groups[int(ka)]
        for kb in orders[orders >= ka]:
            m = int(kb - ka) % grid.n_phi
            if not active[m]:
                continue
            ib = groups[int(kb)]
            c = grid.w_theta * D[:, m]
            block = (T[:, ia] * c[:, None]).T @ T[:, ib]
            G[np.ix_(ia, ib)] = block
            if kb != ka:
                G[np.ix_(ib, ia)] = block.conj().T
    return G


def _gram_pointwise(basis, measure, frame, chunk=8192):
    nodes = measure.grid.nodes
    wd = measure.density * measure.grid.weights
    keep = np.nonzero(wd > 0)[0]
    G = np.zeros((basis.dim, basis.dim), complex)
    for i0 in range(0, keep.size, chunk):
        sel = keep[i0 : i0 + chunk]
        Y = basis_matrix(basis, nodes[sel], frame)
        G += (Y.T * wd[sel]) @ Y.conj()
    return G


def gram_matrix(basis, measure, basis_frame=None):
    """``G_ab = int Y_a(F^T x) conj(Y_b(F^T x)) dmu(x)`` with ``F = basis_frame``.

    ``basis_frame`` defaults to the grid frame, which enables the fast
    product path; any rotated basis spans the same band space/eigenspace,
    so the spectrum does not depend on it.
    """
    grid = measure.grid
    _check_exact(basis, grid)
    frame = grid.frame if basis_frame is None else np.asarray(basis_frame, dtype=float)
    if np.array_equal(frame, grid.frame):
        G = _gram_product(basis, measure)
    else:
        G = _gram_pointwise(basis, measure, frame)
    if measure.atoms:
        Y = basis_matrix(basis, measure.atom_points, frame)
        G += (Y.T * measure.atom_masses) @ Y.conj()
    return G


def _axisymmetric_blocks(basis, measure):
    """Per-order Gram blocks when the density is constant on every grid
    latitude and all atoms sit on the grid axis; None otherwise."""
    grid = measure.grid
    rho = measure.density.reshape(grid.shape)
    D = grid.w_phi * np.fft.fft(rho, axis=1)
    mags = np.abs(D).max(axis=0)
    if np.any(mags[1:] > MODE_SKIP * max(mags.max(), 1e-300)):
        return None
    if measure.atoms:
        local = measure.atom_points @ grid.frame
        if np.any(np.hypot(local[:, 0], local[:, 1]) != 0.0):
            return None
    c = grid.w_theta * D[:, 0].real
    T = _theta_table(basis, grid.theta)
    Ya = basis_matrix(basis, measure.atom_points, grid.frame).real if measure.atoms else None
    blocks = []
    for k in np.unique(basis.orders):
        idx = np.nonzero(basis.orders == k)[0]
        B = (T[:, idx] * c[:, None]).T @ T[:, idx]
        if Ya is not None and k == 0:
            B += (Ya[:, idx].T * measure.atom_masses) @ Ya[:, idx]
        blocks.append((idx, B))
    return blocks


def gram_spectrum(basis, measure):
    """``[(indices, eigenvalues, eigenvectors), ...]`` over independent blocks.

    Axisymmetric measures are diagonalised one azimuthal order at a time
    without forming the full Gram matrix; anything else goes through
    :func:`gram_matrix` and :func:`hermitian_eigs`.
    """
    blocks = _axisymmetric_blocks(basis, measure)
    if blocks is None:
        w, V = hermitian_eigs(gram_matrix(basis, measure), vectors=True)
        return [(np.arange(basis.dim), w, V)]
    return [(idx, *symmetric_eigs(B)) for idx, B in blocks]


def extreme_pair(basis, measure, which):
    """``(eigenvalue, coefficient vector)`` of the smallest or largest eigenvalue."""
    best = None
    for idx, w, V in gram_spectrum(basis, measure):
        j = 0 if which == "min" else w.size - 1
        better = best is None or (w[j] < best[0] if which == "min" else w[j] > best[0])
        if better:
            coeffs = np.zeros(basis.dim, complex)
            coeffs[idx] = np.conj(V[:, j])
            best = (float(w[j]), coeffs)
    return best


def _eigen_result(basis, measure, which, measure_spec):
    value, coeffs = extreme_pair(basis, measure, which)
    f = SpectralFunction(basis, coeffs, measure.grid.frame)
    return ExtremalResult(value, f, True, 0, 2.0, measure_spec)


def ls_constant_2(region, basis, grid=None, measure_spec=""):
    """Smallest eigenvalue of the Gram matrix of ``1_region dV``."""
    grid = exact_grid(basis.nmax, region) if grid is None else grid
    _check_exact(basis, grid)
    return _eigen_result(basis, region_indicator(region, grid), "min", measure_spec)


def carleson_constant_2(measure, basis, measure_spec=""):
    """Largest eigenvalue of the Gram matrix of ``measure``."""
    _check_exact(basis, measure.grid)
    return _eigen_result(basis, measure, "max", measure_spec)


# -- general p -----------------------------------------------------------------------------


def integral_p(f, measure, p, values=None):
    """``int |f|^p dmu`` (density nodes plus atoms)."""
    vals = np.abs(evaluate(f, measure.grid) if values is None else values).ravel()
    total = float(np.sum(measure.density * measure.grid.weights * vals**p))
    if measure.atoms:
        total += float(np.sum(measure.atom_masses * np.abs(evaluate_at(f, measure.atom_points)) ** p))
    return total


def ratio_p(f, measure, p, grid=None):
    """``int |f|^p dmu / int |f|^p dV``; the volume integral uses ``grid``
    (default: the measure's grid)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    den = integral_p(f, lebesgue(measure.grid if grid is None else grid), p)
    if den <= 0.0:
        raise ZeroDivisionError("ratio_p: function vanishes on the volume grid")
    return integral_p(f, measure, p) / den


class _Objective:
    """Sampled ``A(alpha) / B(alpha)`` with Wirtinger gradients."""

    def __init__(self, basis, measure, p, volume_grid):
        frame = measure.grid.frame
        wd = measure.density * measure.grid.weights
        keep = wd > 0
        rows = [basis_matrix(basis, measure.grid.nodes[keep], frame)]
        weights = [wd[keep]]
        if measure.atoms:
            rows.append(basis_matrix(basis, measure.atom_points, frame))
            weights.append(measure.atom_masses)
        self.Ya = np.vstack(rows)
        self.wa = np.concatenate(weights)
        self.Yb = basis_matrix(basis, volume_grid.nodes, frame)
        self.wb = volume_grid.weights
        self.p = p
        self.frame = frame

    def _part(self, Y, w, alpha):
        f = Y @ alpha
        a = np.abs(f)
        val = float(np.sum(w * a**self.p))
        grad = self.p * (Y.conj().T @ (w * a ** (self.p - 2.0) * f))
        return val, grad

    def value(self, alpha):
        A = float(np.sum(self.wa * np.abs(self.Ya @ alpha) ** self.p))
        B = float(np.sum(self.wb * np.abs(self.Yb @ alpha) ** self.p))
        return A / B

    def value_grad(self, alpha):
        A, gA = self._part(self.Ya, self.wa, alpha)
        B, gB = self._part(self.Yb, self.wb, alpha)
        R = A / B
        return R, (gA - R * gB) / B

    def project(self, values_fn):
        """Coefficients of a function in the span, by exact quadrature."""
        return self.Yb.conj().T @ (self.wb * values_fn)


def _ascend(obj, alpha, sign, max_iter=500, step_tol=1e-9, armijo=1e-4):
    alpha = alpha / np.linalg.norm(alpha)
    R, g = obj.value_grad(alpha)
    step = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        d = sign * (g - np.real(np.vdot(alpha, g)) * alpha)
        slope = float(np.real(np.vdot(d, d)))
        if slope == 0.0:
            break
        s = min(2.0 * step, 1e3)
        while True:
            trial = alpha + s * d
            trial /= np.linalg.norm(trial)
            Rt = obj.value(trial)
            if sign * (Rt - R) >= armijo * s * slope or s < 1e-16:
                break
            s *= 0.5
        if sign * (Rt - R) < 0:
            break
        moved = np.linalg.norm(trial - alpha)
        alpha, step = trial, s
        R, g = obj.value_grad(alpha)
        if moved < step_tol:
            break
    return R, alpha, it


def _anchor(measure, direction):
    """Point where the measure is heaviest (max) or lightest (min)."""
    if measure.atoms and direction == "max":
        return measure.atom_points[int(np.argmax(measure.atom_masses))]
    d = measure.density
    i = int(np.argmax(d)) if direction == "max" else int(np.argmin(d))
    return measure.grid.nodes[i]


def _perpendicular(x):
    e = np.array([1.0, 0.0, 0.0]) if abs(x[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    return unit(np.cross(x, e))


def search_extremal_p(basis, measure, p, direction="max", seed=0, restarts=8, volume_grid=None, max_iter=500):
    """Best feasible ratio over restarts; ``certified`` is always False.

    Restart seeds, in order: zonal, beam, projector test function (all at
    the measure's heaviest/lightest point), bottom and top p = 2
    eigenvectors, then SplitMix64 random coefficient vectors.
    """
    if p <= 1:
        raise ValueError("search_extremal_p needs p > 1")
    if direction not in ("max", "min"):
        raise ValueError("direction must be 'max' or 'min'")
    sign = 1.0 if direction == "max" else -1.0
    vgrid = exact_grid(basis.nmax, oversample=2) if volume_grid is None else volume_grid
    obj = _Objective(basis, measure, p, vgrid)
    xi = _anchor(measure, direction)
    n = basis.nmax
    nodes = vgrid.nodes

    starts = []
    if n >= 1:
        starts.append(obj.project(evaluate_at(zonal(n, xi), nodes)))
        starts.append(obj.project(evaluate_at(beam(n, _perpendicular(xi)), nodes)))
    lam = max(basis.lam, 1.0)
    starts.append(obj.project(evaluate_at(projector_testfn(lam, xi, MultiplierSpec.plateau()), nodes)))
    starts.append(extreme_pair(basis, measure, "min")[1])
    starts.append(extreme_pair(basis, measure, "max")[1])
    rng = SplitMix64(seed)
    while len(starts) < restarts:
        starts.append(rng.complex_normal(basis.dim))
    starts = [s for s in starts[:restarts] if np.linalg.norm(s) > 0]

    best = None
    for s in starts:
        R, alpha, it = _ascend(obj, s, sign, max_iter)
        if best is None or sign * (R - best[0]) > 0:
            best = (R, alpha, it)
    R, alpha, it = best
    f = SpectralFunction(basis, alpha, obj.frame)
    return ExtremalResult(float(R), f, False, it, float(p))
