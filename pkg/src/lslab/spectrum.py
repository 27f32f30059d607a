"""Band spaces and eigenspaces on S^2, named test functions, norms, gradients."""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from lslab import specfun
from lslab.geom import cart2sph, rotation_to, unit
from lslab.rng import SplitMix64
from lslab.specfun import tri


def band_limit_degree(lam):
    """Largest ``n`` with ``sqrt(n(n+1)) <= lam``."""
    lam2 = float(lam) ** 2
    n = max(0, int(math.floor((-1.0 + math.sqrt(1.0 + 4.0 * lam2)) / 2.0)))
    while (n + 1) * (n + 2) <= lam2:
        n += 1
    while n > 0 and n * (n + 1) > lam2:
        n -= 1
    return n


def eigenfrequency(n):
    return math.sqrt(n * (n + 1))


@dataclass(frozen=True, eq=False)
class BasisIndex:
    """Ordered list of ``(n, k)``: n ascending, k from -n to n."""

    kind: str
    param: float
    degrees: np.ndarray
    orders: np.ndarray

    @property
    def dim(self):
        return self.degrees.size

    @property
    def nmax(self):
        return int(self.degrees.max())

    @property
    def nmin(self):
        return int(self.degrees.min())

    @property
    def lam(self):
        """Frequency scale: the band limit, or sqrt(n(n+1)) for an eigenspace."""
        return float(self.param) if self.kind == "band" else eigenfrequency(int(self.param))

    def label(self):
        if self.kind == "band":
            return f"band:{self.param:g}"
        return f"eig:{int(self.param)}"

    def index(self, n, k):
        hits = np.nonzero((self.degrees == n) & (self.orders == k))[0]
        if hits.size == 0:
            raise KeyError((n, k))
        return int(hits[0])

    def __eq__(self, other):
        return (
            isinstance(other, BasisIndex)
            and self.dim == other.dim
            and np.array_equal(self.degrees, other.degrees)
            and np.array_equal(self.orders, other.orders)
        )

    def __hash__(self):
        return hash((self.kind, self.param, self.dim))


def _index_arrays(degrees):
    ns, ks = [], []
    for n in degrees:
        ns.extend([n] * (2 * n + 1))
        ks.extend(range(-n, n + 1))
    return np.array(ns, dtype=int), np.array(ks, dtype=int)


def band_basis(lam):
    if lam < 1:
        raise ValueError("band limit must be >= 1")
    N = band_limit_degree(lam)
    n, k = _index_arrays(range(N + 1))
    return BasisIndex("band", float(lam), n, k)


def eigenspace_basis(n):
    if n < 0:
        raise ValueError("degree must be >= 0")
    d, k = _index_arrays([n])
    return BasisIndex("eigenspace", int(n), d, k)


def parse_basis(text):
    """``band:<lam>`` or ``eig:<n>``."""
    kind, _, val = text.partition(":")
    if kind == "band":
        return band_basis(float(val))
    if kind in ("eig", "eigenspace"):
        return eigenspace_basis(int(val))
    raise ValueError(f"unknown basis spec {text!r}")


@dataclass(eq=False)
class SpectralFunction:
    """``f(x) = sum_j coeffs[j] * Y_j(frame.T @ x)``."""

    basis: BasisIndex
    coeffs: np.ndarray
    frame: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex).ravel()
        if self.coeffs.size != self.basis.dim:
            raise ValueError("coefficient vector does not match the basis")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")
        self.frame = np.asarray(self.frame, dtype=float)

    def __add__(self, other):
        if other.basis != self.basis or not np.array_equal(other.frame, self.frame):
            raise ValueError("functions live in different bases/frames")
        return SpectralFunction(self.basis, self.coeffs + other.coeffs, self.frame)

    def __mul__(self, c):
        return SpectralFunction(self.basis, c * self.coeffs, self.frame)

    __rmul__ = __mul__

    def l2_norm(self):
        return float(np.linalg.norm(self.coeffs))

    def normalized(self):
        return self * (1.0 / self.l2_norm())

    def to_json(self):
        out = {
            "kind": self.basis.kind,
            "lambda_or_n": self.basis.param,
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }
        if not np.array_equal(self.frame, np.eye(3)):
            out["frame"] = self.frame.tolist()
        return out

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        basis = band_basis(obj["lambda_or_n"]) if obj["kind"] == "band" else eigenspace_basis(int(obj["lambda_or_n"]))
        coeffs = np.array([complex(re, im) for re, im in obj["coeffs"]])
        return cls(basis, coeffs, np.array(obj.get("frame", np.eye(3))))


# -- synthesis -----------------------------------------------------------------------------


def _order_columns(basis, coeffs):
    """Per order k: table rows and signed coefficients (Y_{n,-k} = (-1)^k conj Y_{n,k})."""
    out = []
    for k in np.unique(basis.orders):
        sel = np.nonzero(basis.orders == k)[0]
        c = coeffs[sel]
        if not np.any(c):
            continue
        ak = abs(int(k))
        rows = np.array([tri(int(n), ak) for n in basis.degrees[sel]]) - tri(basis.nmin, 0)
        sign = -1.0 if (k < 0 and ak % 2) else 1.0
        out.append((int(k), rows, sign * c))
    return out


def _theta_modes(basis, coeffs, theta, derivative=False):
    """``F_k(theta) = sum_n c_{n,k} N_n^{|k|}(theta)`` for active orders.

    Returns ``(orders, F, dF)``; ``dF`` is None unless ``derivative``.
    """
    cols = _order_columns(basis, coeffs)
    if not cols:
        return np.zeros(0, dtype=int), np.zeros((theta.size, 0), complex), None
    tab = specfun.alf_table(basis.nmax, theta, nmin=basis.nmin)
    dtab = specfun.alf_dtheta_table(tab, basis.nmin, basis.nmax) if derivative else None
    orders = np.array([k for k, _, _ in cols])
    F = np.empty((theta.size, len(cols)), complex)
    dF = np.empty_like(F) if derivative else None
    for j, (k, rows, c) in enumerate(cols):
        F[:, j] = tab[rows].T @ c
        if derivative:
            dF[:, j] = dtab[rows].T @ c
    return orders, F, dF


def _to_azimuth(orders, modes, n_phi):
    """Sum ``modes[:, j] * exp(i orders[j] phi)`` on the uniform azimuth grid."""
    X = np.zeros((modes.shape[0], n_phi), complex)
    np.add.at(X.T, np.mod(orders, n_phi), modes.T)
    return n_phi * np.fft.ifft(X, axis=1)


def _same_frame(f, grid):
    return np.array_equal(f.frame, grid.frame)


def evaluate(f, grid):
    """Samples of ``f`` on the grid, shape ``grid.shape``."""
    if _same_frame(f, grid):
        orders, F, _ = _theta_modes(f.basis, f.coeffs, grid.theta)
        return _to_azimuth(orders, F, grid.n_phi)
    return evaluate_at(f, grid.nodes).reshape(grid.shape)


def evaluate_at(f, pts, chunk=20000, derivative=False):
    """Point evaluation at physical points ``pts`` (shape ``(..., 3)``).

    With ``derivative`` also returns ``(d/dtheta, (1/sin theta) d/dphi)`` in
    the function's own frame.
    """
    pts = np.asarray(pts, dtype=float)
    shape = pts.shape[:-1]
    flat = pts.reshape(-1, 3) @ f.frame
    theta, phi = cart2sph(flat)
    vals = np.empty(theta.size, complex)
    dth = np.empty(theta.size, complex) if derivative else None
    dph = np.empty(theta.size, complex) if derivative else None
    for i0 in range(0, theta.size, chunk):
        sl = slice(i0, i0 + chunk)
        orders, F, dF = _theta_modes(f.basis, f.coeffs, theta[sl], derivative)
        e = np.exp(1j * np.outer(phi[sl], orders))
        vals[sl] = np.sum(F * e, axis=1)
        if derivative:
            dth[sl] = np.sum(dF * e, axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                dph[sl] = np.sum(1j * orders * F * e, axis=1) / np.sin(theta[sl])
    if derivative:
        return vals.reshape(shape), dth.reshape(shape), dph.reshape(shape)
    return vals.reshape(shape)


def basis_matrix(basis, pts, frame=None):
    """``Y[p, j] = Y_j(frame.T @ pts[p])`` for every basis element."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    frame = np.eye(3) if frame is None else frame
    theta, phi = cart2sph(pts @ frame)
    tab = specfun.alf_table(basis.nmax, theta, nmin=basis.nmin)
    rows = np.array([tri(int(n), abs(int(k))) for n, k in zip(basis.degrees, basis.orders)]) - tri(basis.nmin, 0)
    sign = np.where((basis.orders < 0) & (np.abs(basis.orders) % 2 == 1), -1.0, 1.0)
    return tab[rows].T * sign * np.exp(1j * np.outer(phi, basis.orders))


def gradient_norm_samples(f, grid):
    """``|grad f|`` at every node from analytic derivatives."""
    if _same_frame(f, grid):
        orders, F, dF = _theta_modes(f.basis, f.coeffs, grid.theta, derivative=True)
        dth = _to_azimuth(orders, dF, grid.n_phi)
        dph = _to_azimuth(orders, 1j * orders * F, grid.n_phi) / np.sin(grid.theta)[:, None]
    else:
        _, dth, dph = evaluate_at(f, grid.nodes, derivative=True)
        dth = dth.reshape(grid.shape)
        dph = dph.reshape(grid.shape)
    return np.sqrt(np.abs(dth) ** 2 + np.abs(dph) ** 2)


def lp_norm(f, p, measure, values=None):
    """``(int |f|^p dmu)^{1/p}``; ``p = inf`` is the max over charged nodes and atoms."""
    if p < 1:
        raise ValueError("p must be >= 1")
    vals = np.abs(evaluate(f, measure.grid) if values is None else values).ravel()
    atom_vals = np.abs(evaluate_at(f, measure.atom_points)) if measure.atoms else np.zeros(0)
    if math.isinf(p):
        charged = vals[measure.density > 0]
        return float(max(charged.max(initial=0.0), atom_vals.max(initial=0.0)))
    total = np.sum(measure.density * measure.grid.weights * vals**p)
    total += np.sum(measure.atom_masses * atom_vals**p)
    return float(total ** (1.0 / p))


# -- named test functions -----------------------------------------------------------------


def _ylm_at(basis, xi):
    return basis_matrix(basis, unit(xi)[None, :])[0]


def zonal(n, xi):
    """``lam_n^{-1/2} sum_k Y_{n,k}(x) conj(Y_{n,k}(xi))``."""
    if n < 1:
        raise ValueError("zonal needs n >= 1")
    basis = eigenspace_basis(n)
    return SpectralFunction(basis, np.conj(_ylm_at(basis, xi)) / math.sqrt(eigenfrequency(n)))


def zonal_closed_form(n, xi, pts):
    """Addition-theorem form ``lam_n^{-1/2} (2n+1)/(4 pi) P_n(x . xi)``."""
    t = np.clip(np.asarray(pts) @ unit(xi), -1.0, 1.0)
    coef = np.zeros(n + 1)
    coef[n] = (2 * n + 1) / (4.0 * math.pi) / math.sqrt(eigenfrequency(n))
    return specfun.legendre_series(coef, t)


def beam(n, axis):
    """L2-normalised highest-weight harmonic ``c_n sin(theta)^n e^{in phi}`` in the
    frame whose equator is the great circle normal to ``axis``."""
    if n < 1:
        raise ValueError("beam needs n >= 1")
    basis = eigenspace_basis(n)
    coeffs = np.zeros(basis.dim, complex)
    # N_n^n carries the Condon-Shortley sign (-1)^n
    coeffs[basis.index(n, n)] = (-1.0) ** n
    return SpectralFunction(basis, coeffs, rotation_to(axis))


def beam_closed_form(n, axis, pts):
    R = rotation_to(axis)
    theta, phi = cart2sph(np.asarray(pts) @ R)
    c = specfun.wallis_l2n(n) ** -0.5
    return c * np.sin(theta) ** n * np.exp(1j * n * phi)


def projector_testfn(lam, y, psi):
    """``sum_n psi(n(n+1)/lam^2) sum_k Y_{n,k}(x) conj(Y_{n,k}(y))``."""
    basis = band_basis(lam)
    weights = np.array([psi(n * (n + 1) / lam**2) for n in basis.degrees])
    return SpectralFunction(basis, weights * np.conj(_ylm_at(basis, y)))


def projector_closed_form(lam, y, psi, pts):
    N = band_limit_degree(lam)
    n = np.arange(N + 1)
    coef = np.array([psi(m * (m + 1) / lam**2) for m in n]) * (2 * n + 1) / (4.0 * math.pi)
    return specfun.legendre_series(coef, np.asarray(pts) @ unit(y))


def random_band_function(lam, seed, basis=None):
    """Normalised complex Gaussian coefficients from SplitMix64(seed)."""
    basis = band_basis(lam) if basis is None else basis
    c = SplitMix64(seed).complex_normal(basis.dim)
    return SpectralFunction(basis, c / np.linalg.norm(c))


def harmonic_extension(f, t):
    """Coefficients scaled by ``exp(lam_n t)``; requires ``|t| <= 10/lam``."""
    lam = max(f.basis.lam, 1.0)
    if abs(t) > 10.0 / lam:
        raise ValueError("harmonic_extension: |t| exceeds 10/lambda")
    lam_n = np.sqrt(f.basis.degrees * (f.basis.degrees + 1.0))
    return SpectralFunction(f.basis, f.coeffs * np.exp(lam_n * t), f.frame)


def embed(f, basis):
    """Re-express ``f`` in a larger basis (same frame) by matching ``(n, k)``."""
    out = np.zeros(basis.dim, complex)
    for c, n, k in zip(f.coeffs, f.basis.degrees, f.basis.orders):
        out[basis.index(int(n), int(k))] = c
    return SpectralFunction(basis, out, f.frame)
