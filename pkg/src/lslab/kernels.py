"""Heat kernels (real and complex time), spectral multiplier kernels and the
spectral function on S^2, with the bound profiles used as diagnostics.

Every kernel here is zonal: it depends on ``x, y`` only through
``cos d(x, y) = x . y``, so values are Legendre series in that cosine and
suprema over pairs of points reduce to suprema over distances.
"""

import math
from dataclasses import dataclass

import numpy as np

from lslab.specfun import legendre_series

GAUSS_C = 0.2
RESOLVED = 1e-8


def _smooth_step_g(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def smooth_step(u):
    """``g(u) / (g(u) + g(1-u))`` with ``g(u) = exp(-1/u)`` for ``u > 0``."""
    u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
    a, b = _smooth_step_g(u), _smooth_step_g(1.0 - u)
    return a / (a + b)


def psi_plateau(s, inner, outer):
    """Smooth even bump: 1 on ``[-inner, inner]``, 0 outside ``(-outer, outer)``."""
    if not 0 < inner < outer:
        raise ValueError("need 0 < inner < outer")
    s = np.asarray(s, dtype=float)
    out = smooth_step((outer - np.abs(s)) / (outer - inner))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MultiplierSpec:
    """``shape='plateau'`` uses ``inner, outer``; ``shape='hard'`` is ``1_{|s| <= edge}``."""

    shape: str = "plateau"
    inner: float = 0.5
    outer: float = 1.0
    edge: float = 1.0

    def __post_init__(self):
        if self.shape not in ("plateau", "hard"):
            raise ValueError(f"unknown multiplier shape {self.shape!r}")
        if self.shape == "plateau" and not 0 < self.inner < self.outer:
            raise ValueError("need 0 < inner < outer")

    @classmethod
    def plateau(cls, inner=0.5, outer=1.0):
        return cls("plateau", inner, outer)

    @classmethod
    def hard(cls, edge=1.0):
        return cls("hard", edge=edge)

    @property
    def support(self):
        return self.outer if self.shape == "plateau" else self.edge

    def __call__(self, s):
        if self.shape == "plateau":
            return psi_plateau(s, self.inner, self.outer)
        s = np.asarray(s, dtype=float)
        out = (np.abs(s) <= self.edge).astype(float)
        return float(out) if out.ndim == 0 else out


# -- heat kernel ---------------------------------------------------------------------------


def truncation_degree(t, lam=1.0):
    """``max(3 lam, ceil(sqrt(40 / Re t)))``: the dropped tail is below 1e-14."""
    re = complex(t).real
    if re < 1e-6:
        raise ValueError("heat kernel truncation infeasible for Re(t) < 1e-6")
    return int(max(3 * lam, math.ceil(math.sqrt(40.0 / re))))


def heat_coefficients(t, b=0.0, n_trunc=None):
    """Legendre coefficients ``exp(-(n(n+1)+b) t) (2n+1)/(4 pi)``."""
    if b < 0:
        raise ValueError("shift b must be >= 0")
    N = truncation_degree(t) if n_trunc is None else int(n_trunc)
    n = np.arange(N + 1, dtype=float)
    coef = np.exp(-(n * (n + 1.0) + b) * t) * (2.0 * n + 1.0) / (4.0 * math.pi)
    return coef


def heat_kernel_cos(t, cosd, b=0.0, n_trunc=None):
    """``p(t, x, y)`` as a function of ``x . y``; complex for complex ``t``."""
    return legendre_series(heat_coefficients(t, b, n_trunc), cosd)


def heat_kernel(t, x, y, b=0.0, n_trunc=None):
    cosd = np.sum(np.asarray(x, dtype=float) * np.asarray(y, dtype=float), axis=-1)
    return heat_kernel_cos(t, cosd, b, n_trunc)


def heat_kernel_gradient(t, d, b=0.0, n_trunc=None):
    """``|grad_x p(t, x, y)|`` at distance ``d``: ``|dp/dd| = |P'(cos d)| sin d``."""
    d = np.asarray(d, dtype=float)
    dp = legendre_series(heat_coefficients(t, b, n_trunc), np.cos(d), derivative=True)
    return np.abs(dp) * np.sin(d)


def distance_samples(n=4001):
    return np.linspace(0.0, math.pi, n)


def _resolved(values, diag):
    """Distances where the series value is resolved against roundoff at the diagonal."""
    return np.abs(values) >= RESOLVED * np.abs(diag)


def _weighted_sup(ok, amplitude, exponent, d):
    """argmax/max of ``amplitude * exp(exponent)`` over the resolved distances."""
    prof = np.full(d.shape, -np.inf)
    prof[ok] = amplitude[ok] * np.exp(exponent[ok])
    i = int(np.argmax(prof))
    return float(prof[i]), float(d[i])


def gaussian_bound_profile(t_list, distances=None, c=GAUSS_C):
    """Per ``t``: sup over distances of ``p t exp(d^2/(c^-1 t))``.

    Only distances where ``|p| >= 1e-8 |p(t, x, x)|`` enter the supremum;
    beyond that the series is below its own rounding level and the weight
    ``exp(c d^2/t)`` would amplify noise.  Returns a list of rows.
    """
    d = distance_samples() if distances is None else np.asarray(distances, dtype=float)
    rows = []
    for t in t_list:
        if not 0 < t:
            raise ValueError("t must be > 0")
        p = heat_kernel_cos(t, np.cos(d))
        p0 = heat_kernel_cos(t, 1.0)
        ok = _resolved(p, p0)
        sup, arg = _weighted_sup(ok, p * t, c * d**2 / t, d)
        rows.append({"t_or_lambda": float(t), "sup_profile": sup, "argmax_distance": arg})
    return rows


def complex_bound_profile(angle_list, t_list, distances=None, c=GAUSS_C):
    """Per ``(angle, t)`` with ``z = t e^{i angle}``:
    sup ``|p(z)| Re(z) exp(Re(c d^2 / z))`` over resolved distances."""
    d = distance_samples() if distances is None else np.asarray(distances, dtype=float)
    rows = []
    for ang in angle_list:
        if abs(ang) > 1.3:
            raise ValueError("|angle| must be <= 1.3")
        for t in t_list:
            z = t * np.exp(1j * ang)
            p = heat_kernel_cos(z, np.cos(d))
            p0 = heat_kernel_cos(z, 1.0)
            ok = _resolved(p, p0)
            sup, arg = _weighted_sup(ok, np.abs(p) * z.real, (c * d**2 / z).real, d)
            rows.append({"t_or_lambda": float(t), "theta_angle": float(ang), "sup_profile": sup, "argmax_distance": arg})
    return rows


def gradient_bound_profile(t_list, distances=None, c=GAUSS_C):
    """Per ``t``: sup ``|grad_x p| t^{3/2} exp(c d^2/t)`` over resolved distances."""
    d = distance_samples() if distances is None else np.asarray(distances, dtype=float)
    rows = []
    for t in t_list:
        p = heat_kernel_cos(t, np.cos(d))
        ok = _resolved(p, heat_kernel_cos(t, 1.0))
        g = heat_kernel_gradient(t, d)
        sup, arg = _weighted_sup(ok, g * t**1.5, c * d**2 / t, d)
        rows.append({"t_or_lambda": float(t), "sup_profile": sup, "argmax_distance": arg})
    return rows


# -- multipliers and the spectral function -----------------------------------------------


def multiplier_coefficients(psi, lam, b=0.0):
    """``psi((n(n+1)+b)/lam^2) (2n+1)/(4 pi)`` over every degree ``psi`` can reach."""
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    reach = psi.support * lam * lam
    N = 0
    while (N + 1) * (N + 2) + b <= reach:
        N += 1
    n = np.arange(N + 1, dtype=float)
    return psi((n * (n + 1.0) + b) / lam**2) * (2.0 * n + 1.0) / (4.0 * math.pi)


def multiplier_kernel_cos(psi, lam, cosd, b=0.0):
    return legendre_series(multiplier_coefficients(psi, lam, b), cosd)


def multiplier_kernel(psi, lam, x, y, b=0.0):
    """``psi(L/lam^2)(x, y)`` with ``L = -Laplacian + b``."""
    cosd = np.sum(np.asarray(x, dtype=float) * np.asarray(y, dtype=float), axis=-1)
    return multiplier_kernel_cos(psi, lam, cosd, b)


def spectral_function(lam, x=None):
    """``sum_{lam_j <= lam} |e_j(x)|^2 = (N+1)^2 / (4 pi)``, independent of ``x``."""
    from lslab.spectrum import band_limit_degree

    if lam < 1:
        raise ValueError("lambda must be >= 1")
    return (band_limit_degree(lam) + 1) ** 2 / (4.0 * math.pi)


def weyl_ratio(lam):
    """Spectral function over the Weyl main term ``lam^2/(4 pi)``."""
    return spectral_function(lam) * 4.0 * math.pi / lam**2


def decay_profile(psi, lam, order=4, distances=None):
    """``sup_d |K(d)| (1 + lam d)^order / lam^2``."""
    d = distance_samples() if distances is None else np.asarray(distances, dtype=float)
    K = multiplier_kernel_cos(psi, lam, np.cos(d))
    prof = np.abs(K) * (1.0 + lam * d) ** order / lam**2
    i = int(np.argmax(prof))
    return {"t_or_lambda": float(lam), "sup_profile": float(prof[i]), "argmax_distance": float(d[i])}


def shell_maxima(psi, lam, lo=8.0, hi=None, per_shell=64):
    """Max ``|K|`` over unit shells ``lam d in [j, j+1)`` for ``j = lo..hi-1``.

    The default outer edge is the equator (``lam d = lam pi/2``): past it the
    antipodal refocusing of geodesics on S^2 re-amplifies every zonal kernel.
    """
    hi = lam * math.pi / 2 if hi is None else hi
    centers, maxima = [], []
    for j in range(int(lo), int(hi)):
        d = np.linspace(j, j + 1, per_shell, endpoint=False) / lam
        K = multiplier_kernel_cos(psi, lam, np.cos(d))
        centers.append(j + 0.5)
        maxima.append(float(np.max(np.abs(K))))
    return np.array(centers), np.array(maxima)


def decay_order(psi, lam, lo=8.0, hi=None):
    """Minus the log-log slope of the shell maxima of ``|K|`` against ``lam d``."""
    x, y = shell_maxima(psi, lam, lo, hi)
    return -float(np.polyfit(np.log(x), np.log(y), 1)[0])
