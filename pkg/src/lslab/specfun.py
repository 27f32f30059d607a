"""Legendre-type special functions on the sphere.

Conventions
-----------
``alf(n, k, theta)`` is the fully normalised associated Legendre function
with Condon-Shortley phase, so that ``Y_{n,k} = alf(n, |k|) * e^{ikphi}``
(times ``(-1)^k`` for negative ``k``) is orthonormal on the unit sphere.
Tables are stored in triangular layout: row ``n(n+1)/2 + k`` for
``0 <= k <= n``, columns are evaluation points.
"""

import math

import numpy as np

from lslab._accel import dispatch, njit

_LOG_TINY = math.log(1e-280)
_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)


def tri(n, k):
    return n * (n + 1) // 2 + k


# -- classical Legendre polynomials ------------------------------------------------


def legendre_P(n, t):
    """Legendre polynomial ``P_n(t)`` by the three-term recurrence."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0 + 1e-12):
        raise ValueError("legendre_P: |t| > 1")
    t_arr = np.clip(t_arr, -1.0, 1.0)
    p0 = np.ones_like(t_arr)
    if n == 0:
        return p0 if p0.ndim else float(p0)
    p1 = t_arr.copy()
    for m in range(1, n):
        p0, p1 = p1, ((2 * m + 1) * t_arr * p1 - m * p0) / (m + 1)
    return p1 if p1.ndim else float(p1)


@njit
def _legendre_series_nb(coef, t):
    out = np.empty(t.size)
    nmax = coef.size - 1
    alpha = np.empty(max(nmax, 1))
    beta = np.empty(max(nmax, 1))
    for m in range(1, nmax):
        alpha[m] = (2.0 * m + 1.0) / (m + 1.0)
        beta[m] = m / (m + 1.0)
    for i in range(t.size):
        x = t[i]
        p0 = 1.0
        acc = coef[0]
        if nmax >= 1:
            p1 = x
            acc += coef[1] * p1
            for m in range(1, nmax):
                p2 = alpha[m] * x * p1 - beta[m] * p0
                acc += coef[m + 1] * p2
                p0 = p1
                p1 = p2
        out[i] = acc
    return out


def _legendre_series_np(coef, t):
    """Sum ``coef[n] * P_n(t)`` over n for each entry of ``t``."""
    nmax = coef.size - 1
    p0 = np.ones_like(t)
    acc = coef[0] * p0
    if nmax >= 1:
        p1 = t.copy()
        acc = acc + coef[1] * p1
        for m in range(1, nmax):
            p0, p1 = p1, ((2.0 * m + 1.0) / (m + 1.0)) * t * p1 - (m / (m + 1.0)) * p0
            acc += coef[m + 1] * p1
    return acc


@njit
def _legendre_series_deriv_nb(coef, t):
    out = np.empty(t.size)
    nmax = coef.size - 1
    for i in range(t.size):
        x = t[i]
        p0 = 1.0
        p1 = x
        d0 = 0.0
        d1 = 1.0
        acc = 0.0
        if nmax >= 1:
            acc = coef[1]
        for m in range(1, nmax):
            p2 = ((2 * m + 1) * x * p1 - m * p0) / (m + 1)
            d2 = d0 + (2 * m + 1) * p1
            acc += coef[m + 1] * d2
            p0 = p1
            p1 = p2
            d0 = d1
            d1 = d2
        out[i] = acc
    return out


def _legendre_series_deriv_np(coef, t):
    """Sum ``coef[n] * P_n'(t)``; uses ``P'_{m+1} = P'_{m-1} + (2m+1) P_m``."""
    nmax = coef.size - 1
    acc = np.zeros_like(t)
    if nmax >= 1:
        acc = acc + coef[1]
    p0, p1 = np.ones_like(t), t.copy()
    d0, d1 = np.zeros_like(t), np.ones_like(t)
    for m in range(1, nmax):
        p2 = ((2 * m + 1) * t * p1 - m * p0) / (m + 1)
        d2 = d0 + (2 * m + 1) * p1
        acc += coef[m + 1] * d2
        p0, p1, d0, d1 = p1, p2, d1, d2
    return acc


_series = dispatch(_legendre_series_nb, _legendre_series_np)
_series_deriv = dispatch(_legendre_series_deriv_nb, _legendre_series_deriv_np)


def legendre_series(coef, t, derivative=False):
    """Evaluate ``sum_n coef[n] P_n(t)`` (or its t-derivative).

    Complex coefficients are handled by summing real and imaginary parts
    separately.
    """
    coef = np.asarray(coef)
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    shape = t.shape
    flat = np.ascontiguousarray(t.ravel())
    kern = _series_deriv if derivative else _series
    if np.iscomplexobj(coef):
        re = kern(np.ascontiguousarray(coef.real, dtype=float), flat)
        im = kern(np.ascontiguousarray(coef.imag, dtype=float), flat)
        return (re + 1j * im).reshape(shape)
    return kern(np.ascontiguousarray(coef, dtype=float), flat).reshape(shape)


# -- associated Legendre tables --------------------------------------------------------


def _recurrence_coeffs(nmax):
    """Upward-in-n coefficients a_{nk}, b_{nk} in triangular layout."""
    size = tri(nmax, nmax) + 1
    a = np.zeros(size)
    b = np.zeros(size)
    for n in range(1, nmax + 1):
        k = np.arange(0, n)
        den = n * n - k * k
        a[tri(n, 0) : tri(n, 0) + n] = np.sqrt((4.0 * n * n - 1.0) / den)
        if n >= 2:
            kk = k[: n - 1]
            bb = (2.0 * n + 1.0) * ((n - 1.0) ** 2 - kk * kk) / ((2.0 * n - 3.0) * (n * n - kk * kk))
            b[tri(n, 0) : tri(n, 0) + n - 1] = np.sqrt(bb)
    return a, b


@njit
def _alf_nb(nmin, nmax, x, s, a, b, out):
    # orders outer, degrees middle, points inner: rows of ``out`` are
    # written contiguously and each point carries its own recurrence state
    base = nmin * (nmin + 1) // 2
    npts = x.size
    logs = np.empty(npts)
    lsect = np.full(npts, -0.5 * math.log(4.0 * math.pi))
    pm1 = np.empty(npts)
    pm2 = np.empty(npts)
    off = np.empty(npts)
    for p in range(npts):
        logs[p] = math.log(s[p]) if s[p] > 0.0 else -np.inf
    for k in range(0, nmax + 1):
        sign = -1.0 if (k % 2 == 1) else 1.0
        step = 0.5 * math.log((2.0 * k + 1.0) / (2.0 * k)) if k > 0 else 0.0
        for p in range(npts):
            if k > 0:
                lsect[p] += step + logs[p]
            pm2[p] = 0.0
            if lsect[p] == -np.inf:
                # sectoral and every higher degree vanish at the pole
                pm1[p] = 0.0
                off[p] = 0.0
            elif lsect[p] < _LOG_TINY:
                pm1[p] = sign
                off[p] = lsect[p]
            else:
                pm1[p] = sign * math.exp(lsect[p])
                off[p] = 0.0
        for n in range(k, nmax + 1):
            idx = n * (n + 1) // 2 + k
            if n > k:
                an = a[idx]
                bn = b[idx]
                for p in range(npts):
                    pn = an * x[p] * pm1[p] - bn * pm2[p]
                    pm2[p] = pm1[p]
                    pm1[p] = pn
                    if abs(pn) > _RESCALE:
                        pm1[p] /= _RESCALE
                        pm2[p] /= _RESCALE
                        off[p] += _LOG_RESCALE
            if n >= nmin:
                row = idx - base
                for p in range(npts):
                    v = pm1[p]
                    if off[p] == 0.0 or v == 0.0:
                        out[row, p] = v
                    else:
                        lv = math.log(abs(v)) + off[p]
                        out[row, p] = math.copysign(math.exp(lv), v) if lv > -745.0 else 0.0
    return out


def _alf_np(nmin, nmax, x, s, a, b, out):
    """Vectorised-over-points version of the table kernel."""
    base = tri(nmin, 0)
    with np.errstate(divide="ignore"):
        logs = np.log(s)
    lsect = np.full(x.shape, -0.5 * math.log(4.0 * math.pi))
    for k in range(0, nmax + 1):
        if k > 0:
            lsect = lsect + 0.5 * math.log((2.0 * k + 1.0) / (2.0 * k)) + logs
        sign = -1.0 if k % 2 else 1.0
        dead = np.isneginf(lsect)
        small = lsect < _LOG_TINY
        off = np.where(small & ~dead, lsect, 0.0)
        pm1 = np.where(small, sign, sign * np.exp(np.where(small, 0.0, lsect)))
        pm1 = np.where(dead, 0.0, pm1)
        off = np.where(dead, 0.0, off)
        pm2 = np.zeros_like(x)

        def emit(row, vals, off):
            with np.errstate(divide="ignore", over="ignore", under="ignore"):
                mag = np.log(np.abs(vals)) + off
                scaled = np.where(mag > -745.0, np.copysign(np.exp(mag), vals), 0.0)
            out[row - base] = np.where(off == 0.0, vals, np.where(vals == 0.0, 0.0, scaled))

        if k >= nmin:
            emit(tri(k, k), pm1, off)
        for n in range(k + 1, nmax + 1):
            idx = tri(n, k)
            pn = a[idx] * x * pm1 - b[idx] * pm2
            pm2, pm1 = pm1, pn
            big = np.abs(pm1) > _RESCALE
            if big.any():
                pm1 = np.where(big, pm1 / _RESCALE, pm1)
                pm2 = np.where(big, pm2 / _RESCALE, pm2)
                off = np.where(big, off + _LOG_RESCALE, off)
            if n >= nmin:
                emit(idx, pm1, off)
    return out


_alf_kernel = dispatch(_alf_nb, _alf_np)
_coeff_cache = {}


def _coeffs(nmax):
    # cached by the smallest power of two covering nmax
    cap = 16
    while cap < nmax:
        cap *= 2
    if cap not in _coeff_cache:
        _coeff_cache[cap] = _recurrence_coeffs(cap)
    return _coeff_cache[cap]


def alf_table(nmax, theta, nmin=0):
    """Fully normalised ALF values for degrees ``nmin..nmax``, all orders.

    Returns an array of shape ``(T, len(theta))`` whose row for ``(n, k)`` is
    ``tri(n, k) - tri(nmin, 0)``.
    """
    theta = np.ascontiguousarray(np.atleast_1d(np.asarray(theta, dtype=float)))
    x = np.cos(theta)
    s = np.abs(np.sin(theta))
    a, b = _coeffs(nmax)
    rows = tri(nmax, nmax) + 1 - tri(nmin, 0)
    out = np.empty((rows, theta.size))
    return _alf_kernel(nmin, nmax, x, s, a, b, out)


def alf_dtheta_table(values, nmin, nmax):
    """theta-derivatives from a value table via the order-shift identity.

    ``d/dtheta N_n^k = (sqrt((n-k)(n+k+1)) N_n^{k+1} - sqrt((n+k)(n-k+1)) N_n^{k-1}) / 2``
    with ``N_n^{-1} = -N_n^1``.
    """
    out = np.zeros_like(values)
    base = tri(nmin, 0)
    for n in range(nmin, nmax + 1):
        r0 = tri(n, 0) - base
        blk = values[r0 : r0 + n + 1]
        k = np.arange(n + 1, dtype=float)
        up = np.zeros_like(blk)
        up[:-1] = blk[1:]
        down = np.zeros_like(blk)
        down[1:] = blk[:-1]
        if n >= 1:
            down[0] = -blk[1]
        cu = np.sqrt((n - k) * (n + k + 1.0))[:, None]
        cd = np.sqrt((n + k) * (n - k + 1.0))[:, None]
        out[r0 : r0 + n + 1] = 0.5 * (cu * up - cd * down)
    return out


def assoc_legendre_norm(n, k, theta):
    """Single fully normalised value ``N_n^k(cos theta)``, ``0 <= k <= n``."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    tab = alf_table(n, np.atleast_1d(theta), nmin=n)
    val = tab[k]
    return val if np.ndim(theta) else float(val[0])


def dtheta_assoc_legendre(n, k, theta):
    """Analytic theta-derivative of :func:`assoc_legendre_norm`."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    tab = alf_table(n, np.atleast_1d(theta), nmin=n)
    d = alf_dtheta_table(tab, n, n)[k]
    return d if np.ndim(theta) else float(d[0])


# -- quadrature ------------------------------------------------------------------------


class ConvergenceError(RuntimeError):
    pass


def gauss_legendre_nodes(q, tol=1e-15, max_iter=100):
    """Gauss-Legendre nodes (ascending) and weights on [-1, 1].

    Newton iteration on ``P_q`` from Chebyshev-like initial guesses; the
    negative half is mirrored so the rule is exactly symmetric.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    if q == 1:
        return np.array([0.0]), np.array([2.0])
    half = (q + 1) // 2
    i = np.arange(1, half + 1)
    x = np.cos(np.pi * (i - 0.25) / (q + 0.5))
    for _ in range(max_iter):
        p, dp = _legendre_and_deriv(q, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= tol:
            break
    else:
        raise ConvergenceError(f"Gauss-Legendre Newton did not converge for q={q}")
    _, dp = _legendre_and_deriv(q, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    if q % 2:
        x[-1] = 0.0
    nodes = np.concatenate([-x, x[::-1][q % 2 :]])
    weights = np.concatenate([w, w[::-1][q % 2 :]])
    return nodes, weights


def _legendre_and_deriv(q, x):
    p0, p1 = np.ones_like(x), x.copy()
    for m in range(1, q):
        p0, p1 = p1, ((2 * m + 1) * x * p1 - m * p0) / (m + 1)
    dp = q * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def wallis_l2n(n):
    """``int_{S^2} sin(theta)^{2n} dsigma``, computed in log domain."""
    if n < 0:
        raise ValueError("n must be >= 0")
    j = np.arange(1, n + 1, dtype=float)
    return math.exp(math.log(4.0 * math.pi) + float(np.sum(np.log(2.0 * j / (2.0 * j + 1.0)))))
