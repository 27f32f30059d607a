"""Dense Hermitian eigenproblems by cyclic Jacobi on the real doubling.

A Hermitian ``H = A + iB`` is embedded as the real symmetric
``M = [[A, -B], [B, A]]``.  Every eigenvalue of ``H`` appears twice in
``M``; an eigenvector ``(u, v)`` of ``M`` gives ``z = u + iv`` for ``H``.
Before doubling, ``H`` is split into the connected components of its
nonzero pattern (Gram matrices of axisymmetric measures are block
diagonal by azimuthal order), and purely real blocks skip the doubling.
"""

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from lslab._accel import dispatch, njit

TOL = 1e-12
MAX_SWEEPS = 60
PAIR_TOL = 1e-9


class NotHermitianError(ValueError):
    pass


class JacobiConvergenceError(RuntimeError):
    pass


@njit
def _jacobi_nb(A, V, tol, max_sweeps):
    n = A.shape[0]
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += A[p, q] * A[p, q]
        if math.sqrt(2.0 * off) <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for r in range(n):
                    arp = A[r, p]
                    arq = A[r, q]
                    A[r, p] = c * arp - s * arq
                    A[r, q] = s * arp + c * arq
                for r in range(n):
                    apr = A[p, r]
                    aqr = A[q, r]
                    A[p, r] = c * apr - s * aqr
                    A[q, r] = s * apr + c * aqr
                A[p, q] = 0.0
                A[q, p] = 0.0
                for r in range(n):
                    vrp = V[r, p]
                    vrq = V[r, q]
                    V[r, p] = c * vrp - s * vrq
                    V[r, q] = s * vrp + c * vrq
    return -1


def _round_robin(n):
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            rounds.append((np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _jacobi_np(A, V, tol, max_sweeps):
    """Same sweeps, but each round applies ``n/2`` disjoint rotations at once."""
    n = A.shape[0]
    rounds = _round_robin(n)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * np.sum(np.triu(A, 1) ** 2))
        if off <= tol:
            return sweep
        if sweep == max_sweeps:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            active = apq != 0.0
            if not np.any(active):
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            theta = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            Ap, Aq = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = c * Ap - s * Aq
            A[:, Q] = s * Ap + c * Aq
            Ap, Aq = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = c[:, None] * Ap - s[:, None] * Aq
            A[Q, :] = s[:, None] * Ap + c[:, None] * Aq
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            Vp, Vq = V[:, P].copy(), V[:, Q].copy()
            V[:, P] = c * Vp - s * Vq
            V[:, Q] = s * Vp + c * Vq
    return -1


_jacobi = dispatch(_jacobi_nb, _jacobi_np)


def symmetric_eigs(S, scale=None):
    """Eigenvalues (ascending) and eigenvectors of a real symmetric matrix."""
    A = np.array(S, dtype=float, order="C")
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A) if scale is None else scale
    if n > 1:
        sweeps = _jacobi(A, V, TOL * scale, MAX_SWEEPS)
        if sweeps < 0:
            raise JacobiConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def _pivoted_gram_schmidt(C, m):
    """``m`` orthonormal complex vectors spanning the columns of ``C``.

    The ``2m`` columns from a doubled cluster span an ``m``-dimensional
    complex space; picking the largest residual each time keeps every
    pivot well away from zero.
    """
    R = C.copy()
    out = []
    for _ in range(m):
        norms = np.linalg.norm(R, axis=0)
        c = int(np.argmax(norms))
        if norms[c] < 1e-6:
            raise JacobiConvergenceError("degenerate cluster lost rank")
        q = R[:, c] / norms[c]
        for b in out:  # second pass against drift
            q -= (b.conj() @ q) * b
        q /= np.linalg.norm(q)
        out.append(q)
        R -= np.outer(q, q.conj() @ R)
    return out


def _undouble(w, V, n, scale):
    """Pair the doubled spectrum and recover complex eigenvectors."""
    Z = V[:n] + 1j * V[n:]
    tol = PAIR_TOL * max(scale, 1.0)
    vals, vecs = [], []
    i = 0
    while i < w.size:
        j = i + 1
        while j < w.size and w[j] - w[j - 1] <= tol:
            j += 1
        m = (j - i) // 2
        if (j - i) % 2:
            raise JacobiConvergenceError("doubled spectrum does not pair up")
        vals.extend([float(np.mean(w[i:j]))] * m)
        vecs.extend(_pivoted_gram_schmidt(Z[:, i:j], m))
        i = j
    return np.array(vals), np.array(vecs).T


def check_hermitian(H, rtol=1e-10):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitianError("matrix must be square")
    scale = np.linalg.norm(H)
    if np.linalg.norm(H - H.conj().T) > rtol * max(scale, 1e-300):
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    return 0.5 * (H + H.conj().T)


def hermitian_eigs(H, vectors=False):
    """Ascending eigenvalues of a Hermitian matrix, optionally with eigenvectors."""
    H = check_hermitian(H)
    d = H.shape[0]
    scale = float(np.linalg.norm(H))
    n_comp, labels = connected_components(csr_matrix(H != 0), directed=False)
    w_all = np.empty(d)
    V_all = np.zeros((d, d), complex) if vectors else None
    col = 0
    for c in range(n_comp):
        idx = np.nonzero(labels == c)[0]
        block = H[np.ix_(idx, idx)]
        if not np.any(block.imag):
            w, V = symmetric_eigs(block.real, scale)
        else:
            A, B = block.real, block.imag
            M = np.block([[A, -B], [B, A]])
            w2, V2 = symmetric_eigs(M, scale)
            w, V = _undouble(w2, V2, idx.size, scale)
        w_all[col : col + idx.size] = w
        if vectors:
            V_all[idx, col : col + idx.size] = V
        col += idx.size
    order = np.argsort(w_all, kind="stable")
    if vectors:
        return w_all[order], V_all[:, order]
    return w_all[order]
