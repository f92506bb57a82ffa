"""Dense linear algebra for small real matrices.

Everything the certificate machinery needs is implemented here from
scratch: a cyclic Jacobi eigensolver for symmetric matrices, textbook
Cholesky, spectral norm, projection onto a spectral box, generalized
eigenvalues, and spectral radius of (possibly non-symmetric) products.
numpy is used as the array container only; no LAPACK-backed routine is
called from library code.  The kernels are tuned for tiny dense problems
(``n <= MAX_DIM``) and are deliberately simple rather than fast for
large n.

The Jacobi routine is compiled with numba because the feasibility solver
calls it inside its innermost loop (spectral box projections, one per
graph node per sweep).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numba import njit

# Relative tolerance for reconstruction/orthogonality residuals; the test
# suite checks the documented contracts against this constant.
RECONSTRUCTION_RTOL = 1e-10

# Hard cap on cyclic Jacobi sweeps before declaring non-convergence.  For
# n <= 8 the iteration converges quadratically and needs < 10 sweeps; the
# cap only guards against NaN-poisoned input.
JACOBI_SWEEP_CAP = 100

# Off-diagonal threshold used by the Jacobi stop test, relative to the
# Frobenius norm of the input.  Chosen two orders below the documented
# reconstruction tolerance.
_JACOBI_OFF_RTOL = 1e-13

# These kernels target small dense matrices (quadratic-form dimensions).
MAX_DIM = 8


class NumericalError(RuntimeError):
    """An iterative kernel failed to reach its tolerance within its cap."""


class NotPositiveDefiniteError(ValueError):
    """A matrix required to be positive definite is not."""


class EigenDecomposition(NamedTuple):
    """Eigenvalues (ascending) and matching orthonormal eigenvectors.

    ``eigenvectors[:, k]`` is the unit eigenvector for ``eigenvalues[k]``;
    ``Q @ diag(w) @ Q.T`` reconstructs the input within
    ``RECONSTRUCTION_RTOL``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _as_square(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if A.shape[0] > MAX_DIM:
        raise ValueError(
            f"{name} has dimension {A.shape[0]}; these kernels support n <= {MAX_DIM}"
        )
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def _as_sym(M, name: str = "matrix") -> np.ndarray:
    A = _as_square(M, name)
    scale = max(1.0, float(np.abs(A).max()))
    if float(np.abs(A - A.T).max()) > 1e-8 * scale:
        raise ValueError(f"{name} is not symmetric")
    # Symmetrize away harmless rounding asymmetry so downstream kernels can
    # rely on exact symmetry.
    return 0.5 * (A + A.T)


@njit(cache=True)
def _jacobi_sym(A):
    """Cyclic Jacobi on a symmetric matrix.

    Returns ``(w, Q, converged)`` with eigenvalues ``w`` ascending and
    eigenvectors in the columns of ``Q``.
    """
    n = A.shape[0]
    M = A.copy()
    Q = np.eye(n)

    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += M[i, j] * M[i, j]
    fro = math.sqrt(fro)
    thresh = 1e-13 * (fro if fro > 1.0 else 1.0)

    converged = False
    for _sweep in range(100):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += M[p, q] * M[p, q]
        if math.sqrt(2.0 * off) <= thresh:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = M[p, q]
                if apq == 0.0:
                    continue
                theta = (M[q, q] - M[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # M <- J^T M J with J = I except J[p,p]=J[q,q]=c,
                # J[p,q]=s, J[q,p]=-s.
                for i in range(n):
                    mip = M[i, p]
                    miq = M[i, q]
                    M[i, p] = c * mip - s * miq
                    M[i, q] = s * mip + c * miq
                for j in range(n):
                    mpj = M[p, j]
                    mqj = M[q, j]
                    M[p, j] = c * mpj - s * mqj
                    M[q, j] = s * mpj + c * mqj
                M[p, q] = 0.0
                M[q, p] = 0.0
                for i in range(n):
                    qip = Q[i, p]
                    qiq = Q[i, q]
                    Q[i, p] = c * qip - s * qiq
                    Q[i, q] = s * qip + c * qiq

    w = np.empty(n)
    for i in range(n):
        w[i] = M[i, i]
    order = np.argsort(w)
    w_sorted = np.empty(n)
    Q_sorted = np.empty((n, n))
    for k in range(n):
        w_sorted[k] = w[order[k]]
        for i in range(n):
            Q_sorted[i, k] = Q[i, order[k]]
    return w_sorted, Q_sorted, converged


def eig_sym(M) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix via cyclic Jacobi sweeps.

    Raises :class:`NumericalError` if the sweep cap is reached without the
    off-diagonal mass dropping below tolerance (does not happen for finite
    symmetric input of supported size).
    """
    A = _as_sym(M)
    w, Q, ok = _jacobi_sym(A)
    if not ok:
        raise NumericalError(
            f"Jacobi iteration did not converge within {JACOBI_SWEEP_CAP} sweeps"
        )
    return EigenDecomposition(w, Q)


def cholesky(P) -> np.ndarray:
    """Lower-triangular L with ``L @ L.T == P`` for positive definite P."""
    A = _as_sym(P, "P")
    n = A.shape[0]
    L = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s = A[i, j] - np.dot(L[i, :j], L[j, :j])
            if i == j:
                if s <= 0.0:
                    raise NotPositiveDefiniteError(
                        f"pivot {i} is {s:.3e}; matrix is not positive definite"
                    )
                L[i, i] = math.sqrt(s)
            else:
                L[i, j] = s / L[j, j]
    return L


def _forward_solve(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve L X = B for lower-triangular L (tiny n, plain loops)."""
    n = L.shape[0]
    X = np.array(B, dtype=np.float64, copy=True)
    if X.ndim == 1:
        X = X[:, None]
        squeeze = True
    else:
        squeeze = False
    for i in range(n):
        X[i] -= L[i, :i] @ X[:i]
        X[i] /= L[i, i]
    return X[:, 0] if squeeze else X


def spectral_norm(A) -> float:
    """Largest singular value, computed as sqrt(lambda_max(A^T A))."""
    B = _as_square(A, "A")
    w, _ = eig_sym(B.T @ B)
    return math.sqrt(max(float(w[-1]), 0.0))


def project_psd_box(M, lo: float, hi: float) -> np.ndarray:
    """Frobenius-nearest symmetric matrix with spectrum inside [lo, hi].

    Eigendecomposes ``M``, clamps each eigenvalue into the box, and
    reconstructs.  Idempotent and non-expansive.
    """
    if lo > hi:
        raise ValueError(f"empty box: lo={lo} > hi={hi}")
    w, Q = eig_sym(M)
    w_clamped = np.clip(w, lo, hi)
    R = (Q * w_clamped) @ Q.T
    return 0.5 * (R + R.T)


def max_generalized_eig(S, P) -> float:
    """Smallest t with S <= t P, i.e. lambda_max(L^-1 S L^-T), L L^T = P.

    ``P`` must be positive definite; ``S`` symmetric.
    """
    Ssym = _as_sym(S, "S")
    L = cholesky(P)
    W = _forward_solve(L, Ssym)  # L^-1 S
    B = _forward_solve(L, W.T)  # L^-1 S^T L^-T  (= L^-1 S L^-T by symmetry)
    B = 0.5 * (B + B.T)
    w, _ = eig_sym(B)
    return float(w[-1])


def sym_pack(M) -> np.ndarray:
    """Pack the upper triangle of a symmetric matrix row-wise into a vector."""
    A = _as_sym(M)
    n = A.shape[0]
    iu = np.triu_indices(n)
    return A[iu]


def sym_unpack(vec, n: int) -> np.ndarray:
    """Inverse of :func:`sym_pack`."""
    v = np.asarray(vec, dtype=np.float64)
    if v.shape != (n * (n + 1) // 2,):
        raise ValueError(f"packed vector has wrong length for n={n}")
    M = np.zeros((n, n))
    iu = np.triu_indices(n)
    M[iu] = v
    M = M + np.triu(M, 1).T
    return M


# ---------------------------------------------------------------------------
# spectral radius of a general (possibly non-symmetric) small matrix
# ---------------------------------------------------------------------------

def _char_poly(A: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients via Faddeev-LeVerrier.

    Returns c with p(x) = x^n + c[0] x^(n-1) + ... + c[n-1].
    """
    n = A.shape[0]
    c = np.zeros(n)
    Mk = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk
        ck = -np.trace(Mk) / k
        c[k - 1] = ck
        Mk = Mk + ck * np.eye(n)
    return c


def _poly_roots_maxmod(c: np.ndarray) -> float:
    """Largest root modulus of a monic polynomial via Durand-Kerner."""
    n = len(c)
    if n == 0:
        return 0.0
    # Cauchy bound scales the initial circle of iterates.
    bound = 1.0 + float(np.max(np.abs(c)))
    z = bound * np.exp(2j * np.pi * (np.arange(n) + 0.25) / n)
    coeffs = np.concatenate(([1.0], c)).astype(np.complex128)

    def p(x):
        acc = np.zeros_like(x)
        for ck in coeffs:
            acc = acc * x + ck
        return acc

    for _ in range(200):
        delta = np.zeros_like(z)
        for i in range(n):
            diff = z[i] - np.delete(z, i)
            denom = np.prod(diff)
            if denom == 0:
                denom = 1e-300
            delta[i] = p(np.array([z[i]]))[0] / denom
        z = z - delta
        if np.max(np.abs(delta)) < 1e-14 * max(1.0, np.max(np.abs(z))):
            break
    return float(np.max(np.abs(z)))


def spectral_radius(A) -> float:
    """Largest eigenvalue modulus of a small square matrix.

    Closed form for n <= 2; characteristic polynomial root search above.
    """
    B = _as_square(A, "A")
    n = B.shape[0]
    if n == 1:
        return abs(float(B[0, 0]))
    if n == 2:
        tr = float(B[0, 0] + B[1, 1])
        det = float(B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0])
        disc = tr * tr - 4.0 * det
        if disc >= 0.0:
            r = math.sqrt(disc)
            return max(abs((tr + r) / 2.0), abs((tr - r) / 2.0))
        return math.sqrt(det)  # complex pair: |lambda|^2 = det
    return _poly_roots_maxmod(_char_poly(B))
