"""
Complex vector / matrix primitives used throughout the package.

Conventions
-----------
* Steering vectors use the negative-exponent Fourier form
  ``a[n] = exp(-j 2 pi f n)``.
* Virtual-array vectors are ordered Tx-major: ``kron(a_t, a_r)``.
* Batched inputs put the vector axis last.

The tolerances below are module constants; every function that uses one
also accepts it as a keyword so callers can override it locally.
"""

import numpy as np
import scipy.linalg as la

from .errors import (
    InvalidDimensionError,
    OverdeterminedInterferenceError,
    SingularSubspaceError,
)

# full-column-rank test: smallest singular value relative to largest
RANK_TOL = 1e-10
# Cholesky pivot guard, relative to the largest pivot
PIVOT_TOL = 1e-12
HERMITIAN_TOL = 1e-12
IDEMPOTENT_TOL = 1e-10


def H(A):
    """Conjugate transpose of the last two axes."""
    return np.swapaxes(np.conj(A), -1, -2)


def spatial_frequency(spacing, angle_deg, wavelength):
    """Normalized spatial frequency ``spacing * sin(angle) / wavelength``."""
    return spacing * np.sin(np.deg2rad(angle_deg)) / wavelength


def steering(length, f):
    """
    Uniform-linear-array steering vector.

    Parameters
    ----------
    length : int
        Number of elements.
    f : float
        Normalized spatial frequency (cycles per element).

    Returns
    -------
    ndarray, shape (length,)
        ``exp(-2j*pi*f*n)`` for ``n = 0 .. length-1``.
    """
    length = int(length)
    if length < 1:
        raise InvalidDimensionError(f"steering length must be >= 1, got {length}")
    n = np.arange(length)
    # reduce f*n mod 1 before exponentiating to keep phases exact for large f
    return np.exp(-2j * np.pi * np.mod(f * n, 1.0))


def kron(a, b):
    """Kronecker product of two vectors; entry ``i*len(b) + j`` is ``a[i]*b[j]``."""
    return np.kron(np.asarray(a), np.asarray(b))


def hermitian_solve(A, B, pivot_tol=None):
    """
    Solve ``A X = B`` for Hermitian positive-definite ``A`` via Cholesky.

    Raises
    ------
    SingularSubspaceError
        If the factorization fails or its smallest pivot falls below
        ``pivot_tol`` times the largest one.
    """
    pivot_tol = PIVOT_TOL if pivot_tol is None else pivot_tol
    A = np.asarray(A)
    try:
        c, lower = la.cho_factor(A, lower=True, check_finite=True)
    except la.LinAlgError as exc:
        raise SingularSubspaceError(f"matrix is not positive definite: {exc}") from exc
    piv = np.abs(np.diag(c)) ** 2
    if piv.min() < pivot_tol * piv.max():
        cond = piv.max() / max(piv.min(), np.finfo(float).tiny)
        raise SingularSubspaceError(
            f"Hermitian matrix is numerically singular (pivot ratio {cond:.3e})",
            cond=cond,
        )
    return la.cho_solve((c, lower), B)


def _check_full_rank(Hm, rank_tol):
    s = np.linalg.svd(Hm, compute_uv=False)
    if s.size == 0:
        return
    if s[-1] <= rank_tol * s[0]:
        cond = np.inf if s[-1] == 0 else s[0] / s[-1]
        raise SingularSubspaceError(
            f"subspace basis is rank deficient (condition number {cond:.3e})",
            cond=cond,
        )


def proj(Hm, rank_tol=None):
    """
    Orthogonal projector onto the column space of ``Hm``.

    ``P = Hm (Hm^H Hm)^{-1} Hm^H``. An ``N x 0`` basis gives the zero matrix.
    """
    rank_tol = RANK_TOL if rank_tol is None else rank_tol
    Hm = np.atleast_2d(np.asarray(Hm, dtype=complex))
    if Hm.ndim != 2:
        raise InvalidDimensionError("proj expects a 2-D matrix")
    n, q = Hm.shape
    if q == 0:
        return np.zeros((n, n), dtype=complex)
    if q > n:
        raise SingularSubspaceError(f"{q} columns cannot be independent in dimension {n}")
    _check_full_rank(Hm, rank_tol)
    P = Hm @ hermitian_solve(H(Hm) @ Hm, H(Hm))
    return 0.5 * (P + H(P))


def proj_perp(Hm, rank_tol=None):
    """Projector onto the orthogonal complement of ``span(Hm)``."""
    P = proj(Hm, rank_tol=rank_tol)
    return np.eye(P.shape[0]) - P


def reg_proj(A_r, lam, M):
    """
    EINR-regularized projection ``M A (Lambda^-1 + M A^H A)^-1 A^H``.

    Columns whose EINR is exactly zero contribute nothing and are dropped
    before the inversion (their ``Lambda^-1`` entry would be infinite).

    Parameters
    ----------
    A_r : ndarray, shape (N, Q)
        Interference receive steering vectors as columns.
    lam : array_like, shape (Q,)
        Non-negative, finite EINRs.
    M : int
        Number of victim Tx antennas.

    Returns
    -------
    ndarray, shape (N, N)
        Hermitian PSD matrix with eigenvalues in [0, 1).
    """
    A_r = np.asarray(A_r, dtype=complex)
    if A_r.ndim == 1:
        A_r = A_r[:, None]
    n, q = A_r.shape
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if lam.shape != (q,):
        raise InvalidDimensionError(f"need {q} EINR values, got shape {lam.shape}")
    if q > n:
        raise OverdeterminedInterferenceError(
            f"{q} interferers exceed the {n}-element receive array"
        )
    if M < 1:
        raise InvalidDimensionError("M must be >= 1")
    if np.any(~np.isfinite(lam)) or np.any(lam < 0):
        raise ValueError("EINR values must be finite and non-negative")
    keep = lam > 0
    if not np.any(keep):
        return np.zeros((n, n), dtype=complex)
    A = A_r[:, keep]
    G = np.diag(1.0 / lam[keep]) + M * (H(A) @ A)
    P = M * (A @ hermitian_solve(G, H(A)))
    return 0.5 * (P + H(P))
