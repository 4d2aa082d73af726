"""
Interference and noise statistics.

Two sources: the covariance perturbation model used in synthetic runs, and
adaptive estimation from object-free training bins around the cell under test.
"""

from dataclasses import dataclass, field

import numpy as np

from .arraymath import H, proj_perp
from .errors import InvalidDimensionError, SingularSubspaceError
from .synthetic import exp_corr


@dataclass(frozen=True)
class PerturbationModel:
    """
    Per-interferer Tx correlation and perturbation strength.

    Attributes
    ----------
    rho : tuple of float
        Exponential correlation coefficients, ``|rho| < 1``.
    sigma_tilde2 : tuple of float
        Interference powers.
    sigma2_pert : float
        Variance of the multiplicative perturbation entries.
    seed : int, optional
    """

    rho: tuple
    sigma_tilde2: tuple
    sigma2_pert: float = 0.0
    seed: int = None

    def __post_init__(self):
        object.__setattr__(self, "rho", tuple(float(r) for r in np.atleast_1d(self.rho)))
        object.__setattr__(self, "sigma_tilde2", tuple(float(s) for s in np.atleast_1d(self.sigma_tilde2)))
        if len(self.rho) != len(self.sigma_tilde2):
            raise InvalidDimensionError("rho and sigma_tilde2 must have one entry per interferer")
        if any(abs(r) >= 1 for r in self.rho):
            raise ValueError("correlation coefficients must satisfy |rho| < 1")
        if any(s < 0 for s in self.sigma_tilde2) or self.sigma2_pert < 0:
            raise ValueError("variances must be non-negative")

    def correlations(self, M):
        return [exp_corr(M, r) for r in self.rho]

    def perturbed(self, M, rng=None):
        """One perturbed covariance per interferer (fresh draws from ``rng``)."""
        rng = np.random.default_rng(self.seed) if rng is None else rng
        return [
            perturb_cov(R, s, self.sigma2_pert, rng)
            for R, s in zip(self.correlations(M), self.sigma_tilde2)
        ]


def perturb_cov(R_t, sigma_tilde2, sigma2_pert, rng):
    """
    ``sigma_tilde2 * R_t * (1 1^H + E)`` (elementwise), ``E`` real symmetric
    with i.i.d. ``N(0, sigma2_pert)`` entries on and above the diagonal.

    The result is Hermitian but not necessarily PSD; see ``clip_psd``.
    """
    R_t = np.asarray(R_t)
    M = R_t.shape[0]
    E = np.zeros((M, M))
    if sigma2_pert > 0:
        iu = np.triu_indices(M)
        E[iu] = rng.normal(0.0, np.sqrt(sigma2_pert), size=len(iu[0]))
        E = np.triu(E) + np.triu(E, 1).T
    return sigma_tilde2 * R_t * (1.0 + E)


def clip_psd(R):
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues set to zero)."""
    R = 0.5 * (R + H(R))
    w, V = np.linalg.eigh(R)
    if w.min() >= 0:
        return R
    return (V * np.clip(w, 0, None)) @ H(V)


def build_rtilde_est(R_t_list, A_r, sigma2):
    """
    Normalized covariance ``sum_q R_q / sigma2 (x) a_q a_q^H + I``.

    ``R_t_list`` holds interference Tx covariances that already include the
    interference power (for example ``perturb_cov`` outputs).
    """
    A_r = np.asarray(A_r, dtype=complex)
    if A_r.ndim == 1:
        A_r = A_r[:, None]
    if len(R_t_list) != A_r.shape[1]:
        raise InvalidDimensionError(f"{len(R_t_list)} covariances for {A_r.shape[1]} interferers")
    N = A_r.shape[0]
    M = np.asarray(R_t_list[0]).shape[0] if len(R_t_list) else 1
    R = np.eye(M * N, dtype=complex)
    for R_t, a in zip(R_t_list, A_r.T):
        R += np.kron(np.asarray(R_t) / sigma2, np.outer(a, np.conj(a)))
    return R


def h2_from_cov(R_t, a_t):
    """Essential-interference power ``a_t^H R a_t / ||a_t||^4``."""
    a_t = np.asarray(a_t)
    n2 = np.vdot(a_t, a_t).real
    return float(np.vdot(a_t, np.asarray(R_t) @ a_t).real / n2 ** 2)


def _pinv_cols(A_r):
    G = A_r.conj().T @ A_r
    s = np.linalg.svd(A_r, compute_uv=False)
    if s.size and s[-1] <= 1e-10 * s[0]:
        raise SingularSubspaceError(
            f"interference Rx steering matrix is rank deficient (cond={s[0] / s[-1]:.3g})",
            cond=s[0] / s[-1] if s[-1] > 0 else np.inf,
        )
    return A_r @ np.linalg.inv(G)


def estimate_bin_stats(y, a_t, A_r):
    """
    Noise power, interference Tx vectors and essential amplitudes at one bin.

    Parameters
    ----------
    y : ndarray, shape (MN,) or (..., MN)
        Object-free snapshot(s).
    a_t : ndarray, shape (M,)
    A_r : ndarray, shape (N, Q)
        Interference Rx steering vectors, ``Q <= N - 1``.

    Returns
    -------
    sigma2_hat : float or ndarray
        ``||(I_M (x) P_perp) y||^2 / (M (N - Q))``, unbiased for CN noise.
    a_hat : ndarray, shape (..., Q, M)
        ``(I_M (x) g_q^H) y`` with ``g_q`` the q-th column of ``A (A^H A)^-1``.
    b_hat : ndarray, shape (..., Q)
        ``a_t^H a_hat_q / ||a_t||^2``.
    """
    a_t = np.asarray(a_t, dtype=complex)
    A_r = np.asarray(A_r, dtype=complex)
    if A_r.ndim == 1:
        A_r = A_r[:, None]
    M = a_t.size
    N, Q = A_r.shape
    if Q > N - 1:
        raise InvalidDimensionError(f"need Q <= N - 1 for noise estimation, got Q={Q}, N={N}")
    y = np.asarray(y)
    if y.shape[-1] != M * N:
        raise InvalidDimensionError(f"snapshot length {y.shape[-1]} != M*N = {M * N}")
    Y = y.reshape(*y.shape[:-1], M, N)
    Pp = proj_perp(A_r) if Q else np.eye(N)
    resid = Y @ Pp.T
    sigma2_hat = np.sum(np.abs(resid) ** 2, axis=(-2, -1)) / (M * (N - Q))
    if Q:
        G = _pinv_cols(A_r)
        a_hat = np.swapaxes(Y @ np.conj(G), -1, -2)
    else:
        a_hat = np.zeros((*y.shape[:-1], 0, M), dtype=complex)
    b_hat = a_hat @ np.conj(a_t) / np.vdot(a_t, a_t).real
    return sigma2_hat, a_hat, b_hat


@dataclass(frozen=True, eq=False)
class EstimatedStats:
    """Averaged noise power, essential-interference powers and Tx covariances."""

    sigma2_hat: float
    h2_hat: np.ndarray
    R_t_hat: np.ndarray = field(repr=False)

    @property
    def lam(self):
        return self.h2_hat / self.sigma2_hat


def aggregate_stats(per_bin):
    """
    Average per-bin ``estimate_bin_stats`` results.

    Parameters
    ----------
    per_bin : sequence of (sigma2_hat, a_hat, b_hat)
        One tuple per training bin, single-snapshot shapes.
    """
    per_bin = list(per_bin)
    if not per_bin:
        raise ValueError("no training bins to aggregate")
    s2 = np.mean([float(r[0]) for r in per_bin])
    a = np.stack([np.asarray(r[1]) for r in per_bin])  # (bins, Q, M)
    b = np.stack([np.asarray(r[2]) for r in per_bin])
    h2 = np.mean(np.abs(b) ** 2, axis=0)
    R = np.mean(a[..., :, None] * np.conj(a[..., None, :]), axis=0)
    return EstimatedStats(float(s2), h2, R)


@dataclass(frozen=True)
class TrainingBins:
    """
    Training cells around a cell under test: every combination of the range
    offsets and Doppler offsets (each ``+-(guard)`` by default).
    """

    range_offsets: tuple = (-2, 2)
    doppler_offsets: tuple = (-2, 2)

    def __post_init__(self):
        if 0 in self.range_offsets and 0 in self.doppler_offsets:
            raise ValueError("training bins must exclude the cell under test")
        if not self.range_offsets or not self.doppler_offsets:
            raise ValueError("training set is empty")

    @classmethod
    def with_guard(cls, guard=2):
        return cls((-guard, guard), (-guard, guard))

    def around(self, l, k, L_fft, K_fft):
        """``(range_bins, doppler_bins)`` for cell ``(l, k)``, wrapped modulo the FFT sizes."""
        return (
            [int((l + d) % L_fft) for d in self.range_offsets],
            [int((k + d) % K_fft) for d in self.doppler_offsets],
        )

    def cells(self, l, k, L_fft, K_fft):
        rb, db = self.around(l, k, L_fft, K_fft)
        return [(r, d) for r in rb for d in db]
