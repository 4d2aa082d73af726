"""
Spatial-domain detectors on a virtual-array snapshot.

Every statistic has the form ``(2 / sigma2) * |w^H y|^2 / g`` and accepts a
single snapshot ``y`` of length MN or a batch of shape ``(..., MN)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .arraymath import H, hermitian_solve, kron, proj_perp, reg_proj
from .errors import (
    DegenerateGeometryError,
    InvalidDimensionError,
    OverdeterminedInterferenceError,
    SingularSubspaceError,
)

DETECTORS = ("clairvoyant", "rs", "lcmv", "gs")

# relative floor on the beamformer gain before a geometry counts as degenerate
GAIN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class InterferenceSideInfo:
    """
    Interference knowledge available to the RS / GS detectors.

    Attributes
    ----------
    A_r : ndarray, shape (N, Q)
        Interference Rx steering vectors (``Q = 0`` allowed).
    lam : ndarray, shape (Q,)
        EINRs ``h_q^2 / sigma2``.
    sigma2 : float
        Noise power.
    """

    A_r: np.ndarray
    lam: np.ndarray = field(default=None)
    sigma2: float = 1.0

    def __post_init__(self):
        A = np.asarray(self.A_r, dtype=complex)
        if A.ndim == 1:
            A = A[:, None]
        object.__setattr__(self, "A_r", A)
        lam = np.zeros(A.shape[1]) if self.lam is None else np.atleast_1d(np.asarray(self.lam, float))
        object.__setattr__(self, "lam", lam)
        if lam.shape != (A.shape[1],):
            raise InvalidDimensionError(f"{A.shape[1]} interferers but {lam.size} EINRs")
        if A.shape[1] > A.shape[0]:
            raise OverdeterminedInterferenceError(
                f"{A.shape[1]} interferers exceed the {A.shape[0]}-element Rx array"
            )
        if np.any(lam < 0):
            raise ValueError("EINRs must be non-negative")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def Q(self):
        return self.A_r.shape[1]

    @property
    def N(self):
        return self.A_r.shape[0]

    @classmethod
    def empty(cls, N, sigma2=1.0):
        return cls(np.zeros((N, 0), dtype=complex), np.zeros(0), sigma2)


def _stat(w, y, gain, sigma2):
    y = np.asarray(y)
    return (2.0 / sigma2) * np.abs(y @ np.conj(w)) ** 2 / gain


def essential_amplitude(a_t_tilde, a_t):
    """Component of the interference Tx vector along ``a_t``: ``a_t^H a~ / ||a_t||^2``."""
    a_t = np.asarray(a_t)
    return np.asarray(a_t_tilde) @ np.conj(a_t) / np.vdot(a_t, a_t).real


def essential_covariance(a_t, side: InterferenceSideInfo):
    """
    Normalized essential interference-plus-noise covariance and its inverse.

    ``R = sum_q lam_q (a_t x a_q)(a_t x a_q)^H + I`` and the structured inverse
    ``I - P_{a_t} x P~``, with ``P~`` the EINR-regularized projection.
    """
    a_t = np.asarray(a_t, dtype=complex)
    M, N = a_t.size, side.N
    R = np.eye(M * N, dtype=complex)
    for q in range(side.Q):
        v = kron(a_t, side.A_r[:, q])
        R += side.lam[q] * np.outer(v, np.conj(v))
    P_t = np.outer(a_t, np.conj(a_t)) / np.vdot(a_t, a_t).real
    R_inv = np.eye(M * N) - np.kron(P_t, reg_proj(side.A_r, side.lam, M))
    return R, R_inv


def _gs_parts(a_t, a_r, side):
    M = len(a_t)
    Pp = np.eye(side.N) - reg_proj(side.A_r, side.lam, M)
    u = Pp @ a_r
    gain = M * np.vdot(a_r, u).real
    if gain <= GAIN_TOL * M * side.N:
        raise DegenerateGeometryError(
            "object Rx steering lies in the interference subspace (GS gain collapsed)"
        )
    return kron(a_t, u), gain


def gs_weights(a_t, a_r, side: InterferenceSideInfo):
    """
    GS beamformer ``(a_t x P~perp a_r) / (M a_r^H P~perp a_r)``.

    Distortionless toward ``a_t x a_r`` and null on every
    ``P_perp(a_t) x a~_q`` direction.
    """
    v, gain = _gs_parts(a_t, a_r, side)
    return v / gain


def t_gs(y, a_t, a_r, side: InterferenceSideInfo):
    """GS statistic ``(2/s2) |(a_t x P~perp a_r)^H y|^2 / (M a_r^H P~perp a_r)``."""
    v, gain = _gs_parts(a_t, a_r, side)
    return _stat(v, y, gain, side.sigma2)


def t_clairvoyant(y, a_t, a_r, intf_snapshots, sigma2):
    """
    Matched filter after subtracting the true interference.

    ``intf_snapshots`` is a list of interference snapshots, a single summed
    snapshot (or a batch matching ``y``), or ``None`` for no interference.
    """
    y = np.asarray(y)
    if intf_snapshots is not None:
        if isinstance(intf_snapshots, (list, tuple)):
            if len(intf_snapshots):
                y = y - np.sum(intf_snapshots, axis=0)
        else:
            y = y - np.asarray(intf_snapshots)
    s = kron(a_t, a_r)
    return _stat(s, y, np.vdot(s, s).real, sigma2)


def rs_weights(a_t, a_r, A_r):
    """Unnormalized RS weights ``a_t x P_perp(A_r) a_r`` and their squared norm."""
    A_r = np.asarray(A_r, dtype=complex)
    if A_r.ndim == 1:
        A_r = A_r[:, None]
    u = proj_perp(A_r) @ a_r if A_r.shape[1] else np.asarray(a_r, dtype=complex)
    v = kron(a_t, u)
    g = np.vdot(v, v).real
    if g <= GAIN_TOL * len(a_t) * len(a_r):
        raise DegenerateGeometryError(
            "object Rx steering lies in the interference Rx subspace; RS is undefined"
        )
    return v, g


def t_rs(y, a_t, a_r, A_r, sigma2):
    """RS (receive-subspace GLRT) statistic."""
    v, g = rs_weights(a_t, a_r, A_r)
    return _stat(v, y, g, sigma2)


def lcmv_weights(a_t, a_r, R_tilde):
    """Unnormalized LCMV weights ``R~^{-1} s`` and ``s^H R~^{-1} s``."""
    s = kron(a_t, a_r)
    R_tilde = np.asarray(R_tilde)
    if not np.allclose(R_tilde, H(R_tilde), rtol=0, atol=1e-10 * np.abs(R_tilde).max()):
        raise SingularSubspaceError("LCMV covariance is not Hermitian")
    w = hermitian_solve(R_tilde, s)
    return w, np.vdot(s, w).real


def t_lcmv(y, a_t, a_r, R_tilde, sigma2):
    """LCMV statistic ``(2/s2) |(R~^{-1}s)^H y|^2 / (s^H R~^{-1} s)``; R~ must be PD."""
    w, g = lcmv_weights(a_t, a_r, R_tilde)
    return _stat(w, y, g, sigma2)


def t_matched(y, a_t, a_r, sigma2):
    """Interference-ignoring matched filter (the plain angle FFT)."""
    return t_clairvoyant(y, a_t, a_r, None, sigma2)
