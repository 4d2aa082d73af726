"""FMCW chirp parameters, array geometry and slow-time Tx-pulse codes."""

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import CodeConstructionError, InvalidDimensionError

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class ChirpParams:
    """
    FMCW timing of one radar.

    Attributes
    ----------
    beta : float
        Chirp rate in Hz/s.
    T : float
        Chirp (ramp) duration in s.
    T_PRI : float
        Pulse repetition interval in s.
    f_c : float
        Carrier frequency in Hz.
    f_L : float
        Low-pass (IF) cutoff in Hz.
    delta_T : float
        ADC complex sample interval in s.
    L : int
        Fast-time samples per pulse.
    K : int
        Pulses per CPI.
    """

    beta: float
    T: float
    T_PRI: float
    f_c: float
    f_L: float
    delta_T: float
    L: int
    K: int

    def __post_init__(self):
        for name in ("beta", "T", "T_PRI", "f_c", "f_L", "delta_T"):
            if not getattr(self, name) > 0:
                raise ValueError(f"ChirpParams.{name} must be positive")
        if self.L < 1 or self.K < 1:
            raise ValueError("ChirpParams.L and ChirpParams.K must be >= 1")
        if self.T > self.T_PRI:
            raise ValueError("chirp duration T exceeds the PRI")
        if self.L * self.delta_T > self.T_PRI * (1 + 1e-12):
            raise ValueError("L * delta_T exceeds the PRI")

    @property
    def bandwidth(self):
        return self.beta * self.T

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.f_c


@dataclass(frozen=True)
class ArrayGeometry:
    """Collocated uniform linear Tx / Rx arrays (spacings in metres)."""

    M: int
    N: int
    d_t: float
    d_r: float
    wavelength: float

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise InvalidDimensionError("M and N must be >= 1")
        if not (self.d_t > 0 and self.d_r > 0 and self.wavelength > 0):
            raise ValueError("spacings and wavelength must be positive")

    def f_tx(self, angle_deg):
        return self.d_t * np.sin(np.deg2rad(angle_deg)) / self.wavelength

    def f_rx(self, angle_deg):
        return self.d_r * np.sin(np.deg2rad(angle_deg)) / self.wavelength


class CodeMode(enum.Enum):
    DDM_HADAMARD = "DDM_HADAMARD"
    DDM_CHU = "DDM_CHU"
    TDM = "TDM"
    PHASED = "PHASED"


@dataclass(frozen=True, eq=False)
class CodeMatrix:
    """Slow-time codes ``entries[k, m]`` (K pulses by M Tx antennas)."""

    mode: CodeMode
    entries: np.ndarray

    @property
    def K(self):
        return self.entries.shape[0]

    @property
    def M(self):
        return self.entries.shape[1]


def chu_roots(M):
    """Default per-antenna Zadoff-Chu roots ``u_m = 2m + 1``."""
    return [2 * m + 1 for m in range(M)]


def make_codes(mode, K, M, roots=None):
    """
    Build the K x M Tx-pulse code matrix for an operation mode.

    Parameters
    ----------
    mode : CodeMode or str
    K, M : int
        Pulses per CPI and Tx antennas; ``K >= M >= 1``.
    roots : sequence of int, optional
        Zadoff-Chu roots for ``DDM_CHU`` (default ``2m + 1``).

    Raises
    ------
    CodeConstructionError
        When ``(mode, K, M)`` violates the mode's constraints.
    """
    mode = CodeMode(mode)
    K, M = int(K), int(M)
    if M < 1:
        raise CodeConstructionError("need at least one Tx antenna (M >= 1)")
    if K < M:
        raise CodeConstructionError(f"K={K} pulses cannot separate M={M} antennas (K >= M)")
    if mode is CodeMode.DDM_HADAMARD:
        if K & (K - 1):
            raise CodeConstructionError(f"Hadamard codes need K a power of two, got K={K}")
        C = la.hadamard(K)[:, :M].astype(complex)
    elif mode is CodeMode.DDM_CHU:
        roots = chu_roots(M) if roots is None else [int(u) for u in roots]
        if len(roots) != M:
            raise CodeConstructionError(f"need {M} Chu roots, got {len(roots)}")
        if len(set(roots)) != M:
            raise CodeConstructionError("Chu roots must be distinct")
        for u in roots:
            if math.gcd(u, K) != 1:
                raise CodeConstructionError(f"Chu root {u} is not coprime to K={K}")
        k = np.arange(K)
        # k(k+1) u is an integer: reduce mod 2K before the exponent
        ph = np.mod(np.outer(k * (k + 1), roots), 2 * K)
        C = np.exp(1j * np.pi * ph / K)
    elif mode is CodeMode.TDM:
        C = np.zeros((K, M), dtype=complex)
        C[np.arange(K), np.arange(K) % M] = 1.0
    else:
        C = np.ones((K, M), dtype=complex)
    return CodeMatrix(mode, C)


def code_crosscorr(C, f_grid=None):
    """
    Worst normalized cross-correlation between distinct Tx codes.

    ``max_{m != m', f} |sum_k c[k,m] conj(c[k,m']) exp(-j2 pi f k)| / K``.
    The default grid is ``4K`` uniformly spaced frequencies in [0, 1).
    """
    E = C.entries if isinstance(C, CodeMatrix) else np.asarray(C)
    K, M = E.shape
    if M < 2:
        return 0.0
    if f_grid is None:
        f_grid = np.arange(4 * K) / (4 * K)
    f_grid = np.atleast_1d(np.asarray(f_grid, dtype=float))
    if f_grid.size == 0:
        raise ValueError("f_grid must be non-empty")
    F = np.exp(-2j * np.pi * np.outer(f_grid, np.arange(K)))
    worst = 0.0
    for m in range(M):
        for mp in range(M):
            if m != mp:
                worst = max(worst, np.abs(F @ (E[:, m] * np.conj(E[:, mp]))).max())
    return float(worst / K)


def chirp_sample(p, t):
    """Gated source chirp ``exp(j pi beta t^2)`` on ``0 <= t <= T``, else 0."""
    t = np.asarray(t, dtype=float)
    inside = (t >= 0) & (t <= p.T)
    out = np.where(inside, np.exp(1j * np.pi * p.beta * np.where(inside, t, 0.0) ** 2), 0)
    return out.astype(complex) if out.ndim else complex(out)
