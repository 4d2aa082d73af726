"""
Victim-receiver simulation of MIMO-FMCW objects and interferers.

Both paths produce the low-pass filtered, ADC-sampled baseband tensor
``a[n, l, k]`` (Rx antenna, fast-time sample, pulse). The LPF is the ideal
instantaneous-frequency gate: the dechirped beat passes when its frequency
lies in ``(-f_L, 0)``; there is no filter transient.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arraymath import steering
from .waveform import SPEED_OF_LIGHT, ArrayGeometry, ChirpParams, CodeMatrix

# relative guard used in the strict pulse-overlap inequalities
_EDGE_EPS = 1e-12


@dataclass(frozen=True)
class ObjectTruth:
    """Point object: range (m), radial velocity (m/s), angle (deg), amplitude."""

    R: float
    v: float
    phi: float
    alpha: complex = 1.0

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("object range must be positive")


@dataclass(frozen=True)
class ObjectDerived:
    tau: float
    f_r: float
    f_d: float
    f_phi_t: float
    f_phi_r: float
    sample_set: np.ndarray


def derive_object(p: ChirpParams, geom: ArrayGeometry, obj: ObjectTruth) -> ObjectDerived:
    """Delay, normalized range/Doppler/spatial frequencies and valid samples."""
    tau = 2.0 * obj.R / SPEED_OF_LIGHT
    lam = p.wavelength
    f_r = (p.beta * tau + 2.0 * obj.v / lam) * p.delta_T
    f_d = 2.0 * p.f_c * p.T_PRI * obj.v / SPEED_OF_LIGHT
    return ObjectDerived(
        tau=tau,
        f_r=f_r,
        f_d=f_d,
        f_phi_t=geom.f_tx(obj.phi),
        f_phi_r=geom.f_rx(obj.phi),
        sample_set=_sample_set(p, tau),
    )


def _sample_set(p, tau):
    lo = max(math.ceil(tau / p.delta_T), 0)
    hi = min(math.floor(p.T / p.delta_T), p.L - 1)
    return np.arange(lo, hi + 1) if hi >= lo else np.arange(0)


@dataclass(frozen=True)
class InterfererTruth:
    """
    Incoherent MIMO-FMCW interferer as seen from the victim.

    ``phi_t`` is measured from the interferer's boresight, ``phi_r`` from the
    victim's. Only ``beta``, ``T``, ``T_PRI`` and ``K`` of ``chirp`` are used;
    carrier and wavelength are the victim's. ``tx_weights`` are optional
    per-antenna Tx beamforming weights (phased-array mode).
    """

    R: float
    v: float
    phi_t: float
    phi_r: float
    alpha: complex
    chirp: ChirpParams
    tau_syn: float
    codes: CodeMatrix
    d_t: float
    tx_weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("interferer range must be positive")
        if self.codes.K != self.chirp.K:
            raise ValueError(
                f"interferer codes have {self.codes.K} pulses but chirp K={self.chirp.K}"
            )
        if self.tx_weights is not None and len(self.tx_weights) != self.codes.M:
            raise ValueError("tx_weights length must equal the interferer Tx count")

    @property
    def M(self):
        return self.codes.M

    @property
    def tau(self):
        return self.R / SPEED_OF_LIGHT


def overlap_set(victim: ChirpParams, intf: InterfererTruth, k_tilde: int):
    """
    Victim pulses that can dechirp interfering pulse ``k_tilde``.

    Returns
    -------
    list of (int, float)
        Pairs ``(k, tau_prime)`` with
        ``tau_prime = k_tilde*T~_PRI + tau_syn - k*T_PRI`` strictly inside
        ``(-T~_PRI, T_PRI)``.
    """
    Tt = intf.chirp.T_PRI
    T = victim.T_PRI
    start = k_tilde * Tt + intf.tau_syn
    lo = math.floor((start - T) / T) - 1
    hi = math.ceil((start + Tt) / T) + 1
    out = []
    for k in range(max(lo, 0), min(hi, victim.K - 1) + 1):
        tp = (k_tilde * Tt - k * T) + intf.tau_syn
        if -Tt * (1 - _EDGE_EPS) < tp < T * (1 - _EDGE_EPS):
            out.append((k, tp))
    return out


def lpf_gate(victim: ChirpParams, intf_chirp: ChirpParams, tau_prime, tau_tilde):
    """
    Fast-time samples where interference survives dechirp + LPF.

    Keeps ``l`` in ``[0, L)`` whose instantaneous beat
    ``beta~ u - (beta~ - beta) l dT`` lies in ``(0, f_L)``, ``u = tau' + tau~``,
    and whose time ``l dT`` falls inside the overlap gate
    ``[u, min(T, u + T~)]``.
    """
    u = tau_prime + tau_tilde
    l = np.arange(victim.L)
    t = l * victim.delta_T
    bt = intf_chirp.beta
    inst = bt * u - (bt - victim.beta) * t
    # time bounds compared in sample units, matching the object sample set
    upper = min(victim.T, u + intf_chirp.T)
    keep = (inst > 0) & (inst < victim.f_L) & (l >= u / victim.delta_T) & (l <= upper / victim.delta_T)
    return l[keep]


def _spatial_sum(codes, f_t, weights=None):
    """Per-pulse Tx combination ``sum_m c[k,m] w_m exp(-j2pi f_t m)``."""
    E = codes.entries
    w = np.ones(E.shape[1]) if weights is None else np.asarray(weights)
    return E @ (w * steering(E.shape[1], f_t))


def simulate_object(victim: ChirpParams, geom: ArrayGeometry, codes: CodeMatrix, obj: ObjectTruth):
    """
    Sampled dechirped object return, shape ``(N, L, K)``.

    If the beat ``beta * tau`` is at or above the LPF cutoff the object is
    filtered out: a warning is emitted and a zero tensor returned.
    """
    d = derive_object(victim, geom, obj)
    alpha_tau = obj.alpha * np.exp(-2j * np.pi * np.mod(victim.f_c * d.tau, 1.0)) * np.exp(
        1j * np.pi * victim.beta * d.tau ** 2
    )
    if victim.beta * d.tau >= victim.f_L:
        warnings.warn(
            f"object at R={obj.R} m beats at {victim.beta * d.tau:.4g} Hz, above the "
            f"{victim.f_L:.4g} Hz LPF cutoff; it is filtered out",
            RuntimeWarning,
            stacklevel=2,
        )
        return np.zeros((geom.N, victim.L, victim.K), dtype=complex)
    return coherent_tensor(
        victim, codes, geom.N, alpha_tau, d.f_r, d.f_d, d.f_phi_t, d.f_phi_r, d.sample_set
    )


def coherent_tensor(p, codes, N, amp, f_r, f_d, f_t, f_rx, sample_set):
    """
    ``amp * exp(-j2pi f_r l) 1[l in set] * sum_m c[k,m] exp(-j2pi(f_d k + f_t m + f_rx n))``.

    Shared by the object path and by the coherent-interference reduction.
    """
    if codes.K != p.K:
        raise ValueError(f"codes have {codes.K} pulses, chirp has K={p.K}")
    fast = np.zeros(p.L, dtype=complex)
    ls = np.asarray(sample_set, dtype=int)
    fast[ls] = np.exp(-2j * np.pi * np.mod(f_r * ls, 1.0))
    slow = _spatial_sum(codes, f_t) * steering(p.K, f_d)
    rx = steering(N, f_rx)
    return amp * rx[:, None, None] * fast[None, :, None] * slow[None, None, :]


def interference_fast_slow(victim: ChirpParams, intf: InterfererTruth):
    """
    Interference tensor before the Rx steering factor, shape ``(L, K)``.

    Includes the complex amplitude, all overlapping pulse pairs, the observed
    interferer code and its Tx steering, and the slow-time Doppler.
    """
    s = np.zeros((victim.L, victim.K), dtype=complex)
    lam = victim.wavelength
    bt = intf.chirp.beta
    tau_t = intf.tau
    f_t = intf.d_t * np.sin(np.deg2rad(intf.phi_t)) / lam
    code_sum = _spatial_sum(intf.codes, f_t, intf.tx_weights)
    for kt in range(intf.codes.K):
        if code_sum[kt] == 0:
            continue
        for k, tp in overlap_set(victim, intf, kt):
            ls = lpf_gate(victim, intf.chirp, tp, tau_t)
            if ls.size == 0:
                continue
            u = tp + tau_t
            f_rk = (bt * u + intf.v / lam) * victim.delta_T
            const = (
                code_sum[kt]
                * np.exp(1j * np.pi * bt * u ** 2)
                * np.exp(-2j * np.pi * np.mod(victim.f_c * tp, 1.0))
            )
            tl = ls * victim.delta_T
            s[ls, k] += const * np.exp(
                1j * np.pi * (bt - victim.beta) * tl ** 2 - 2j * np.pi * f_rk * ls
            )
    f_d = victim.f_c * intf.v * victim.T_PRI / SPEED_OF_LIGHT
    amp = intf.alpha * np.exp(-2j * np.pi * np.mod(victim.f_c * tau_t, 1.0))
    return amp * s * steering(victim.K, f_d)[None, :]


def simulate_interference(victim: ChirpParams, geom: ArrayGeometry, intf: InterfererTruth):
    """Sampled low-pass interference at the victim Rx, shape ``(N, L, K)``."""
    s = interference_fast_slow(victim, intf)
    rx = steering(geom.N, geom.f_rx(intf.phi_r))
    return rx[:, None, None] * s[None, :, :]


def add_noise(raw, sigma2, rng):
    """Add i.i.d. CN(0, sigma2) noise to a tensor (returns a new array)."""
    z = rng.standard_normal(raw.shape) + 1j * rng.standard_normal(raw.shape)
    return raw + np.sqrt(sigma2 / 2.0) * z


def range_bin(p: ChirpParams, R, L_fft):
    """Range bin at which a static object at range ``R`` peaks."""
    f_r = p.beta * 2.0 * R / SPEED_OF_LIGHT * p.delta_T
    return int(np.round(-f_r * L_fft)) % L_fft


def doppler_bin(p: ChirpParams, v, K_fft):
    """Doppler bin with ``f_d + k'/K_fft`` closest to an integer."""
    f_d = 2.0 * p.f_c * p.T_PRI * v / SPEED_OF_LIGHT
    return int(np.round(-f_d * K_fft)) % K_fft
