"""
Special-case checks of the incoherent interference model.

Each validator runs the full chain (simulate, decode) and compares the
decoded interference snapshot against the closed form the general model
collapses to under that mode's conditions:

* COHERENT: synchronized interferer with the victim's own waveform and
  Hadamard codes looks like an object, ``b^i exp(-j2pi(f_t m + f_r n))``.
* PHASED: all-ones codes give an m-independent Fourier vector
  ``a'_t exp(-j2pi f_r n)``.
* TDM: one-hot codes with per-antenna Doppler FFTs keep the
  ``kron(a'_t, a_r)`` (rank-1) structure.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .arraymath import steering
from .errors import ConfigError
from .processing import range_doppler_decode
from .signal_chain import (
    InterfererTruth,
    lpf_gate,
    overlap_set,
    simulate_interference,
)
from .waveform import SPEED_OF_LIGHT, CodeMode, make_codes

REDUCTION_TOL = 1e-6


class SpecialCase(enum.Enum):
    COHERENT = "COHERENT"
    PHASED = "PHASED"
    TDM = "TDM"


@dataclass(frozen=True, eq=False)
class SpecialCaseScenario:
    """Victim chirp / geometry / codes and a single interferer."""

    victim: object
    geom: object
    codes: object
    intf: InterfererTruth
    fft_sizes: tuple = None


@dataclass(frozen=True)
class ReductionReport:
    mode: SpecialCase
    max_rel_deviation: float
    bins: tuple = field(default=())
    tol: float = REDUCTION_TOL

    @property
    def passed(self):
        return bool(self.max_rel_deviation <= self.tol)


def special_case_scenario(mode, K, rng=None, M=4, N=4):
    """
    A scenario meeting ``mode``'s preconditions, built on the reference chirp.

    ``rng`` randomizes the interferer geometry and amplitude; ``None`` uses
    fixed values.
    """
    mode = SpecialCase(mode)
    rng = np.random.default_rng(0) if rng is None else rng
    victim = defaults.victim_chirp(K=K)
    geom = defaults.victim_geometry(M=M, N=N)
    phi_t = rng.uniform(-60, 60)
    phi_r = rng.uniform(-60, 60)
    R = rng.uniform(1.0, 3.0)
    alpha = rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.uniform())
    if mode is SpecialCase.COHERENT:
        codes = make_codes(CodeMode.DDM_HADAMARD, K, M)
        # one-way Doppler landing exactly on a bin
        j = int(rng.integers(1, K))
        v = j * SPEED_OF_LIGHT / (K * victim.f_c * victim.T_PRI)
        intf = InterfererTruth(R, v, phi_t, phi_r, alpha, victim, 0.0, codes, geom.d_t)
        return SpecialCaseScenario(victim, geom, codes, intf, (victim.L, K))
    ref = defaults.INTERFERERS[0]
    chirp = defaults.interferer_chirp(ref["beta"], ref["T"], ref["T_PRI"], K=K)
    v = rng.uniform(-15, 15)
    if mode is SpecialCase.PHASED:
        codes = make_codes(CodeMode.PHASED, K, M)
        Mi = defaults.M_TX_INTF
        w = np.exp(2j * np.pi * rng.uniform(size=Mi))
        intf = InterfererTruth(
            R, v, phi_t, phi_r, alpha, chirp, ref["tau_syn"],
            make_codes(CodeMode.PHASED, K, Mi), defaults.D_T_INTF, tx_weights=w,
        )
        return SpecialCaseScenario(victim, geom, codes, intf, (victim.L, K))
    codes = make_codes(CodeMode.TDM, K, M)
    intf = InterfererTruth(
        R, v, phi_t, phi_r, alpha, chirp, ref["tau_syn"],
        make_codes(CodeMode.TDM, K, defaults.M_TX_INTF), defaults.D_T_INTF,
    )
    return SpecialCaseScenario(victim, geom, codes, intf, (victim.L, K // M))


def _check_preconditions(mode, sc):
    v, i = sc.victim, sc.intf
    if mode is SpecialCase.COHERENT:
        same = (
            i.tau_syn == 0
            and i.chirp.beta == v.beta
            and i.chirp.T == v.T
            and i.chirp.T_PRI == v.T_PRI
            and i.codes.K == v.K
            and i.codes.M == sc.codes.M
            and sc.codes.mode is CodeMode.DDM_HADAMARD
            and np.array_equal(i.codes.entries, sc.codes.entries)
        )
        if not same:
            raise ConfigError(
                "coherent reduction needs a synchronized interferer sharing the "
                "victim's chirp, PRI, pulse count and Hadamard codes"
            )
        if not 0 < v.beta * i.tau < v.f_L:
            raise ConfigError("coherent interferer must beat inside the LPF passband")
    elif mode is SpecialCase.PHASED:
        if sc.codes.mode is not CodeMode.PHASED or i.codes.mode is not CodeMode.PHASED:
            raise ConfigError("phased-array reduction needs all-ones codes at both radars")
    elif sc.codes.mode is not CodeMode.TDM or i.codes.mode is not CodeMode.TDM:
        raise ConfigError("TDM reduction needs one-hot codes at both radars")


def _peak_bins(cube, count=3):
    energy = np.sum(np.abs(cube.data) ** 2, axis=(0, 1))
    flat = np.argsort(energy.ravel())[::-1][:count]
    return [np.unravel_index(f, energy.shape) for f in flat]


def _coherent(sc):
    v, geom, intf = sc.victim, sc.geom, sc.intf
    L_fft, K_fft = sc.fft_sizes
    raw = simulate_interference(v, geom, intf)
    f_d = v.f_c * intf.v * v.T_PRI / SPEED_OF_LIGHT
    k_bin = int(np.round(-f_d * K_fft)) % K_fft
    cube = range_doppler_decode(raw, sc.codes, sc.fft_sizes, doppler_bins=[k_bin])
    tau = intf.tau
    f_r = (v.beta * tau + intf.v / v.wavelength) * v.delta_T
    ls = np.arange(int(np.ceil(tau / v.delta_T)), int(np.floor(v.T / v.delta_T)) + 1)
    ls = ls[ls < v.L]
    amp = intf.alpha * np.exp(-2j * np.pi * np.mod(v.f_c * tau, 1.0)) * np.exp(1j * np.pi * v.beta * tau ** 2)
    lp = np.arange(L_fft)
    alpha_l = amp * np.exp(-2j * np.pi * np.outer(f_r + lp / L_fft, ls)).sum(axis=1)
    b = K_fft * alpha_l
    f_t = intf.d_t * np.sin(np.deg2rad(intf.phi_t)) / v.wavelength
    spatial = np.outer(steering(geom.M, f_t), steering(geom.N, geom.f_rx(intf.phi_r)))
    ref = spatial[:, :, None] * b[None, None, :]
    got = cube.data[:, :, :, 0]
    dev = np.abs(got - ref).max() / np.abs(ref).max()
    return dev, ((int(np.argmax(np.abs(b))), k_bin),)


def _alpha_direct(v, intf, lp, L_fft):
    """Coded complex amplitude per victim pulse at range bin ``lp`` (all-ones codes)."""
    lam = v.wavelength
    bt = intf.chirp.beta
    out = np.zeros(v.K, dtype=complex)
    for kt in range(intf.codes.K):
        for k, tp in overlap_set(v, intf, kt):
            ls = lpf_gate(v, intf.chirp, tp, intf.tau)
            if ls.size == 0:
                continue
            u = tp + intf.tau
            f_rk = (bt * u + intf.v / lam) * v.delta_T
            t = ls * v.delta_T
            out[k] += (
                np.exp(1j * np.pi * bt * u ** 2)
                * np.exp(-2j * np.pi * np.mod(v.f_c * tp, 1.0))
                * np.sum(np.exp(1j * np.pi * (bt - v.beta) * t ** 2 - 2j * np.pi * (f_rk + lp / L_fft) * ls))
            )
    return intf.alpha * np.exp(-2j * np.pi * np.mod(v.f_c * intf.tau, 1.0)) * out


def _phased(sc):
    v, geom, intf = sc.victim, sc.geom, sc.intf
    raw = simulate_interference(v, geom, intf)
    cube = range_doppler_decode(raw, sc.codes, sc.fft_sizes)
    bins = _peak_bins(cube)
    lam = v.wavelength
    f_d = v.f_c * intf.v * v.T_PRI / SPEED_OF_LIGHT
    f_t = intf.d_t * np.sin(np.deg2rad(intf.phi_t)) / lam
    w = np.ones(intf.M) if intf.tx_weights is None else intf.tx_weights
    tx_gain = np.sum(w * steering(intf.M, f_t))
    a_r = steering(geom.N, geom.f_rx(intf.phi_r))
    k = np.arange(v.K)
    dev = 0.0
    out_bins = []
    for i, j in bins:
        lp, kp = int(cube.range_bins[i]), int(cube.doppler_bins[j])
        alpha_k = _alpha_direct(v, intf, lp, sc.fft_sizes[0])
        a_t = np.sum(alpha_k * np.exp(-2j * np.pi * np.mod((f_d + kp / sc.fft_sizes[1]) * k, 1.0))) * tx_gain
        ref = np.tile(a_t * a_r, (geom.M, 1))
        got = cube.data[:, :, i, j]
        dev = max(dev, np.abs(got - ref).max() / np.abs(ref).max())
        out_bins.append((lp, kp))
    return dev, tuple(out_bins)


def _rank1_deviation(cube, bins):
    dev = 0.0
    for i, j in bins:
        s = np.linalg.svd(cube.data[:, :, i, j], compute_uv=False)
        dev = max(dev, s[1] / s[0] if s.size > 1 else 0.0)
    return dev


def _tdm(sc):
    raw = simulate_interference(sc.victim, sc.geom, sc.intf)
    cube = range_doppler_decode(raw, sc.codes, sc.fft_sizes)
    bins = _peak_bins(cube)
    dev = _rank1_deviation(cube, bins)
    return dev, tuple((int(cube.range_bins[i]), int(cube.doppler_bins[j])) for i, j in bins)


def validate_special_case(mode, scenario: SpecialCaseScenario, tol=REDUCTION_TOL):
    """
    Compare the full-chain decoded interference with the mode's reduced form.

    Returns
    -------
    ReductionReport
        Maximum relative deviation over the checked bins and pass / fail at
        ``tol``. For TDM the deviation is ``s_2 / s_1`` of the M x N snapshot.

    Raises
    ------
    ConfigError
        When the scenario violates the mode's preconditions.
    """
    mode = SpecialCase(mode)
    _check_preconditions(mode, scenario)
    if scenario.fft_sizes is None:
        K = scenario.victim.K
        Kp = K // scenario.codes.M if mode is SpecialCase.TDM else K
        scenario = SpecialCaseScenario(
            scenario.victim, scenario.geom, scenario.codes, scenario.intf, (scenario.victim.L, Kp)
        )
    fn = {SpecialCase.COHERENT: _coherent, SpecialCase.PHASED: _phased, SpecialCase.TDM: _tdm}[mode]
    dev, bins = fn(scenario)
    return ReductionReport(mode, float(dev), bins, tol)
