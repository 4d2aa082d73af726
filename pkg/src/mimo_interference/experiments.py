"""
Seeded Monte Carlo experiments: synthetic ROC curves, realistic-chain
range-angle heatmaps and output-interference-power (OIP) statistics.

Randomness comes from ``numpy.random.SeedSequence`` substreams, one per
block of trials (ROC) or per run (OIP), so results do not depend on the
number of worker threads.
"""

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from . import detectors as det
from .arraymath import H, hermitian_solve, kron, steering
from .defaults import angle_grid
from .estimation import (
    aggregate_stats,
    build_rtilde_est,
    clip_psd,
    estimate_bin_stats,
    h2_from_cov,
    perturb_cov,
)
from .errors import ConfigError, DegenerateGeometryError, ModelError
from .processing import range_doppler_decode
from .scenario import Mode, ScenarioConfig
from .signal_chain import (
    add_noise,
    doppler_bin,
    range_bin,
    simulate_interference,
    simulate_object,
)
from .synthetic import complex_normal
from .theory import pd as pd_theory
from .theory import pfa_from_threshold, threshold_from_pfa
from .waveform import CodeMode

ROC_BLOCK = 1000
BASELINE = "fft"
ALL_DETECTORS = det.DETECTORS


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------- ROC


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Empirical and theoretical ROC of one detector at one INR."""

    detector: str
    inr_db: float
    gamma: np.ndarray
    pfa_theory: np.ndarray
    pfa_empirical: np.ndarray
    pd_theory: np.ndarray
    pd_empirical: np.ndarray
    ci_halfwidth: np.ndarray
    trials: int
    lam: float
    stats_h0: np.ndarray = field(default=None, repr=False)
    stats_h1: np.ndarray = field(default=None, repr=False)

    @property
    def pfa_grid(self):
        return self.pfa_theory

    def pd_at_pfa(self, pfa):
        """Empirical P_D at an empirical false-alarm rate ``pfa`` (H0-quantile threshold)."""
        return empirical_pd_at_pfa(self.stats_h0, self.stats_h1, pfa)


def empirical_pd_at_pfa(t0, t1, pfa):
    """Detection rate of ``t1`` at the threshold where ``t0`` exceeds it with rate ``pfa``."""
    gamma = np.quantile(t0, 1.0 - pfa)
    return float(np.mean(t1 > gamma))


def wilson_halfwidth(successes, n, level=0.95):
    """Half-width of the Wilson score interval for a binomial proportion."""
    ci = binomtest(int(successes), int(n)).proportion_ci(confidence_level=level, method="wilson")
    return 0.5 * (ci.high - ci.low)


def _synthetic_fixed(cfg: ScenarioConfig, inr_db):
    a_t, a_r = cfg.object_steering()
    A = cfg.A_r()
    powers = cfg.interference_powers(inr_db)
    Rts = cfg.tx_correlations()
    return a_t, a_r, A, powers, Rts


def _draw_interference(rng, A, powers, Rts, n):
    total = 0
    for s, R, a in zip(powers, Rts, A.T):
        at = complex_normal(rng, s * R, size=n)  # (n, M)
        total = total + (at[:, :, None] * a[None, None, :]).reshape(n, -1)
    return total


def _noise(rng, n, dim, sigma2):
    return np.sqrt(sigma2 / 2.0) * (rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim)))


def _roc_block(cfg, inr_db, detectors, n, seed_seq):
    rng = np.random.default_rng(seed_seq)
    a_t, a_r, A, powers, Rts = _synthetic_fixed(cfg, inr_db)
    M, N = cfg.geom.M, cfg.geom.N
    s2 = cfg.noise_power
    s = kron(a_t, a_r)
    b = cfg.amplitude()
    I0 = _draw_interference(rng, A, powers, Rts, n)
    I1 = _draw_interference(rng, A, powers, Rts, n)
    if np.isscalar(I0):
        I0 = np.zeros((n, M * N), complex)
        I1 = np.zeros((n, M * N), complex)
    y0 = I0 + _noise(rng, n, M * N, s2)
    y1 = b * s + I1 + _noise(rng, n, M * N, s2)

    # covariance knowledge: exact, or perturbed afresh each trial
    pert = cfg.sigma2_pert > 0 and ("gs" in detectors or "lcmv" in detectors)
    if pert:
        R_est = [
            [clip_psd(perturb_cov(R, p, cfg.sigma2_pert, rng)) for R, p in zip(Rts, powers)]
            for _ in range(n)
        ]

    out = {}
    for d in detectors:
        if d == "clairvoyant":
            out[d] = (
                det.t_clairvoyant(y0, a_t, a_r, I0, s2),
                det.t_clairvoyant(y1, a_t, a_r, I1, s2),
            )
        elif d == "rs":
            out[d] = (det.t_rs(y0, a_t, a_r, A, s2), det.t_rs(y1, a_t, a_r, A, s2))
        elif d == "gs" and not pert:
            side = cfg.side_info(inr_db)
            out[d] = (det.t_gs(y0, a_t, a_r, side), det.t_gs(y1, a_t, a_r, side))
        elif d == "gs":
            W = np.empty((n, M * N), complex)
            g = np.empty(n)
            for i in range(n):
                lam = np.array([h2_from_cov(R, a_t) for R in R_est[i]]) / s2
                side = det.InterferenceSideInfo(A, lam, s2)
                W[i], g[i] = det._gs_parts(a_t, a_r, side)
            out[d] = tuple(
                (2.0 / s2) * np.abs(np.sum(np.conj(W) * y, axis=1)) ** 2 / g for y in (y0, y1)
            )
        elif d == "lcmv" and not pert:
            R = cfg.rtilde(inr_db)
            out[d] = (det.t_lcmv(y0, a_t, a_r, R, s2), det.t_lcmv(y1, a_t, a_r, R, s2))
        elif d == "lcmv":
            Rs = np.stack([build_rtilde_est(R_est[i], A, s2) for i in range(n)])
            W = np.linalg.solve(Rs, np.broadcast_to(s, (n, M * N))[..., None])[..., 0]
            g = np.real(np.sum(np.conj(s) * W, axis=1))
            out[d] = tuple(
                (2.0 / s2) * np.abs(np.sum(np.conj(W) * y, axis=1)) ** 2 / g for y in (y0, y1)
            )
        else:
            raise ConfigError(f"unknown detector {d!r}", key="detectors")
    return out


def run_roc(cfg: ScenarioConfig, detectors=ALL_DETECTORS, trials=None, workers=None, inr_db=None):
    """
    Monte Carlo ROC curves for every (INR, detector) pair.

    Each trial redraws the interference Tx vectors ``~ CN(0, s~^2 R_t)`` and
    the noise for independent H0 and H1 snapshots; geometry stays fixed.
    With ``cfg.sigma2_pert > 0`` the GS / LCMV detectors use a covariance
    perturbed afresh in every trial. Theory columns use the exact statistics.

    Returns
    -------
    list of RocCurve
        Ordered by INR, then by ``detectors``.
    """
    if cfg.mode is not Mode.SYNTHETIC:
        raise ConfigError("ROC experiments need a SYNTHETIC scenario", key="mode")
    trials = cfg.trials if trials is None else int(trials)
    if trials < 1:
        raise ConfigError("trials must be >= 1", key="trials")
    inrs = cfg.inr_db if inr_db is None else tuple(np.atleast_1d(inr_db))
    detectors = tuple(detectors)
    pfa_grid = cfg.pfa_grid()
    gamma = threshold_from_pfa(pfa_grid)
    root = np.random.SeedSequence(cfg.seed)
    curves = []
    for inr, ss in zip(inrs, root.spawn(len(inrs))):
        sizes = [ROC_BLOCK] * (trials // ROC_BLOCK)
        if trials % ROC_BLOCK:
            sizes.append(trials % ROC_BLOCK)
        blocks = _map(
            lambda args: _roc_block(cfg, inr, detectors, *args),
            list(zip(sizes, ss.spawn(len(sizes)))),
            workers,
        )
        for d in detectors:
            t0 = np.concatenate([b[d][0] for b in blocks])
            t1 = np.concatenate([b[d][1] for b in blocks])
            lam = cfg.noncentrality(d, inr)
            hits1 = (t1[:, None] > gamma[None, :]).sum(axis=0)
            hits0 = (t0[:, None] > gamma[None, :]).sum(axis=0)
            curves.append(
                RocCurve(
                    detector=d,
                    inr_db=float(inr),
                    gamma=gamma,
                    pfa_theory=pfa_from_threshold(gamma),
                    pfa_empirical=hits0 / trials,
                    pd_theory=np.atleast_1d(pd_theory(lam, gamma)),
                    pd_empirical=hits1 / trials,
                    ci_halfwidth=np.array([wilson_halfwidth(h, trials) for h in hits1]),
                    trials=trials,
                    lam=float(lam),
                    stats_h0=t0,
                    stats_h1=t1,
                )
            )
    return curves


# --------------------------------------------------------- realistic chain


@dataclass(frozen=True, eq=False)
class HeatmapGrid:
    """Detector statistic (dB) on range bins x angles at one Doppler bin."""

    detector: str
    range_bins: np.ndarray
    angles: np.ndarray
    values_db: np.ndarray
    doppler_bin: int


@dataclass(frozen=True)
class OipSample:
    detector: str
    run: int
    angle_deg: float
    range_m: float
    oip_db: float


@dataclass(frozen=True, eq=False)
class OipResult:
    samples: list

    def values(self, detector):
        return np.array([s.oip_db for s in self.samples if s.detector == detector])

    @property
    def detectors(self):
        return list(dict.fromkeys(s.detector for s in self.samples))

    def cdf_table(self, percentiles=(10, 20, 30, 40, 50, 60, 70, 80, 90)):
        """Percentiles of the OIP per detector, ``{detector: {pct: dB}}``."""
        return {
            d: {p: float(np.percentile(self.values(d), p)) for p in percentiles}
            for d in self.detectors
        }


def _realistic_check(cfg):
    if cfg.mode is not Mode.REALISTIC:
        raise ConfigError("this experiment needs a REALISTIC scenario", key="mode")


def object_cell(cfg):
    """Range / Doppler bins of the configured cell-under-test object."""
    o = cfg.objects[cfg.cell_object]
    L_fft, K_fft = cfg.fft_sizes
    return range_bin(cfg.victim, o.R, L_fft), doppler_bin(cfg.victim, o.v, K_fft)


def default_angles(cfg):
    return angle_grid(cfg.angle_fft, cfg.geom.d_r / cfg.geom.wavelength)


def _raw_objects(cfg):
    raw = 0
    for o in cfg.objects:
        raw = raw + simulate_object(cfg.victim, cfg.geom, cfg.codes, o)
    return raw


def _raw_interference(cfg, interferers):
    raw = np.zeros((cfg.geom.N, cfg.victim.L, cfg.victim.K), complex)
    for i in interferers:
        raw = raw + simulate_interference(cfg.victim, cfg.geom, i)
    return raw


def _bins_needed(cfg, range_bins, dbin):
    L_fft, K_fft = cfg.fft_sizes
    tr = cfg.training
    rb = None
    if range_bins is not None:
        rb = sorted({int((l + d) % L_fft) for l in range_bins for d in (0,) + tuple(tr.range_offsets)})
    db = sorted({int((dbin + d) % K_fft) for d in (0,) + tuple(tr.doppler_offsets)})
    return rb, db


def _lcmv_many(R, S, y, sigma2):
    W = hermitian_solve(R, S)
    g = np.real(np.sum(np.conj(S) * W, axis=0))
    return (2.0 / sigma2) * np.abs(W.conj().T @ y) ** 2 / g


def _rs_or_nan(y, a_t, a_r, A_r, sigma2):
    # RS is undefined at a test angle inside the interference Rx subspace
    try:
        return det.t_rs(y, a_t, a_r, A_r, sigma2)
    except DegenerateGeometryError:
        return np.nan


def cell_statistics(cfg, cube, intf_cube, l, k, angles, A_r, detectors):
    """
    Detector statistics at cell ``(l, k)`` for every test angle.

    Noise and interference statistics are estimated from the training cells
    around ``(l, k)``; the clairvoyant detector subtracts the true decoded
    interference. ``"fft"`` is the interference-ignoring angle FFT.

    Returns
    -------
    dict
        ``{detector: ndarray of len(angles)}`` (linear scale). RS is NaN at
        angles where it is undefined.
    """
    L_fft, K_fft = cfg.fft_sizes
    M, N = cfg.geom.M, cfg.geom.N
    a_dummy = np.ones(M)
    try:
        per_bin = [
            estimate_bin_stats(cube.snapshot(r, d), a_dummy, A_r)
            for r, d in cfg.training.cells(l, k, L_fft, K_fft)
        ]
        est = aggregate_stats(per_bin)
    except ModelError as exc:
        raise type(exc)(f"training-bin estimation at cell ({l}, {k}): {exc}") from exc
    s2 = est.sigma2_hat
    y = cube.snapshot(l, k)
    yi = intf_cube.snapshot(l, k) if intf_cube is not None else None
    R_list = list(est.R_t_hat)
    angles = np.atleast_1d(angles)
    A_t = np.stack([steering(M, cfg.geom.f_tx(p)) for p in angles])
    A_rx = np.stack([steering(N, cfg.geom.f_rx(p)) for p in angles])
    S = np.stack([kron(a, b) for a, b in zip(A_t, A_rx)], axis=1)
    out = {}
    for d in detectors:
        if d == BASELINE:
            out[d] = (2.0 / s2) * np.abs(H(S) @ y) ** 2 / (M * N)
        elif d == "clairvoyant":
            out[d] = (2.0 / s2) * np.abs(H(S) @ (y - yi)) ** 2 / (M * N)
        elif d == "rs":
            out[d] = np.array([_rs_or_nan(y, a, b, A_r, s2) for a, b in zip(A_t, A_rx)])
        elif d == "gs":
            vals = []
            for a, b in zip(A_t, A_rx):
                lam = np.array([h2_from_cov(R, a) for R in R_list]) / s2
                vals.append(det.t_gs(y, a, b, det.InterferenceSideInfo(A_r, lam, s2)))
            out[d] = np.array(vals)
        elif d == "lcmv":
            out[d] = _lcmv_many(build_rtilde_est(R_list, A_r, s2), S, y, s2)
        else:
            raise ConfigError(f"unknown detector {d!r}", key="detectors")
    return out


def _A_r(cfg, interferers):
    cols = [steering(cfg.geom.N, cfg.geom.f_rx(i.phi_r)) for i in interferers]
    return np.stack(cols, axis=1) if cols else np.zeros((cfg.geom.N, 0), complex)


def _to_db(x):
    return 10.0 * np.log10(np.maximum(x, 1e-30))


def run_heatmap(
    cfg: ScenarioConfig,
    detectors=ALL_DETECTORS + (BASELINE,),
    doppler_bin=None,
    angles=None,
    range_bins=None,
    seed=None,
):
    """
    Range-angle heatmaps of each detector on one simulated CPI.

    Parameters
    ----------
    doppler_bin : int, optional
        Fixed Doppler bin; defaults to the cell-under-test object's bin.
    angles : array_like, optional
        Test angles (deg); defaults to the ``angle_fft``-point FFT grid.
    range_bins : array_like of int, optional
        Range bins to evaluate; default all ``L_fft`` bins.
    """
    _realistic_check(cfg)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed if seed is None else seed))
    k0 = object_cell(cfg)[1] if doppler_bin is None else int(doppler_bin)
    angles = default_angles(cfg) if angles is None else np.atleast_1d(np.asarray(angles, float))
    raw_int = _raw_interference(cfg, cfg.interferers)
    raw = add_noise(_raw_objects(cfg) + raw_int, cfg.noise_power, rng)
    rb, db = _bins_needed(cfg, range_bins, k0)
    cube = range_doppler_decode(raw, cfg.codes, cfg.fft_sizes, rb, db)
    icube = range_doppler_decode(raw_int, cfg.codes, cfg.fft_sizes, rb, db)
    rows = np.arange(cfg.fft_sizes[0]) if range_bins is None else np.atleast_1d(range_bins)
    A_r = _A_r(cfg, cfg.interferers)
    vals = {d: np.empty((len(rows), len(angles))) for d in detectors}
    for i, l in enumerate(rows):
        st = cell_statistics(cfg, cube, icube, int(l), k0, angles, A_r, detectors)
        for d in detectors:
            vals[d][i] = st[d]
    return [HeatmapGrid(d, np.asarray(rows), angles, _to_db(vals[d]), k0) for d in detectors]


def angle_cut(cfg, detectors=ALL_DETECTORS + (BASELINE,), angles=None, seed=None):
    """Statistics (dB) over angle at the cell-under-test object's range-Doppler bin."""
    l0, k0 = object_cell(cfg)
    grids = run_heatmap(cfg, detectors, k0, angles, [l0], seed)
    return {g.detector: g.values_db[0] for g in grids}


def _oip_run(cfg, detectors, raw_obj, raw_others, run, ss):
    rng = np.random.default_rng(ss)
    o = cfg.oip
    base = cfg.interferers[o.interferer]
    phi = rng.uniform(*o.angle_range)
    R = rng.uniform(*o.range_range)
    moved = dataclasses.replace(base, phi_r=phi, R=R, alpha=base.alpha * base.R / R)
    interferers = list(cfg.interferers)
    interferers[o.interferer] = moved
    raw_int = raw_others + simulate_interference(cfg.victim, cfg.geom, moved)
    raw = add_noise(raw_obj + raw_int, cfg.noise_power, rng)
    L_fft, K_fft = cfg.fft_sizes
    l = range_bin(cfg.victim, R, L_fft)
    k = object_cell(cfg)[1]
    grid = default_angles(cfg)
    ang = grid[np.argmin(np.abs(grid - phi))]
    rb, db = _bins_needed(cfg, [l], k)
    cube = range_doppler_decode(raw, cfg.codes, cfg.fft_sizes, rb, db)
    icube = range_doppler_decode(raw_int, cfg.codes, cfg.fft_sizes, rb, db)
    st = cell_statistics(cfg, cube, icube, l, k, [ang], _A_r(cfg, interferers), detectors)
    return [OipSample(d, run, float(phi), float(R), float(_to_db(st[d][0]))) for d in detectors]


def run_oip(cfg: ScenarioConfig, runs=None, detectors=ALL_DETECTORS, workers=None):
    """
    Output interference power over randomized interferer placements.

    Each run redraws the angle and range of interferer ``cfg.oip.interferer``
    (amplitude scaled as 1 / range), simulates the chain with fresh noise and
    evaluates every detector at the interferer's range bin, the object
    Doppler bin and the angle-grid point nearest the interferer.
    """
    _realistic_check(cfg)
    if not cfg.interferers:
        raise ConfigError("OIP needs at least one interferer", key="interferers")
    runs = cfg.oip.runs if runs is None else int(runs)
    others = [i for j, i in enumerate(cfg.interferers) if j != cfg.oip.interferer]
    raw_obj = _raw_objects(cfg)
    raw_others = _raw_interference(cfg, others)
    seeds = np.random.SeedSequence(cfg.seed).spawn(runs)
    results = _map(
        lambda a: _oip_run(cfg, tuple(detectors), raw_obj, raw_others, *a),
        list(enumerate(seeds)),
        workers,
    )
    return OipResult([s for r in results for s in r])


__all__ = [
    "RocCurve",
    "HeatmapGrid",
    "OipSample",
    "OipResult",
    "run_roc",
    "run_heatmap",
    "angle_cut",
    "run_oip",
    "cell_statistics",
    "empirical_pd_at_pfa",
    "wilson_halfwidth",
    "object_cell",
    "CodeMode",
]
