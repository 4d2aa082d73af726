import numpy as np
import pytest

from conftest import crandn, fourier_cols
from mimo_interference.arraymath import kron, steering
from mimo_interference.detectors import InterferenceSideInfo, t_gs
from mimo_interference.estimation import (
    EstimatedStats,
    PerturbationModel,
    TrainingBins,
    aggregate_stats,
    build_rtilde_est,
    clip_psd,
    estimate_bin_stats,
    h2_from_cov,
    perturb_cov,
)
from mimo_interference.synthetic import complex_normal, exp_corr


def test_perturb_zero_and_hermitian(rng):
    R = exp_corr(4, 0.6) * np.exp(1j * 0.0)
    np.testing.assert_array_equal(perturb_cov(R, 0.7, 0.0, rng), 0.7 * R)
    Rc = R + 0.1j * (np.triu(np.ones((4, 4)), 1) - np.tril(np.ones((4, 4)), -1))
    P = perturb_cov(Rc, 0.7, 1.0, rng)
    np.testing.assert_allclose(P, P.conj().T, atol=1e-15)


def test_perturb_entry_variance():
    R = exp_corr(4, 0.6)
    s2t, sp = 0.5, 0.3
    draws = np.stack([perturb_cov(R, s2t, sp, np.random.default_rng(seed)) for seed in range(10_000)])
    emp = draws.var(axis=0)
    np.testing.assert_allclose(emp, sp * (s2t * R) ** 2, rtol=0.05)


def test_perturbation_model(rng):
    pm = PerturbationModel((0.6, 0.5), (0.1, 0.2), 1.0)
    out = pm.perturbed(4, rng)
    assert len(out) == 2 and out[0].shape == (4, 4)
    with pytest.raises(ValueError):
        PerturbationModel((1.0,), (0.1,))


def test_clip_psd(rng):
    R = perturb_cov(exp_corr(4, 0.9), 1.0, 4.0, rng)
    C = clip_psd(R)
    assert np.linalg.eigvalsh(C).min() >= -1e-12
    P = exp_corr(4, 0.5)
    np.testing.assert_array_equal(clip_psd(P), P)


def test_build_rtilde(rng):
    A = fourier_cols(rng, 4, 2)
    np.testing.assert_allclose(build_rtilde_est([np.zeros((4, 4))] * 2, A, 1.0), np.eye(16))
    Rs = [0.3 * exp_corr(4, 0.6), 0.2 * exp_corr(4, 0.5)]
    R = build_rtilde_est(Rs, A, 0.5)
    np.testing.assert_allclose(R, R.conj().T)
    assert np.linalg.eigvalsh(R).min() >= 1 - 1e-12
    # Q = 1: spectrum is 1 + N * eig(R_t / s2) plus ones
    a = A[:, 0]
    R1 = build_rtilde_est(Rs[:1], a, 0.5)
    expect = np.sort(np.concatenate([1 + 4 * np.linalg.eigvalsh(Rs[0] / 0.5), np.ones(12)]))
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(R1)), expect, atol=1e-12)


def test_h2_from_cov(rng):
    a = steering(4, 0.17)
    assert h2_from_cov(np.outer(a, a.conj()), a) == pytest.approx(1.0)
    assert h2_from_cov(np.eye(4), a) == pytest.approx(0.25)
    X = crandn(rng, 4, 4)
    R = X @ X.conj().T
    assert h2_from_cov(R, a) == pytest.approx((a.conj() @ R @ a).real / 16, abs=1e-12)


def test_bin_stats_noiseless():
    A = fourier_cols(np.random.default_rng(3), 6, 1)
    v = np.array([1, 2j, -1, 0.5])
    s2, a_hat, b_hat = estimate_bin_stats(kron(v, A[:, 0]), steering(4, 0.2), A)
    assert s2 == pytest.approx(0.0, abs=1e-26)
    np.testing.assert_allclose(a_hat[0], v, atol=1e-13)


def test_bin_stats_noise_mean(rng):
    A = fourier_cols(rng, 6, 2)
    s2, _, _ = estimate_bin_stats(crandn(rng, 10_000, 24) * np.sqrt(1.7), steering(4, 0.2), A)
    assert s2.mean() == pytest.approx(1.7, rel=0.03)


def test_bin_stats_b_unbiased(rng):
    A = fourier_cols(rng, 6, 1)
    a_t = steering(4, 0.2)
    v = np.array([1.0, -0.5j, 0.3, 0.8])
    b_true = v @ a_t.conj() / 4
    y = kron(v, A[:, 0]) + crandn(rng, 10_000, 24)
    _, _, b = estimate_bin_stats(y, a_t, A)
    se = b[:, 0].std() / np.sqrt(len(b))
    assert abs(b[:, 0].mean() - b_true) <= 3 * se


def test_bin_stats_requires_spare_dimension():
    with pytest.raises(Exception):
        estimate_bin_stats(np.zeros(8), steering(2, 0.0), fourier_cols(np.random.default_rng(0), 4, 4))


def test_aggregate(rng):
    A = fourier_cols(rng, 4, 1)
    a_t = steering(4, 0.1)
    r = estimate_bin_stats(crandn(rng, 16), a_t, A)
    one = aggregate_stats([r])
    assert one.sigma2_hat == pytest.approx(float(r[0]))
    np.testing.assert_allclose(one.h2_hat, np.abs(r[2]) ** 2)
    np.testing.assert_allclose(one.R_t_hat[0], np.outer(r[1][0], r[1][0].conj()))
    const = aggregate_stats([r] * 5)
    assert const.sigma2_hat == pytest.approx(one.sigma2_hat)
    np.testing.assert_allclose(const.R_t_hat, one.R_t_hat)
    assert np.all(const.h2_hat >= 0)
    assert np.linalg.eigvalsh(aggregate_stats([estimate_bin_stats(crandn(rng, 16), a_t, A) for _ in range(3)]).R_t_hat[0]).min() >= -1e-12
    with pytest.raises(ValueError):
        aggregate_stats([])


def test_exact_stats_feed_back(rng):
    A = fourier_cols(rng, 4, 2)
    a_t, a_r = steering(4, 0.3), steering(4, 0.11)
    lam = np.array([0.4, 1.3])
    known = InterferenceSideInfo(A, lam, 2.0)
    est = EstimatedStats(2.0, lam * 2.0, np.zeros((2, 4, 4)))
    y = crandn(rng, 16)
    assert t_gs(y, a_t, a_r, InterferenceSideInfo(A, est.lam, est.sigma2_hat)) == t_gs(y, a_t, a_r, known)


def test_estimated_einr_converges(rng):
    # high INR keeps the noise bias of |b^|^2 well below the sampling error
    M, N = 4, 6
    A = fourier_cols(rng, N, 1)
    a_t = steering(M, 0.2)
    Rt = 100.0 * exp_corr(M, 0.6)
    h2 = h2_from_cov(Rt, a_t)
    errs = []
    for n in (4, 16, 64):
        e = []
        for _ in range(400):
            at = complex_normal(rng, Rt, n)
            ys = (at[:, :, None] * A[:, 0]).reshape(n, -1) + crandn(rng, n, M * N)
            s2, ah, bh = estimate_bin_stats(ys, a_t, A)
            agg = aggregate_stats(list(zip(s2, ah, bh)))
            e.append((agg.h2_hat[0] - h2) / h2)
        errs.append(np.sqrt(np.mean(np.square(e))))
    for a, b in zip(errs, errs[1:]):
        assert 1.5 < a / b < 2.7


def test_training_bins():
    tb = TrainingBins()
    assert tb.around(0, 255, 1024, 256) == ([1022, 2], [253, 1])
    cells = tb.cells(10, 20, 1024, 256)
    assert len(cells) == 4 and (10, 20) not in cells
    assert TrainingBins.with_guard(3).range_offsets == (-3, 3)
    with pytest.raises(ValueError):
        TrainingBins((0, 1), (0,))
