import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import crandn
from mimo_interference import defaults
from mimo_interference.detectors import InterferenceSideInfo, t_gs
from mimo_interference.scenario import load_scenario
from mimo_interference.synthetic import object_steering
from mimo_interference.theory import (
    curve,
    marcum_q1,
    noncentrality,
    pd,
    pfa_from_threshold,
    threshold_from_pfa,
)
from oracles import marcum_q1_quad


def test_marcum_examples():
    assert marcum_q1(2.3, 0.0) == 1.0
    assert marcum_q1(0.0, 2.0) == pytest.approx(np.exp(-2.0), abs=1e-15)
    assert marcum_q1(1.0, 1.0) == pytest.approx(marcum_q1_quad(1.0, 1.0), abs=1e-12)
    assert marcum_q1(1.0, 1.0) == pytest.approx(0.732880, abs=1e-6)


def test_marcum_against_ncx2():
    a = np.linspace(0, 8, 17)
    b = np.linspace(0, 8, 17)
    A, B = np.meshgrid(a, b)
    ref = stats.ncx2.sf(B ** 2, 2, A ** 2)
    ref[B == 0] = 1.0
    np.testing.assert_allclose(marcum_q1(A, B), ref, atol=1e-12)


def test_marcum_far_tail_no_cancellation():
    # deep in either tail the value must stay in [0, 1] and match the oracle
    for a, b in [(12.0, 1.0), (1.0, 12.0), (30.0, 25.0), (25.0, 30.0)]:
        v = marcum_q1(a, b)
        assert 0.0 <= v <= 1.0
        assert v == pytest.approx(marcum_q1_quad(a, b), abs=1e-12)


def test_marcum_errors():
    with pytest.raises(ValueError):
        marcum_q1(-1.0, 1.0)
    with pytest.raises(ValueError):
        marcum_q1(1.0, np.nan)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 10), st.floats(0, 10), st.floats(0, 2))
def test_marcum_monotone(a, b, d):
    assert marcum_q1(a + d, b) >= marcum_q1(a, b) - 1e-14
    assert marcum_q1(a, b + d) <= marcum_q1(a, b) + 1e-14


def test_threshold():
    assert threshold_from_pfa(np.exp(-0.5)) == pytest.approx(1.0)
    assert threshold_from_pfa(0.1) == pytest.approx(4.60517, abs=1e-5)
    assert threshold_from_pfa(1 - 1e-12) == pytest.approx(0.0, abs=1e-10)
    assert pfa_from_threshold(threshold_from_pfa(0.03)) == pytest.approx(0.03)
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            threshold_from_pfa(bad)


def test_pd_examples():
    g = np.array([0.5, 2.0, 7.0])
    np.testing.assert_allclose(pd(0.0, g), np.exp(-g / 2))
    assert pd(3.0, 0.0) == 1.0
    assert pd(10.119, 4.605) == pytest.approx(marcum_q1_quad(np.sqrt(10.119), np.sqrt(4.605)), abs=1e-9)


def _reference_vectors():
    geom = defaults.synthetic_geometry()
    a_t, a_r = object_steering(geom, 30.0)
    A = np.stack([object_steering(geom, p)[1] for p in (40.0, 10.0)], axis=1)
    return geom, a_t, a_r, A


def test_noncentrality_examples():
    geom, a_t, a_r, A = _reference_vectors()
    b = 10 ** (-5 / 20)
    assert noncentrality("clairvoyant", b, 1.0, a_t, a_r) == pytest.approx(2 * 16 * 10 ** -0.5)
    assert noncentrality("clairvoyant", b, 1.0, a_t, a_r) == pytest.approx(10.119, abs=1e-3)
    side0 = InterferenceSideInfo(A, [0.0, 0.0])
    assert noncentrality("gs", b, 1.0, a_t, a_r, side0) == pytest.approx(
        noncentrality("clairvoyant", b, 1.0, a_t, a_r)
    )
    same = InterferenceSideInfo(a_r[:, None], [1.0])
    assert noncentrality("rs", b, 1.0, a_t, a_r, same) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        noncentrality("gs", b, 1.0, a_t, a_r)
    with pytest.raises(ValueError):
        noncentrality("lcmv", b, 1.0, a_t, a_r)


def test_reference_noncentralities_frozen():
    # values from a direct dense evaluation, see test_reference_noncentralities_dense
    cfg = load_scenario("synthetic_reference.json")
    expect_gs = {-15.0: 7.91810, -10.0: 5.50659, -5.0: 3.06137}
    for inr, v in expect_gs.items():
        assert cfg.noncentrality("gs", inr) == pytest.approx(v, abs=1e-4)
        assert cfg.noncentrality("rs", inr) == pytest.approx(0.76895, abs=1e-4)
        assert cfg.noncentrality("clairvoyant", inr) == pytest.approx(10.1193, abs=1e-4)


def test_reference_noncentralities_dense():
    # lambda^GS = 2|b|^2/s2 * s^H R^-1 s with R formed and inverted densely
    cfg = load_scenario("synthetic_reference.json")
    geom, a_t, a_r, A = _reference_vectors()
    s = np.kron(a_t, a_r)
    for inr in (-15.0, -10.0, -5.0):
        pw = 10 ** (inr / 10)
        R = np.eye(16, dtype=complex)
        for q, rho in enumerate((0.6, 0.5)):
            idx = np.arange(4)
            Rt = rho ** np.abs(idx[:, None] - idx[None, :])
            h2 = pw * (a_t.conj() @ Rt @ a_t).real / 16
            v = np.kron(a_t, A[:, q])
            R += h2 * np.outer(v, v.conj())
        lam = 2 * 10 ** -0.5 * (s.conj() @ np.linalg.solve(R, s)).real
        assert cfg.noncentrality("gs", inr) == pytest.approx(lam, rel=1e-10)


def test_curve_orderings():
    cfg = load_scenario("synthetic_reference.json")
    grid = cfg.pfa_grid()
    gs = [curve("gs", cfg.noncentrality("gs", inr), grid) for inr in (-15.0, -10.0, -5.0)]
    assert np.all(gs[0].pd >= gs[1].pd) and np.all(gs[1].pd >= gs[2].pd)
    for inr in (-15.0, -10.0, -5.0):
        c = curve("clairvoyant", cfg.noncentrality("clairvoyant", inr), grid)
        g = curve("gs", cfg.noncentrality("gs", inr), grid)
        r = curve("rs", cfg.noncentrality("rs", inr), grid)
        assert np.all(c.pd >= g.pd) and np.all(g.pd >= r.pd)
    z = curve("gs", 0.0, grid)
    np.testing.assert_allclose(z.pd, z.pfa, atol=1e-14)


def test_curve_invariants():
    c = curve("gs", 4.2, np.logspace(-3, -0.01, 40))
    assert np.all(np.diff(c.gamma_grid) >= 0)
    assert np.all(np.diff(c.pfa) <= 0) and np.all(np.diff(c.pd) <= 0)
    assert np.all(c.pd >= c.pfa)


def test_lambda_chain_random_geometries(rng):
    for _ in range(200):
        M, N = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        Q = int(rng.integers(1, N))
        a_t = np.exp(-2j * np.pi * rng.uniform() * np.arange(M))
        a_r = np.exp(-2j * np.pi * rng.uniform() * np.arange(N))
        A = np.exp(-2j * np.pi * np.outer(np.arange(N), rng.uniform(size=Q)))
        side = InterferenceSideInfo(A, rng.exponential(5.0, Q))
        lr = noncentrality("rs", 1.0, 1.0, a_t, a_r, side)
        lg = noncentrality("gs", 1.0, 1.0, a_t, a_r, side)
        lc = noncentrality("clairvoyant", 1.0, 1.0, a_t, a_r)
        assert 0 < lr <= lg * (1 + 1e-12) and lg <= lc * (1 + 1e-12)


def test_gs_statistic_distribution_small(rng):
    # reduced-size version of the acceptance KS check on the reference synthetic scenario
    from mimo_interference.synthetic import complex_normal, synth_interference_snapshot

    cfg = load_scenario("synthetic_reference.json")
    a_t, a_r = cfg.object_steering()
    inr = -10.0
    side = cfg.side_info(inr)
    n = 20_000
    y0 = crandn(rng, n, 16) * np.sqrt(cfg.noise_power)
    for s2, Rt, si in zip(cfg.interference_powers(inr), cfg.tx_correlations(), cfg.synthetic_interferers):
        y0 = y0 + synth_interference_snapshot(complex_normal(rng, s2 * Rt, n), si.angle, cfg.geom)
    t0 = t_gs(y0, a_t, a_r, side)
    assert stats.kstest(t0, stats.chi2(2).cdf).pvalue > 0.01
    b = cfg.amplitude()
    t1 = t_gs(y0 + b * np.kron(a_t, a_r), a_t, a_r, side)
    assert stats.kstest(t1, stats.ncx2(2, cfg.noncentrality("gs", inr)).cdf).pvalue > 0.01


def test_gs_not_chi2_without_matching_interference(rng):
    # white noise alone is over-whitened by the GS weights: the statistic shrinks
    geom, a_t, a_r, A = _reference_vectors()
    side = InterferenceSideInfo(A, [0.4, 0.2])
    t0 = t_gs(crandn(rng, 5000, 16), a_t, a_r, side)
    assert t0.mean() < 2.0 * 0.95
