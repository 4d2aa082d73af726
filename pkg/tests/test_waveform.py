import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mimo_interference import defaults
from mimo_interference.errors import CodeConstructionError
from mimo_interference.waveform import (
    ChirpParams,
    CodeMode,
    chirp_sample,
    code_crosscorr,
    make_codes,
)


def test_hadamard_small():
    C = make_codes(CodeMode.DDM_HADAMARD, 4, 2).entries
    np.testing.assert_array_equal(C[:, 0], [1, 1, 1, 1])
    np.testing.assert_array_equal(C[:, 1], [1, -1, 1, -1])


@pytest.mark.parametrize("K,M", [(4, 4), (16, 4), (64, 8), (256, 4)])
def test_hadamard_orthogonal(K, M):
    C = make_codes("DDM_HADAMARD", K, M).entries
    assert set(np.unique(C.real)) <= {-1.0, 1.0}
    np.testing.assert_array_equal(C.conj().T @ C / K, np.eye(M))


def test_tdm_rows():
    C = make_codes(CodeMode.TDM, 4, 2).entries
    np.testing.assert_array_equal(C, [[1, 0], [0, 1], [1, 0], [0, 1]])


@given(st.integers(1, 12), st.integers(0, 40))
def test_tdm_one_hot_counts(M, extra):
    K = M + extra
    C = make_codes(CodeMode.TDM, K, M).entries.real
    np.testing.assert_array_equal(C.sum(axis=1), 1)
    counts = C.sum(axis=0)
    assert set(counts) <= {K // M, -(-K // M)}


def test_phased_all_ones():
    np.testing.assert_array_equal(make_codes(CodeMode.PHASED, 8, 4).entries, np.ones((8, 4)))


def test_chu_unit_modulus():
    C = make_codes(CodeMode.DDM_CHU, 64, 4).entries
    np.testing.assert_allclose(np.abs(C), 1.0, atol=1e-14)


@pytest.mark.parametrize(
    "mode,K,M,msg",
    [
        ("DDM_HADAMARD", 12, 4, "power of two"),
        ("TDM", 2, 4, "K >= M"),
        ("DDM_CHU", 64, 2, None),
    ],
)
def test_code_errors(mode, K, M, msg):
    if msg is None:
        with pytest.raises(CodeConstructionError, match="coprime"):
            make_codes(mode, K, M, roots=[1, 2])
        return
    with pytest.raises(CodeConstructionError, match=msg):
        make_codes(mode, K, M)


def test_crosscorr_hadamard_zero_doppler():
    assert code_crosscorr(make_codes("DDM_HADAMARD", 8, 4), [0.0]) == 0.0


def test_crosscorr_single_antenna():
    assert code_crosscorr(make_codes("PHASED", 8, 1)) == 0.0


def test_crosscorr_chu_against_direct_sum():
    C = make_codes("DDM_CHU", 64, 4)
    grid = np.arange(256) / 256
    E = C.entries
    worst = 0.0
    for m in range(4):
        for mp in range(4):
            if m == mp:
                continue
            for f in grid:
                s = sum(E[k, m] * np.conj(E[k, mp]) * np.exp(-2j * np.pi * f * k) for k in range(64))
                worst = max(worst, abs(s) / 64)
    got = code_crosscorr(C, grid)
    assert got == pytest.approx(worst, abs=1e-12)
    # with roots 1, 3, 5, 7 the worst pair peaks at exactly 1/4 (roots 1 and 5
    # differ by 4, gcd(4, 64) = 4, giving a sqrt(4)/sqrt(64) sidelobe)
    assert got == pytest.approx(0.25, abs=1e-9)


def _chirp():
    return ChirpParams(15e12, 30.7e-6, 37.7e-6, 77e9, 15e6, 1 / 16.7e6, 512, 4)


def test_chirp_sample_values():
    p = _chirp()
    assert chirp_sample(p, 0.0) == 1
    assert chirp_sample(p, -1e-9) == 0
    assert chirp_sample(p, p.T + 1e-9) == 0
    assert chirp_sample(p, 1e-6) == pytest.approx(-1, abs=1e-9)


def test_chirp_unit_modulus_inside():
    p = _chirp()
    t = np.linspace(0, p.T, 1001)
    np.testing.assert_allclose(np.abs(chirp_sample(p, t)), 1.0)


def test_chirp_params_validation():
    with pytest.raises(ValueError):
        ChirpParams(15e12, 40e-6, 37.7e-6, 77e9, 15e6, 1 / 16.7e6, 512, 4)


def test_reference_chirp_constants():
    p = defaults.victim_chirp()
    assert p.wavelength == pytest.approx(3.9e-3)
    assert p.L * p.delta_T <= p.T_PRI
