import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import crandn, fourier_cols
from mimo_interference.arraymath import (
    H,
    hermitian_solve,
    kron,
    proj,
    proj_perp,
    reg_proj,
    spatial_frequency,
    steering,
)
from mimo_interference.errors import (
    InvalidDimensionError,
    OverdeterminedInterferenceError,
    SingularSubspaceError,
)


def test_steering_examples():
    np.testing.assert_allclose(steering(2, 0.25), [1, -1j], atol=1e-15)
    np.testing.assert_allclose(steering(4, 0.0), np.ones(4))
    f = spatial_frequency(0.5, 30.0, 1.0)
    assert f == pytest.approx(0.25)
    np.testing.assert_allclose(steering(4, f), [1, -1j, -1, 1j], atol=1e-12)


def test_steering_rejects_empty():
    with pytest.raises(InvalidDimensionError):
        steering(0, 0.1)


@given(st.integers(1, 40), st.floats(-50, 50))
def test_steering_unit_modulus(n, f):
    a = steering(n, f)
    assert a[0] == 1
    np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-14)


def test_kron_examples():
    np.testing.assert_allclose(kron([1, -1], [1, 1j]), [1, 1j, -1, -1j])
    np.testing.assert_allclose(kron(np.ones(3), np.ones(5)), np.ones(15))
    a = steering(4, 0.25)
    b = steering(4, 0.25)
    brute = np.array([a[i] * b[j] for i in range(4) for j in range(4)])
    np.testing.assert_allclose(kron(a, b), brute)


def test_proj_basic():
    np.testing.assert_allclose(proj(np.array([[1.0], [0.0]])), np.diag([1, 0]))


def test_proj_properties(rng):
    for _ in range(20):
        Hm = crandn(rng, 4, 2)
        P, Pp = proj(Hm), proj_perp(Hm)
        np.testing.assert_allclose(P + Pp, np.eye(4), atol=1e-12)
        assert np.abs(P @ P - P).max() <= 1e-10
        assert np.abs(P - H(P)).max() <= 1e-12
        assert np.abs(P @ Pp).max() <= 1e-10
        w = np.linalg.eigvalsh(P)
        assert np.all(np.minimum(np.abs(w), np.abs(w - 1)) < 1e-8)


def test_proj_rank_deficient_reports_condition():
    a = np.array([1, 1j, -1, -1j])
    with pytest.raises(SingularSubspaceError) as exc:
        proj(np.stack([a, 2 * a], axis=1))
    assert "condition number" in str(exc.value)


def test_hermitian_solve_guard():
    with pytest.raises(SingularSubspaceError):
        hermitian_solve(np.diag([1.0, 1e-14]), np.ones(2))
    x = hermitian_solve(np.array([[2.0, 1j], [-1j, 2.0]]), np.array([1.0, 0.0]))
    np.testing.assert_allclose(np.array([[2.0, 1j], [-1j, 2.0]]) @ x, [1, 0], atol=1e-14)


def test_reg_proj_zero_einr():
    A = fourier_cols(np.random.default_rng(1), 6, 2)
    np.testing.assert_array_equal(reg_proj(A, [0.0, 0.0], 4), np.zeros((6, 6)))


def test_reg_proj_drops_only_zero_columns(rng):
    A = fourier_cols(rng, 6, 2)
    np.testing.assert_allclose(reg_proj(A, [0.0, 2.5], 3), reg_proj(A[:, 1:], [2.5], 3), atol=1e-14)


def test_reg_proj_large_einr_limit(rng):
    A = fourier_cols(rng, 5, 2)
    Pt = reg_proj(A, [1e8, 1e8], 4)
    P = proj(A)
    assert np.linalg.norm(Pt - P) / np.linalg.norm(P) <= 1e-4


def test_reg_proj_single_interferer_factor():
    # M*lam / (1 + M*N*lam) with M = N = 4, lam = 1
    a = steering(4, 0.13)
    oracle = 4 * a[:, None] @ np.linalg.inv(np.array([[1.0 + 4 * 4]])) @ a.conj()[None, :]
    np.testing.assert_allclose(oracle, (4 / 17) * np.outer(a, a.conj()), atol=1e-15)
    np.testing.assert_allclose(reg_proj(a[:, None], [1.0], 4), oracle, atol=1e-14)


def test_reg_proj_eigenvalues_in_unit_interval(rng):
    for _ in range(50):
        N, Q = rng.integers(2, 9), rng.integers(1, 4)
        Q = min(Q, N)
        Pt = reg_proj(fourier_cols(rng, N, Q), rng.exponential(3.0, Q), int(rng.integers(1, 9)))
        assert np.abs(Pt - H(Pt)).max() < 1e-12
        w = np.linalg.eigvalsh(Pt)
        assert w.min() > -1e-12 and w.max() < 1.0


def test_reg_proj_overdetermined():
    with pytest.raises(OverdeterminedInterferenceError):
        reg_proj(np.ones((2, 3)), [1, 1, 1], 2)


def test_reg_proj_loewner_monotone(rng):
    for _ in range(200):
        N = int(rng.integers(2, 9))
        Q = int(rng.integers(1, N + 1))
        M = int(rng.integers(1, 9))
        A = fourier_cols(rng, N, Q)
        lam = rng.exponential(2.0, Q)
        lam2 = lam + rng.exponential(2.0, Q)
        d = reg_proj(A, lam2, M) - reg_proj(A, lam, M)
        assert np.linalg.eigvalsh(d).min() >= -1e-10


def test_structured_inverse_matches_dense(rng):
    for _ in range(30):
        M, N = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        if M * N > 64:
            continue
        Q = int(rng.integers(1, N + 1))
        a_t = steering(M, rng.uniform(-1, 1))
        A = fourier_cols(rng, N, Q)
        lam = rng.exponential(2.0, Q)
        R = np.eye(M * N, dtype=complex)
        for q in range(Q):
            s = kron(a_t, A[:, q])
            R += lam[q] * np.outer(s, s.conj())
        P_at = np.outer(a_t, a_t.conj()) / M
        R_inv = np.eye(M * N) - np.kron(P_at, reg_proj(A, lam, M))
        dense = np.linalg.inv(R)
        assert np.linalg.norm(R_inv - dense) / np.linalg.norm(dense) <= 1e-8
