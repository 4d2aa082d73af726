import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def fourier_cols(rng, N, Q):
    """N x Q matrix of random unit-modulus Fourier columns."""
    f = rng.uniform(-0.5, 0.5, Q)
    return np.exp(-2j * np.pi * np.outer(np.arange(N), f))


def small_realistic(object_db=(-20.0, -34.3), intf_db=(28.0, 25.9), **root):
    """Scaled-down realistic scenario dict: 32 pulses, 128 samples."""
    raw = {
        "mode": "REALISTIC",
        "seed": 11,
        "victim": {"L": 128, "K": 32, "code_mode": "DDM_HADAMARD"},
        "fft_sizes": [256, 32],
        "objects": [
            {"R": 12.0, "v": -2.9, "phi": -1.2, "amplitude_db": object_db[0]},
            {"R": 20.0, "v": 4.2, "phi": 11.2, "amplitude_db": object_db[1]},
        ],
        "interferers": [
            {"R": 1.8, "v": 1.3, "phi_r": -54.0, "amplitude_db": intf_db[0], "beta": 14.6e12,
             "T": 31.6e-6, "T_PRI": 39.1e-6, "tau_syn": 0.3e-6, "K": 32, "M": 8, "code_mode": "DDM_CHU"},
            {"R": 2.3, "v": -12.8, "phi_r": -48.1, "amplitude_db": intf_db[1], "beta": 12.4e12,
             "T": 37.2e-6, "T_PRI": 44.5e-6, "tau_syn": 0.5e-6, "K": 32, "M": 8, "code_mode": "DDM_CHU"},
        ],
        "oip": {"runs": 20},
    }
    raw.update(root)
    return raw
