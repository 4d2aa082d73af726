"""Direct synthesis of virtual-array snapshots (no waveform simulation)."""

import numpy as np

from .arraymath import kron, steering
from .errors import InvalidDimensionError


def object_steering(geom, phi):
    """``(a_t, a_r)`` for a far-field object at ``phi`` degrees."""
    return steering(geom.M, geom.f_tx(phi)), steering(geom.N, geom.f_rx(phi))


def synth_object_snapshot(b, phi, geom):
    """``b * kron(a_t, a_r)`` for an object at angle ``phi`` (deg)."""
    a_t, a_r = object_steering(geom, phi)
    return b * kron(a_t, a_r)


def synth_interference_snapshot(a_t_tilde, phi_r, geom):
    """``kron(a_t_tilde, a_r_tilde)`` with the interferer's Rx steering at ``phi_r``."""
    a_t_tilde = np.asarray(a_t_tilde)
    if a_t_tilde.shape[-1] != geom.M:
        raise InvalidDimensionError(
            f"interference Tx vector has length {a_t_tilde.shape[-1]}, expected M={geom.M}"
        )
    a_r = steering(geom.N, geom.f_rx(phi_r))
    if a_t_tilde.ndim == 1:
        return kron(a_t_tilde, a_r)
    return (a_t_tilde[..., :, None] * a_r).reshape(*a_t_tilde.shape[:-1], -1)


def exp_corr(M, rho):
    """Exponential correlation matrix ``[rho^|i-j|]``."""
    idx = np.arange(M)
    return float(rho) ** np.abs(idx[:, None] - idx[None, :]).astype(float)


def complex_normal(rng, cov, size=()):
    """Draw ``CN(0, cov)`` vectors; ``cov`` must be Hermitian PSD."""
    cov = np.asarray(cov)
    M = cov.shape[0]
    w, V = np.linalg.eigh(cov)
    F = V * np.sqrt(np.clip(w, 0, None))
    shape = tuple(np.atleast_1d(size)) + (M,) if size != () else (M,)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return z @ F.T
