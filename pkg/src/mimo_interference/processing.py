"""Range FFT, slow-time decoding / Doppler FFT and snapshot extraction."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError
from .waveform import CodeMatrix, CodeMode


@dataclass(frozen=True, eq=False)
class RangeDopplerCube:
    """
    Decoded spectrum ``data[m, n, i, j]`` at range bin ``range_bins[i]`` and
    Doppler bin ``doppler_bins[j]``.

    A cube may hold only a subset of bins (see ``range_doppler_decode``).
    """

    data: np.ndarray
    range_bins: np.ndarray
    doppler_bins: np.ndarray
    fft_sizes: tuple

    @property
    def M(self):
        return self.data.shape[0]

    @property
    def N(self):
        return self.data.shape[1]

    def index(self, l, k):
        li = np.flatnonzero(self.range_bins == l)
        ki = np.flatnonzero(self.doppler_bins == k)
        if li.size == 0 or ki.size == 0:
            raise IndexError(f"bin ({l}, {k}) is not held by this cube")
        return int(li[0]), int(ki[0])

    def snapshot(self, l, k):
        return snapshot(self, l, k)


def _dft_rows(bins, n, size):
    return np.exp(-2j * np.pi * np.mod(np.outer(bins, np.arange(n)), size) / size)


def range_doppler_decode(raw, codes: CodeMatrix, fft_sizes=None, range_bins=None, doppler_bins=None):
    """
    Range DFT, slow-time code removal and Doppler DFT.

    ``x[n,l',k] = sum_l raw[n,l,k] exp(-j2pi l' l / L_fft)`` and
    ``y[m,n,l',k'] = sum_k x[n,l',k] conj(c[k,m]) exp(-j2pi k' k / K_fft)``.
    Rectangular window, no scaling. For TDM codes each Tx uses only its own
    ``floor(K/M)`` pulses and the Doppler DFT runs over the per-antenna pulse
    index (default ``K_fft = floor(K/M)``).

    Parameters
    ----------
    raw : ndarray, shape (N, L, K)
    codes : CodeMatrix
        Victim codes, K x M.
    fft_sizes : (int, int), optional
        ``(L_fft, K_fft)``; zero padding only, defaults to ``(L, K)``.
    range_bins, doppler_bins : array_like of int, optional
        Evaluate only these bins (direct DFT); default all bins (FFT).
    """
    raw = np.asarray(raw)
    if raw.ndim != 3:
        raise InvalidDimensionError(f"raw tensor must be (N, L, K), got shape {raw.shape}")
    N, L, K = raw.shape
    C = codes.entries
    if C.shape[0] != K:
        raise InvalidDimensionError(f"codes have {C.shape[0]} pulses, tensor has {K}")
    M = C.shape[1]
    tdm = codes.mode is CodeMode.TDM
    Kp = K // M if tdm else K
    if fft_sizes is None:
        fft_sizes = (L, Kp)
    L_fft, K_fft = int(fft_sizes[0]), int(fft_sizes[1])
    if L_fft < L or K_fft < Kp:
        raise InvalidDimensionError(f"FFT sizes {fft_sizes} are shorter than the data ({L}, {Kp})")

    if range_bins is None:
        rb = np.arange(L_fft)
        x = np.fft.fft(raw, n=L_fft, axis=1)
    else:
        rb = np.atleast_1d(np.asarray(range_bins, dtype=int)) % L_fft
        x = np.einsum("rl,nlk->nrk", _dft_rows(rb, L, L_fft), raw)

    if tdm:
        # pulse k = kk*M + m belongs to Tx m; drop the K mod M tail
        xs = x[:, :, : Kp * M].reshape(N, x.shape[1], Kp, M)
        z = np.moveaxis(xs, 3, 0)
    else:
        z = x[None, :, :, :] * np.conj(C.T)[:, None, None, :]

    if doppler_bins is None:
        db = np.arange(K_fft)
        y = np.fft.fft(z, n=K_fft, axis=-1)
    else:
        db = np.atleast_1d(np.asarray(doppler_bins, dtype=int)) % K_fft
        y = np.einsum("mnrk,dk->mnrd", z, _dft_rows(db, Kp, K_fft))
    return RangeDopplerCube(y, rb, db, (L_fft, K_fft))


def snapshot(cube: RangeDopplerCube, l, k):
    """
    MN-vector at bin ``(l, k)``, Tx-major: entry ``m*N + n`` is ``y[m, n]``.

    Raises IndexError for a bin outside the cube.
    """
    L_fft, K_fft = cube.fft_sizes
    if not (0 <= l < L_fft and 0 <= k < K_fft):
        raise IndexError(f"bin ({l}, {k}) outside a {L_fft} x {K_fft} spectrum")
    i, j = cube.index(l, k)
    return cube.data[:, :, i, j].reshape(-1).copy()
