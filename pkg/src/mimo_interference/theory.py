"""Closed-form detection theory: Marcum Q, thresholds, noncentralities, ROC curves."""

from dataclasses import dataclass

import numpy as np
from scipy.special import ive

from .arraymath import hermitian_solve, kron, proj_perp, reg_proj

# series truncation: stop once a term is below this fraction of the partial sum
SERIES_TOL = 1e-14
_MAX_TERMS = 100_000
_BLOCK = 64


def _q1_scalar(a, b):
    if b == 0.0:
        return 1.0
    if a == 0.0:
        return float(np.exp(-0.5 * b * b))
    x = a * b
    pref = np.exp(-0.5 * (a - b) ** 2)
    # sum (r^k ive(k, ab)) in blocks; terms decrease monotonically in k
    if a < b:
        r, k0 = a / b, 0
    else:
        r, k0 = b / a, 1
    total = 0.0
    k = k0
    while k < _MAX_TERMS:
        ks = np.arange(k, k + _BLOCK)
        terms = np.power(r, ks.astype(float)) * ive(ks, x)
        total += terms.sum()
        if terms[-1] <= SERIES_TOL * max(total, 1e-300):
            break
        k += _BLOCK
    if a < b:
        return float(min(max(pref * total, 0.0), 1.0))
    return float(min(max(1.0 - pref * total, 0.0), 1.0))


def marcum_q1(a, b):
    """
    First-order Marcum Q function ``Q_1(a, b)``.

    Uses the scaled modified-Bessel series
    ``exp(-(a-b)^2/2) sum_k (a/b)^k ive(k, ab)`` when ``a < b`` and the
    complementary series ``1 - exp(-(a-b)^2/2) sum_{k>=1} (b/a)^k ive(k, ab)``
    otherwise, so the small quantity is always the one summed directly.

    Parameters
    ----------
    a, b : float or array_like
        Non-negative, finite.

    Returns
    -------
    float or ndarray
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(a_arr)) and np.all(np.isfinite(b_arr))):
        raise ValueError("marcum_q1 arguments must be finite")
    if np.any(a_arr < 0) or np.any(b_arr < 0):
        raise ValueError("marcum_q1 arguments must be non-negative")
    A, B = np.broadcast_arrays(a_arr, b_arr)
    out = np.array([_q1_scalar(float(x), float(y)) for x, y in zip(A.ravel(), B.ravel())])
    out = out.reshape(A.shape)
    return float(out) if out.ndim == 0 else out


def threshold_from_pfa(pfa):
    """Threshold ``gamma = -2 ln(pfa)`` giving false-alarm rate ``pfa`` for a chi^2_2 statistic."""
    p = np.asarray(pfa, dtype=float)
    if np.any(~((p > 0) & (p < 1))):
        raise ValueError("pfa must lie in the open interval (0, 1)")
    g = -2.0 * np.log(p)
    return float(g) if g.ndim == 0 else g


def pfa_from_threshold(gamma):
    """``exp(-gamma / 2)``."""
    g = np.exp(-0.5 * np.asarray(gamma, dtype=float))
    return float(g) if g.ndim == 0 else g


def pd(lam, gamma):
    """Detection probability ``Q_1(sqrt(lam), sqrt(gamma))``."""
    lam = np.asarray(lam, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    if np.any(lam < 0) or np.any(gamma < 0):
        raise ValueError("lam and gamma must be non-negative")
    return marcum_q1(np.sqrt(lam), np.sqrt(gamma))


def noncentrality(detector, b, sigma2, a_t, a_r, side=None, R_tilde=None):
    """
    Noncentrality parameter of a detector's chi^2_2 statistic under H1.

    Parameters
    ----------
    detector : {"clairvoyant", "rs", "lcmv", "gs"}
    b : complex
        Object amplitude.
    sigma2 : float
        Noise power.
    a_t, a_r : ndarray
        Object steering vectors.
    side : InterferenceSideInfo, optional
        Needed by ``rs`` (its ``A_r``) and ``gs``.
    R_tilde : ndarray, optional
        Normalized covariance for ``lcmv``.
    """
    a_t = np.asarray(a_t, dtype=complex)
    a_r = np.asarray(a_r, dtype=complex)
    M, N = a_t.size, a_r.size
    snr2 = 2.0 * abs(b) ** 2 / sigma2
    if detector == "clairvoyant":
        return snr2 * M * N
    if detector == "rs":
        if side is None:
            raise ValueError("the RS noncentrality needs interference side info")
        u = proj_perp(side.A_r) @ a_r if side.Q else a_r
        return snr2 * np.vdot(kron(a_t, u), kron(a_t, u)).real
    if detector == "gs":
        if side is None:
            raise ValueError("the GS noncentrality needs interference side info")
        Pp = np.eye(N) - reg_proj(side.A_r, side.lam, M)
        return snr2 * M * np.vdot(a_r, Pp @ a_r).real
    if detector == "lcmv":
        if R_tilde is None:
            raise ValueError("the LCMV noncentrality needs a covariance matrix")
        s = kron(a_t, a_r)
        return snr2 * np.vdot(s, hermitian_solve(np.asarray(R_tilde), s)).real
    raise ValueError(f"unknown detector {detector!r}")


@dataclass(frozen=True, eq=False)
class DetectionCurve:
    """Analytical ROC: thresholds with matching false-alarm and detection probabilities."""

    detector: str
    gamma_grid: np.ndarray
    pfa: np.ndarray
    pd: np.ndarray
    lam: float


def curve(detector, scenario, pfa_grid):
    """
    Theoretical ROC of ``detector`` over ``pfa_grid``.

    ``scenario`` is either the noncentrality itself or an object exposing
    ``noncentrality(detector)`` (e.g. a synthetic ``ScenarioConfig``).
    """
    lam = scenario.noncentrality(detector) if hasattr(scenario, "noncentrality") else float(scenario)
    pfa_grid = np.sort(np.atleast_1d(np.asarray(pfa_grid, dtype=float)))[::-1]
    gamma = np.atleast_1d(threshold_from_pfa(pfa_grid))
    return DetectionCurve(detector, gamma, pfa_grid, np.atleast_1d(pd(lam, gamma)), float(lam))
