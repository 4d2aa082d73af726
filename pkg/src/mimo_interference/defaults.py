"""
Reference configurations: the realistic victim / interferer / object setup
and the small synthetic array used for ROC studies.

Antenna elements are isotropic with unit gain and the noise variance per raw
sample is 1, so amplitudes below are per-sample SNR / INR in amplitude units.
"""

import numpy as np

from .signal_chain import InterfererTruth, ObjectTruth
from .waveform import SPEED_OF_LIGHT, ArrayGeometry, ChirpParams, chu_roots, make_codes

WAVELENGTH = 3.9e-3
F_C = SPEED_OF_LIGHT / WAVELENGTH
BETA = 15e12
T_CHIRP = 30.7e-6
T_PRI = 37.7e-6
F_L = 15e6
DELTA_T = 1.0 / 16.7e6
L_SAMPLES = 512
K_PULSES = 256
FFT_SIZES = (1024, 256)
ANGLE_FFT = 32

M_TX, N_RX = 4, 8
D_R = WAVELENGTH / 2
D_T = 4 * WAVELENGTH
M_TX_INTF = 8
D_T_INTF = WAVELENGTH

# per-sample amplitudes (dB, noise power 1)
OBJECT_AMP_DB = (-20.0, -34.3)
INTF_AMP_DB = (28.0, 25.9)

OBJECTS = (
    dict(R=35.5, v=-2.9, phi=-1.2),
    dict(R=81.0, v=4.2, phi=11.2),
)
INTERFERERS = (
    dict(beta=14.6e12, T=31.6e-6, T_PRI=39.1e-6, tau_syn=20.8e-6, R=1.8, v=1.3, phi_r=-54.0),
    dict(beta=12.4e12, T=37.2e-6, T_PRI=44.5e-6, tau_syn=17.6e-6, R=2.3, v=-12.8, phi_r=-48.1),
)


def db_amp(db):
    """Amplitude for a power ratio given in dB."""
    return 10.0 ** (db / 20.0)


def victim_chirp(K=K_PULSES, L=L_SAMPLES):
    return ChirpParams(BETA, T_CHIRP, T_PRI, F_C, F_L, DELTA_T, L, K)


def victim_geometry(M=M_TX, N=N_RX):
    return ArrayGeometry(M, N, D_T, D_R, WAVELENGTH)


def interferer_chirp(beta, T, T_PRI_i, K=K_PULSES, L=L_SAMPLES):
    return ChirpParams(beta, T, T_PRI_i, F_C, F_L, DELTA_T, L, K)


def default_objects():
    return [ObjectTruth(alpha=db_amp(a), **o) for o, a in zip(OBJECTS, OBJECT_AMP_DB)]


def default_interferers(K=K_PULSES, mode="DDM_CHU", M=M_TX_INTF, phi_t=0.0):
    out = []
    for ref, a_db in zip(INTERFERERS, INTF_AMP_DB):
        chirp = interferer_chirp(ref["beta"], ref["T"], ref["T_PRI"], K=K)
        roots = chu_roots(M) if mode == "DDM_CHU" else None
        out.append(
            InterfererTruth(
                R=ref["R"],
                v=ref["v"],
                phi_t=phi_t,
                phi_r=ref["phi_r"],
                alpha=db_amp(a_db),
                chirp=chirp,
                tau_syn=ref["tau_syn"],
                codes=make_codes(mode, K, M, roots),
                d_t=D_T_INTF,
            )
        )
    return out


# synthetic ROC setup
SYNTHETIC_REF = dict(
    M=4,
    N=4,
    d_r=0.5,  # in wavelengths
    d_t=2.0,
    object_angle=30.0,
    snr_db=-5.0,
    intf_angles=(40.0, 10.0),
    rho=(0.6, 0.5),
    inr_db=(-15.0, -10.0, -5.0),
)


def synthetic_geometry():
    return ArrayGeometry(SYNTHETIC_REF["M"], SYNTHETIC_REF["N"], SYNTHETIC_REF["d_t"], SYNTHETIC_REF["d_r"], 1.0)


def angle_grid(n=ANGLE_FFT, d_r=0.5):
    """
    Angles (deg) aligned with an ``n``-point Rx spatial FFT: ``sin(phi) = j / (n d_r)``
    for the bins that map to visible angles, sorted ascending.
    """
    j = np.arange(-(n // 2), n - n // 2)
    s = j / (n * d_r)
    s = s[np.abs(s) <= 1]
    return np.rad2deg(np.arcsin(s))
