"""
Simulation and detection of MIMO-FMCW radar objects under mutual interference.

The package covers the victim signal chain (objects, incoherent interferers,
range-Doppler decoding), four spatial-domain detectors (clairvoyant, RS,
LCMV, GS), their closed-form detection theory, adaptive estimation of the
interference statistics, and a seeded Monte Carlo harness behind a CLI.
"""

from .arraymath import H, kron, proj, proj_perp, reg_proj, steering
from .detectors import (
    InterferenceSideInfo,
    essential_amplitude,
    essential_covariance,
    gs_weights,
    t_clairvoyant,
    t_gs,
    t_lcmv,
    t_rs,
)
from .errors import (
    CodeConstructionError,
    ConfigError,
    DegenerateGeometryError,
    InvalidDimensionError,
    ModelError,
    OverdeterminedInterferenceError,
    SingularSubspaceError,
)
from .processing import RangeDopplerCube, range_doppler_decode, snapshot
from .signal_chain import (
    InterfererTruth,
    ObjectTruth,
    simulate_interference,
    simulate_object,
)
from .synthetic import synth_interference_snapshot, synth_object_snapshot
from .theory import curve, marcum_q1, noncentrality, pd, threshold_from_pfa
from .waveform import ArrayGeometry, ChirpParams, CodeMatrix, CodeMode, make_codes

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "ChirpParams",
    "CodeConstructionError",
    "CodeMatrix",
    "CodeMode",
    "ConfigError",
    "DegenerateGeometryError",
    "H",
    "InterferenceSideInfo",
    "InterfererTruth",
    "InvalidDimensionError",
    "ModelError",
    "ObjectTruth",
    "OverdeterminedInterferenceError",
    "RangeDopplerCube",
    "SingularSubspaceError",
    "curve",
    "essential_amplitude",
    "essential_covariance",
    "gs_weights",
    "kron",
    "make_codes",
    "marcum_q1",
    "noncentrality",
    "pd",
    "proj",
    "proj_perp",
    "range_doppler_decode",
    "reg_proj",
    "simulate_interference",
    "simulate_object",
    "snapshot",
    "steering",
    "synth_interference_snapshot",
    "synth_object_snapshot",
    "t_clairvoyant",
    "t_gs",
    "t_lcmv",
    "t_rs",
    "threshold_from_pfa",
]
