"""
Scenario configuration: JSON ingestion, validation and reference defaults.

Keys are snake_case. Angles are in degrees, times in seconds, frequencies in
Hz, lengths in metres and powers in dB when the key ends in ``_db``. Omitted
realistic-mode fields fall back to the reference tables in ``defaults``.
"""

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import defaults
from .arraymath import steering
from .detectors import InterferenceSideInfo
from .errors import ConfigError
from .estimation import TrainingBins
from .signal_chain import InterfererTruth, ObjectTruth
from .synthetic import exp_corr
from .theory import noncentrality
from .waveform import SPEED_OF_LIGHT, ArrayGeometry, ChirpParams, CodeMode, chu_roots, make_codes

DEFAULT_TRIALS = 10_000
BUNDLED = ("synthetic_reference.json", "realistic_reference.json")


class Mode(enum.Enum):
    SYNTHETIC = "SYNTHETIC"
    REALISTIC = "REALISTIC"


@dataclass(frozen=True)
class SyntheticInterferer:
    """Interferer of the synthetic model: Rx angle and Tx exponential correlation."""

    angle: float
    rho: float
    inr_db: float = None


@dataclass(frozen=True)
class OipSettings:
    runs: int = 1000
    angle_range: tuple = (-80.0, 80.0)
    range_range: tuple = (1.0, 3.0)
    interferer: int = 0


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    """
    Validated scenario.

    Synthetic mode uses ``geom``, ``object_angle``, ``snr_db``, ``inr_db``,
    ``synthetic_interferers`` and ``sigma2_pert``. Realistic mode uses
    ``victim``, ``geom``, ``codes``, ``objects``, ``interferers`` and the
    processing settings.
    """

    mode: Mode
    geom: ArrayGeometry
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    snr_db: float = None
    inr_db: tuple = ()
    object_angle: float = 0.0
    synthetic_interferers: tuple = ()
    sigma2_pert: float = 0.0
    pfa_min: float = 1e-2
    pfa_points: int = 20
    victim: ChirpParams = None
    codes: object = None
    objects: tuple = ()
    interferers: tuple = ()
    noise_power: float = 1.0
    fft_sizes: tuple = defaults.FFT_SIZES
    angle_fft: int = defaults.ANGLE_FFT
    training: TrainingBins = field(default_factory=TrainingBins)
    cell_object: int = 0
    oip: OipSettings = field(default_factory=OipSettings)

    # synthetic helpers -------------------------------------------------
    @property
    def Q(self):
        n = len(self.synthetic_interferers) if self.mode is Mode.SYNTHETIC else len(self.interferers)
        return n

    def object_steering(self):
        g = self.geom
        return steering(g.M, g.f_tx(self.object_angle)), steering(g.N, g.f_rx(self.object_angle))

    def A_r(self):
        g = self.geom
        cols = [steering(g.N, g.f_rx(i.angle)) for i in self.synthetic_interferers]
        return np.stack(cols, axis=1) if cols else np.zeros((g.N, 0), complex)

    def tx_correlations(self):
        return [exp_corr(self.geom.M, i.rho) for i in self.synthetic_interferers]

    def interference_powers(self, inr_db):
        """``sigma_tilde2_q`` in units of the noise power (per-interferer override wins)."""
        return [
            10.0 ** ((i.inr_db if i.inr_db is not None else inr_db) / 10.0) * self.noise_power
            for i in self.synthetic_interferers
        ]

    def amplitude(self):
        return np.sqrt(10.0 ** (self.snr_db / 10.0) * self.noise_power)

    def side_info(self, inr_db):
        """Exact EINRs ``h_q^2 / sigma2`` for an INR."""
        a_t, _ = self.object_steering()
        M = self.geom.M
        h2 = [
            s * np.vdot(a_t, R @ a_t).real / M ** 2
            for s, R in zip(self.interference_powers(inr_db), self.tx_correlations())
        ]
        return InterferenceSideInfo(self.A_r(), np.array(h2) / self.noise_power, self.noise_power)

    def rtilde(self, inr_db):
        """Exact normalized interference-plus-noise covariance."""
        M, N = self.geom.M, self.geom.N
        R = np.eye(M * N, dtype=complex)
        for s, Rt, a in zip(self.interference_powers(inr_db), self.tx_correlations(), self.A_r().T):
            R += np.kron(s / self.noise_power * Rt, np.outer(a, np.conj(a)))
        return R

    def noncentrality(self, detector, inr_db=None):
        inr_db = self.inr_db[0] if inr_db is None else inr_db
        a_t, a_r = self.object_steering()
        side = self.side_info(inr_db)
        return noncentrality(
            detector, self.amplitude(), self.noise_power, a_t, a_r, side, self.rtilde(inr_db)
        )

    def pfa_grid(self):
        """``pfa_points`` log-spaced false-alarm rates in ``[pfa_min, 1)``."""
        return np.logspace(np.log10(self.pfa_min), 0.0, self.pfa_points + 1)[:-1]

    def with_overrides(self, **kw):
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update({k: v for k, v in kw.items() if v is not None})
        return validate(ScenarioConfig(**d))


# parsing -------------------------------------------------------------


def _get(d, key, default, ctx, cast=float):
    if key not in d:
        if default is _REQUIRED:
            raise ConfigError(f"missing required field '{ctx}{key}'", key=f"{ctx}{key}")
        return default
    try:
        return cast(d[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{ctx}{key}' has invalid value {d[key]!r}: {exc}", key=f"{ctx}{key}")


_REQUIRED = object()


def _tuple_of(cast, n=None):
    def conv(v):
        out = tuple(cast(x) for x in v)
        if n is not None and len(out) != n:
            raise ValueError(f"expected {n} values")
        return out

    return conv


def _check_keys(d, allowed, ctx):
    if not isinstance(d, dict):
        raise ConfigError(f"'{ctx.rstrip('.') or 'root'}' must be a JSON object", key=ctx.rstrip("."))
    extra = set(d) - set(allowed)
    if extra:
        k = sorted(extra)[0]
        raise ConfigError(f"unknown field '{ctx}{k}'", key=f"{ctx}{k}")


_ROOT_KEYS = {
    "mode", "trials", "seed", "snr_db", "inr_db", "array", "object", "interferers",
    "sigma2_pert", "pfa_grid", "victim", "objects", "fft_sizes", "angle_fft", "training",
    "cell", "oip", "noise_power", "description",
}


def _parse_array(d, ctx, wavelength_default):
    _check_keys(d, {"M", "N", "d_t", "d_r", "wavelength"}, ctx)
    lam = _get(d, "wavelength", wavelength_default, ctx)
    try:
        return ArrayGeometry(
            _get(d, "M", _REQUIRED, ctx, int),
            _get(d, "N", _REQUIRED, ctx, int),
            _get(d, "d_t", _REQUIRED, ctx),
            _get(d, "d_r", _REQUIRED, ctx),
            lam,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid '{ctx.rstrip('.')}': {exc}", key=ctx.rstrip("."))


def _parse_synthetic(raw, common):
    geom = _parse_array(raw.get("array", {}), "array.", 1.0)
    obj = raw.get("object", {})
    _check_keys(obj, {"angle"}, "object.")
    intfs = raw.get("interferers", [])
    if not isinstance(intfs, list):
        raise ConfigError("'interferers' must be a list", key="interferers")
    si = []
    for i, d in enumerate(intfs):
        ctx = f"interferers[{i}]."
        _check_keys(d, {"angle", "rho", "inr_db"}, ctx)
        si.append(
            SyntheticInterferer(
                _get(d, "angle", _REQUIRED, ctx),
                _get(d, "rho", _REQUIRED, ctx),
                _get(d, "inr_db", None, ctx),
            )
        )
    inr = raw.get("inr_db", [])
    inr = [inr] if isinstance(inr, (int, float)) else inr
    pg = raw.get("pfa_grid", {})
    _check_keys(pg, {"min", "points"}, "pfa_grid.")
    return ScenarioConfig(
        mode=Mode.SYNTHETIC,
        geom=geom,
        snr_db=_get(raw, "snr_db", _REQUIRED, ""),
        inr_db=_get({"inr_db": inr}, "inr_db", (), "", _tuple_of(float)),
        object_angle=_get(obj, "angle", _REQUIRED, "object."),
        synthetic_interferers=tuple(si),
        sigma2_pert=_get(raw, "sigma2_pert", 0.0, ""),
        pfa_min=_get(pg, "min", 1e-2, "pfa_grid."),
        pfa_points=_get(pg, "points", 20, "pfa_grid.", int),
        **common,
    )


_VICTIM_KEYS = {
    "beta", "T", "T_PRI", "f_c", "wavelength", "f_L", "delta_T", "L", "K",
    "M", "N", "d_t", "d_r", "code_mode", "chu_roots",
}
_INTF_KEYS = {
    "R", "v", "phi_t", "phi_r", "amplitude_db", "beta", "T", "T_PRI", "tau_syn",
    "K", "M", "d_t", "code_mode", "chu_roots",
}


def _parse_codes(d, ctx, K, M, default_mode):
    mode = _get(d, "code_mode", default_mode, ctx, str)
    try:
        mode = CodeMode(mode)
    except ValueError:
        raise ConfigError(f"field '{ctx}code_mode' must be one of {[m.value for m in CodeMode]}", key=f"{ctx}code_mode")
    roots = _get(d, "chu_roots", None, ctx, _tuple_of(int))
    if mode is CodeMode.DDM_CHU and roots is None:
        roots = chu_roots(M)
    return make_codes(mode, K, M, roots)


def _parse_realistic(raw, common):
    v = raw.get("victim", {})
    ctx = "victim."
    _check_keys(v, _VICTIM_KEYS, ctx)
    lam = _get(v, "wavelength", defaults.WAVELENGTH, ctx)
    f_c = _get(v, "f_c", SPEED_OF_LIGHT / lam, ctx)
    try:
        victim = ChirpParams(
            _get(v, "beta", defaults.BETA, ctx),
            _get(v, "T", defaults.T_CHIRP, ctx),
            _get(v, "T_PRI", defaults.T_PRI, ctx),
            f_c,
            _get(v, "f_L", defaults.F_L, ctx),
            _get(v, "delta_T", defaults.DELTA_T, ctx),
            _get(v, "L", defaults.L_SAMPLES, ctx, int),
            _get(v, "K", defaults.K_PULSES, ctx, int),
        )
        geom = ArrayGeometry(
            _get(v, "M", defaults.M_TX, ctx, int),
            _get(v, "N", defaults.N_RX, ctx, int),
            _get(v, "d_t", defaults.D_T, ctx),
            _get(v, "d_r", defaults.D_R, ctx),
            victim.wavelength,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid victim configuration: {exc}", key="victim")
    codes = _wrap(lambda: _parse_codes(v, ctx, victim.K, geom.M, "DDM_CHU"), "victim.code_mode")

    objs_raw = raw.get("objects")
    if objs_raw is None:
        objs_raw = [dict(o, amplitude_db=a) for o, a in zip(defaults.OBJECTS, defaults.OBJECT_AMP_DB)]
    objects = []
    for i, d in enumerate(objs_raw):
        c = f"objects[{i}]."
        _check_keys(d, {"R", "v", "phi", "amplitude_db"}, c)
        objects.append(
            _wrap(
                lambda: ObjectTruth(
                    _get(d, "R", _REQUIRED, c),
                    _get(d, "v", 0.0, c),
                    _get(d, "phi", 0.0, c),
                    defaults.db_amp(_get(d, "amplitude_db", _REQUIRED, c)),
                ),
                c.rstrip("."),
            )
        )

    intf_raw = raw.get("interferers")
    if intf_raw is None:
        intf_raw = [
            dict(s, amplitude_db=a) for s, a in zip(defaults.INTERFERERS, defaults.INTF_AMP_DB)
        ]
    interferers = []
    for i, d in enumerate(intf_raw):
        c = f"interferers[{i}]."
        _check_keys(d, _INTF_KEYS, c)
        K_i = _get(d, "K", victim.K, c, int)
        M_i = _get(d, "M", defaults.M_TX_INTF, c, int)
        chirp = _wrap(
            lambda: ChirpParams(
                _get(d, "beta", _REQUIRED, c),
                _get(d, "T", _REQUIRED, c),
                _get(d, "T_PRI", _REQUIRED, c),
                victim.f_c,
                victim.f_L,
                victim.delta_T,
                min(victim.L, int(_get(d, "T_PRI", _REQUIRED, c) / victim.delta_T)),
                K_i,
            ),
            c.rstrip("."),
        )
        codes_i = _wrap(lambda: _parse_codes(d, c, K_i, M_i, "DDM_CHU"), f"{c}code_mode")
        interferers.append(
            _wrap(
                lambda: InterfererTruth(
                    R=_get(d, "R", _REQUIRED, c),
                    v=_get(d, "v", 0.0, c),
                    phi_t=_get(d, "phi_t", 0.0, c),
                    phi_r=_get(d, "phi_r", _REQUIRED, c),
                    alpha=defaults.db_amp(_get(d, "amplitude_db", _REQUIRED, c)),
                    chirp=chirp,
                    tau_syn=_get(d, "tau_syn", 0.0, c),
                    codes=codes_i,
                    d_t=_get(d, "d_t", defaults.D_T_INTF, c),
                ),
                c.rstrip("."),
            )
        )

    tr = raw.get("training", {})
    _check_keys(tr, {"range_offsets", "doppler_offsets"}, "training.")
    training = _wrap(
        lambda: TrainingBins(
            _get(tr, "range_offsets", (-2, 2), "training.", _tuple_of(int)),
            _get(tr, "doppler_offsets", (-2, 2), "training.", _tuple_of(int)),
        ),
        "training",
    )
    cell = raw.get("cell", {})
    _check_keys(cell, {"object"}, "cell.")
    oip = raw.get("oip", {})
    _check_keys(oip, {"runs", "angle_range", "range_range", "interferer"}, "oip.")
    return ScenarioConfig(
        mode=Mode.REALISTIC,
        geom=geom,
        victim=victim,
        codes=codes,
        objects=tuple(objects),
        interferers=tuple(interferers),
        fft_sizes=_get(raw, "fft_sizes", defaults.FFT_SIZES, "", _tuple_of(int, 2)),
        angle_fft=_get(raw, "angle_fft", defaults.ANGLE_FFT, "", int),
        training=training,
        cell_object=_get(cell, "object", 0, "cell.", int),
        oip=OipSettings(
            runs=_get(oip, "runs", 1000, "oip.", int),
            angle_range=_get(oip, "angle_range", (-80.0, 80.0), "oip.", _tuple_of(float, 2)),
            range_range=_get(oip, "range_range", (1.0, 3.0), "oip.", _tuple_of(float, 2)),
            interferer=_get(oip, "interferer", 0, "oip.", int),
        ),
        **common,
    )


def _wrap(fn, key):
    try:
        return fn()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid '{key}': {exc}", key=key)


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check cross-field invariants; returns ``cfg`` unchanged."""
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1", key="trials")
    if cfg.Q > cfg.geom.N:
        raise ConfigError(
            f"{cfg.Q} interferers exceed the {cfg.geom.N}-element Rx array", key="interferers"
        )
    if cfg.noise_power <= 0:
        raise ConfigError("noise_power must be positive", key="noise_power")
    if cfg.mode is Mode.SYNTHETIC:
        if not cfg.inr_db and any(i.inr_db is None for i in cfg.synthetic_interferers):
            raise ConfigError("inr_db must list at least one value", key="inr_db")
        if cfg.sigma2_pert < 0:
            raise ConfigError("sigma2_pert must be non-negative", key="sigma2_pert")
        for i, s in enumerate(cfg.synthetic_interferers):
            if abs(s.rho) >= 1:
                raise ConfigError("|rho| must be < 1", key=f"interferers[{i}].rho")
        if not 0 < cfg.pfa_min < 1 or cfg.pfa_points < 1:
            raise ConfigError("pfa_grid needs 0 < min < 1 and points >= 1", key="pfa_grid")
    else:
        L_fft, K_fft = cfg.fft_sizes
        Kp = cfg.victim.K // cfg.geom.M if cfg.codes.mode is CodeMode.TDM else cfg.victim.K
        if L_fft < cfg.victim.L or K_fft < Kp:
            raise ConfigError("fft_sizes must not be shorter than the data", key="fft_sizes")
        if cfg.angle_fft < 2:
            raise ConfigError("angle_fft must be >= 2", key="angle_fft")
        if not cfg.objects or not 0 <= cfg.cell_object < len(cfg.objects):
            raise ConfigError("cell.object must index a configured object", key="cell.object")
        if cfg.oip.runs < 1:
            raise ConfigError("oip.runs must be >= 1", key="oip.runs")
        if cfg.interferers and not 0 <= cfg.oip.interferer < len(cfg.interferers):
            raise ConfigError("oip.interferer must index a configured interferer", key="oip.interferer")
        if cfg.Q > cfg.geom.N - 1:
            raise ConfigError("noise estimation needs Q <= N - 1", key="interferers")
    return cfg


def parse_scenario(raw: dict) -> ScenarioConfig:
    """Build a validated config from an already-decoded JSON object."""
    _check_keys(raw, _ROOT_KEYS, "")
    try:
        mode = Mode(str(raw.get("mode", "SYNTHETIC")).upper())
    except ValueError:
        raise ConfigError("'mode' must be SYNTHETIC or REALISTIC", key="mode")
    common = dict(
        trials=_get(raw, "trials", DEFAULT_TRIALS, "", int),
        seed=_get(raw, "seed", 0, "", int),
        noise_power=_get(raw, "noise_power", 1.0, ""),
    )
    if mode is Mode.SYNTHETIC:
        return validate(_parse_synthetic(raw, common))
    return validate(_parse_realistic(raw, common))


def load_scenario(path) -> ScenarioConfig:
    """
    Load and validate a scenario file.

    ``path`` may also be the bare name of a bundled scenario
    (``synthetic_reference.json`` or ``realistic_reference.json``).

    Raises
    ------
    ConfigError
        On a JSON syntax error (with line number) or an invalid field (with key).
    OSError
        If the file cannot be read.
    """
    p = Path(path)
    if not p.exists() and p.name in BUNDLED and len(p.parts) == 1:
        text = resources.files("mimo_interference.scenarios").joinpath(p.name).read_text("utf-8")
    else:
        text = p.read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc.msg}", line=exc.lineno)
    return parse_scenario(raw)
