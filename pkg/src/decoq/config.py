"""Run and sweep configuration: JSON schema, validation and figure presets."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass

from decoq.model import (
    MODEL_PARAMETERS,
    Axis,
    HamiltonianParams,
    InitialStateSpec,
    NoiseChannelSpec,
    NoiseModel,
    ValidationError,
)

AXIS_KEYS = {"z": Axis.LONGITUDINAL, "x": Axis.TRANSVERSE_X, "y": Axis.TRANSVERSE_Y}
SECTIONS = {
    "hamiltonian": {"delta", "omega_r", "phi_r"},
    "initial_state": {"theta", "phi"},
    "noise": set(AXIS_KEYS),
    "integration": {"t_max", "dt", "h_coeff", "output_stride"},
    "analysis": {"threshold"},
}
DEFAULT_DT = 1e-3
DEFAULT_H_COEFF = 2e-3
DEFAULT_STRIDE = 10
DEFAULT_THRESHOLD = math.exp(-1)


class ConfigError(ValidationError):
    """Configuration rejected; ``path`` is the dotted key at fault and ``line`` its line in the source."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.message = message
        self.path = path
        self.line = line
        where = f"line {line}: " if line is not None else ""
        key = f"{path}: " if path else ""
        super().__init__(f"{where}{key}{message}")


@dataclass(frozen=True)
class IntegrationSettings:
    t_max: float
    dt: float = DEFAULT_DT
    h_coeff: float = DEFAULT_H_COEFF
    output_stride: int = DEFAULT_STRIDE


@dataclass(frozen=True)
class RunConfig:
    hamiltonian: HamiltonianParams
    initial_state: InitialStateSpec
    noise: dict
    integration: IntegrationSettings
    threshold: float = DEFAULT_THRESHOLD

    @property
    def channels(self) -> list[NoiseChannelSpec]:
        return [self.noise[a] for a in Axis]

    def to_dict(self) -> dict:
        noise = {}
        for key, axis in AXIS_KEYS.items():
            ch = self.noise[axis]
            entry = {"model": ch.model.value}
            for p in MODEL_PARAMETERS[ch.model]:
                entry[p] = getattr(ch, p)
            noise[key] = entry
        return {
            "hamiltonian": {
                "delta": self.hamiltonian.delta,
                "omega_r": self.hamiltonian.omega_r,
                "phi_r": self.hamiltonian.phi_r,
            },
            "initial_state": {"theta": self.initial_state.theta, "phi": self.initial_state.phi},
            "noise": noise,
            "integration": {
                "t_max": self.integration.t_max,
                "dt": self.integration.dt,
                "h_coeff": self.integration.h_coeff,
                "output_stride": self.integration.output_stride,
            },
            "analysis": {"threshold": self.threshold},
        }


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    base_dict: dict
    parameter: str
    values: tuple


def _locate(text: str | None, path: str) -> int | None:
    """Best-effort line number of the last key of ``path`` in the JSON source."""
    if not text or not path:
        return None
    pos = 0
    for key in path.split("."):
        found = text.find(f'"{key}"', pos)
        if found < 0:
            break
        pos = found
    else:
        return text.count("\n", 0, pos) + 1
    return None


def _number(value, path, *, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    if integer and int(value) != value:
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {value!r}", path)
    return int(value) if integer else float(value)


def _section(raw, name):
    value = raw.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError("expected an object", name)
    unknown = set(value) - SECTIONS[name]
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown key (allowed: {', '.join(sorted(SECTIONS[name]))})", f"{name}.{key}")
    return value


def _channel(raw, key) -> NoiseChannelSpec:
    path = f"noise.{key}"
    if raw is None:
        raw = {"model": "none"}
    if not isinstance(raw, dict):
        raise ConfigError("expected an object", path)
    model_name = raw.get("model", "none")
    try:
        model = NoiseModel(model_name)
    except ValueError:
        options = ", ".join(m.value for m in NoiseModel)
        raise ConfigError(f"unknown model {model_name!r} (one of {options})", f"{path}.model") from None
    allowed = set(MODEL_PARAMETERS[model])
    unknown = set(raw) - allowed - {"model"}
    if unknown:
        key2 = sorted(unknown)[0]
        raise ConfigError(f"not a parameter of {model.value} (allowed: {', '.join(sorted(allowed)) or 'none'})", f"{path}.{key2}")
    missing = allowed - set(raw)
    if missing:
        raise ConfigError(f"{model.value} requires {', '.join(sorted(missing))}", path)
    params = {p: _number(raw[p], f"{path}.{p}") for p in allowed}
    checks = {"gamma": lambda v: v >= 0, "sigma": lambda v: v >= 0, "cutoff": lambda v: v > 0, "zeta": lambda v: v > 0}
    for p, ok in checks.items():
        if p in params and not ok(params[p]):
            raise ConfigError(f"out of range: {params[p]!r}", f"{path}.{p}")
    if "temperature" in params and not params["temperature"] > 0:
        raise ConfigError(f"must be > 0, got {params['temperature']!r}", f"{path}.temperature")
    try:
        return NoiseChannelSpec(AXIS_KEYS[key], model, **params)
    except ValidationError as exc:
        raise ConfigError(str(exc), path) from None


def parse_run_config(raw: dict) -> RunConfig:
    """Validate a decoded JSON object; raises :class:`ConfigError` without line numbers."""
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object")
    unknown = set(raw) - set(SECTIONS)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown section (allowed: {', '.join(sorted(SECTIONS))})", key)

    ham = _section(raw, "hamiltonian")
    delta = _number(ham.get("delta", 1.0), "hamiltonian.delta")
    if delta != 1.0:
        raise ConfigError("energies are in units of delta, which must be 1.0", "hamiltonian.delta")
    omega_r = _number(ham.get("omega_r", 0.0), "hamiltonian.omega_r")
    if omega_r < 0:
        raise ConfigError(f"must be >= 0, got {omega_r!r}", "hamiltonian.omega_r")
    h = HamiltonianParams(delta, omega_r, _number(ham.get("phi_r", 0.0), "hamiltonian.phi_r"))

    init = _section(raw, "initial_state")
    if "theta" not in init:
        raise ConfigError("missing required key", "initial_state.theta")
    theta = _number(init["theta"], "initial_state.theta")
    if not 0 <= theta <= math.pi:
        raise ConfigError(f"theta must lie in [0, pi], got {theta!r}", "initial_state.theta")
    state = InitialStateSpec(theta, _number(init.get("phi", 0.0), "initial_state.phi"))

    noise_raw = _section(raw, "noise")
    noise = {AXIS_KEYS[k]: _channel(noise_raw.get(k), k) for k in AXIS_KEYS}

    integ = _section(raw, "integration")
    t_max = _number(integ.get("t_max", 2 * h.period), "integration.t_max")
    dt = _number(integ.get("dt", DEFAULT_DT), "integration.dt")
    h_coeff = _number(integ.get("h_coeff", DEFAULT_H_COEFF), "integration.h_coeff")
    stride = _number(integ.get("output_stride", DEFAULT_STRIDE), "integration.output_stride", integer=True)
    for name, v in (("t_max", t_max), ("dt", dt), ("h_coeff", h_coeff), ("output_stride", stride)):
        if not v > 0:
            raise ConfigError(f"must be > 0, got {v!r}", f"integration.{name}")
    if dt > h_coeff:
        raise ConfigError(f"dt={dt} must not exceed h_coeff={h_coeff}", "integration.dt")
    limit = math.pi / h.generalized_rabi / 20
    if h_coeff > limit:
        raise ConfigError(f"must be <= {limit:.6g} (20 points per frame half-period)", "integration.h_coeff")

    analysis = _section(raw, "analysis")
    threshold = _number(analysis.get("threshold", DEFAULT_THRESHOLD), "analysis.threshold")
    if not 0 < threshold < 1:
        raise ConfigError(f"must lie in (0, 1), got {threshold!r}", "analysis.threshold")

    return RunConfig(h, state, noise, IntegrationSettings(t_max, dt, h_coeff, stride), threshold)


def _decode(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from None


def _with_line(exc: ConfigError, text: str | None) -> ConfigError:
    if exc.line is None and text is not None:
        line = _locate(text, exc.path)
        if line is not None:
            return ConfigError(exc.message, exc.path, line)
    return exc


def load_run_config(path) -> RunConfig:
    with open(path) as fh:
        text = fh.read()
    try:
        return parse_run_config(_decode(text))
    except ConfigError as exc:
        raise _with_line(exc, text) from None


def resolve_path(raw: dict, dotted: str):
    """Return ``(container, key)`` for a dotted path ending at a numeric leaf."""
    node = raw
    parts = dotted.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise ConfigError("path does not resolve in the base configuration", dotted)
        node = node[part]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError("path does not resolve in the base configuration", dotted)
    value = node[leaf]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"not a numeric leaf (value {value!r})", dotted)
    return node, leaf


def with_override(raw: dict, dotted: str, value) -> dict:
    out = copy.deepcopy(raw)
    node, leaf = resolve_path(out, dotted)
    node[leaf] = value
    return out


def parse_sweep_config(raw: dict) -> SweepConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object")
    unknown = set(raw) - {"base", "parameter", "values"}
    if unknown:
        raise ConfigError("unknown key (allowed: base, parameter, values)", sorted(unknown)[0])
    base = raw.get("base")
    if isinstance(base, str):
        base_dict = preset(base).to_dict()
    elif isinstance(base, dict):
        base_dict = base
    else:
        raise ConfigError("expected a run configuration object or a preset name", "base")
    try:
        base_cfg = parse_run_config(base_dict)
    except ConfigError as exc:
        raise ConfigError(exc.message, f"base.{exc.path}" if exc.path else "base") from None
    base_dict = base_cfg.to_dict()
    parameter = raw.get("parameter")
    if not isinstance(parameter, str):
        raise ConfigError("expected a dotted key such as noise.z.gamma", "parameter")
    resolve_path(base_dict, parameter)
    values = raw.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("expected a non-empty list", "values")
    values = tuple(_number(v, f"values[{i}]") for i, v in enumerate(values))
    return SweepConfig(base_cfg, base_dict, parameter, values)


def load_sweep_config(path) -> SweepConfig:
    with open(path) as fh:
        text = fh.read()
    try:
        return parse_sweep_config(_decode(text))
    except ConfigError as exc:
        raise _with_line(exc, text) from None


# --- figure presets -----------------------------------------------------------

def _high_t(gamma):
    return {"model": "ohmic_high_t", "gamma": gamma, "temperature": 100.0}


def _zero_t(gamma):
    return {"model": "ohmic_zero_t", "gamma": gamma, "cutoff": 100.0}


def _one_over_f(sigma, zeta):
    return {"model": "one_over_f", "sigma": sigma, "zeta": zeta}


_NONE = {"model": "none"}


def _preset(theta, z, x, t_max=None):
    raw = {
        "hamiltonian": {"delta": 1.0, "omega_r": 0.1, "phi_r": 0.0},
        "initial_state": {"theta": theta, "phi": 0.0},
        "noise": {"z": z, "x": x, "y": _NONE},
    }
    if t_max is not None:
        raw["integration"] = {"t_max": t_max}
    return raw


_TWO_THIRDS_PI = 2 * math.pi / 3
_THIRD_PI = math.pi / 3
# the slow 1/f case decays around t ~ 14, past the default two periods
_LONG_1F_WINDOW = 40.0

PRESETS = {
    "fig1_high_t": _preset(_TWO_THIRDS_PI, _high_t(0.002), _high_t(0.002)),
    "fig1_zero_t": _preset(_TWO_THIRDS_PI, _zero_t(0.002), _zero_t(0.002)),
    "fig2_high_t": _preset(_TWO_THIRDS_PI, _high_t(0.02), _high_t(0.02)),
    "fig2_zero_t_002": _preset(_TWO_THIRDS_PI, _zero_t(0.02), _zero_t(0.02)),
    "fig2_zero_t_0002": _preset(_TWO_THIRDS_PI, _zero_t(0.002), _zero_t(0.002)),
    "fig3_long": _preset(_THIRD_PI, _high_t(0.02), _NONE),
    "fig3_trans": _preset(_THIRD_PI, _NONE, _high_t(0.02)),
    "fig3_both": _preset(_THIRD_PI, _high_t(0.02), _high_t(0.02)),
    "fig4_long": _preset(_THIRD_PI, _zero_t(0.02), _NONE),
    "fig4_trans": _preset(_THIRD_PI, _NONE, _zero_t(0.02)),
    "fig4_both": _preset(_THIRD_PI, _zero_t(0.02), _zero_t(0.02)),
    "fig5_weak": _preset(_THIRD_PI, _one_over_f(0.1, 0.2), _one_over_f(0.1, 0.2), _LONG_1F_WINDOW),
    "fig5_strong": _preset(_THIRD_PI, _one_over_f(0.5, 0.75), _one_over_f(0.5, 0.75), _LONG_1F_WINDOW),
    "fig7_long": _preset(_THIRD_PI, _one_over_f(0.2, 0.5), _NONE),
    "fig7_trans": _preset(_THIRD_PI, _NONE, _one_over_f(0.2, 0.5)),
}


def preset(name: str) -> RunConfig:
    try:
        raw = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}") from None
    return parse_run_config(copy.deepcopy(raw))
