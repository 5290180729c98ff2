"""
Decoding configuration.

The file format is flat ``key=value`` text, one key per line, with ``#``
comments. Key names are the hyperparameter symbols spelled in ASCII
(``lambda_min``, ``K_orig``, ...). Defaults are the reference settings.
"""

import dataclasses
import math
import os
from dataclasses import dataclass, fields

from slowpath.errors import ConfigError
from slowpath.Logging.logger import info

STRATEGIES = ("baseline", "tcd", "tcd_no_gate", "tcd_signed", "tcd_noise_ref")
SLOW_PATHS = ("waveform", "states")
RESCALE_MODES = ("rms", "none")


@dataclass(frozen=True)
class DecodeConfig:
    """All decoding hyperparameters plus the strategy selector."""

    L_attn: int = 4
    tau: float = 4.0
    W_min_ms: float = 8.0
    W_max_ms: float = 30.0
    lambda_min: float = 0.3
    lambda_max: float = 1.5
    K_orig: int = 16
    K_blur: int = 8
    gamma_gate: float = 2.0
    alpha: float = 0.5
    K_ent: int = 5
    epsilon: float = 1e-6
    strategy: str = "tcd"
    slow_path: str = "waveform"
    rescale: str = "rms"
    noise_sigma: float = 0.01
    seed: int = 0

    def __post_init__(self):
        for field in fields(self):
            value = getattr(self, field.name)
            if field.type in ("float", float) and type(value) is int:
                object.__setattr__(self, field.name, float(value))
        validate_config(self)

    def replace(self, **changes):
        """Copy with ``changes`` applied and validated."""
        return dataclasses.replace(self, **changes)

    @property
    def uses_slow_path(self):
        return self.strategy != "baseline"


def _check(condition, key, message):
    if not condition:
        raise ConfigError(key, message)


def validate_config(config):
    """
    Check ranges and orderings of a DecodeConfig.

    Raises:
        ConfigError: naming the first offending key
    """
    for field in fields(config):
        value = getattr(config, field.name)
        if field.type in ("float", float):
            _check(
                isinstance(value, (int, float)) and math.isfinite(value),
                field.name,
                f"must be a finite number, got {value!r}",
            )
        elif field.type in ("int", int):
            _check(
                isinstance(value, int) and not isinstance(value, bool),
                field.name,
                f"must be an integer, got {value!r}",
            )

    _check(config.L_attn >= 1, "L_attn", "must be >= 1")
    _check(config.W_min_ms > 0, "W_min_ms", "must be > 0")
    _check(config.W_min_ms <= config.W_max_ms, "W_min_ms", "must not exceed W_max_ms")
    _check(config.lambda_min >= 0, "lambda_min", "must be >= 0")
    _check(
        config.lambda_min <= config.lambda_max,
        "lambda_min",
        "must not exceed lambda_max",
    )
    _check(config.K_orig >= 1, "K_orig", "must be >= 1")
    _check(config.K_blur >= 1, "K_blur", "must be >= 1")
    _check(config.K_ent >= 2, "K_ent", "must be >= 2")
    _check(config.gamma_gate >= 0, "gamma_gate", "must be >= 0")
    _check(config.alpha >= 0, "alpha", "must be >= 0")
    _check(config.epsilon > 0, "epsilon", "must be > 0")
    _check(config.noise_sigma >= 0, "noise_sigma", "must be >= 0")
    _check(config.strategy in STRATEGIES, "strategy", f"must be one of {STRATEGIES}")
    _check(config.slow_path in SLOW_PATHS, "slow_path", f"must be one of {SLOW_PATHS}")
    _check(config.rescale in RESCALE_MODES, "rescale", f"must be one of {RESCALE_MODES}")


def _coerce(field, raw):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if field.type in ("int", int):
            return int(text)
        if field.type in ("float", float):
            return float(text)
    except ValueError:
        raise ConfigError(field.name, f"cannot parse {text!r} as {field.type}")
    return text


def parse_config_text(text, source="<config>"):
    """
    Parse ``key=value`` lines into a raw dictionary.

    Raises:
        ConfigError: on a malformed line or a duplicate key
    """
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(None, f"{source}:{number}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(key, f"{source}:{number}: duplicate key")
        values[key] = value
    return values


def config_from_mapping(values, base=None):
    """
    Build a DecodeConfig from ``base`` (defaults if None) updated by ``values``.

    Raises:
        ConfigError: for unknown keys, unparsable or out-of-range values
    """
    known = {field.name: field for field in fields(DecodeConfig)}
    changes = {}
    for key, raw in values.items():
        if key not in known:
            raise ConfigError(key, "unknown configuration key")
        changes[key] = _coerce(known[key], raw)

    base = base or DecodeConfig()
    try:
        return dataclasses.replace(base, **changes)
    except TypeError as e:
        raise ConfigError(None, str(e))


def load_config(config_path=None, overrides=None):
    """
    Load a decoding configuration.

    Args:
        config_path: Optional path to a ``key=value`` file
        overrides: Optional mapping (or list of ``key=value`` strings) applied last

    Returns:
        A validated DecodeConfig

    Raises:
        ConfigError: naming the offending key
    """
    config = DecodeConfig()
    if config_path:
        if not os.path.exists(config_path):
            raise ConfigError(None, f"config file {config_path} not found")
        with open(config_path, "r", encoding="utf-8") as f:
            config = config_from_mapping(parse_config_text(f.read(), config_path))
        info(f"Loaded decoding configuration from {config_path}")

    if overrides:
        if not isinstance(overrides, dict):
            overrides = parse_config_text("\n".join(overrides), "<overrides>")
        config = config_from_mapping(overrides, base=config)
    return config


def serialize_config(config):
    """Render a DecodeConfig as ``key=value`` lines in field order."""
    lines = []
    for field in fields(config):
        value = getattr(config, field.name)
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{field.name}={value}")
    return "\n".join(lines) + "\n"
