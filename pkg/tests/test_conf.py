import configparser
import os

import pytest

from slowpath.errors import ConfigError
from slowpath.Meta.config import DecodeConfig, load_config, parse_config_text, serialize_config

DEFAULTS = {
    "L_attn": 4,
    "tau": 4.0,
    "W_min_ms": 8.0,
    "W_max_ms": 30.0,
    "lambda_min": 0.3,
    "lambda_max": 1.5,
    "K_orig": 16,
    "K_blur": 8,
    "gamma_gate": 2.0,
    "alpha": 0.5,
    "K_ent": 5,
    "epsilon": 1e-6,
}


@pytest.fixture
def config_file(temp_dir):
    """A key=value file with comments and a couple of overrides."""
    path = os.path.join(temp_dir, "tcd.conf")
    with open(path, "w", encoding="utf-8") as f:
        f.write("# tuned for short clips\n\nK_orig = 12\nlambda_max=1.2  # softer\nstrategy=tcd_signed\n")
    return path


def test_empty_config_has_defaults():
    config = load_config()
    for key, value in DEFAULTS.items():
        assert getattr(config, key) == value
    assert config.strategy == "tcd"
    assert config.slow_path == "waveform"


def test_override_disables_gate():
    config = load_config(overrides={"gamma_gate": "0"})
    assert config.gamma_gate == 0.0
    assert isinstance(config.gamma_gate, float)


def test_list_overrides():
    config = load_config(overrides=["K_blur=4", "seed=7"])
    assert (config.K_blur, config.seed) == (4, 7)


def test_file_then_overrides(config_file):
    config = load_config(config_file, {"K_orig": 20})
    assert config.K_orig == 20
    assert config.lambda_max == 1.2
    assert config.strategy == "tcd_signed"


def test_window_bounds_out_of_order():
    with pytest.raises(ConfigError) as excinfo:
        load_config(overrides={"W_min_ms": "40"})
    assert excinfo.value.key == "W_min_ms"


@pytest.mark.parametrize(
    "override, key",
    [
        ({"K_orig": "0"}, "K_orig"),
        ({"K_ent": "1"}, "K_ent"),
        ({"alpha": "-1"}, "alpha"),
        ({"epsilon": "0"}, "epsilon"),
        ({"lambda_min": "2.0"}, "lambda_min"),
        ({"strategy": "beam"}, "strategy"),
        ({"K_orig": "many"}, "K_orig"),
        ({"gamma": "1"}, "gamma"),
    ],
)
def test_invalid_values_name_the_key(override, key):
    with pytest.raises(ConfigError) as excinfo:
        load_config(overrides=override)
    assert excinfo.value.key == key


def test_malformed_and_duplicate_lines():
    with pytest.raises(ConfigError):
        parse_config_text("K_orig 16\n")
    with pytest.raises(ConfigError) as excinfo:
        parse_config_text("K_orig=16\nK_orig=8\n")
    assert excinfo.value.key == "K_orig"


def test_missing_file(temp_dir):
    with pytest.raises(ConfigError):
        load_config(os.path.join(temp_dir, "absent.conf"))


def test_serialize_round_trip(temp_dir):
    config = DecodeConfig(tau=2.5, K_orig=12, strategy="tcd_noise_ref", noise_sigma=0.02, seed=3)
    text = serialize_config(config)
    path = os.path.join(temp_dir, "round.conf")
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    assert serialize_config(load_config(path)) == text
    assert load_config(path) == config


def test_replace_validates():
    with pytest.raises(ConfigError):
        DecodeConfig().replace(W_max_ms=1.0)
    assert DecodeConfig().replace(strategy="baseline").uses_slow_path is False


def test_coverage_settings_live_where_coverage_reads_them():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    ini = configparser.ConfigParser()
    ini.read(os.path.join(root, "pytest.ini"))
    assert "--cov=slowpath" in ini["pytest"]["addopts"]
    assert not any(section.startswith("coverage:") for section in ini.sections())
    with open(os.path.join(root, "pyproject.toml"), encoding="utf-8") as f:
        pyproject = f.read()
    assert "[tool.coverage.run]" in pyproject
    assert 'source = ["slowpath"]' in pyproject
