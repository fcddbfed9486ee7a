from configparser import SectionProxy

import pytest

from entswap.config import Config, DEFAULT_CONFIG, create_config_section, get_default_config


def test_config_parse_sections():
    config = Config(
        {
            "executors.default": {"mode": "process", "max_workers": "8"},
            "verify": {"seed": "7"},
        }
    )

    assert config["executors"]["default"]["mode"] == "process"
    assert config["executors"]["default"].getint("max_workers") == 8
    assert config["verify"].getint("seed") == 7
    assert isinstance(config["verify"], SectionProxy)
    assert isinstance(config["executors"], dict)

    with pytest.raises(KeyError):
        config["register"]


def test_default_config():
    config = get_default_config()
    assert config["executors"]["default"]["mode"] == "thread"
    assert config["verify"].getint("trials") == 200000
    assert config["verify"].getint("mc_seeds") == 20
    assert config["verify"].getint("oracle_draws") == 200
    assert config["verify"].getint("unitarity_draws") == 1000
    assert config["verify"].getfloat("grid_step") == 0.02


def test_default_config_overrides():
    config = get_default_config(
        {
            "executors.default": {"mode": "process", "max_workers": None},
            "verify": {"seed": 3},
        }
    )
    assert config["executors"]["default"]["mode"] == "process"
    # None values fall back to the defaults.
    assert config["executors"]["default"].getint("max_workers") == 4
    assert config["verify"].getint("seed") == 3
    assert config["verify"].getint("trials") == 200000

    # The built-in defaults are not modified.
    assert DEFAULT_CONFIG["verify"]["seed"] == "0"


def test_create_config_section():
    section = create_config_section({"max_workers": "2"})
    assert section.getint("max_workers") == 2
    assert create_config_section().get("mode") is None
