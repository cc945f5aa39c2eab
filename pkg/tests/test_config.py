import pytest

from gwp.config import Config, get_cache_dir, get_config, parse_int, reset_config
from gwp.errors import ConfigError


def test_defaults(tmp_path):
    config = get_config()
    assert config.expand_limit == 100_000_000
    assert config.support_limit == 2_000_000
    assert config.level_bound == 8
    assert config.brute_force_inputs == 20
    assert config.log_level == "metrics"
    assert get_config() is config


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("GWP_EXPAND_LIMIT", "1_000")
    monkeypatch.setenv("GWP_LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("GWP_METRICS_DB", str(tmp_path / "runs.sqlite"))
    reset_config()
    config = get_config()
    assert config.expand_limit == 1000
    assert config.log_level == "debug"
    assert config.metrics_db_path == tmp_path / "runs.sqlite"


def test_bad_environment(monkeypatch):
    monkeypatch.setenv("GWP_LOG_LEVEL", "verbose")
    with pytest.raises(ConfigError):
        Config.from_env()
    monkeypatch.delenv("GWP_LOG_LEVEL")
    monkeypatch.setenv("GWP_SUPPORT_LIMIT", "lots")
    with pytest.raises(ConfigError):
        Config.from_env()


def test_cache_dir(monkeypatch, tmp_path):
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path))
    assert get_cache_dir() == tmp_path / "gwp"


@pytest.mark.parametrize("text,value", [("42", 42), ("1_000_000", 1000000), ("-7", -7), (" 3 ", 3)])
def test_parse_int(text, value):
    assert parse_int(text) == value


@pytest.mark.parametrize("text", ["", "_1", "1_", "1__0", "1e5", "0x10", "ten"])
def test_parse_int_rejects(text):
    with pytest.raises(ConfigError):
        parse_int(text)
