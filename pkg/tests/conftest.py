"""Shared fixtures: every test gets its own config and metrics database"""

import pytest

from gwp import config, metrics
from gwp.slp import slp_length, slp_size, slp_within_size_bound


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    for var in (
        "GWP_EXPAND_LIMIT",
        "GWP_SUPPORT_LIMIT",
        "GWP_LEVEL_BOUND",
        "GWP_BRUTE_FORCE_INPUTS",
        "GWP_LOG_LEVEL",
    ):
        monkeypatch.delenv(var, raising=False)
    monkeypatch.setenv("GWP_METRICS_DB", str(tmp_path / "metrics.sqlite"))
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path / "cache"))
    config.reset_config()
    metrics._metrics_db = None
    yield
    if metrics._metrics_db is not None:
        metrics._metrics_db.close()
    metrics._metrics_db = None
    config.reset_config()


@pytest.fixture
def size_bound():
    """Assert |val(G)| <= 3^(|G|/3) on every SLP passed in"""

    def check(*slps):
        for g in slps:
            assert slp_within_size_bound(g), (slp_length(g), slp_size(g))

    return check
