from functools import lru_cache

import pytest

from scgp import enumerate_cosets


@pytest.fixture(autouse=True)
def _isolated_cache_env(tmp_path_factory, monkeypatch):
    """Keep every test away from the user's real cache directory."""
    monkeypatch.setenv("SCGP_CACHE", str(tmp_path_factory.mktemp("scgp-env-cache")))


@pytest.fixture(scope="session")
def schreier():
    """Session-cached Schreier graph factory (graphs are immutable)."""

    @lru_cache(maxsize=None)
    def build(n: int):
        return enumerate_cosets(n)

    return build
