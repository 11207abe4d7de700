import shutil
import subprocess

import pytest


@pytest.fixture(autouse=True)
def _isolated_cache_env(tmp_path_factory, monkeypatch):
    monkeypatch.setenv("SCGP_CACHE", str(tmp_path_factory.mktemp("scgp-env-cache")))


@pytest.fixture(scope="session")
def scgp_cli():
    """Path to the scgp CLI; the adapter only talks to it through files."""
    path = shutil.which("scgp")
    if path is None:
        pytest.skip("scgp CLI not installed")
    return path


@pytest.fixture(scope="session")
def embeddings_csv(scgp_cli, tmp_path_factory):
    """A 30 x 8 embedding CSV produced by the real CLI (n=5, seed=0)."""
    out = tmp_path_factory.mktemp("emb") / "z5.csv"
    subprocess.run(
        [scgp_cli, "embed", "--n", "5", "--dim", "8", "--seed", "0",
         "--csv", "--out", str(out)],
        check=True,
        capture_output=True,
    )
    return out
