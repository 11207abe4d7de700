import hashlib
import json
import multiprocessing
from pathlib import Path

import numpy as np
import pytest

from scgp.cache_store import (
    CacheStore,
    config_hash,
    default_cache_dir,
    get_or_build_graph,
)
from scgp.embedder import PropagationConfig

CONFIG = PropagationConfig(layers=2, hidden_dim=8, embed_dim=4, seed=5)


def graph_file(root, n):
    return Path(root) / "scgp" / "v1" / str(n) / "graph.json"


def test_graph_miss_then_hit(tmp_path):
    store = CacheStore(tmp_path)
    first = store.get_or_build_graph(5)
    assert store.graph_builds == 1
    payload = graph_file(tmp_path, 5).read_bytes()

    second = store.get_or_build_graph(5)
    assert store.graph_builds == 1  # zero rebuilds
    assert first.vertices == second.vertices
    assert first.edges == second.edges
    assert graph_file(tmp_path, 5).read_bytes() == payload


def test_manifest_entry_records_content_hash(tmp_path):
    store = CacheStore(tmp_path)
    store.get_or_build_graph(5)
    entry = store.manifest_entry(5)
    assert entry["key"] == {"n": 5, "config_hash": None}
    assert entry["embedding_file"] is None
    data = graph_file(tmp_path, 5).read_bytes()
    assert entry["content_hash"] == hashlib.sha256(data).hexdigest()


def test_truncated_graph_detected_and_rebuilt(tmp_path):
    store = CacheStore(tmp_path)
    store.get_or_build_graph(5)
    path = graph_file(tmp_path, 5)
    original = path.read_bytes()
    path.write_bytes(original[: len(original) // 2])

    rebuilt = store.get_or_build_graph(5)
    assert store.graph_builds == 2
    assert path.read_bytes() == original
    assert rebuilt.vertex_count == 30


def test_corrupted_embedding_detected_and_rebuilt(tmp_path):
    store = CacheStore(tmp_path)
    z = store.get_or_build_embeddings(5, CONFIG)
    emb_path = Path(tmp_path) / "scgp" / "v1" / "5" / f"{config_hash(CONFIG)}.emb"
    original = emb_path.read_bytes()
    tampered = bytearray(original)
    tampered[40] ^= 0xFF  # flip a payload byte; manifest hash check must catch it
    emb_path.write_bytes(bytes(tampered))

    z2 = store.get_or_build_embeddings(5, CONFIG)
    assert store.embedding_builds == 2
    assert emb_path.read_bytes() == original
    assert np.array_equal(z.values, z2.values)
    assert z.content_hash == z2.content_hash


def test_embeddings_hit_returns_stored_bytes(tmp_path):
    store = CacheStore(tmp_path)
    miss = store.get_or_build_embeddings(5, CONFIG)
    hit = store.get_or_build_embeddings(5, CONFIG)
    assert store.embedding_builds == 1
    assert np.array_equal(miss.values, hit.values)
    assert miss.content_hash == hit.content_hash
    assert hit.meta.hidden_dim == CONFIG.hidden_dim


def test_distinct_seeds_distinct_entries(tmp_path):
    store = CacheStore(tmp_path)
    other = PropagationConfig(layers=2, hidden_dim=8, embed_dim=4, seed=6)
    store.get_or_build_embeddings(5, CONFIG)
    store.get_or_build_embeddings(5, other)
    assert store.embedding_builds == 2
    emb_dir = Path(tmp_path) / "scgp" / "v1" / "5"
    assert len(list(emb_dir.glob("*.emb"))) == 2
    assert store.manifest_entry(5, CONFIG) != store.manifest_entry(5, other)


def test_config_hash_stability_and_sensitivity():
    assert config_hash(CONFIG) == config_hash(PropagationConfig(
        layers=2, hidden_dim=8, embed_dim=4, seed=5
    ))
    assert config_hash(CONFIG) != config_hash(PropagationConfig(
        layers=2, hidden_dim=8, embed_dim=4, seed=5, activation="tanh"
    ))


def test_read_only_store_builds_without_writing(tmp_path):
    store = CacheStore(tmp_path, read_only=True)
    graph = store.get_or_build_graph(5)
    assert graph.vertex_count == 30
    assert not graph_file(tmp_path, 5).exists()
    assert not (Path(tmp_path) / "scgp" / "v1" / "manifest.json").exists()


def test_unwritable_cache_dir_raises(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    store = CacheStore(blocker / "nested")
    with pytest.raises(OSError):
        store.get_or_build_graph(5)


def test_default_cache_dir_env(monkeypatch, tmp_path):
    monkeypatch.setenv("SCGP_CACHE", str(tmp_path / "via-env"))
    assert default_cache_dir() == tmp_path / "via-env"
    get_or_build_graph(3)
    assert graph_file(tmp_path / "via-env", 3).exists()


def test_bogus_manifest_treated_as_empty(tmp_path):
    store = CacheStore(tmp_path)
    manifest = Path(tmp_path) / "scgp" / "v1" / "manifest.json"
    manifest.parent.mkdir(parents=True)
    manifest.write_text("{not json")
    store.get_or_build_graph(5)
    assert store.graph_builds == 1
    entries = json.loads(manifest.read_text())["entries"]
    assert len(entries) == 1


def _concurrent_worker(args):
    cache_dir, n = args
    store = CacheStore(cache_dir)
    graph = store.get_or_build_graph(n)
    data = graph_file(cache_dir, n).read_bytes()
    return graph.vertex_count, hashlib.sha256(data).hexdigest()


def test_concurrent_builders_agree(tmp_path):
    ctx = multiprocessing.get_context("spawn")
    with ctx.Pool(4) as pool:
        results = pool.map(_concurrent_worker, [(str(tmp_path), 7)] * 4)
    counts = {r[0] for r in results}
    hashes = {r[1] for r in results}
    assert counts == {56}
    assert len(hashes) == 1  # every process observes the same winning artifact
    store = CacheStore(tmp_path)
    assert store.manifest_entry(7)["content_hash"] in hashes
