import json
import struct

import numpy as np
import pytest

from scgp.cache_store import CacheStore
from scgp.coset_enum import build_cayley
from scgp.embedder import PropagationConfig
from scgp.io_cli import (
    cli_dispatch,
    embedding_from_bytes,
    embedding_to_bytes,
    graph_from_json_bytes,
    graph_to_json_bytes,
    load_embedding_file,
    load_features_csv,
    load_graph_file,
    write_embedding_file,
    write_features_csv,
    write_graph_file,
)

CONFIG = PropagationConfig(layers=2, hidden_dim=8, embed_dim=4, seed=5)


# ---------------------------------------------------------------------------
# graph files


def test_graph_json_round_trip_schreier(schreier, tmp_path):
    g = schreier(5)
    path = tmp_path / "s5.json"
    write_graph_file(g, path)
    loaded = load_graph_file(path)
    assert loaded.n == 5
    assert loaded.vertices == g.vertices
    assert loaded.edges == g.edges
    assert loaded.rep_index == g.rep_index


def test_graph_json_round_trip_cayley(tmp_path):
    g = build_cayley(3)
    path = tmp_path / "c3.json"
    write_graph_file(g, path)
    loaded = load_graph_file(path)
    assert type(loaded).__name__ == "CayleyGraph"
    assert loaded.vertices == g.vertices and loaded.edges == g.edges


def test_graph_json_schema_fields(schreier):
    doc = json.loads(graph_to_json_bytes(schreier(2)))
    assert doc["format"] == "scgp-graph"
    assert doc["version"] == 1
    assert doc["kind"] == "schreier"
    assert doc["n"] == 2
    assert len(doc["vertices"]) == 6 and len(doc["edges"]) == 24


def test_graph_json_rejects_corruption(schreier):
    doc = json.loads(graph_to_json_bytes(schreier(5)))

    dropped = dict(doc, edges=doc["edges"][:-1])
    with pytest.raises(ValueError):
        graph_from_json_bytes(json.dumps(dropped).encode())

    relabeled = dict(doc, edges=[doc["edges"][0][:1] + [9] + doc["edges"][0][2:]] + doc["edges"][1:])
    with pytest.raises(ValueError):
        graph_from_json_bytes(json.dumps(relabeled).encode())

    with pytest.raises(ValueError, match="version"):
        graph_from_json_bytes(json.dumps(dict(doc, version=2)).encode())

    with pytest.raises(ValueError):
        graph_from_json_bytes(b"{\"format\": \"other\"}")

    with pytest.raises(ValueError):
        graph_from_json_bytes(b"not json")


# ---------------------------------------------------------------------------
# embedding files


def test_embedding_round_trip_bit_exact(schreier, tmp_path):
    store = CacheStore(tmp_path / "cache")
    z = store.get_or_build_embeddings(5, CONFIG)
    path = tmp_path / "z.emb"
    write_embedding_file(z, path)
    loaded = load_embedding_file(path, hidden_dim=CONFIG.hidden_dim)
    assert loaded.values.astype("<f4").tobytes() == z.values.astype("<f4").tobytes()
    assert loaded.meta == z.meta
    assert loaded.content_hash == z.content_hash


def test_embedding_header_layout(schreier):
    store = CacheStore(None, read_only=True)
    z = store.get_or_build_embeddings(2, CONFIG)
    data = embedding_to_bytes(z)
    magic, version, flags, n, rows, cols, seed, layers, act = struct.unpack(
        "<4sHHIIIQHB", data[:31]
    )
    assert magic == b"SCGP" and version == 1 and flags == 0
    assert (n, rows, cols, seed, layers, act) == (2, 6, 4, 5, 2, 0)
    assert len(data) == 32 + rows * cols * 4 + 32


def test_embedding_rejects_tampering(schreier):
    store = CacheStore(None, read_only=True)
    data = bytearray(embedding_to_bytes(store.get_or_build_embeddings(2, CONFIG)))
    with pytest.raises(ValueError, match="truncated"):
        embedding_from_bytes(bytes(data[:40]))
    data[35] ^= 0x01
    with pytest.raises(ValueError, match="content hash"):
        embedding_from_bytes(bytes(data))


# ---------------------------------------------------------------------------
# feature CSV


def test_csv_round_trip_float32_precision(tmp_path):
    rng = np.random.default_rng(4)
    x = rng.normal(scale=3.0, size=(17, 5))
    path = tmp_path / "x.csv"
    write_features_csv(x, path)
    loaded = load_features_csv(path)
    assert np.array_equal(loaded, x.astype(np.float32).astype(np.float64))
    assert path.read_text().splitlines()[0] == "node_id,f0,f1,f2,f3,f4"


def test_csv_featureless(tmp_path):
    path = tmp_path / "bare.csv"
    write_features_csv(np.empty((3, 0)), path)
    loaded = load_features_csv(path)
    assert loaded.shape == (3, 0)


def test_csv_rejects_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("node_id,f0\n0,1.0\n1,2.0,3.0\n")
    with pytest.raises(ValueError, match="fields"):
        load_features_csv(path)
    path.write_text("node_id,f0\n0,abc\n")
    with pytest.raises(ValueError):
        load_features_csv(path)
    path.write_text("wrong,f0\n0,1.0\n")
    with pytest.raises(ValueError, match="node_id"):
        load_features_csv(path)
    path.write_text("node_id,f0\n")
    with pytest.raises(ValueError, match="no data"):
        load_features_csv(path)
    with pytest.raises(ValueError):
        write_features_csv(np.array([[np.inf]]), path)


# ---------------------------------------------------------------------------
# CLI


def test_cli_select_n_exact_output(capsys):
    assert cli_dispatch(["select-n", "--nodes", "30"]) == 0
    assert capsys.readouterr().out == "n=5 cosets=30\n"


def test_cli_gen_then_analyze(tmp_path, capsys):
    cache = str(tmp_path / "cache")
    out = tmp_path / "s5.json"
    assert cli_dispatch(["gen", "--n", "5", "--out", str(out), "--cache-dir", cache]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["vertices"] == 30 and summary["edges"] == 120
    assert load_graph_file(out).vertex_count == 30

    assert cli_dispatch(["analyze", "--n", "5", "--cache-dir", cache]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["vertex_count"] == 30
    assert report["directed_edge_count"] == 120
    assert report["compression_ratio"] == 4
    assert report["lambda1"] is None

    assert cli_dispatch(
        ["analyze", "--n", "5", "--spectral", "--diameter", "--cache-dir", cache]
    ) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["lambda1"] > 0 and report["diameter"] is not None


def test_cli_gen_stdout_is_loadable(tmp_path, capsys):
    assert cli_dispatch(["gen", "--n", "2", "--cache-dir", str(tmp_path)]) == 0
    graph = graph_from_json_bytes(capsys.readouterr().out.encode())
    assert graph.vertex_count == 6


def test_cli_embed_deterministic_files(tmp_path, capsys):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.emb"
        code = cli_dispatch(
            [
                "embed", "--n", "5", "--dim", "8", "--seed", "7",
                "--out", str(out), "--cache-dir", str(tmp_path / f"cache-{tag}"),
            ]
        )
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0][-32:] == outs[1][-32:]
    summary = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert summary["rows"] == 30 and summary["cols"] == 8


def test_cli_embed_csv(tmp_path, capsys):
    out = tmp_path / "z.csv"
    assert cli_dispatch(
        ["embed", "--n", "5", "--dim", "8", "--seed", "7", "--csv",
         "--out", str(out), "--cache-dir", str(tmp_path / "cache")]
    ) == 0
    assert out.read_text().splitlines()[0] == "node_id," + ",".join(f"z{i}" for i in range(8))
    assert load_features_csv(out).shape == (30, 8)


def test_cli_augment_pipeline(tmp_path, capsys):
    features = tmp_path / "in.csv"
    write_features_csv(np.arange(120.0).reshape(40, 3), features)
    out = tmp_path / "out.csv"
    code = cli_dispatch(
        ["augment", "--features", str(features), "--n", "5", "--dim", "8",
         "--seed", "3", "--out", str(out), "--cache-dir", str(tmp_path / "cache")]
    )
    assert code == 0
    provenance = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert provenance["n"] == 5 and provenance["padded_rows"] == 10
    augmented = load_features_csv(out)
    assert augmented.shape == (40, 11)
    header = out.read_text().splitlines()[0]
    assert header == "node_id,f0,f1,f2," + ",".join(f"z{i}" for i in range(8))


def test_cli_compare(tmp_path, capsys):
    assert cli_dispatch(["compare", "--n", "5", "--cache-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "30" in out and "120" in out and "phi(n)" in out


def test_cli_usage_errors_exit_2(capsys):
    assert cli_dispatch(["select-n"]) == 2  # missing --nodes
    assert cli_dispatch(["gen", "--n", "5", "--bogus-flag"]) == 2
    assert cli_dispatch([]) == 2
    capsys.readouterr()


def test_cli_runtime_errors_exit_1(tmp_path, capsys):
    assert cli_dispatch(
        ["gen", "--n", "50", "--cayley", "--cache-dir", str(tmp_path)]
    ) == 1
    assert "Schreier" in capsys.readouterr().err

    assert cli_dispatch(
        ["augment", "--features", str(tmp_path / "missing.csv"),
         "--out", str(tmp_path / "o.csv"), "--cache-dir", str(tmp_path)]
    ) == 1
    assert "error" in capsys.readouterr().err


def test_cli_env_cache_respected(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SCGP_CACHE", str(tmp_path / "env-cache"))
    assert cli_dispatch(["analyze", "--n", "2"]) == 0
    capsys.readouterr()
    assert (tmp_path / "env-cache" / "scgp" / "v1" / "2" / "graph.json").exists()
