"""Bit-exact file formats and the `scgp` command-line surface.

Graphs travel as versioned JSON (human-inspectable at desk scale); embedding
matrices as a small binary format with 32-bit little-endian floats and a
trailing SHA-256 over header+payload; feature matrices as CSV. Values are
float64 in memory and float32 on disk: the determinism contract is about
files, so content hashes are computed over the 32-bit encoding.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import struct
import sys
from pathlib import Path

import numpy as np

from .augment import AugmentRequest, augment, select_modulus
from .cache_store import CacheStore
from .coset_enum import (
    CAYLEY_GUARD,
    CayleyGraph,
    SchreierGraph,
    build_cayley,
    validate_cayley,
    validate_schreier,
)
from .embedder import (
    ACTIVATIONS,
    EmbeddingMatrix,
    EmbeddingMeta,
    PropagationConfig,
    embedding_hash,
)
from .graph_analysis import analyze, spectral_gap
from .modular_group import Mat2, coset_count, euler_phi, group_order

GRAPH_FORMAT = "scgp-graph"
GRAPH_VERSION = 1

EMBEDDING_MAGIC = b"SCGP"
EMBEDDING_VERSION = 1
# magic, version u16, flags u16, n u32, rows u32, cols u32, seed u64,
# layers u16, activation u8, 1 reserved byte -> 32-byte header
_EMB_HEADER = struct.Struct("<4sHHIIIQHBx")
_HASH_BYTES = 32


# ---------------------------------------------------------------------------
# Graph files (JSON)


def graph_to_json_bytes(graph: SchreierGraph | CayleyGraph) -> bytes:
    kind = "schreier" if isinstance(graph, SchreierGraph) else "cayley"
    doc = {
        "format": GRAPH_FORMAT,
        "version": GRAPH_VERSION,
        "n": graph.n,
        "kind": kind,
        "vertices": [list(v.entries()) for v in graph.vertices],
        "edges": [list(e) for e in graph.edges],
    }
    return json.dumps(doc, separators=(",", ":")).encode("ascii")


def graph_from_json_bytes(data: bytes) -> SchreierGraph | CayleyGraph:
    """Parse and fully validate a graph file; raises ValueError if anything
    fails the graph-type invariants."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != GRAPH_FORMAT:
        raise ValueError("missing scgp-graph format marker")
    if doc.get("version") != GRAPH_VERSION:
        raise ValueError(f"unsupported graph file version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind not in ("schreier", "cayley"):
        raise ValueError(f"unknown graph kind {kind!r}")
    n = doc.get("n")
    try:
        vertices = tuple(Mat2(*entry, n) for entry in doc["vertices"])
        edges = tuple((int(s), int(l), int(d)) for s, l, d in doc["edges"])
    except (TypeError, ValueError, KeyError) as exc:
        raise ValueError(f"malformed graph payload: {exc}") from exc
    rep_index = {v: i for i, v in enumerate(vertices)}
    if kind == "schreier":
        graph = SchreierGraph(n=n, vertices=vertices, edges=edges, rep_index=rep_index)
        validate_schreier(graph)
        return graph
    graph = CayleyGraph(n=n, vertices=vertices, edges=edges, rep_index=rep_index)
    validate_cayley(graph)
    return graph


def write_graph_file(graph: SchreierGraph | CayleyGraph, path: str | Path) -> None:
    Path(path).write_bytes(graph_to_json_bytes(graph))


def load_graph_file(path: str | Path) -> SchreierGraph | CayleyGraph:
    return graph_from_json_bytes(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# Embedding files (binary)


def embedding_to_bytes(z: EmbeddingMatrix) -> bytes:
    values32 = np.ascontiguousarray(z.values, dtype="<f4")
    rows, cols = values32.shape
    header = _EMB_HEADER.pack(
        EMBEDDING_MAGIC,
        EMBEDDING_VERSION,
        0,  # flags
        z.meta.n,
        rows,
        cols,
        z.meta.seed,
        z.meta.layers,
        _activation_code(z.meta.activation),
    )
    payload = header + values32.tobytes(order="C")
    return payload + hashlib.sha256(payload).digest()


def embedding_from_bytes(data: bytes, hidden_dim: int | None = None) -> EmbeddingMatrix:
    """Decode and verify an embedding file; values come back as float64.

    hidden_dim is not stored on disk; callers that know the originating
    config (the cache does) may pass it to restore full provenance.
    """
    if len(data) < _EMB_HEADER.size + _HASH_BYTES:
        raise ValueError("embedding file is truncated")
    stored_hash = data[-_HASH_BYTES:]
    body = data[:-_HASH_BYTES]
    if hashlib.sha256(body).digest() != stored_hash:
        raise ValueError("embedding file failed its content hash")
    magic, version, _flags, n, rows, cols, seed, layers, act_code = _EMB_HEADER.unpack(
        body[: _EMB_HEADER.size]
    )
    if magic != EMBEDDING_MAGIC:
        raise ValueError("missing SCGP magic")
    if version != EMBEDDING_VERSION:
        raise ValueError(f"unsupported embedding file version {version}")
    expected = rows * cols * 4
    raw = body[_EMB_HEADER.size :]
    if len(raw) != expected:
        raise ValueError(
            f"payload holds {len(raw)} bytes but header declares {rows}x{cols} float32"
        )
    values = np.frombuffer(raw, dtype="<f4").reshape(rows, cols).astype(np.float64)
    meta = EmbeddingMeta(
        n=n,
        seed=seed,
        layers=layers,
        activation=_activation_name(act_code),
        embed_dim=cols,
        hidden_dim=hidden_dim,
    )
    return EmbeddingMatrix(values=values, meta=meta, content_hash=embedding_hash(values, meta))


def _activation_code(name: str) -> int:
    try:
        return ACTIVATIONS.index(name)
    except ValueError:
        raise ValueError(f"unknown activation {name!r}") from None


def _activation_name(code: int) -> str:
    if not 0 <= code < len(ACTIVATIONS):
        raise ValueError(f"unknown activation code {code}")
    return ACTIVATIONS[code]


def write_embedding_file(z: EmbeddingMatrix, path: str | Path) -> None:
    Path(path).write_bytes(embedding_to_bytes(z))


def load_embedding_file(path: str | Path, hidden_dim: int | None = None) -> EmbeddingMatrix:
    return embedding_from_bytes(Path(path).read_bytes(), hidden_dim=hidden_dim)


# ---------------------------------------------------------------------------
# Feature files (CSV)


def write_features_csv(
    values: np.ndarray, path: str | Path, column_names: list[str] | None = None
) -> None:
    """One row per node: node_id followed by float32-precision values."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"feature matrix must be 2-D, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("refusing to write non-finite feature values")
    rows, cols = values.shape
    if column_names is None:
        column_names = [f"f{i}" for i in range(cols)]
    if len(column_names) != cols:
        raise ValueError(f"{len(column_names)} column names for {cols} columns")
    values32 = values.astype(np.float32)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["node_id", *column_names])
        for i in range(rows):
            writer.writerow([i, *(str(v) for v in values32[i])])


def load_features_csv(path: str | Path) -> np.ndarray:
    """Read a feature CSV back into a float64 matrix (float32 precision)."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or header[0] != "node_id":
            raise ValueError(f"{path}: missing node_id header")
        width = len(header) - 1
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != width + 1:
                raise ValueError(f"{path}:{line_no}: expected {width + 1} fields, got {len(row)}")
            try:
                rows.append([np.float32(v) for v in row[1:]])
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float32).reshape(len(rows), width).astype(np.float64)


# ---------------------------------------------------------------------------
# CLI


def _add_cache_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--cache-dir",
        default=None,
        help="cache root (overrides the SCGP_CACHE environment variable)",
    )


def _store(args: argparse.Namespace) -> CacheStore:
    return CacheStore(args.cache_dir)


def _config_from_args(args: argparse.Namespace) -> PropagationConfig:
    return PropagationConfig(
        layers=args.layers,
        hidden_dim=args.hidden,
        embed_dim=args.dim,
        seed=args.seed,
        activation=args.activation,
    )


def _add_embed_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dim", type=int, default=64, help="embedding dimension d_embed")
    parser.add_argument("--layers", type=int, default=4, help="propagation layers")
    parser.add_argument("--hidden", type=int, default=64, help="hidden dimension")
    parser.add_argument("--seed", type=int, default=0, help="weight seed (all randomness)")
    parser.add_argument("--activation", choices=ACTIVATIONS, default="relu")


def cmd_select_n(args: argparse.Namespace) -> int:
    n = select_modulus(args.nodes)
    print(f"n={n} cosets={coset_count(n)}")
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    if args.cayley:
        graph = build_cayley(args.n)
    else:
        graph = _store(args).get_or_build_graph(args.n)
    payload = graph_to_json_bytes(graph)
    if args.out:
        Path(args.out).write_bytes(payload)
        print(
            json.dumps(
                {
                    "written": args.out,
                    "n": graph.n,
                    "kind": "cayley" if args.cayley else "schreier",
                    "vertices": graph.vertex_count,
                    "edges": graph.edge_count,
                }
            )
        )
    else:
        sys.stdout.write(payload.decode("ascii") + "\n")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    graph = _store(args).get_or_build_graph(args.n)
    report = analyze(graph, spectral=args.spectral, with_diameter=args.diameter)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def cmd_embed(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    z = _store(args).get_or_build_embeddings(args.n, config)
    if args.csv:
        names = [f"z{i}" for i in range(z.values.shape[1])]
        write_features_csv(z.values, args.out, column_names=names)
    else:
        write_embedding_file(z, args.out)
    print(
        json.dumps(
            {
                "written": args.out,
                "n": args.n,
                "rows": z.values.shape[0],
                "cols": z.values.shape[1],
                "format": "csv" if args.csv else "binary",
                "content_hash": z.content_hash,
            }
        )
    )
    return 0


def cmd_augment(args: argparse.Namespace) -> int:
    features = load_features_csv(args.features)
    config = _config_from_args(args)
    request = AugmentRequest(
        input_features=features, modulus_override=args.n, config=config
    )
    x_out, provenance = augment(request, _store(args))
    d_in = features.shape[1]
    names = [f"f{i}" for i in range(d_in)] + [f"z{i}" for i in range(x_out.shape[1] - d_in)]
    write_features_csv(x_out, args.out, column_names=names)
    provenance["written"] = args.out
    print(json.dumps(provenance))
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    schreier = _store(args).get_or_build_graph(args.n)
    schreier_gap = spectral_gap(schreier)
    rows = [
        ("vertices", schreier.vertex_count, group_order(args.n)),
        ("directed edges", schreier.edge_count, 4 * group_order(args.n)),
    ]
    if args.n <= CAYLEY_GUARD:
        cayley = build_cayley(args.n)
        rows.append(("lambda1", f"{schreier_gap:.6f}", f"{spectral_gap(cayley):.6f}"))
    else:
        rows.append(("lambda1", f"{schreier_gap:.6f}", "skipped (n beyond guard)"))
    print(f"n={args.n}  compression ratio |G|/|V_S| = {euler_phi(args.n)} (= phi(n))")
    print(f"{'':<16}{'schreier':>16}{'cayley':>28}")
    for name, s_val, c_val in rows:
        print(f"{name:<16}{s_val!s:>16}{c_val!s:>28}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scgp",
        description="Schreier-coset graph construction, analysis and feature augmentation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select-n", help="smallest modulus whose coset space covers K nodes")
    p.add_argument("--nodes", type=int, required=True, help="input graph node count")
    p.set_defaults(func=cmd_select_n)

    p = sub.add_parser("gen", help="generate a graph file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cayley", action="store_true", help="full Cayley graph (guarded)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    _add_cache_flag(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("analyze", help="structural/spectral report for the Schreier graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--spectral", action="store_true", help="compute lambda1")
    p.add_argument("--diameter", action="store_true", help="compute the diameter")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    _add_cache_flag(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("embed", help="precompute structural node embeddings")
    p.add_argument("--n", type=int, required=True)
    _add_embed_flags(p)
    p.add_argument("--csv", action="store_true", help="write CSV instead of binary")
    p.add_argument("--out", required=True)
    _add_cache_flag(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("augment", help="append Schreier embeddings to a feature CSV")
    p.add_argument("--features", required=True, help="input feature CSV")
    p.add_argument("--n", type=int, default=None, help="modulus override")
    _add_embed_flags(p)
    p.add_argument("--out", required=True, help="augmented feature CSV")
    _add_cache_flag(p)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("compare", help="Schreier vs Cayley size/spectrum table")
    p.add_argument("--n", type=int, required=True)
    _add_cache_flag(p)
    p.set_defaults(func=cmd_compare)

    return parser


def cli_dispatch(argv: list[str]) -> int:
    """Run one CLI invocation. 0 = success, 1 = runtime error, 2 = usage."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except (ValueError, OSError, FloatingPointError, RuntimeError) as exc:
        print(f"scgp: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))
