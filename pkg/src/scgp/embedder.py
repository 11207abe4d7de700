"""Deterministic structural node embeddings for Schreier graphs.

A fixed-depth propagation network is run once over the graph, with no
training: H <- sigma(P H W) where P is the symmetrically normalized
adjacency with added self-loops. Initial features are the identity matrix,
which is never materialized (I @ W == W), so layer 0 is sigma(P W0).

Weights are frozen Glorot-uniform draws from a counter-based Philox
generator keyed by (seed, layer_index): the same (graph, config) always
produces the same bytes, on any platform. The final layer is linear so the
embeddings are not confined to the nonnegative orthant.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .coset_enum import SchreierGraph
from .graph_analysis import LabeledGraph, adjacency_matrix

ACTIVATIONS = ("relu", "tanh", "identity")
ACTIVATION_CODES = {name: i for i, name in enumerate(ACTIVATIONS)}


@dataclass(frozen=True)
class PropagationConfig:
    """Shape, seed and nonlinearity of the propagation pass."""

    layers: int = 4
    hidden_dim: int = 64
    embed_dim: int = 64
    seed: int = 0
    activation: str = "relu"

    def __post_init__(self) -> None:
        if self.layers < 1:
            raise ValueError(f"layers must be >= 1, got {self.layers}")
        if self.hidden_dim < 1 or self.embed_dim < 1:
            raise ValueError("hidden_dim and embed_dim must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.activation not in ACTIVATIONS:
            raise ValueError(
                f"activation {self.activation!r} not one of {ACTIVATIONS}"
            )


@dataclass(frozen=True)
class EmbeddingMeta:
    """Provenance attached to an embedding matrix.

    hidden_dim is None for matrices loaded from disk, where the file format
    does not record it; the cache layer restores it from the request key.
    """

    n: int
    seed: int
    layers: int
    activation: str
    embed_dim: int
    hidden_dim: int | None


@dataclass(frozen=True)
class EmbeddingMatrix:
    """|V_S| x d_embed real matrix; row i belongs to Schreier vertex i."""

    values: np.ndarray
    meta: EmbeddingMeta
    content_hash: str


def layer_dims(num_vertices: int, config: PropagationConfig) -> list[tuple[int, int]]:
    """(fan_in, fan_out) per layer: [V -> hidden], hidden x (L-2), [hidden -> d]."""
    dims = []
    for layer in range(config.layers):
        fan_in = num_vertices if layer == 0 else config.hidden_dim
        fan_out = config.embed_dim if layer == config.layers - 1 else config.hidden_dim
        dims.append((fan_in, fan_out))
    return dims


def init_weights(num_vertices: int, config: PropagationConfig) -> list[np.ndarray]:
    """Frozen Glorot-uniform weights, one matrix per layer.

    Entries are drawn uniformly from (-s, s) with s = sqrt(6/(fan_in+fan_out))
    by a Philox counter-based generator keyed by (seed, layer_index). Philox
    output is platform-independent, so equal configs give bitwise-equal
    weights everywhere.
    """
    if num_vertices < 1:
        raise ValueError("graph must have at least one vertex")
    weights = []
    for layer, (fan_in, fan_out) in enumerate(layer_dims(num_vertices, config)):
        scale = np.sqrt(6.0 / (fan_in + fan_out))
        key = np.array([config.seed, layer], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        weights.append(rng.uniform(-scale, scale, size=(fan_in, fan_out)))
    return weights


def propagation_operator(graph: LabeledGraph) -> sp.csr_array:
    """Symmetrically normalized adjacency with added self-loops.

    P = Dhat^{-1/2} (A + I) Dhat^{-1/2} where A keeps multigraph edge
    multiplicities. Symmetric, spectrum within [-1, 1].
    """
    a = adjacency_matrix(graph)
    a_hat = (a + sp.eye_array(graph.vertex_count, format="csr")).tocsr()
    degrees = np.asarray(a_hat.sum(axis=1)).ravel()
    inv_sqrt = sp.diags_array(1.0 / np.sqrt(degrees), format="csr")
    return (inv_sqrt @ a_hat @ inv_sqrt).tocsr()


def _apply_activation(h: np.ndarray, activation: str) -> np.ndarray:
    if activation == "relu":
        return np.maximum(h, 0.0)
    if activation == "tanh":
        return np.tanh(h)
    return h


def gcn_propagate(
    graph: SchreierGraph,
    config: PropagationConfig,
    materialize_identity: bool = False,
) -> EmbeddingMatrix:
    """Run the fixed propagation pass and return Z_S with provenance.

    materialize_identity=True feeds an explicit identity feature matrix
    through layer 0 instead of the I @ W shortcut; the two paths are
    bitwise-equal and the flag exists only so tests can prove it.
    """
    if graph.vertex_count < 1:
        raise ValueError("graph must have at least one vertex")
    operator = propagation_operator(graph)
    weights = init_weights(graph.vertex_count, config)

    if materialize_identity:
        h = np.eye(graph.vertex_count) @ weights[0]
    else:
        h = weights[0]
    h = operator @ h
    if config.layers > 1:
        h = _apply_activation(h, config.activation)
    _check_finite(h, layer=0)

    for layer in range(1, config.layers):
        h = operator @ (h @ weights[layer])
        if layer < config.layers - 1:
            h = _apply_activation(h, config.activation)
        _check_finite(h, layer=layer)

    meta = EmbeddingMeta(
        n=graph.n,
        seed=config.seed,
        layers=config.layers,
        activation=config.activation,
        embed_dim=config.embed_dim,
        hidden_dim=config.hidden_dim,
    )
    return EmbeddingMatrix(values=h, meta=meta, content_hash=embedding_hash(h, meta))


def _check_finite(h: np.ndarray, layer: int) -> None:
    if not np.all(np.isfinite(h)):
        raise FloatingPointError(f"non-finite value produced at layer {layer}")


def embedding_hash(values: np.ndarray, meta: EmbeddingMeta) -> str:
    """SHA-256 over the canonical little-endian serialization of dims + values + meta."""
    if not np.all(np.isfinite(values)):
        raise ValueError("cannot hash a matrix with non-finite entries")
    rows, cols = values.shape
    digest = hashlib.sha256()
    digest.update(struct.pack("<QQ", rows, cols))
    digest.update(np.ascontiguousarray(values, dtype="<f8").tobytes())
    digest.update(
        struct.pack(
            "<QQQBQQ",
            meta.n,
            meta.seed,
            meta.layers,
            ACTIVATION_CODES[meta.activation],
            meta.embed_dim,
            meta.hidden_dim if meta.hidden_dim is not None else 0,
        )
    )
    return digest.hexdigest()
