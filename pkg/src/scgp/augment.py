"""End-to-end feature augmentation: modulus selection, index-based row
mapping of the precomputed Schreier embeddings, and concatenation onto the
input node features.

Row mapping is positional: row i of the mapped embedding block belongs to
input node i and comes from Schreier vertex i in BFS discovery order (or is
an all-zero pad when the coset space is smaller than the input graph). No
structural alignment between input nodes and cosets is attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .embedder import EmbeddingMatrix, PropagationConfig
from .modular_group import check_modulus, coset_count

if TYPE_CHECKING:
    from .cache_store import CacheStore


def check_features(x: np.ndarray) -> np.ndarray:
    """Validate a node-feature matrix: 2-D, finite, at least one row.

    Zero columns are legal (featureless graphs).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"feature matrix must be 2-D, got shape {x.shape}")
    if x.shape[0] < 1:
        raise ValueError("feature matrix must have at least one row")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature matrix contains non-finite entries")
    return x


@dataclass(frozen=True)
class AugmentRequest:
    """One augmentation job: input features plus embedding parameters."""

    input_features: np.ndarray
    modulus_override: int | None = None
    config: PropagationConfig = field(default_factory=PropagationConfig)

    def __post_init__(self) -> None:
        check_features(self.input_features)
        if self.modulus_override is not None:
            check_modulus(self.modulus_override)


def select_modulus(num_nodes: int) -> int:
    """Smallest n >= 2 whose coset space has at least num_nodes vertices.

    coset_count is not monotone in n (composite n overshoot their prime
    neighbors), so this is a forward scan, not a binary search. The count
    grows quadratically, so the scan terminates quickly.
    """
    if num_nodes < 1:
        raise ValueError(f"num_nodes must be >= 1, got {num_nodes}")
    n = 2
    while coset_count(n) < num_nodes:
        n += 1
    return n


def map_embeddings(z: EmbeddingMatrix, num_nodes: int) -> np.ndarray:
    """Resize Z_S to num_nodes rows: zero-pad below, or keep the first rows.

    The copied region is exact (no scaling); row order is the Schreier BFS
    vertex order.
    """
    if num_nodes < 1:
        raise ValueError(f"num_nodes must be >= 1, got {num_nodes}")
    values = z.values
    rows = values.shape[0]
    if rows < num_nodes:
        pad = np.zeros((num_nodes - rows, values.shape[1]), dtype=values.dtype)
        return np.vstack([values, pad])
    return values[:num_nodes].copy()


def concat_features(x_in: np.ndarray, z_mapped: np.ndarray) -> np.ndarray:
    """Column-wise [X_in || Z_mapped]; raises on row-count mismatch."""
    x_in = check_features(x_in)
    z_mapped = np.asarray(z_mapped, dtype=np.float64)
    if x_in.shape[0] != z_mapped.shape[0]:
        raise ValueError(
            f"row-count mismatch: features have {x_in.shape[0]} rows, "
            f"embeddings have {z_mapped.shape[0]}"
        )
    return np.hstack([x_in, z_mapped])


def augment(request: AugmentRequest, cache: "CacheStore") -> tuple[np.ndarray, dict]:
    """Full pipeline: pick n, fetch/compute Z_S through the cache, map, concat.

    Returns (X_out, provenance). Provenance records the modulus, coset-space
    size, config hash, cache hit/miss flags, and the row-order convention
    (the part the mapping silently depends on).
    """
    x_in = check_features(request.input_features)
    num_nodes = x_in.shape[0]
    n = request.modulus_override or select_modulus(num_nodes)

    graph_builds = cache.graph_builds
    embedding_builds = cache.embedding_builds
    z = cache.get_or_build_embeddings(n, request.config)
    z_mapped = map_embeddings(z, num_nodes)
    x_out = concat_features(x_in, z_mapped)

    provenance = {
        "n": n,
        "modulus_overridden": request.modulus_override is not None,
        "schreier_vertices": z.values.shape[0],
        "config_hash": cache.config_hash(request.config),
        "graph_cache_hit": cache.graph_builds == graph_builds,
        "embeddings_cache_hit": cache.embedding_builds == embedding_builds,
        "row_order": "schreier-bfs-from-identity-coset",
        "d_in": x_in.shape[1],
        "d_embed": z_mapped.shape[1],
        "padded_rows": max(0, num_nodes - z.values.shape[0]),
    }
    return x_out, provenance
