"""Schreier-coset graph propagation toolkit.

Builds Schreier-coset graphs over SL(2, Z_n), verifies their structural and
spectral properties, precomputes deterministic structural node embeddings,
and emits augmentation-ready feature files.
"""

from .augment import AugmentRequest, augment, concat_features, map_embeddings, select_modulus
from .cache_store import CacheStore, get_or_build_embeddings, get_or_build_graph
from .coset_enum import (
    CayleyGraph,
    SchreierGraph,
    build_cayley,
    canonicalize,
    enumerate_cosets,
    generators,
    subgroup,
)
from .embedder import EmbeddingMatrix, PropagationConfig, gcn_propagate, init_weights
from .graph_analysis import (
    GraphReport,
    analyze,
    connectivity,
    normalized_laplacian,
    spectral_gap,
    verify_quotient,
)
from .modular_group import (
    Mat2,
    coset_count,
    enumerate_group,
    euler_phi,
    group_order,
    mat_inverse,
    mat_mul,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentRequest",
    "CacheStore",
    "CayleyGraph",
    "EmbeddingMatrix",
    "GraphReport",
    "Mat2",
    "PropagationConfig",
    "SchreierGraph",
    "analyze",
    "augment",
    "build_cayley",
    "canonicalize",
    "concat_features",
    "connectivity",
    "coset_count",
    "enumerate_cosets",
    "enumerate_group",
    "euler_phi",
    "gcn_propagate",
    "generators",
    "get_or_build_embeddings",
    "get_or_build_graph",
    "group_order",
    "init_weights",
    "map_embeddings",
    "mat_inverse",
    "mat_mul",
    "normalized_laplacian",
    "select_modulus",
    "spectral_gap",
    "subgroup",
    "verify_quotient",
]
