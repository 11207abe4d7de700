"""GNN training demo consuming scgp embedding files through the CLI boundary."""

from .dataset import BUNDLED_DATASET, DemoGraph, load_dataset
from .demo import AdapterConfig, augment_graph, run_demo
from .embeddings import checksum, load_embeddings

__all__ = [
    "AdapterConfig",
    "BUNDLED_DATASET",
    "DemoGraph",
    "augment_graph",
    "checksum",
    "load_dataset",
    "load_embeddings",
    "run_demo",
]
