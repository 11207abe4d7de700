"""Bundled tiny graph-classification dataset."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

BUNDLED_DATASET = Path(__file__).parent / "data" / "tiny_graphs.json"


@dataclass(frozen=True)
class DemoGraph:
    features: np.ndarray  # num_nodes x d_in
    edges: list[tuple[int, int]]
    label: int

    @property
    def num_nodes(self) -> int:
        return self.features.shape[0]


def load_dataset(path: str | Path | None = None) -> list[DemoGraph]:
    """Load the bundled dataset (or another file in the same format)."""
    path = Path(path) if path is not None else BUNDLED_DATASET
    if not path.is_file():
        raise FileNotFoundError(f"dataset not found: {path}")
    doc = json.loads(path.read_text())
    if doc.get("format") != "scgp-demo-dataset" or doc.get("version") != 1:
        raise ValueError(f"{path}: not a scgp-demo-dataset v1 file")
    graphs = []
    for record in doc["graphs"]:
        features = np.asarray(record["features"], dtype=np.float64)
        if features.ndim != 2 or features.shape[0] != record["num_nodes"]:
            raise ValueError(f"{path}: inconsistent graph record")
        graphs.append(
            DemoGraph(
                features=features,
                edges=[tuple(e) for e in record["edges"]],
                label=int(record["label"]),
            )
        )
    if not graphs:
        raise ValueError(f"{path}: dataset holds no graphs")
    return graphs
