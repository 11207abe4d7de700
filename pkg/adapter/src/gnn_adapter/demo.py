"""Desk-scale demonstration that scgp embedding files plug into GNN training.

Trains a baseline GCN and an identically seeded GCN over SCGP-augmented
inputs on the bundled tiny dataset, and emits a metrics record for both.
This is a pipeline-correctness demonstration, clearly labeled as such in its
output; it makes no claim about benchmark accuracy numbers.
"""

from __future__ import annotations

import argparse
import json
import subprocess
import sys
import tempfile
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .dataset import DemoGraph, load_dataset
from .embeddings import checksum, load_embeddings
from .model import GraphClassifier, normalized_adjacency, train_model

NUM_CLASSES = 2


@dataclass(frozen=True)
class AdapterConfig:
    """Hyperparameters; layer count, width and dropout follow the usual
    4-layer / 64-hidden / 0.5-dropout setup, epochs shrunk to desk scale."""

    layers: int = 4
    hidden: int = 64
    dropout: float = 0.5
    epochs: int = 20
    seed: int = 0


def augment_graph(graph: DemoGraph, embeddings: np.ndarray) -> np.ndarray:
    """Index-based mapping of the shared embedding matrix onto one graph.

    First num_nodes rows when the coset space is large enough, zero-padded
    otherwise, then concatenated onto the graph's own features.
    """
    n, d_embed = graph.num_nodes, embeddings.shape[1]
    if embeddings.shape[0] >= n:
        block = embeddings[:n]
    else:
        block = np.vstack(
            [embeddings, np.zeros((n - embeddings.shape[0], d_embed))]
        )
    return np.hstack([graph.features, block])


def _splits(count: int, seed: int) -> tuple[list[int], list[int], list[int]]:
    order = list(range(count))
    import random

    random.Random(seed).shuffle(order)
    n_train = int(count * 0.8)
    n_val = int(count * 0.1)
    return (
        order[:n_train],
        order[n_train : n_train + n_val],
        order[n_train + n_val :],
    )


def _examples(graphs, feature_of) -> list[tuple[torch.Tensor, torch.Tensor, int]]:
    return [
        (
            normalized_adjacency(g.num_nodes, g.edges),
            torch.from_numpy(feature_of(g)).float(),
            g.label,
        )
        for g in graphs
    ]


def _run_one(graphs, feature_of, in_dim: int, config: AdapterConfig) -> dict:
    torch.manual_seed(config.seed)
    model = GraphClassifier(
        in_dim=in_dim,
        hidden=config.hidden,
        num_classes=NUM_CLASSES,
        layers=config.layers,
        dropout=config.dropout,
    )
    curves = train_model(
        model,
        _examples(graphs, feature_of),
        _splits(len(graphs), config.seed),
        epochs=config.epochs,
    )
    return {"input_dim": in_dim, **curves}


def run_demo(
    dataset_path: str | Path | None,
    embeddings_path: str | Path,
    config: AdapterConfig = AdapterConfig(),
) -> dict:
    """Train baseline vs SCGP-augmented models with identical seeds.

    Returns the metrics record (JSON-serializable). Deterministic: the same
    inputs and seed produce the same record.
    """
    torch.set_num_threads(1)
    graphs = load_dataset(dataset_path)
    embeddings = load_embeddings(embeddings_path)
    fingerprint = checksum(embeddings)

    d_in = graphs[0].features.shape[1]
    d_embed = embeddings.shape[1]
    baseline = _run_one(graphs, lambda g: g.features, d_in, config)
    augmented = _run_one(
        graphs, lambda g: augment_graph(g, embeddings), d_in + d_embed, config
    )

    return {
        "format": "scgp-demo-metrics",
        "version": 1,
        "note": "desk-scale pipeline demonstration, not a benchmark reproduction",
        "config": asdict(config),
        "dataset": {
            "graphs": len(graphs),
            "d_in": d_in,
            "classes": NUM_CLASSES,
        },
        "embeddings": {
            "rows": embeddings.shape[0],
            "d_embed": d_embed,
            "checksum_before": fingerprint,
            "checksum_after": checksum(embeddings),
        },
        "baseline": baseline,
        "augmented": augmented,
    }


def provision_embeddings(out_path: Path, max_nodes: int, dim: int, seed: int) -> None:
    """Produce an embedding CSV by invoking the scgp CLI (file interface only)."""
    select = subprocess.run(
        ["scgp", "select-n", "--nodes", str(max_nodes)],
        capture_output=True,
        text=True,
        check=True,
    )
    n = int(select.stdout.split()[0].removeprefix("n="))
    subprocess.run(
        [
            "scgp", "embed", "--n", str(n), "--dim", str(dim),
            "--seed", str(seed), "--csv", "--out", str(out_path),
        ],
        capture_output=True,
        text=True,
        check=True,
    )


def main() -> None:
    parser = argparse.ArgumentParser(
        prog="scgp-demo", description="train a tiny GCN with and without SCGP features"
    )
    parser.add_argument("--dataset", default=None, help="dataset JSON (default: bundled)")
    parser.add_argument(
        "--embeddings",
        default=None,
        help="embedding CSV from `scgp embed --csv` (default: generate via the scgp CLI)",
    )
    parser.add_argument("--dim", type=int, default=8, help="d_embed when self-provisioning")
    parser.add_argument("--epochs", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="write the metrics JSON here too")
    args = parser.parse_args()

    config = AdapterConfig(epochs=args.epochs, seed=args.seed)
    if args.embeddings is None:
        graphs = load_dataset(args.dataset)
        with tempfile.TemporaryDirectory() as tmp:
            csv_path = Path(tmp) / "embeddings.csv"
            provision_embeddings(
                csv_path, max(g.num_nodes for g in graphs), args.dim, args.seed
            )
            metrics = run_demo(args.dataset, csv_path, config)
    else:
        metrics = run_demo(args.dataset, args.embeddings, config)

    text = json.dumps(metrics, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)


if __name__ == "__main__":
    sys.exit(main())
