"""Deterministic generator for the bundled tiny graph-classification dataset.

Two structural classes at 10-16 nodes each:

  class 0: two cliques joined by a short path (a bottleneck between dense
           communities, the structure long-range propagation cares about)
  class 1: a chorded ring (uniform, no bottleneck)

Run `python -m gnn_adapter.synthesize` to regenerate data/tiny_graphs.json;
the output is a pure function of the seed, so the bundled file is stable.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

DATASET_FORMAT = "scgp-demo-dataset"
DEFAULT_SEED = 1789
GRAPHS_PER_CLASS = 150
FEATURE_DIM = 3


def _barbell(rng: random.Random) -> tuple[int, list[tuple[int, int]]]:
    left = rng.randint(4, 6)
    right = rng.randint(4, 6)
    path_len = rng.randint(2, 4)
    n = left + right + path_len
    edges = []
    for i in range(left):
        for j in range(i + 1, left):
            edges.append((i, j))
    offset = left + path_len
    for i in range(right):
        for j in range(i + 1, right):
            edges.append((offset + i, offset + j))
    chain = [left - 1] + [left + k for k in range(path_len)] + [offset]
    for a, b in zip(chain, chain[1:]):
        edges.append((a, b))
    return n, edges


def _chorded_ring(rng: random.Random) -> tuple[int, list[tuple[int, int]]]:
    n = rng.randint(10, 16)
    edges = [(i, (i + 1) % n) for i in range(n)]
    for _ in range(n // 4):
        u = rng.randrange(n)
        v = (u + rng.randint(2, n - 2)) % n
        if u != v and (min(u, v), max(u, v)) not in {tuple(sorted(e)) for e in edges}:
            edges.append((min(u, v), max(u, v)))
    return n, edges


def make_dataset(seed: int = DEFAULT_SEED) -> dict:
    rng = random.Random(seed)
    graphs = []
    for label, builder in ((0, _barbell), (1, _chorded_ring)):
        for _ in range(GRAPHS_PER_CLASS):
            n, edges = builder(rng)
            degree = [0] * n
            for u, v in edges:
                degree[u] += 1
                degree[v] += 1
            # constant channel, normalized degree, and a noise channel
            features = [
                [1.0, degree[i] / 8.0, round(rng.uniform(-1, 1), 6)] for i in range(n)
            ]
            graphs.append(
                {"num_nodes": n, "edges": sorted(edges), "features": features, "label": label}
            )
    order = list(range(len(graphs)))
    rng.shuffle(order)
    return {
        "format": DATASET_FORMAT,
        "version": 1,
        "seed": seed,
        "feature_dim": FEATURE_DIM,
        "graphs": [graphs[i] for i in order],
    }


def main() -> None:
    out = Path(__file__).parent / "data" / "tiny_graphs.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(make_dataset(), separators=(",", ":")) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
