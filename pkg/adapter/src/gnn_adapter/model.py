"""Small GCN for graph classification, mirroring the usual benchmark setup:
symmetric renormalized adjacency, relu, dropout between layers, mean-pool
readout."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F


def normalized_adjacency(num_nodes: int, edges: list[tuple[int, int]]) -> torch.Tensor:
    """Dense D^{-1/2} (A + I) D^{-1/2} for one small graph."""
    a = np.zeros((num_nodes, num_nodes))
    for u, v in edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    a += np.eye(num_nodes)
    inv_sqrt = 1.0 / np.sqrt(a.sum(axis=1))
    return torch.from_numpy(a * inv_sqrt[:, None] * inv_sqrt[None, :]).float()


class GraphClassifier(nn.Module):
    def __init__(self, in_dim: int, hidden: int, num_classes: int, layers: int, dropout: float):
        super().__init__()
        dims = [in_dim] + [hidden] * (layers - 1)
        self.convs = nn.ModuleList(nn.Linear(d, hidden) for d in dims)
        self.head = nn.Linear(hidden, num_classes)
        self.dropout = dropout

    def forward(self, operator: torch.Tensor, x: torch.Tensor) -> torch.Tensor:
        h = x
        for conv in self.convs:
            h = F.relu(operator @ conv(h))
            h = F.dropout(h, p=self.dropout, training=self.training)
        return self.head(h.mean(dim=0))


def train_model(
    model: GraphClassifier,
    examples: list[tuple[torch.Tensor, torch.Tensor, int]],
    splits: tuple[list[int], list[int], list[int]],
    epochs: int,
    lr: float = 0.01,
) -> dict:
    """Full-batch training; returns per-epoch train loss and val accuracy."""
    train_idx, val_idx, test_idx = splits
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    losses, val_curve = [], []
    for _epoch in range(epochs):
        model.train()
        optimizer.zero_grad()
        total = torch.zeros(())
        for i in train_idx:
            operator, x, label = examples[i]
            logits = model(operator, x)
            total = total + F.cross_entropy(
                logits.unsqueeze(0), torch.tensor([label])
            )
        loss = total / len(train_idx)
        loss.backward()
        optimizer.step()
        losses.append(float(loss.detach()))
        val_curve.append(evaluate(model, examples, val_idx))
    return {
        "train_loss": losses,
        "val_accuracy": val_curve,
        "test_accuracy": evaluate(model, examples, test_idx),
    }


def evaluate(model: GraphClassifier, examples, indices: list[int]) -> float:
    model.eval()
    correct = 0
    with torch.no_grad():
        for i in indices:
            operator, x, label = examples[i]
            correct += int(model(operator, x).argmax().item() == label)
    return correct / len(indices)
