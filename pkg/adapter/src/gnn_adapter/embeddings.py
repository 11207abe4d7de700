"""Reader for the embedding/feature CSV files the scgp CLI emits.

This package talks to the scgp toolchain only through its documented files;
there is no in-process binding.
"""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path

import numpy as np


def load_embeddings(path: str | Path) -> np.ndarray:
    """Load a `scgp embed --csv` (or `scgp augment`) output into a matrix.

    The header is `node_id,<col>,<col>,...`; values are float32-precision
    decimals. Raises ValueError on empty or malformed files.
    """
    path = Path(path)
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file")
        if not header or header[0] != "node_id":
            raise ValueError(f"{path}: missing node_id header")
        width = len(header) - 1
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if len(row) != width + 1:
                raise ValueError(
                    f"{path}:{line_no}: expected {width + 1} fields, got {len(row)}"
                )
            try:
                rows.append([np.float32(value) for value in row[1:]])
            except ValueError as exc:
                raise ValueError(f"{path}:{line_no}: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float32).reshape(len(rows), width).astype(np.float64)


def checksum(values: np.ndarray) -> str:
    """Content fingerprint used to prove the demo never mutates embeddings."""
    return hashlib.sha256(np.ascontiguousarray(values, dtype="<f8").tobytes()).hexdigest()
