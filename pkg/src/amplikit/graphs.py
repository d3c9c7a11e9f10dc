"""Undirected dense graphs with O(1) adjacency queries.

File format: JSON object {"schema": 1, "n": ..., "edge_count": ...,
"bits": base64} where bits packs the upper-triangular adjacency (row-major,
i < j) with numpy bit order.
"""

from __future__ import annotations

import base64
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

__all__ = ["DenseGraph"]


class DenseGraph:
    def __init__(self, adjacency: np.ndarray):
        adj = np.asarray(adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        if adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if not (adj == adj.T).all():
            raise ValueError("adjacency must be symmetric")
        self.adjacency = adj
        self.n = adj.shape[0]
        self.edge_count = int(np.triu(adj, 1).sum())
        self._edges = None

    @property
    def gamma(self) -> Fraction:
        """Density: edge_count = gamma * n^2 / 2."""
        return Fraction(2 * self.edge_count, self.n * self.n)

    def degree(self, v: int) -> int:
        return int(self.adjacency[v].sum())

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(np.int64)

    def is_regular(self) -> bool:
        d = self.degrees()
        return bool((d == d[0]).all())

    @property
    def edges(self) -> np.ndarray:
        """(m, 2) int array of edges, i < j, lexicographic order."""
        if self._edges is None:
            iu, ju = np.triu_indices(self.n, 1)
            mask = self.adjacency[iu, ju]
            self._edges = np.stack([iu[mask], ju[mask]], axis=1).astype(np.int64)
        return self._edges

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u, v])

    # -- serialization --------------------------------------------------
    def to_json(self) -> str:
        iu, ju = np.triu_indices(self.n, 1)
        bits = np.packbits(self.adjacency[iu, ju])
        return json.dumps(
            {
                "schema": 1,
                "n": self.n,
                "edge_count": self.edge_count,
                "bits": base64.b64encode(bits.tobytes()).decode("ascii"),
            },
            sort_keys=True,
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "DenseGraph":
        obj = json.loads(text)
        n = int(obj["n"])
        raw = np.frombuffer(base64.b64decode(obj["bits"]), dtype=np.uint8)
        flat = np.unpackbits(raw, count=n * (n - 1) // 2).astype(bool)
        adj = np.zeros((n, n), dtype=bool)
        iu, ju = np.triu_indices(n, 1)
        adj[iu, ju] = flat
        adj |= adj.T
        g = cls(adj)
        if g.edge_count != int(obj["edge_count"]):
            raise ValueError("edge_count header disagrees with adjacency bits")
        return g

    @classmethod
    def load(cls, path) -> "DenseGraph":
        return cls.from_json(Path(path).read_text())
