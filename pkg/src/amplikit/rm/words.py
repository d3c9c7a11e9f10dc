"""Evaluation tables f: F^m -> F, lines and planes.

Points are ordered lexicographically: the point (c_0, ..., c_{m-1}) has
index sum(c_i * p^(m-1-i)), i.e. the first coordinate is most significant.
Word files are a JSON header line {"schema":1, "p":..., "m":..., "d":...}
followed by a newline and p^m raw little-endian bytes (one per element,
p < 256).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .field import is_prime

__all__ = ["RMWord", "Line", "Plane", "restrict_line", "restrict_plane", "agreement"]


class RMWord:
    def __init__(self, p: int, m: int, values, d: int | None = None):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p >= 256:
            raise ValueError("only p < 256 is supported by the byte format")
        self.p = int(p)
        self.m = int(m)
        self.d = d
        vals = np.asarray(values, dtype=np.int64).ravel()
        if vals.shape[0] != p**m:
            raise ValueError(f"expected {p**m} values, got {vals.shape[0]}")
        if vals.min(initial=0) < 0 or vals.max(initial=0) >= p:
            raise ValueError("values outside the field")
        self.values = vals
        self.probes = 0  # instrumentation: counts table lookups

    @property
    def size(self) -> int:
        return self.p**self.m

    def point_index(self, coords) -> int:
        idx = 0
        for c in coords:
            idx = idx * self.p + int(c) % self.p
        return idx

    def index_coords(self, idx: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.m):
            idx, r = divmod(idx, self.p)
            out.append(r)
        return tuple(reversed(out))

    def take(self, indices) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        self.probes += int(indices.size)
        return self.values[indices]

    def at(self, coords) -> int:
        self.probes += 1
        return int(self.values[self.point_index(coords)])

    # -- serialization --------------------------------------------------
    def to_bytes(self) -> bytes:
        header = json.dumps(
            {"schema": 1, "p": self.p, "m": self.m, "d": self.d}, sort_keys=True
        ).encode("ascii")
        return header + b"\n" + self.values.astype(np.uint8).tobytes()

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def from_bytes(cls, blob: bytes) -> "RMWord":
        nl = blob.index(b"\n")
        head = json.loads(blob[:nl])
        raw = np.frombuffer(blob[nl + 1 :], dtype=np.uint8)
        return cls(head["p"], head["m"], raw.astype(np.int64), d=head.get("d"))

    @classmethod
    def load(cls, path) -> "RMWord":
        return cls.from_bytes(Path(path).read_bytes())


@dataclass(frozen=True)
class Line:
    """Points x + t*y, t in F; y must be nonzero."""

    x: tuple[int, ...]
    y: tuple[int, ...]

    def validate(self, p: int) -> None:
        if all(c % p == 0 for c in self.y):
            raise ValueError("line direction must be nonzero")


@dataclass(frozen=True)
class Plane:
    """Points x + t1*y + t2*(z-x); z-x and y must be independent."""

    x: tuple[int, ...]
    y: tuple[int, ...]
    z: tuple[int, ...]

    def validate(self, p: int) -> None:
        Line(self.x, self.y).validate(p)
        if _dependent(self.z, self.x, self.y, p):
            raise ValueError("z-x must be independent of y")


def _dependent(z, x, y, p: int) -> bool:
    """True iff z-x lies in the span of y (y assumed nonzero)."""
    w = [(a - b) % p for a, b in zip(z, x)]
    if all(c == 0 for c in w):
        return True
    j = next(i for i, c in enumerate(y) if c % p != 0)
    lam = w[j] * pow(int(y[j]), p - 2, p) % p
    return all(c == lam * yc % p for c, yc in zip(w, y))


def _line_indices(f: RMWord, line: Line) -> np.ndarray:
    p = f.p
    t = np.arange(p, dtype=np.int64)
    x = np.array(line.x, dtype=np.int64)
    y = np.array(line.y, dtype=np.int64)
    coords = (x[None, :] + t[:, None] * y[None, :]) % p
    weights = p ** np.arange(f.m - 1, -1, -1, dtype=np.int64)
    return coords @ weights


def restrict_line(f: RMWord, line: Line) -> np.ndarray:
    """Length-p table of f along the line, indexed by t."""
    line.validate(f.p)
    return f.take(_line_indices(f, line))


def restrict_plane(f: RMWord, plane: Plane) -> np.ndarray:
    """Length p*p table of f on the plane, cell index t1*p + t2."""
    plane.validate(f.p)
    p = f.p
    t1, t2 = np.divmod(np.arange(p * p, dtype=np.int64), p)
    x = np.array(plane.x, dtype=np.int64)
    y = np.array(plane.y, dtype=np.int64)
    w = (np.array(plane.z, dtype=np.int64) - x) % p
    coords = (x[None, :] + t1[:, None] * y[None, :] + t2[:, None] * w[None, :]) % p
    weights = p ** np.arange(f.m - 1, -1, -1, dtype=np.int64)
    return f.take(coords @ weights)


def agreement(a: RMWord, b: RMWord) -> Fraction:
    if (a.p, a.m) != (b.p, b.m):
        raise ValueError("words live on different domains")
    return Fraction(int((a.values == b.values).sum()), a.size)
