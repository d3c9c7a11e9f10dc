"""Deterministic substream derivation for the counter-based PRNG.

Every run owns a root seed. All randomness is drawn from Philox4x64
generators whose 128-bit keys are derived by hashing (seed, *path) with
SHA-256, so any component of a run -- a restart, a phase, a single coin's
toss batch -- can be recreated independently and in parallel with
bit-identical results.

Path elements are ints, strings or nested tuples; they are encoded
unambiguously (type tag + value) before hashing, so ("a", 1) and ("a1",)
derive different streams.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_key", "substream"]


def _encode(part, out: list[bytes]) -> None:
    if isinstance(part, (bool, np.bool_)):
        out.append(b"b" + (b"1" if part else b"0"))
    elif isinstance(part, (int, np.integer)):
        out.append(b"i" + str(int(part)).encode())
    elif isinstance(part, str):
        out.append(b"s" + part.encode())
    elif isinstance(part, (tuple, list)):
        out.append(b"(")
        for p in part:
            _encode(p, out)
        out.append(b")")
    else:
        raise TypeError(f"unsupported stream path element: {part!r}")


def derive_key(seed: int, *path) -> int:
    """128-bit Philox key for the substream addressed by (seed, *path)."""
    parts: list[bytes] = []
    _encode(seed, parts)
    for p in path:
        _encode(p, parts)
    digest = hashlib.sha256(b"\x1f".join(parts)).digest()
    return int.from_bytes(digest[:16], "little")


def substream(seed: int, *path) -> np.random.Generator:
    """Fresh Generator on the substream addressed by (seed, *path)."""
    return np.random.Generator(np.random.Philox(key=derive_key(seed, *path)))
