"""Prime field arithmetic on residues 0..p-1."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["PrimeField", "is_prime"]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@lru_cache(maxsize=32)
def _inv_table(p: int) -> np.ndarray:
    """Fermat inverses of 0..p-1 (inv[0] := 0, by convention unused)."""
    e = p - 2
    b = np.arange(p, dtype=np.int64)
    out = np.ones(p, dtype=np.int64)
    while e:
        if e & 1:
            out = out * b % p
        b = b * b % p
        e >>= 1
    out[0] = 0
    return out


class PrimeField:
    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = int(p)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0 is undefined")
        return int(_inv_table(self.p)[a])

    def pow(self, a: int, e: int) -> int:
        return pow(int(a) % self.p, e, self.p)

    def inv_table(self) -> np.ndarray:
        return _inv_table(self.p)

    def elements(self) -> np.ndarray:
        return np.arange(self.p, dtype=np.int64)

    def __repr__(self):
        return f"PrimeField({self.p})"
