"""Canonical univariate and bivariate polynomials over GF(p).

UniPoly stores ascending-power coefficients with trailing zeros trimmed.
BiPoly stores coefficients over the fixed monomial list bi_monomials(d):
all (a, b) with a+b <= d in lexicographic (a, b) order. Equality is
coefficient equality, so list-decoder outputs deduplicate canonically.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["UniPoly", "BiPoly", "bi_monomials", "line_powers", "plane_monomial_matrix"]


@lru_cache(maxsize=64)
def bi_monomials(d: int) -> tuple[tuple[int, int], ...]:
    return tuple((a, b) for a in range(d + 1) for b in range(d + 1 - a))


@lru_cache(maxsize=64)
def line_powers(p: int, d: int) -> np.ndarray:
    """(p, d+1) matrix: entry [t, c] = t^c mod p."""
    t = np.arange(p, dtype=np.int64)
    out = np.ones((p, d + 1), dtype=np.int64)
    for c in range(1, d + 1):
        out[:, c] = out[:, c - 1] * t % p
    return out


@lru_cache(maxsize=64)
def plane_monomial_matrix(p: int, d: int) -> np.ndarray:
    """(p*p, D) matrix over the bi_monomials(d) basis, cell index t1*p + t2."""
    mons = bi_monomials(d)
    t1, t2 = np.divmod(np.arange(p * p, dtype=np.int64), p)
    pw1 = line_powers(p, d)[t1]  # (p*p, d+1)
    pw2 = line_powers(p, d)[t2]
    cols = [pw1[:, a] * pw2[:, b] % p for a, b in mons]
    return np.stack(cols, axis=1)


class UniPoly:
    """Degree <= d univariate polynomial, coefficients ascending."""

    __slots__ = ("coeffs", "p")

    def __init__(self, coeffs, p: int):
        c = [int(x) % p for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)
        self.p = p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def eval(self, t: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * t + c) % self.p
        return acc

    def eval_all(self) -> np.ndarray:
        """Values on 0..p-1."""
        if not self.coeffs:
            return np.zeros(self.p, dtype=np.int64)
        d = len(self.coeffs) - 1
        return line_powers(self.p, d) @ np.array(self.coeffs, dtype=np.int64) % self.p

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)}, p={self.p})"


class BiPoly:
    """Total degree <= d bivariate polynomial over bi_monomials(d)."""

    __slots__ = ("coeffs", "p", "d")

    def __init__(self, coeffs, p: int, d: int):
        mons = bi_monomials(d)
        c = tuple(int(x) % p for x in coeffs)
        if len(c) != len(mons):
            raise ValueError("coefficient vector does not match monomial basis")
        self.coeffs = c
        self.p = p
        self.d = d

    def restrict_t2_zero(self) -> UniPoly:
        """q(t, 0) as a univariate polynomial."""
        mons = bi_monomials(self.d)
        out = [0] * (self.d + 1)
        for (a, b), c in zip(mons, self.coeffs):
            if b == 0:
                out[a] = c
        return UniPoly(out, self.p)

    def eval(self, t1: int, t2: int) -> int:
        acc = 0
        for (a, b), c in zip(bi_monomials(self.d), self.coeffs):
            acc = (acc + c * pow(t1, a, self.p) * pow(t2, b, self.p)) % self.p
        return acc

    def eval_all(self) -> np.ndarray:
        """Values on the p*p grid, cell index t1*p + t2."""
        return plane_monomial_matrix(self.p, self.d) @ np.array(self.coeffs, dtype=np.int64) % self.p

    def __eq__(self, other):
        return (
            isinstance(other, BiPoly)
            and (self.p, self.d, self.coeffs) == (other.p, other.d, other.coeffs)
        )

    def __hash__(self):
        return hash((self.p, self.d, self.coeffs))

    def __repr__(self):
        return f"BiPoly({list(self.coeffs)}, p={self.p}, d={self.d})"
