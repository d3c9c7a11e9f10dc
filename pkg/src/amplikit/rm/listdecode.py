"""Reed-Solomon list decoding on lines and planes.

Two modes share the exact-agreement filter, so neither ever returns a
polynomial below the threshold:

  oracle      -- exhaustive enumeration of the coefficient space; complete
                 by construction, capped at 1e5 candidates.
  randomized  -- repeated interpolation: each trial samples an
                 interpolation set of distinct cells, solves the linear
                 system mod p and keeps candidates that clear the
                 threshold. The trial count is calibrated so every
                 polynomial at the threshold is found with probability
                 >= 1 - delta (hypergeometric success bound; planes get a
                 2x cushion for degenerate interpolation sets).

Output is deduplicated and sorted by coefficient tuple.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import numpy as np

from .._kernels import solve_batch
from ..ratios import as_fraction
from .polys import BiPoly, UniPoly, bi_monomials, line_powers, plane_monomial_matrix

__all__ = ["rs_list_decode_line", "rs_list_decode_plane", "ORACLE_CAP"]

ORACLE_CAP = 100_000
DEFAULT_DELTA = 1e-6


def _agreement_counts(M: np.ndarray, coeffs: np.ndarray, table: np.ndarray, p: int) -> np.ndarray:
    """Agreements of each coefficient row with the table.

    Evaluated via float64 matmul: entries are < p^2 and row sums below
    D * p^2 < 2^53, so the products are exact integers.
    """
    vals = (M.astype(np.float64) @ coeffs.astype(np.float64).T) % p
    return (vals == table.astype(np.float64)[:, None]).sum(axis=0)


def _distinct_rows(rng: np.random.Generator, trials: int, width: int, n: int) -> np.ndarray:
    """(trials, width) index rows without within-row duplicates."""
    pts = rng.integers(0, n, size=(trials, width))
    while True:
        srt = np.sort(pts, axis=1)
        dup = (srt[:, 1:] == srt[:, :-1]).any(axis=1)
        if not dup.any():
            return pts
        pts[dup] = rng.integers(0, n, size=(int(dup.sum()), width))


def _trial_count(threshold_ceil: int, width: int, n: int, delta: float, cushion: int = 1) -> int:
    """ceil(cushion * ln(1/delta) / P[all width sampled cells agree]) for a
    candidate with exactly threshold_ceil agreeing cells."""
    succ = 1.0
    for j in range(width):
        succ *= (threshold_ceil - j) / (n - j)
    if succ <= 0:
        raise ValueError("threshold too small for the interpolation width")
    return math.ceil(cushion * math.log(1.0 / delta) / succ)


def _decode(
    table: np.ndarray,
    p: int,
    basis: np.ndarray,
    threshold: Fraction,
    mode: str,
    rng,
    delta: float,
    cushion: int,
):
    n, width = basis.shape
    thr = math.ceil(threshold)
    table = np.asarray(table, dtype=np.int64) % p
    if thr > n:
        return np.zeros((0, width), dtype=np.int64)

    if mode == "oracle":
        if p**width > ORACLE_CAP:
            raise ValueError(f"oracle enumeration of p^{width} candidates exceeds {ORACLE_CAP}")
        coeffs = np.array(list(product(range(p), repeat=width)), dtype=np.int64)
    elif mode == "randomized":
        if rng is None:
            raise ValueError("randomized mode needs an rng")
        trials = _trial_count(thr, width, n, delta, cushion)
        pts = _distinct_rows(rng, trials, width, n)
        a = basis[pts]  # (trials, width, width)
        b = table[pts]
        sols, ok = solve_batch(a, b, p)
        if not ok.any():
            return np.zeros((0, width), dtype=np.int64)
        coeffs = np.unique(sols[ok], axis=0)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    counts = _agreement_counts(basis, coeffs, table, p)
    keep = coeffs[counts >= thr]
    if keep.shape[0] > 1:
        keep = keep[np.lexsort(keep.T[::-1])]  # sort by coefficient tuple
    return keep


def rs_list_decode_line(
    table,
    d: int,
    threshold,
    *,
    mode: str = "randomized",
    rng: np.random.Generator | None = None,
    delta: float = DEFAULT_DELTA,
) -> list[UniPoly]:
    """All degree <= d univariate polynomials agreeing with the length-p
    table on >= threshold points (randomized mode: each with probability
    >= 1 - delta)."""
    table = np.asarray(table, dtype=np.int64)
    p = table.shape[0]
    threshold = as_fraction(threshold)
    if threshold <= d:
        raise ValueError("threshold <= d: interpolation uniqueness breaks")
    if d >= p:
        raise ValueError("need d < p")
    rows = _decode(table, p, line_powers(p, d), threshold, mode, rng, delta, cushion=1)
    return [UniPoly(row, p) for row in rows]


def rs_list_decode_plane(
    table,
    d: int,
    threshold,
    *,
    mode: str = "randomized",
    rng: np.random.Generator | None = None,
    delta: float = DEFAULT_DELTA,
) -> list[BiPoly]:
    """All total-degree <= d bivariate polynomials agreeing with the
    length p*p table on >= threshold cells."""
    table = np.asarray(table, dtype=np.int64)
    p = math.isqrt(table.shape[0])
    if p * p != table.shape[0]:
        raise ValueError("plane table must have p*p cells")
    threshold = as_fraction(threshold)
    if d >= p:
        raise ValueError("need d < p")
    if threshold <= d * p:
        raise ValueError("threshold <= d*p: plane list is unbounded")
    rows = _decode(table, p, plane_monomial_matrix(p, d), threshold, mode, rng, delta, cushion=2)
    return [BiPoly(row, p, d) for row in rows]
