"""Pure-numpy kernel implementations (fallback when the compiled core is
unavailable or AMPLIKIT_PURE_PYTHON is set).

The contract is shared with the Cython backend: same pivoting rule, same
outputs. Solutions for singular systems (ok == False) are undefined and
must be masked by callers.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

BACKEND = "pure"

# Entries stay below p**2 < 2**40 before each reduction, so int64 is exact.
_MAX_P = 1 << 20


@lru_cache(maxsize=16)
def _inv_table(p: int) -> np.ndarray:
    """Fermat inverses of 0..p-1 (inv[0] := 0)."""
    e = p - 2
    b = np.arange(p, dtype=np.int64)
    result = np.ones(p, dtype=np.int64)
    while e:
        if e & 1:
            result = result * b % p
        b = b * b % p
        e >>= 1
    result[0] = 0
    return result


def solve_batch(a, b, p: int):
    """Solve T linear systems a[t] @ x = b[t] over GF(p).

    a: (T, D, D) ints, b: (T, D) ints. Returns (x, ok) where x is (T, D)
    int64 and ok a (T,) bool mask; x rows with ok == False are undefined.
    """
    if not 2 <= p < _MAX_P:
        raise ValueError(f"p out of supported range: {p}")
    a = np.asarray(a, dtype=np.int64).copy() % p
    b = np.asarray(b, dtype=np.int64).copy() % p
    t_count, d, d2 = a.shape
    if d != d2 or b.shape != (t_count, d):
        raise ValueError("shape mismatch")
    if t_count == 0:
        return b, np.zeros(0, dtype=bool)
    inv = _inv_table(p)
    ok = np.ones(t_count, dtype=bool)
    rows = np.arange(t_count)
    for col in range(d):
        nz = a[:, col:, col] != 0
        ok &= nz.any(axis=1)
        piv = np.argmax(nz, axis=1) + col  # first nonzero row at/below col
        # swap row col <-> piv per system
        piv_a = a[rows, piv, :].copy()
        piv_b = b[rows, piv].copy()
        a[rows, piv, :] = a[:, col, :]
        b[rows, piv] = b[:, col]
        a[:, col, :] = piv_a
        b[:, col] = piv_b
        pinv = inv[a[:, col, col]]
        a[:, col, :] = a[:, col, :] * pinv[:, None] % p
        b[:, col] = b[:, col] * pinv % p
        factor = a[:, :, col].copy()
        factor[:, col] = 0
        a = (a - factor[:, :, None] * a[:, col, :][:, None, :]) % p
        b = (b - factor * b[:, col][:, None]) % p
    return b, ok
