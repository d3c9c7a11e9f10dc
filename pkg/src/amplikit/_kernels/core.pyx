# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: batched Gaussian elimination over GF(p).

Mirrors _kernels.pure exactly (same pivoting rule, same outputs); see the
pure module for the contract.
"""

from libc.stdint cimport int64_t, uint8_t

import numpy as np

BACKEND = "cython"

_MAX_P = 1 << 20


cdef inline int64_t powmod(int64_t base, int64_t e, int64_t p) noexcept nogil:
    cdef int64_t r = 1
    base %= p
    while e > 0:
        if e & 1:
            r = r * base % p
        base = base * base % p
        e >>= 1
    return r


def solve_batch(a_in, b_in, p_in):
    cdef int64_t p = p_in
    if not 2 <= p < _MAX_P:
        raise ValueError(f"p out of supported range: {p_in}")
    a = np.asarray(a_in, dtype=np.int64) % p
    b = np.asarray(b_in, dtype=np.int64) % p
    a = np.ascontiguousarray(a)
    b = np.ascontiguousarray(b)
    t_count, d, d2 = a.shape
    if d != d2 or b.shape != (t_count, d):
        raise ValueError("shape mismatch")
    ok = np.ones(t_count, dtype=np.uint8)
    if t_count == 0:
        return b, ok.astype(bool)

    cdef int64_t[:, :, ::1] A = a
    cdef int64_t[:, ::1] B = b
    cdef uint8_t[::1] OK = ok
    cdef Py_ssize_t T = t_count, D = d
    cdef Py_ssize_t t, col, r, c, piv
    cdef int64_t pinv, factor, tmp

    with nogil:
        for t in range(T):
            for col in range(D):
                piv = -1
                for r in range(col, D):
                    if A[t, r, col] != 0:
                        piv = r
                        break
                if piv < 0:
                    OK[t] = 0
                    continue
                if piv != col:
                    for c in range(D):
                        tmp = A[t, col, c]
                        A[t, col, c] = A[t, piv, c]
                        A[t, piv, c] = tmp
                    tmp = B[t, col]
                    B[t, col] = B[t, piv]
                    B[t, piv] = tmp
                pinv = powmod(A[t, col, col], p - 2, p)
                for c in range(D):
                    A[t, col, c] = A[t, col, c] * pinv % p
                B[t, col] = B[t, col] * pinv % p
                for r in range(D):
                    if r == col:
                        continue
                    factor = A[t, r, col]
                    if factor == 0:
                        continue
                    for c in range(D):
                        A[t, r, c] = (A[t, r, c] - factor * A[t, col, c]) % p
                        if A[t, r, c] < 0:
                            A[t, r, c] += p
                    B[t, r] = (B[t, r] - factor * B[t, col]) % p
                    if B[t, r] < 0:
                        B[t, r] += p
    return b, ok.astype(bool)
