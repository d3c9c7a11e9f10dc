"""Exact-rational parameter handling.

Thresholds like 1 - eta - i*beta are sub-constant, so all comparisons run
on fractions.Fraction. Floats given by callers are read as their decimal
repr (0.1 -> 1/10), which keeps serialized parameters and thresholds exact.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["as_fraction"]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact fraction")
