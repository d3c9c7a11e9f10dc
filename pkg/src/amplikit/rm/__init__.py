"""Reed-Muller list-to-unique decoding over prime fields."""

from .field import PrimeField
from .words import Line, Plane, RMWord, restrict_line, restrict_plane
from .polys import BiPoly, UniPoly
from .listdecode import rs_list_decode_line, rs_list_decode_plane
from .decode import (
    RMCoin,
    rm_interpolate,
    rm_list_to_unique,
    rm_pick_coin,
    rm_toss_coin,
    self_correct,
)

__all__ = [
    "PrimeField",
    "RMWord",
    "Line",
    "Plane",
    "restrict_line",
    "restrict_plane",
    "UniPoly",
    "BiPoly",
    "rs_list_decode_line",
    "rs_list_decode_plane",
    "RMCoin",
    "rm_pick_coin",
    "rm_toss_coin",
    "rm_interpolate",
    "rm_list_to_unique",
    "self_correct",
]
