"""Self-correction and the coin-based list-to-unique pipeline.

A coin is a line together with the list decoding of f on it. Tossing the
coin picks a z spanning a plane with the line and checks that every line
polynomial extends to a unique plane polynomial; interpolation sweeps all
z and reads each g_i(z) off the unique consistent plane polynomial.

Plane decodings are memoized per (line, z) with trial randomness drawn
from the substream (seed, "plane", x, y, z), so a toss of z and the final
sweep see the same decoding, and z-partitioned parallel sweeps are
bit-identical to sequential ones.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ..bandit import BanditOutcome, CoinSource, PhaseSchedule, TossResult, compute_schedule, run_engine
from ..ratios import as_fraction
from ..streams import substream
from .listdecode import rs_list_decode_line, rs_list_decode_plane
from .polys import UniPoly
from .words import Line, Plane, RMWord, restrict_line, restrict_plane, _dependent

__all__ = [
    "RMCoin",
    "rm_pick_coin",
    "rm_toss_coin",
    "rm_interpolate",
    "rm_list_to_unique",
    "self_correct",
    "default_eta",
]

log = logging.getLogger(__name__)

# The good-coin bias is 1 - O(delta); the constant is not pinned by the
# analysis, so the target-bias complement is c_eta * delta, clamped.
ETA_FACTOR = 8
ETA_CAP = 0.25


@dataclass
class RMCoin:
    """A line, its list decoding, and the per-z plane-decode cache."""

    line: Line
    polys: tuple[UniPoly, ...]
    _cache: dict = field(default_factory=dict, repr=False)


class _PlaneOutcome:
    """Per-z verdict: heads flag plus g_i(z) values (None = leave f(z))."""

    __slots__ = ("heads", "values")

    def __init__(self, heads: bool, values):
        self.heads = heads
        self.values = values


def default_eta(p: int, d: int, rho, eps) -> Fraction:
    rho = as_fraction(rho)
    eps = as_fraction(eps)
    delta = max(Fraction(d) / (rho * rho * p), rho / (eps * eps * p))
    return min(ETA_FACTOR * delta, as_fraction(ETA_CAP))


def _check_regime(f: RMWord, d: int, rho: float, eps: float) -> None:
    p = f.p
    if d > p / 10:
        log.info("advisory regime violated: d > p/10 (d=%d, p=%d)", d, p)
    if eps <= (2 / p) ** (1 / 3):
        log.info("advisory regime violated: eps <= (2/p)^(1/3)")
    if rho <= eps + 2 * math.sqrt(d / p):
        log.info("advisory regime violated: rho <= eps + 2*sqrt(d/p)")
    if f.m <= 3:
        log.info("advisory regime violated: m <= 3")


def rm_pick_coin(f: RMWord, rho, eps, rng: np.random.Generator, *, d: int | None = None,
                 mode: str = "randomized", seed: int | None = None) -> RMCoin:
    """Sample a uniform line (y != 0) and list-decode f on it at threshold
    (rho-eps)*p. Decode randomness comes from (seed, "line", x, y) when a
    seed is given, else from rng."""
    p, m = f.p, f.m
    d = f.d if d is None else d
    x = tuple(int(v) for v in rng.integers(0, p, size=m))
    while True:
        y = tuple(int(v) for v in rng.integers(0, p, size=m))
        if any(y):
            break
    line = Line(x, y)
    threshold = (as_fraction(rho) - as_fraction(eps)) * p
    dec_rng = substream(seed, "line", x, y) if seed is not None else rng
    polys = rs_list_decode_line(restrict_line(f, line), d, threshold, mode=mode, rng=dec_rng)
    return RMCoin(line=line, polys=tuple(polys))


def _decode_plane_at(f: RMWord, coin: RMCoin, z: tuple, d: int, threshold, mode: str, seed) -> _PlaneOutcome:
    """Decode the plane spanned by the coin's line and z; classify.

    heads iff every line polynomial has exactly one consistent plane
    polynomial; an empty line list counts as tails (such a coin certifies
    nothing and must be restarted away)."""
    out = coin._cache.get(z)
    if out is not None:
        return out
    plane = Plane(coin.line.x, coin.line.y, z)
    rng = substream(seed, "plane", coin.line.x, coin.line.y, z)
    qs = rs_list_decode_plane(restrict_plane(f, plane), d, threshold, mode=mode, rng=rng)
    restrictions = [q.restrict_t2_zero() for q in qs]
    heads = bool(coin.polys)
    values = []
    for p_i in coin.polys:
        matches = [q for q, r in zip(qs, restrictions) if r == p_i]
        if len(matches) == 1:
            values.append(matches[0].eval(0, 1))  # the plane point at z
        else:
            values.append(None)
            heads = False
    out = _PlaneOutcome(heads, values)
    coin._cache[z] = out
    return out


def _sample_independent_z(f: RMWord, line: Line, rng: np.random.Generator, count: int) -> list[tuple]:
    """Uniform z with z-x, y independent, by rejection."""
    out = []
    while len(out) < count:
        idx = rng.integers(0, f.size, size=count - len(out))
        for i in np.asarray(idx).ravel():
            z = f.index_coords(int(i))
            if not _dependent(z, line.x, line.y, f.p):
                out.append(z)
    return out


def rm_toss_coin(f: RMWord, rho, eps, coin: RMCoin, rng: np.random.Generator, *,
                 d: int | None = None, mode: str = "randomized", seed: int | None = None) -> bool:
    """One toss: heads iff the plane through a fresh z extends every line
    polynomial uniquely."""
    d = f.d if d is None else d
    threshold = (as_fraction(rho) - as_fraction(eps)) * f.p * f.p
    (z,) = _sample_independent_z(f, coin.line, rng, 1)
    return _decode_plane_at(f, coin, z, d, threshold, mode, seed).heads


def rm_interpolate(f: RMWord, rho, eps, coin: RMCoin, *, d: int | None = None,
                   mode: str = "randomized", seed: int | None = None) -> list[RMWord]:
    """Sweep all z with z-x, y independent; g_i(z) is the unique consistent
    plane polynomial's value at z, and f(z) where no unique match exists or
    z is dependent."""
    d = f.d if d is None else d
    threshold = (as_fraction(rho) - as_fraction(eps)) * f.p * f.p
    k = len(coin.polys)
    tables = [f.values.copy() for _ in range(k)]
    if k == 0:
        return []
    for idx in range(f.size):
        z = f.index_coords(idx)
        if _dependent(z, coin.line.x, coin.line.y, f.p):
            continue
        out = _decode_plane_at(f, coin, z, d, threshold, mode, seed)
        for i, v in enumerate(out.values):
            if v is not None:
                tables[i][idx] = v
    return [RMWord(f.p, f.m, t, d=d) for t in tables]


def self_correct(f: RMWord, rho, eps, seed: int, *, d: int | None = None,
                 mode: str = "randomized") -> list[RMWord]:
    """Single-line self-correction: pick one random line, list-decode it,
    and interpolate every g_i from the planes through it."""
    d = f.d if d is None else d
    _check_regime(f, d, float(rho), float(eps))
    coin = rm_pick_coin(f, rho, eps, substream(seed, "pick"), d=d, mode=mode, seed=seed)
    return rm_interpolate(f, rho, eps, coin, d=d, mode=mode, seed=seed)


class _RMCoinSource(CoinSource):
    """Ungrouped source: a group is a fresh line coin."""

    def __init__(self, f: RMWord, rho, eps, d: int, mode: str, seed: int):
        self.f = f
        self.rho = rho
        self.eps = eps
        self.d = d
        self.mode = mode
        self.seed = seed
        self.plane_threshold = (as_fraction(rho) - as_fraction(eps)) * f.p * f.p

    def sample_group(self, rng):
        return rm_pick_coin(self.f, self.rho, self.eps, rng, d=self.d, mode=self.mode, seed=self.seed)

    def coin_count(self, group):
        return 1

    def toss(self, group: RMCoin, coin, count, rng):
        zs = _sample_independent_z(self.f, group.line, rng, count)
        heads = 0
        for z in zs:
            if _decode_plane_at(self.f, group, z, self.d, self.plane_threshold, self.mode, self.seed).heads:
                heads += 1
        return TossResult(heads=heads, tosses=count)


@dataclass(frozen=True)
class RMDecodeResult:
    words: list
    coin: RMCoin
    outcome: BanditOutcome


def rm_list_to_unique(
    f: RMWord,
    rho,
    eps,
    seed: int,
    *,
    d: int | None = None,
    certainty: Optional[int] = None,
    eta=None,
    schedule: Optional[PhaseSchedule] = None,
    restart_cap: Optional[int] = None,
    mode: str = "randomized",
    hook=None,
) -> RMDecodeResult:
    """Amplified pipeline: find a high-bias line coin with the sliding-
    threshold engine (eta = 8*max{d/(rho^2 p), rho/(eps^2 p)} capped,
    zeta = eps/2), then interpolate the winner.

    The default certainty exponent is p^m * ceil(log2 p) (error
    exponentially small in the input size); desk-scale runs pass a small
    `certainty` explicitly.
    """
    d = f.d if d is None else d
    if d is None:
        raise ValueError("degree bound required (word carries none)")
    _check_regime(f, d, float(rho), float(eps))
    p = f.p
    eta = default_eta(p, d, rho, eps) if eta is None else as_fraction(eta)
    zeta = as_fraction(eps) / 2
    if schedule is None:
        n_cert = certainty if certainty is not None else f.size * max(1, math.ceil(math.log2(p)))
        schedule = compute_schedule(n_cert, 1, eta, zeta)
    source = _RMCoinSource(f, rho, eps, d, mode, seed)
    outcome = run_engine(
        source,
        schedule,
        lambda i: 1 - eta - i * schedule.beta,
        seed,
        restart_cap=restart_cap or 64 * schedule.n,
        hook=hook,
    )
    coin: RMCoin = outcome.group
    words = rm_interpolate(f, rho, eps, coin, d=d, mode=mode, seed=seed)
    slim = BanditOutcome(
        group=(coin.line.x, coin.line.y),
        coin=outcome.coin,
        total_tosses=outcome.total_tosses,
        restarts=outcome.restarts,
        phases_completed=outcome.phases_completed,
    )
    return RMDecodeResult(words=words, coin=coin, outcome=slim)
