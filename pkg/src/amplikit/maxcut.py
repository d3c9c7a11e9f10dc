"""Dense Max-Cut via sampled seed cuts and the biased-coin engine.

A sampled S in V is a group of coins, one coin per seed cut H of S. The
induced cut assigns each vertex to the side favored by its edges into the
seed, a coin toss checks whether a uniform edge crosses that cut, and the
winning seed cut is verified exactly before being returned (Las Vegas).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .bandit import BanditOutcome, CoinSource, PhaseSchedule, TossResult, compute_schedule, run_engine
from .errors import BudgetExceeded, NotFound
from .graphs import DenseGraph
from .ratios import as_fraction
from .streams import substream

__all__ = [
    "seed_size",
    "induced_cut_side",
    "cut_value_exact",
    "maxcut_toss_coin",
    "find_cut",
    "MaxcutResult",
]

log = logging.getLogger(__name__)

# Enumerating 2**s seed cuts: refuse beyond this count instead of hanging.
DEFAULT_MAX_COINS = 1 << 22


def seed_size(gamma, zeta) -> int:
    """Sample size max{ceil(ln(2/z^2)/z^2), ceil(2 ln(2/z^2)/g^2)}."""
    g = float(gamma)
    z = float(zeta)
    if not 0 < z < 0.25:
        raise ValueError("zeta must lie in (0, 1/4)")
    if not 0 < g <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    ln_term = math.log(2.0 / z**2)
    return max(math.ceil(ln_term / z**2), math.ceil(2.0 * ln_term / g**2))


def induced_cut_side(G: DenseGraph, S: Sequence[int], H, v: int) -> bool:
    """True iff v joins C_{S,H}: strictly more edges from v into S-H than
    into H. Ties (including no neighbors in S) resolve to the V-C side."""
    H = set(H)
    to_h = 0
    to_rest = 0
    row = G.adjacency[v]
    for s in S:
        if row[s]:
            if s in H:
                to_h += 1
            else:
                to_rest += 1
    return to_rest > to_h


def cut_value_exact(G: DenseGraph, side) -> Fraction:
    """Exact fraction of edges crossing the cut given by boolean `side`."""
    if G.edge_count == 0:
        raise ValueError("cut value undefined on an edgeless graph")
    side = np.asarray(side, dtype=bool)
    e = G.edges
    crossing = int((side[e[:, 0]] != side[e[:, 1]]).sum())
    return Fraction(crossing, G.edge_count)


def maxcut_toss_coin(G: DenseGraph, S: Sequence[int], H, rng: np.random.Generator) -> bool:
    """One toss: heads iff a uniform edge crosses C_{S,H}."""
    e = G.edges[int(rng.integers(0, G.edge_count))]
    return induced_cut_side(G, S, H, int(e[0])) != induced_cut_side(G, S, H, int(e[1]))


class _SeedCutGroup:
    """One sampled S with lazily materialized induced-cut side arrays."""

    __slots__ = ("vertices", "into_s", "deg_s", "sides")

    def __init__(self, G: DenseGraph, vertices: tuple[int, ...]):
        self.vertices = vertices
        # into_s[v, j] = 1 iff (v, S[j]) is an edge
        self.into_s = G.adjacency[:, list(vertices)].astype(np.int64)
        self.deg_s = self.into_s.sum(axis=1)
        self.sides: dict[int, np.ndarray] = {}

    def side_array(self, coin: int) -> np.ndarray:
        cached = self.sides.get(coin)
        if cached is None:
            bits = (coin >> np.arange(len(self.vertices))) & 1
            to_h = self.into_s @ bits
            cached = (self.deg_s - to_h) > to_h
            self.sides[coin] = cached
        return cached

    def seed_cut(self, coin: int) -> tuple[int, ...]:
        return tuple(v for j, v in enumerate(self.vertices) if (coin >> j) & 1)


class _CutCoinSource(CoinSource):
    def __init__(self, G: DenseGraph, s: int):
        self.G = G
        self.s = s

    def sample_group(self, rng):
        verts = tuple(sorted(int(v) for v in rng.choice(self.G.n, size=self.s, replace=False)))
        return _SeedCutGroup(self.G, verts)

    def coin_count(self, group):
        return 1 << self.s

    def toss(self, group: _SeedCutGroup, coin, count, rng):
        side = group.side_array(coin)
        e = self.G.edges
        idx = rng.integers(0, self.G.edge_count, size=count)
        heads = int((side[e[idx, 0]] != side[e[idx, 1]]).sum())
        return TossResult(heads=heads, tosses=count)


@dataclass(frozen=True)
class MaxcutResult:
    side: np.ndarray
    value: Fraction
    sample: tuple[int, ...]
    seed_cut: tuple[int, ...]
    outcome: BanditOutcome
    s: int
    irregular: bool


def find_cut(
    G: DenseGraph,
    eps,
    zeta,
    seed: int,
    *,
    s: Optional[int] = None,
    certainty: Optional[int] = None,
    schedule: Optional[PhaseSchedule] = None,
    restart_cap: Optional[int] = None,
    hook=None,
    max_coins: int = DEFAULT_MAX_COINS,
) -> MaxcutResult:
    """Find a cut of exact value >= 1 - eps - 11*zeta, or raise NotFound.

    Caller promises a cut of value >= 1-eps exists. Defaults follow the
    published parameters (|S| from seed_size, certainty exponent |V|^2);
    those are astronomically expensive for small zeta, so desk-scale runs
    pass `s`, and `certainty` or a full `schedule`, explicitly. Enumeration
    beyond `max_coins` seed cuts raises BudgetExceeded up front.
    """
    eps = as_fraction(eps)
    zeta = as_fraction(zeta)
    if G.edge_count == 0:
        raise ValueError("graph has no edges")
    if not 0 <= eps < Fraction(1, 4):
        raise ValueError("eps must lie in [0, 1/4)")
    if not 0 < zeta < Fraction(1, 4) - eps:
        raise ValueError("zeta must lie in (0, 1/4 - eps)")

    irregular = not G.is_regular()
    if irregular:
        log.warning("graph is irregular; treating as gamma-dense with gamma=%s", G.gamma)

    s_eff = min(s if s is not None else seed_size(G.gamma, zeta), G.n)
    if 1 << s_eff > max_coins:
        raise BudgetExceeded(
            f"2^{s_eff} seed cuts exceed the coin budget ({max_coins}); pass a smaller s"
        )
    if schedule is None:
        n_cert = certainty if certainty is not None else G.n * G.n
        schedule = compute_schedule(n_cert, 1 << s_eff, 0, zeta)

    base = 1 - eps - 10 * zeta
    outcome = run_engine(
        _CutCoinSource(G, s_eff),
        schedule,
        lambda i: base - i * schedule.beta,
        seed,
        restart_cap=restart_cap or 64 * schedule.n,
        hook=hook,
    )
    group: _SeedCutGroup = outcome.group
    side = group.side_array(outcome.coin)
    value = cut_value_exact(G, side)
    if value < 1 - eps - 11 * zeta:
        raise NotFound(f"winning seed cut has value {value} < 1 - eps - 11*zeta")
    return MaxcutResult(
        side=side,
        value=value,
        sample=group.vertices,
        seed_cut=group.seed_cut(outcome.coin),
        outcome=BanditOutcome(
            group=group.vertices,
            coin=outcome.coin,
            total_tosses=outcome.total_tosses,
            restarts=outcome.restarts,
            phases_completed=outcome.phases_completed,
        ),
        s=s_eff,
        irregular=irregular,
    )
