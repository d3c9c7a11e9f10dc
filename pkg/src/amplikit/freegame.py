"""Labeling solver for free games: complete bipartite constraint systems
with one relation over Sigma x Sigma per edge.

A sampled S in X is a group of coins, one per labeling h: S -> Sigma. The
induced labelings extend h greedily (argmax satisfaction, ties to the
smallest label index); the coin's bias is the exact value of that
labeling, and a toss estimates it on a vertex sample X'. Free-game coins
never fail.

Game file format: JSON {"schema":1, "nx", "ny", "sigma", "relations":
base64} where relations packs the per-edge bit matrices in edge-major
order (x outer, y inner, then the |Sigma| x |Sigma| matrix row-major).
"""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .bandit import BanditOutcome, CoinSource, PhaseSchedule, TossResult, compute_schedule, run_engine
from .errors import BudgetExceeded, NotFound
from .ratios import as_fraction
from .streams import substream

__all__ = [
    "FreeGame",
    "FreeSketch",
    "induced_labeling_Y",
    "induced_labeling_X",
    "game_value",
    "free_toss_coin",
    "find_labeling",
    "build_free_sketch",
    "sketch_g_values",
    "sketch_bias",
    "LabelingResult",
]

DEFAULT_MAX_COINS = 1 << 22


class FreeGame:
    def __init__(self, relations: np.ndarray):
        rel = np.asarray(relations, dtype=bool)
        if rel.ndim != 4 or rel.shape[2] != rel.shape[3]:
            raise ValueError("relations must have shape (nx, ny, sigma, sigma)")
        self.relations = rel
        self.nx, self.ny, self.sigma = rel.shape[0], rel.shape[1], rel.shape[2]

    def to_json(self) -> str:
        packed = base64.b64encode(np.packbits(self.relations, axis=None).tobytes()).decode("ascii")
        return json.dumps(
            {"schema": 1, "nx": self.nx, "ny": self.ny, "sigma": self.sigma, "relations": packed},
            sort_keys=True,
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "FreeGame":
        obj = json.loads(text)
        nx, ny, sigma = int(obj["nx"]), int(obj["ny"]), int(obj["sigma"])
        raw = np.frombuffer(base64.b64decode(obj["relations"]), dtype=np.uint8)
        rel = np.unpackbits(raw, count=nx * ny * sigma * sigma).astype(bool)
        return cls(rel.reshape(nx, ny, sigma, sigma))

    @classmethod
    def load(cls, path) -> "FreeGame":
        return cls.from_json(Path(path).read_text())


def induced_labeling_Y(game: FreeGame, S, h) -> np.ndarray:
    """f_{S,h,Y}: for each y the label maximizing the count of s in S with
    (h(s), label) allowed; ties to the smallest label index."""
    S = [int(s) for s in S]
    h = [int(a) for a in h]
    if len(S) != len(h):
        raise ValueError("h must label exactly S")
    # counts[y, b] = #{s : (h[s], b) in pi_(s, y)}
    counts = game.relations[S, :, h, :].sum(axis=0)
    return counts.argmax(axis=1).astype(np.int64)


def induced_labeling_X(game: FreeGame, S, h, fY=None) -> np.ndarray:
    """f_{S,h,X}: for each x the label maximizing the count of y in Y with
    (label, fY(y)) allowed; same tie rule."""
    if fY is None:
        fY = induced_labeling_Y(game, S, h)
    fY = np.asarray(fY, dtype=np.int64)
    # counts[x, a] = #{y : (a, fY[y]) in pi_(x, y)}
    counts = game.relations[:, np.arange(game.ny), :, fY].sum(axis=0)
    return counts.argmax(axis=1).astype(np.int64)


def game_value(game: FreeGame, fX, fY) -> Fraction:
    fX = np.asarray(fX, dtype=np.int64)
    fY = np.asarray(fY, dtype=np.int64)
    sat = game.relations[np.arange(game.nx)[:, None], np.arange(game.ny)[None, :], fX[:, None], fY[None, :]]
    return Fraction(int(sat.sum()), game.nx * game.ny)


def _g_values(game: FreeGame, fY: np.ndarray, xs) -> np.ndarray:
    """g_{S,h,x} numerators: max over labels of #{y : (label, fY[y]) ok},
    for each x in xs (denominator ny)."""
    fY = np.asarray(fY, dtype=np.int64)
    counts = game.relations[np.ix_(xs, np.arange(game.ny))][:, np.arange(game.ny), :, fY]
    # counts: (len(xs), ny, sigma) -> sum over y, max over label
    return counts.sum(axis=1).max(axis=1).astype(np.int64)


@dataclass(frozen=True)
class FreeToss:
    bias: Fraction
    xprime: tuple[int, ...]


def free_toss_coin(game: FreeGame, S, h, k: int, gamma, rng: np.random.Generator) -> FreeToss:
    """Estimate the coin's bias on X' of ceil((k + |S| log2 sigma)/gamma^2)
    vertices (without replacement, capped at |X|); never fails."""
    gamma = as_fraction(gamma)
    if k < 1:
        raise ValueError("k must be >= 1")
    size = min(game.nx, int(math.ceil((k + len(S) * math.log2(game.sigma)) / float(gamma) ** 2)))
    xprime = tuple(sorted(int(v) for v in rng.choice(game.nx, size=size, replace=False)))
    fY = induced_labeling_Y(game, S, h)
    g = _g_values(game, fY, list(xprime))
    return FreeToss(bias=Fraction(int(g.sum()), game.ny * size), xprime=xprime)


def exact_bias(game: FreeGame, S, h) -> Fraction:
    """Exact coin bias: mean over all x of g_{S,h,x}."""
    fY = induced_labeling_Y(game, S, h)
    g = _g_values(game, fY, list(range(game.nx)))
    return Fraction(int(g.sum()), game.ny * game.nx)


def _index_to_labels(idx: int, s: int, sigma: int) -> tuple[int, ...]:
    out = []
    for _ in range(s):
        idx, r = divmod(idx, sigma)
        out.append(r)
    return tuple(out)


class _FreeGroup:
    __slots__ = ("S",)

    def __init__(self, S):
        self.S = S


class _FreeCoinSource(CoinSource):
    def __init__(self, game, s, gamma, beta):
        self.game = game
        self.s = s
        self.gamma = gamma
        self.beta = beta

    def sample_group(self, rng):
        return _FreeGroup(tuple(sorted(int(v) for v in rng.choice(self.game.nx, size=self.s, replace=False))))

    def coin_count(self, group):
        return self.game.sigma**self.s

    def toss(self, group, coin, count, rng):
        h = _index_to_labels(coin, self.s, self.game.sigma)
        k_inner = max(1, int(math.ceil(self.beta * self.beta * count)))
        t = free_toss_coin(self.game, group.S, h, k_inner, self.gamma, rng)
        return TossResult(heads=t.bias * count, tosses=count)


@dataclass(frozen=True)
class LabelingResult:
    fX: np.ndarray
    fY: np.ndarray
    value: Fraction
    sample: tuple[int, ...]
    h: tuple[int, ...]
    outcome: BanditOutcome
    s: int


def find_labeling(
    game: FreeGame,
    eps0,
    eps,
    seed: int,
    *,
    s: Optional[int] = None,
    certainty: Optional[int] = None,
    schedule: Optional[PhaseSchedule] = None,
    restart_cap: Optional[int] = None,
    final_check: str = "strict",
    hook=None,
    max_coins: int = DEFAULT_MAX_COINS,
) -> LabelingResult:
    """Find a labeling of exact value >= 1 - eps0 - 3*eps (strict mode;
    relaxed subtracts a further 2*gamma), or raise NotFound.

    Caller promises val >= 1 - eps0. Defaults are the published parameters
    (s = ceil(ln(sigma/eps^2)/eps^2), certainty |X|*|Sigma|); the coin
    group has sigma^s coins, so desk-scale runs pass a small `s`.
    """
    eps0 = as_fraction(eps0)
    eps = as_fraction(eps)
    if s is None:
        s = int(math.ceil(math.log(game.sigma / float(eps) ** 2) / float(eps) ** 2))
    s = min(s, game.nx)
    if game.sigma**s > max_coins:
        raise BudgetExceeded(f"sigma^s = {game.sigma}^{s} coins exceed the budget; pass a smaller s")
    if schedule is None:
        n_cert = certainty if certainty is not None else game.nx * game.sigma
        schedule = compute_schedule(n_cert, game.sigma**s, 0, eps)
    gamma = schedule.beta / 80
    source = _FreeCoinSource(game, s, gamma, schedule.beta)
    base = 1 - eps0 - 2 * eps
    outcome = run_engine(
        source,
        schedule,
        lambda i: base - i * schedule.beta,
        seed,
        restart_cap=restart_cap or 64 * schedule.n,
        hook=hook,
    )
    group: _FreeGroup = outcome.group
    h = _index_to_labels(outcome.coin, s, game.sigma)
    fY = induced_labeling_Y(game, group.S, h)
    fX = induced_labeling_X(game, group.S, h, fY)
    value = game_value(game, fX, fY)
    bound = 1 - eps0 - 3 * eps
    if final_check == "relaxed":
        bound -= 2 * gamma
    elif final_check != "strict":
        raise ValueError(f"unknown final_check mode {final_check!r}")
    if value < bound:
        raise NotFound(f"winning labeling has value {value} below the final check")
    return LabelingResult(
        fX=fX,
        fY=fY,
        value=value,
        sample=group.S,
        h=h,
        outcome=BanditOutcome(
            group=group.S,
            coin=outcome.coin,
            total_tosses=outcome.total_tosses,
            restarts=outcome.restarts,
            phases_completed=outcome.phases_completed,
        ),
        s=s,
    )


# -- sketch ---------------------------------------------------------------


@dataclass(frozen=True)
class FreeSketch:
    """Relations restricted to X x R for a sample R of Y."""

    nx: int
    ny: int
    sigma: int
    r_vertices: tuple[int, ...]
    relations: np.ndarray  # (nx, |R|, sigma, sigma)


def free_sketch_size(ny: int, s: int, sigma: int, nx: int, gamma) -> int:
    g = float(as_fraction(gamma))
    return min(ny, int(math.ceil(s * (s + 1) * math.log(sigma) * math.log(nx) / g**2)))


def build_free_sketch(game: FreeGame, s: int, gamma, seed: int) -> FreeSketch:
    """Uniform R of size ceil(s(s+1) ln|Sigma| ln|X| / gamma^2), capped at
    |Y|; keeps only the relations touching R."""
    size = free_sketch_size(game.ny, s, game.sigma, game.nx, gamma)
    rng = substream(seed, "free-sketch")
    r = tuple(sorted(int(v) for v in rng.choice(game.ny, size=size, replace=False)))
    return FreeSketch(
        nx=game.nx,
        ny=game.ny,
        sigma=game.sigma,
        r_vertices=r,
        relations=game.relations[:, list(r)].copy(),
    )


def _sketch_game(sketch: FreeSketch) -> FreeGame:
    return FreeGame(sketch.relations)


def sketch_g_values(sketch: FreeSketch, S, h, xs=None) -> np.ndarray:
    """g^R_{S,h,x} numerators over y in R (denominator |R|), computed from
    the sketch alone: the induced fY is evaluated only on R."""
    sub = _sketch_game(sketch)
    fY_r = induced_labeling_Y(sub, S, h)
    xs = list(range(sketch.nx)) if xs is None else [int(x) for x in xs]
    return _g_values(sub, fY_r, xs)


def sketch_bias(sketch: FreeSketch, S, h, xs=None) -> Fraction:
    """bias^{X,R} (or bias^{X',R} when xs is given)."""
    g = sketch_g_values(sketch, S, h, xs)
    count = sketch.nx if xs is None else len(xs)
    return Fraction(int(g.sum()), len(sketch.r_vertices) * count)
