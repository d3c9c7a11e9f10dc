"""Biased-coin engine.

Three solver variants share one phase loop: the gap variant (fixed
threshold 1-eta-zeta/2), the sliding-threshold variant (1-eta-i*beta) and
the grouped variant with simulated, possibly failing tosses. A coin source
supplies groups of coins; tossing a coin k times returns an aggregate
TossResult. Head-fraction comparisons are exact rationals throughout.

Randomness discipline: a run owns a root seed; the group pick of restart r
draws from substream (seed, "group", r) and the toss batch of coin c in
phase i of restart r draws from (seed, "toss", r, i, c). Tossing coins of
one phase in parallel therefore reproduces the sequential transcript bit
for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .errors import BudgetExceeded
from .ratios import as_fraction
from .streams import substream

__all__ = [
    "PhaseSchedule",
    "TossResult",
    "BanditOutcome",
    "CoinSource",
    "BernoulliCoinSource",
    "compute_schedule",
    "find_biased_coin_given_gap",
    "find_biased_coin",
    "find_biased_coin_in_group",
    "run_engine",
]

# i_f beyond this would overflow 2**i toss counts in int64 accounting.
_MAX_IF = 62


@dataclass(frozen=True)
class PhaseSchedule:
    """Doubling schedule: phase i tosses each coin 2**i times, i0 <= i <= i_f."""

    i0: int
    i_f: int
    beta: Fraction
    eta: Fraction
    zeta: Fraction
    n: int
    g: int

    def __post_init__(self):
        if not 1 <= self.i0 <= self.i_f:
            raise ValueError(f"invalid phase range [{self.i0}, {self.i_f}]")
        if self.beta * self.i_f > self.zeta:
            raise ValueError("beta * i_f must not exceed zeta")

    @property
    def phases(self) -> range:
        return range(self.i0, self.i_f + 1)

    def budget(self) -> int:
        """Toss budget of one full attempt, per coin."""
        return sum(1 << i for i in self.phases)


def compute_schedule(n, g, eta, zeta, *, i0_slack: int = 3, if_slack: int = 1) -> PhaseSchedule:
    """Phase bounds for certainty exponent n and group size g.

    i_f = ceil(log2((n + log2 g)/zeta^2) + 2*log2 log2((n + log2 g)/zeta)) + if_slack
    i0  = ceil(log2(1/zeta^2)) + i0_slack                  (g = 1)
          ceil(log2(log2(g)/beta^2)) + i0_slack            (g > 1)

    For g > 1, i0 depends on beta = zeta/i_f, so i_f is raised until
    i0 <= i_f; the slack keeps the first-phase budget dominating log2(g).
    The loglog term is folded into a single ceiling so that doubling n
    never more than doubles the budget (a split ceiling can jump by 4x).
    """
    zeta = as_fraction(zeta)
    eta = as_fraction(eta)
    if not 0 < zeta < 1:
        raise ValueError("zeta must lie in (0, 1)")
    if not 0 <= eta < 1:
        raise ValueError("eta must lie in [0, 1)")
    if n < 1 or g < 1:
        raise ValueError("n and g must be >= 1")

    zf = float(zeta)
    log_g = math.log2(g) if g > 1 else 0.0
    arg = (n + log_g) / zf**2
    argp = max((n + log_g) / zf, 4.0)
    i_f = math.ceil(math.log2(arg) + 2.0 * math.log2(math.log2(argp))) + if_slack

    if g == 1:
        i0 = math.ceil(math.log2(1.0 / zf**2)) + i0_slack
        i0 = max(i0, 1)
        i_f = max(i_f, i0)
    else:
        while True:
            beta_f = zf / i_f
            i0 = math.ceil(math.log2(log_g / beta_f**2)) + i0_slack
            i0 = max(i0, 1)
            if i0 <= i_f:
                break
            i_f = i0
    if i_f > _MAX_IF:
        raise ValueError(
            f"schedule needs i_f = {i_f} > {_MAX_IF}: zeta too small for 64-bit toss counts"
        )
    return PhaseSchedule(i0=i0, i_f=i_f, beta=zeta / i_f, eta=eta, zeta=zeta, n=n, g=g)


@dataclass(frozen=True)
class TossResult:
    """Aggregate of `tosses` tosses. `heads` may be an exact Fraction for
    simulated tosses that estimate a head fraction directly; failed batches
    report tosses = 0 and are ignored by the phase maximum."""

    heads: Any
    tosses: int
    failed: bool = False

    def fraction(self) -> Fraction:
        if self.failed or self.tosses == 0:
            return Fraction(0)
        return Fraction(self.heads, self.tosses) if isinstance(self.heads, int) else as_fraction(self.heads) / self.tosses


@dataclass(frozen=True)
class BanditOutcome:
    group: Any
    coin: int
    total_tosses: int
    restarts: int
    phases_completed: int


class CoinSource:
    """Supplier of coin groups.

    Finite sources expose `group_count` and inherit uniform group sampling;
    application sources (combinatorially many groups) override
    `sample_group` and return an opaque group handle.
    """

    group_count: int

    def sample_group(self, rng: np.random.Generator) -> Any:
        return int(rng.integers(0, self.group_count))

    def coin_count(self, group) -> int:
        raise NotImplementedError

    def toss(self, group, coin: int, count: int, rng: np.random.Generator) -> TossResult:
        raise NotImplementedError


class BernoulliCoinSource(CoinSource):
    """Reference source: independent Bernoulli coins with known biases.

    `biases` is (groups, g) or flat (coins,) for ungrouped use. The oracles
    true_bias / is_faulty / group_bias are for tests and reports only; the
    solver never consults them.
    """

    def __init__(self, biases, faulty=None, batch_fail_prob: float = 0.0):
        b = np.asarray(biases, dtype=float)
        if b.ndim == 1:  # ungrouped pile: N groups of one coin each
            b = b.reshape(-1, 1)
        if b.ndim != 2:
            raise ValueError("biases must be 1-D or 2-D")
        if np.any((b < 0) | (b > 1)):
            raise ValueError("biases must lie in [0, 1]")
        self.biases = b
        if faulty is None:
            self.faulty = np.zeros(b.shape, dtype=bool)
        else:
            f = np.asarray(faulty, dtype=bool)
            self.faulty = f.reshape(-1, 1) if f.ndim == 1 else f
        if self.faulty.shape != b.shape:
            raise ValueError("faulty mask shape mismatch")
        self.batch_fail_prob = float(batch_fail_prob)

    @property
    def group_count(self) -> int:
        return self.biases.shape[0]

    @property
    def group_size(self) -> int:
        return self.biases.shape[1]

    def coin_count(self, group) -> int:
        return self.biases.shape[1]

    def toss(self, group, coin, count, rng):
        if self.faulty[group, coin]:
            return TossResult(heads=0, tosses=0, failed=True)
        if self.batch_fail_prob and rng.random() < self.batch_fail_prob:
            return TossResult(heads=0, tosses=0, failed=True)
        heads = int(rng.binomial(count, self.biases[group, coin]))
        return TossResult(heads=heads, tosses=count)

    # -- oracles (tests only) ------------------------------------------
    def true_bias(self, group, coin) -> float:
        return float(self.biases[group, coin])

    def is_faulty(self, group, coin) -> bool:
        return bool(self.faulty[group, coin])

    def group_bias(self, group) -> float:
        alive = ~self.faulty[group]
        return float(self.biases[group][alive].max()) if alive.any() else 0.0


def run_engine(
    source: CoinSource,
    schedule: PhaseSchedule,
    threshold_at: Callable[[int], Fraction],
    seed: int,
    *,
    restart_cap: int,
    hook: Optional[Callable[[dict], None]] = None,
    parallelism: int = 1,
) -> BanditOutcome:
    total_tosses = 0
    for restart in range(restart_cap):
        group = source.sample_group(substream(seed, "group", restart))
        m = source.coin_count(group)

        def toss_one(coin: int, i: int) -> TossResult:
            return source.toss(group, coin, 1 << i, substream(seed, "toss", restart, i, coin))

        survived = True
        final_results: Sequence[TossResult] = ()
        for i in schedule.phases:
            if parallelism > 1 and m > 1:
                with ThreadPoolExecutor(max_workers=parallelism) as pool:
                    results = list(pool.map(lambda c: toss_one(c, i), range(m)))
            else:
                results = [toss_one(c, i) for c in range(m)]
            total_tosses += sum(r.tosses for r in results)
            alive = [(c, r.fraction()) for c, r in enumerate(results) if not r.failed]
            best = max((f for _, f in alive), default=Fraction(0))
            if hook is not None:
                hook(
                    {
                        "type": "phase",
                        "restart": restart,
                        "phase": i,
                        "k": 1 << i,
                        "max_fraction": best,
                        "alive_coins": len(alive),
                    }
                )
            if not alive or best < threshold_at(i):
                survived = False
                break
            final_results = alive
        if survived:
            # winner: maximum final-phase head fraction, ties to lowest index
            coin = max(final_results, key=lambda cf: (cf[1], -cf[0]))[0]
            outcome = BanditOutcome(
                group=group,
                coin=coin,
                total_tosses=total_tosses,
                restarts=restart,
                phases_completed=schedule.i_f - schedule.i0 + 1,
            )
            if hook is not None:
                hook({"type": "return", "outcome": outcome})
            return outcome
        if hook is not None:
            hook({"type": "restart", "restart": restart})
    raise BudgetExceeded(f"no group survived within {restart_cap} restarts")


def _default_cap(n: int) -> int:
    return 64 * n


def find_biased_coin_given_gap(
    source, n, eta, zeta, seed, *, schedule=None, restart_cap=None, hook=None, parallelism=1
) -> BanditOutcome:
    """Gap variant: every coin has bias >= 1-eta or <= 1-eta-zeta, and the
    threshold stays at 1-eta-zeta/2 in every phase."""
    sched = schedule or compute_schedule(n, 1, eta, zeta)
    fixed = 1 - sched.eta - sched.zeta / 2
    return run_engine(
        source,
        sched,
        lambda i: fixed,
        seed,
        restart_cap=restart_cap or _default_cap(n),
        hook=hook,
        parallelism=parallelism,
    )


def find_biased_coin(
    source, n, eta, zeta, seed, *, schedule=None, restart_cap=None, hook=None, parallelism=1
) -> BanditOutcome:
    """Sliding-threshold variant: accept phase i at head fraction >= 1-eta-i*beta."""
    sched = schedule or compute_schedule(n, 1, eta, zeta)
    return run_engine(
        source,
        sched,
        lambda i: 1 - sched.eta - i * sched.beta,
        seed,
        restart_cap=restart_cap or _default_cap(n),
        hook=hook,
        parallelism=parallelism,
    )


def find_biased_coin_in_group(
    source, n, g, eta, zeta, seed, *, schedule=None, restart_cap=None, hook=None, parallelism=1
) -> BanditOutcome:
    """Grouped variant with simulated tosses: the phase passes if the
    maximum head fraction over the group's non-failed coins meets
    1-eta-i*beta; a phase where every toss fails restarts."""
    sched = schedule or compute_schedule(n, g, eta, zeta)
    return run_engine(
        source,
        sched,
        lambda i: 1 - sched.eta - i * sched.beta,
        seed,
        restart_cap=restart_cap or _default_cap(n),
        hook=hook,
        parallelism=parallelism,
    )
