"""Approximate clique via sampled sub-cliques and simulated coin tosses,
plus the R-sketch and the oblivious single-toss verifier (OVCCT).

A sampled U is a group of coins, one per sub-clique U' of U with
|U'| >= (rho/2)|U|. The coin's bias is the mean, over the rho|V| vertices
of Gamma(U') with most neighbors inside Gamma(U'), of those neighbor
fractions; a simulated toss estimates it on a vertex sample V'. Coins with
|Gamma(U')| < rho|V| are faulty and their tosses fail.

All head fractions, densities and verifier comparisons are exact
rationals. Selection ties break by ascending vertex index.
"""

from __future__ import annotations

import base64
import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .bandit import BanditOutcome, CoinSource, PhaseSchedule, TossResult, compute_schedule, run_engine
from .errors import BudgetExceeded, NotFound
from .graphs import DenseGraph
from .ratios import as_fraction
from .streams import substream

__all__ = [
    "gamma_neighbors",
    "find_approx_clique_const_error",
    "clique_coin_toss",
    "find_approximate_clique",
    "build_sketch",
    "ovcct",
    "SketchR",
    "CliqueToss",
    "CliqueResult",
    "bias_exact",
    "bias_subset",
    "tilde_f_counts",
    "tilde_bias",
    "density_exact",
]

log = logging.getLogger(__name__)

DEFAULT_MAX_U = 16  # enumerating subsets of U: 2^u masks


def gamma_neighbors(G: DenseGraph, uprime) -> np.ndarray:
    """Boolean mask of Gamma(U'): vertices adjacent to every u in U'
    other than themselves (members satisfy the self requirement vacuously).
    Empty U' yields all of V."""
    uprime = sorted(int(v) for v in uprime)
    if not uprime:
        return np.ones(G.n, dtype=bool)
    cnt = G.adjacency[uprime].sum(axis=0)
    mask = cnt == len(uprime)
    members = np.zeros(G.n, dtype=bool)
    members[uprime] = True
    mask |= members & (cnt == len(uprime) - 1)
    return mask


def _top_count(rho: Fraction, n: int) -> int:
    return int(math.ceil(rho * n))


def _top_by_count(counts: np.ndarray, candidates: np.ndarray, k: int) -> np.ndarray:
    """First k of `candidates` ordered by descending count, ties by index."""
    order = np.lexsort((candidates, -counts[candidates]))
    return candidates[order][:k]


def f_counts(G: DenseGraph, gamma_mask: np.ndarray) -> np.ndarray:
    """Per-vertex count of neighbors inside Gamma(U')."""
    return (G.adjacency[:, gamma_mask]).sum(axis=1).astype(np.int64)


def _mean_fraction(counts_sum: int, gamma_size: int, k: int) -> Fraction:
    # mean of k selected f_v values (missing entries pad as 0)
    if gamma_size == 0 or k == 0:
        return Fraction(0)
    return Fraction(int(counts_sum), gamma_size * k)


def bias_exact(G: DenseGraph, uprime, rho) -> Fraction:
    """Mean neighbor fraction over the top-ceil(rho|V|) set of Gamma(U')."""
    rho = as_fraction(rho)
    mask = gamma_neighbors(G, uprime)
    counts = f_counts(G, mask)
    k = _top_count(rho, G.n)
    pool = np.flatnonzero(mask)
    chosen = _top_by_count(counts, pool, k)
    return _mean_fraction(counts[chosen].sum(), int(mask.sum()), k)


def bias_subset(G: DenseGraph, uprime, rho, vprime) -> Fraction:
    """bias restricted to the sample V' (selection within V' cap Gamma)."""
    rho = as_fraction(rho)
    mask = gamma_neighbors(G, uprime)
    counts = f_counts(G, mask)
    vprime = np.asarray(sorted(int(v) for v in vprime), dtype=np.int64)
    k = _top_count(rho, len(vprime))
    pool = vprime[mask[vprime]]
    chosen = _top_by_count(counts, pool, k)
    return _mean_fraction(counts[chosen].sum(), int(mask.sum()), k)


def density_exact(G: DenseGraph, vertices) -> Fraction:
    verts = sorted(int(v) for v in vertices)
    k = len(verts)
    if k < 2:
        return Fraction(1)
    sub = G.adjacency[np.ix_(verts, verts)]
    return Fraction(int(np.triu(sub, 1).sum()), k * (k - 1) // 2)


def _pad_set(G: DenseGraph, chosen: np.ndarray, mask: np.ndarray, k: int) -> np.ndarray:
    """Pad a short selection with the lowest-index vertices outside
    Gamma(U'). The published construction pads with zero-degree dummies;
    returned sets must consist of real vertices, so we take concrete
    stand-ins (never reached on conforming planted runs)."""
    if len(chosen) >= k:
        return chosen
    extra = np.flatnonzero(~mask)
    extra = extra[~np.isin(extra, chosen)][: k - len(chosen)]
    return np.concatenate([chosen, extra])


def _subclique_masks(G: DenseGraph, u_verts: tuple[int, ...], rho: Fraction) -> list[int]:
    """Bitmasks of sub-cliques U' of U with |U'| >= (rho/2)|U|, ascending."""
    u = len(u_verts)
    rows = G.adjacency[np.ix_(u_verts, u_verts)]
    rowbits = [int(sum(1 << j for j in range(u) if rows[i, j])) for i in range(u)]
    min_sz = rho * u / 2
    out = []
    for mask in range(1, 1 << u):
        sz = mask.bit_count()
        if sz < min_sz:
            continue
        m = mask
        ok = True
        while m:
            i = (m & -m).bit_length() - 1
            if rowbits[i] & mask != mask & ~(1 << i):
                ok = False
                break
            m &= m - 1
        if ok:
            out.append(mask)
    return out


@dataclass(frozen=True)
class CliqueToss:
    """Simulated toss of the coin for U': fails iff |Gamma(U')| < rho|V|."""

    failed: bool
    bias: Optional[Fraction]
    vprime: Optional[tuple[int, ...]]
    gamma_size: int
    tosses: int


def clique_coin_toss(G: DenseGraph, uprime, rho, k: int, gamma, rng: np.random.Generator) -> CliqueToss:
    """Sample V' of ceil(k/(rho*gamma^2)) vertices (without replacement,
    capped at |V|) and return the head fraction bias^{V'}."""
    rho = as_fraction(rho)
    gamma = as_fraction(gamma)
    if k < 1:
        raise ValueError("k must be >= 1")
    mask = gamma_neighbors(G, uprime)
    gsize = int(mask.sum())
    if gsize < rho * G.n:
        return CliqueToss(failed=True, bias=None, vprime=None, gamma_size=gsize, tosses=0)
    size = min(G.n, int(math.ceil(Fraction(k) / (rho * gamma * gamma))))
    vprime = tuple(sorted(int(v) for v in rng.choice(G.n, size=size, replace=False)))
    counts = f_counts(G, mask)
    varr = np.asarray(vprime, dtype=np.int64)
    pool = varr[mask[varr]]
    kk = _top_count(rho, size)
    chosen = _top_by_count(counts, pool, kk)
    bias = _mean_fraction(counts[chosen].sum(), gsize, kk)
    return CliqueToss(failed=False, bias=bias, vprime=vprime, gamma_size=gsize, tosses=k)


def find_approx_clique_const_error(
    G: DenseGraph, rho, eps, seed: int, *, k0=None, max_u: int = DEFAULT_MAX_U
) -> np.ndarray:
    """Constant-error baseline: one sample U, full enumeration of its
    sub-cliques, exact f_v over all of V; returns the first top-rho|V| set
    of density >= 1 - 2*eps/rho, else raises NotFound."""
    rho = as_fraction(rho)
    eps = as_fraction(eps)
    k0 = Fraction(100) / (eps * eps) if k0 is None else as_fraction(k0)
    u = int(math.ceil(k0 / rho))
    if u > max_u:
        raise BudgetExceeded(f"|U| = {u} implies 2^{u} sub-cliques; pass k0 to shrink it")
    u = min(u, G.n)
    rng = substream(seed, "const-error")
    u_verts = tuple(sorted(int(v) for v in rng.choice(G.n, size=u, replace=False)))
    k = _top_count(rho, G.n)
    bound = 1 - 2 * eps / rho
    for cm in _subclique_masks(G, u_verts, rho):
        uprime = tuple(v for j, v in enumerate(u_verts) if (cm >> j) & 1)
        mask = gamma_neighbors(G, uprime)
        counts = f_counts(G, mask)
        chosen = _top_by_count(counts, np.flatnonzero(mask), k)
        chosen = _pad_set(G, chosen, mask, k)
        if density_exact(G, chosen) >= bound:
            return np.sort(chosen)
    raise NotFound("no sampled sub-clique yielded a dense enough set")


class _CliqueGroup:
    __slots__ = ("u_verts", "coins")

    def __init__(self, u_verts, coins):
        self.u_verts = u_verts
        self.coins = coins  # list of sub-clique bitmasks

    def uprime(self, coin: int) -> tuple[int, ...]:
        m = self.coins[coin]
        return tuple(v for j, v in enumerate(self.u_verts) if (m >> j) & 1)


class _CliqueCoinSource(CoinSource):
    def __init__(self, G, u, rho, gamma, beta):
        self.G = G
        self.u = u
        self.rho = rho
        self.gamma = gamma
        self.beta = beta

    def sample_group(self, rng):
        u_verts = tuple(sorted(int(v) for v in rng.choice(self.G.n, size=self.u, replace=False)))
        return _CliqueGroup(u_verts, _subclique_masks(self.G, u_verts, self.rho))

    def coin_count(self, group):
        return len(group.coins)

    def toss(self, group, coin, count, rng):
        k_inner = max(1, int(math.ceil(self.beta * self.beta * count)))
        t = clique_coin_toss(self.G, group.uprime(coin), self.rho, k_inner, self.gamma, rng)
        if t.failed:
            return TossResult(heads=0, tosses=0, failed=True)
        return TossResult(heads=t.bias * count, tosses=count)


@dataclass(frozen=True)
class CliqueResult:
    vertices: np.ndarray
    density: Fraction
    sample: tuple[int, ...]
    sub_clique: tuple[int, ...]
    outcome: BanditOutcome
    u: int


def find_approximate_clique(
    G: DenseGraph,
    rho,
    eps,
    seed: int,
    *,
    u: Optional[int] = None,
    certainty: Optional[int] = None,
    schedule: Optional[PhaseSchedule] = None,
    restart_cap: Optional[int] = None,
    final_check: str = "strict",
    hook=None,
    max_u: int = DEFAULT_MAX_U,
) -> CliqueResult:
    """Amplified solver: find a sub-clique coin of high bias, then return
    its top-ceil(rho|V|) set if the exact density clears the final check
    (strict: 1 - 3*eps/rho; relaxed: 1 - (3*eps + 18*gamma)/rho)."""
    rho = as_fraction(rho)
    eps = as_fraction(eps)
    if u is None:
        u = int(math.ceil(100 / (eps * eps * rho)))
    if u > max_u:
        raise BudgetExceeded(f"|U| = {u} implies 2^{u} coins; pass u explicitly")
    u = min(u, G.n)
    if schedule is None:
        n_cert = certainty if certainty is not None else G.n
        schedule = compute_schedule(n_cert, 1 << u, 0, eps)
    gamma = schedule.beta / 100
    source = _CliqueCoinSource(G, u, rho, gamma, schedule.beta)
    base = 1 - 2 * eps
    outcome = run_engine(
        source,
        schedule,
        lambda i: base - i * schedule.beta,
        seed,
        restart_cap=restart_cap or 64 * schedule.n,
        hook=hook,
    )
    group: _CliqueGroup = outcome.group
    uprime = group.uprime(outcome.coin)
    mask = gamma_neighbors(G, uprime)
    counts = f_counts(G, mask)
    k = _top_count(rho, G.n)
    chosen = _top_by_count(counts, np.flatnonzero(mask), k)
    chosen = _pad_set(G, chosen, mask, k)
    density = density_exact(G, chosen)
    if final_check == "strict":
        bound = 1 - 3 * eps / rho
    elif final_check == "relaxed":
        bound = 1 - (3 * eps + 18 * gamma) / rho
    else:
        raise ValueError(f"unknown final_check mode {final_check!r}")
    if density < bound:
        raise NotFound(f"winner density {density} below the final-check bound")
    return CliqueResult(
        vertices=np.sort(chosen),
        density=density,
        sample=group.u_verts,
        sub_clique=uprime,
        outcome=BanditOutcome(
            group=group.u_verts,
            coin=outcome.coin,
            total_tosses=outcome.total_tosses,
            restarts=outcome.restarts,
            phases_completed=outcome.phases_completed,
        ),
        u=u,
    )


# -- sketch and oblivious verification ----------------------------------


@dataclass(frozen=True)
class SketchR:
    """All edges touching the vertex sample R: rows[i] is the adjacency
    row of R[i] over the full vertex set."""

    n: int
    r_vertices: tuple[int, ...]
    rows: np.ndarray

    def to_json(self) -> str:
        packed = base64.b64encode(np.packbits(self.rows, axis=None).tobytes()).decode("ascii")
        return json.dumps(
            {"schema": 1, "n": self.n, "R": list(self.r_vertices), "rows": packed},
            sort_keys=True,
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def from_json(cls, text: str) -> "SketchR":
        obj = json.loads(text)
        n = int(obj["n"])
        r = tuple(int(v) for v in obj["R"])
        raw = np.frombuffer(base64.b64decode(obj["rows"]), dtype=np.uint8)
        rows = np.unpackbits(raw, count=len(r) * n).astype(bool).reshape(len(r), n)
        return cls(n=n, r_vertices=r, rows=rows)

    @classmethod
    def load(cls, path) -> "SketchR":
        return cls.from_json(Path(path).read_text())


def sketch_size(n: int, u: int, rho, gamma, c_r=4) -> int:
    rho = as_fraction(rho)
    gamma = as_fraction(gamma)
    return min(n, int(math.ceil(as_fraction(c_r) * u * math.log(n) / (rho * gamma * gamma))))


def build_sketch(G: DenseGraph, u: int, rho, gamma, seed: int, *, c_r=4) -> SketchR:
    """Uniform R of size ceil(c_r * u * ln|V| / (rho * gamma^2)), capped at
    |V|; stores the R x V bipartite adjacency."""
    size = sketch_size(G.n, u, rho, gamma, c_r)
    rng = substream(seed, "sketch")
    r = tuple(sorted(int(v) for v in rng.choice(G.n, size=size, replace=False)))
    return SketchR(n=G.n, r_vertices=r, rows=G.adjacency[list(r)].copy())


def _r_gamma_mask(sketch: SketchR, uprime) -> np.ndarray:
    """Mask over R of the vertices in R cap Gamma(U')."""
    uprime = sorted(int(v) for v in uprime)
    if not uprime:
        return np.ones(len(sketch.r_vertices), dtype=bool)
    cnt = sketch.rows[:, uprime].sum(axis=1)
    members = np.isin(np.asarray(sketch.r_vertices), uprime)
    return (cnt == len(uprime)) | (members & (cnt == len(uprime) - 1))


def tilde_f_counts(sketch: SketchR, uprime, vertices) -> tuple[np.ndarray, int]:
    """(neighbor counts of `vertices` inside Gamma(U') cap R, |Gamma cap R|).
    Computed from the sketch alone."""
    rmask = _r_gamma_mask(sketch, uprime)
    verts = np.asarray(sorted(int(v) for v in vertices), dtype=np.int64)
    counts = sketch.rows[rmask][:, verts].sum(axis=0).astype(np.int64)
    return counts, int(rmask.sum())


def tilde_bias(sketch: SketchR, uprime, rho, vprime) -> Fraction:
    """Mean tilde_f over the top-ceil(rho|V'|) vertices of V' (unrestricted
    to Gamma, matching the verifier's selection)."""
    rho = as_fraction(rho)
    vprime = sorted(int(v) for v in vprime)
    counts, rsize = tilde_f_counts(sketch, uprime, vprime)
    k = _top_count(rho, len(vprime))
    varr = np.asarray(vprime, dtype=np.int64)
    order = np.lexsort((varr, -counts))
    take = min(k, len(varr))
    total = int(counts[order[:take]].sum())
    if rsize == 0 or k == 0:
        return Fraction(0)
    return Fraction(total, rsize * k)


def ovcct(sketch: SketchR, uprime, rho, k: int, gamma, vprime) -> str:
    """Oblivious verifier for one clique coin toss.

    Returns "fail" iff |R cap Gamma(U')| < (1-gamma)*rho*|R|, else
    "accept" iff |tilde_bias^{V'} - tilde_bias^R| <= 18*gamma, else
    "reject". Deterministic given (sketch, U', V')."""
    rho = as_fraction(rho)
    gamma = as_fraction(gamma)
    rmask = _r_gamma_mask(sketch, uprime)
    r_count = len(sketch.r_vertices)
    if int(rmask.sum()) < (1 - gamma) * rho * r_count:
        return "fail"
    tb_v = tilde_bias(sketch, uprime, rho, vprime)
    tb_r = tilde_bias(sketch, uprime, rho, sketch.r_vertices)
    return "accept" if abs(tb_v - tb_r) <= 18 * gamma else "reject"
