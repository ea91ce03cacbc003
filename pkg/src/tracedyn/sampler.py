"""Seeded Monte-Carlo runs of the chain of states and cliques.

Random numbers come from numpy's PCG64 generator, seeded explicitly, so a given
(chain, start, length, seed) reproduces the same runs on every platform.
Parallel estimates split the sample count across workers seeded ``seed + i``
and add their counts in worker order.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DeadRow
from .monoid import Trace, leq
from .valuation import ChainSpec

BATCH = 20000


@dataclass(frozen=True)
class SampleRun:
    seed: int
    start: str
    steps: tuple[tuple[str, int], ...]  # (state before, clique)
    prefix: Trace
    states: tuple[str, ...]  # X_0, ..., X_n


@dataclass(frozen=True)
class Estimate:
    value: float
    n_samples: int
    std_error: float

    @classmethod
    def from_count(cls, hits: int, n: int) -> "Estimate":
        p = hits / n
        return cls(p, n, math.sqrt(p * (1 - p) / n))

    def within(self, expected: float, k: float = 4.0) -> bool:
        """True if ``expected`` lies within ``k`` standard errors (exact match when the error is zero)."""
        if self.std_error == 0.0:
            return abs(self.value - expected) <= 1.0 / self.n_samples
        return abs(self.value - expected) <= k * self.std_error


class _Tables:
    """Cumulative transition tables for vectorised sampling."""

    def __init__(self, chain: ChainSpec, start: str):
        n = len(chain.index)
        self.first = self._cumulative(np.array(chain.initials[start], dtype=float))
        self.live = np.ones(n, dtype=bool)
        self.cum = np.zeros((n, n))
        dense = chain.dense()
        for i in range(n):
            if dense[i].sum() <= 0.0:
                self.live[i] = False
            else:
                self.cum[i] = self._cumulative(dense[i])

    @staticmethod
    def _cumulative(p: np.ndarray) -> np.ndarray:
        total = p.sum()
        if total <= 0.0:
            raise DeadRow("initial law has no mass")
        cum = np.cumsum(p / total)
        # guard against round-off at the top: everything past the last atom is 1
        last = int(np.flatnonzero(p > 0)[-1])
        cum[last:] = 2.0
        return cum


def _draw(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    return (u[:, None] < cum).argmax(axis=1)


def _sample_indices(chain: ChainSpec, start: str, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Array ``(size, n)`` of pair indices visited by ``size`` independent runs."""
    out = np.zeros((size, n), dtype=np.int64)
    if n == 0:
        return out
    tables = _Tables(chain, start)
    cur = np.searchsorted(tables.first, rng.random(size), side="right")
    out[:, 0] = cur
    for step in range(1, n):
        if not tables.live[cur].all():
            bad = chain.index[int(cur[~tables.live[cur]][0])]
            raise DeadRow(f"run entered the zero row of pair {bad!r}")
        u = rng.random(size)
        cur = _draw(tables.cum[cur], u)
        out[:, step] = cur
    return out


def sample_batch(chain: ChainSpec, start: str, n: int, size: int, seed: int) -> np.ndarray:
    """Pair indices ``(size, n)`` of independent runs; ``chain.index`` decodes them."""
    rng = np.random.Generator(np.random.PCG64(seed))
    return _sample_indices(chain, start, n, size, rng)


def _clique_runs(chain: ChainSpec, start: str, n: int, size: int, seed: int) -> Counter:
    """Counts of distinct clique sequences of height ``n`` over ``size`` runs."""
    rng = np.random.Generator(np.random.PCG64(seed))
    cliques = np.array([c for _, c in chain.index], dtype=np.int64)
    counts: Counter = Counter()
    done = 0
    while done < size:
        batch = min(BATCH, size - done)
        idx = _sample_indices(chain, start, n, batch, rng)
        seqs, mult = np.unique(cliques[idx], axis=0, return_counts=True)
        for seq, k in zip(seqs, mult):
            counts[tuple(int(c) for c in seq)] += int(k)
        done += batch
    return counts


def sample_prefix(chain: ChainSpec, start: str, n: int, seed: int) -> SampleRun:
    """One run of ``n`` steps from ``start``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = _sample_indices(chain, start, n, 1, rng)[0]
    steps = tuple(chain.index[int(i)] for i in idx)
    # X_i is the state of the (i+1)-th pair; the last one is where the final clique lands
    states = [start] + [chain.index[int(i)][0] for i in idx[1:]]
    if n:
        states.append(chain.after(int(idx[-1])))
    prefix = Trace(tuple(c for _, c in steps))
    return SampleRun(seed, start, steps, prefix, tuple(states))


def _count_worker(args) -> int:
    chain, start, height, size, seed, target, mode = args
    counts = _clique_runs(chain, start, height, size, seed)
    m = chain.monoid
    if mode == "prefix":
        return counts.get(target.cliques, 0)
    return sum(k for seq, k in counts.items() if leq(m, target, Trace(seq)))


def _split(total: int, workers: int) -> list[int]:
    base, extra = divmod(total, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def _estimate(chain, start, x: Trace, n_samples: int, seed: int, mode: str, workers: int) -> Estimate:
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if workers < 1:
        raise ValueError("need at least one worker")
    if x.is_unit():
        return Estimate(1.0, n_samples, 0.0)
    jobs = [
        (chain, start, x.height, size, seed + i, x, mode)
        for i, size in enumerate(_split(n_samples, workers))
        if size
    ]
    if workers == 1:
        hits = [_count_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = list(pool.map(_count_worker, jobs))
    return Estimate.from_count(sum(hits), n_samples)


def estimate_cylinder(chain: ChainSpec, start: str, x: Trace, n_samples: int, seed: int, workers: int = 1) -> Estimate:
    """Empirical frequency of ``x <= Y_h`` with ``h`` the height of ``x``."""
    return _estimate(chain, start, x, n_samples, seed, "cylinder", workers)


def estimate_prefix(chain: ChainSpec, start: str, x: Trace, n_samples: int, seed: int, workers: int = 1) -> Estimate:
    """Empirical frequency of ``Y_h == x`` with ``h`` the height of ``x``."""
    return _estimate(chain, start, x, n_samples, seed, "prefix", workers)


def estimate_many(
    chain: ChainSpec, start: str, targets: list[Trace], n_samples: int, seed: int
) -> dict[Trace, tuple[Estimate, Estimate]]:
    """Cylinder and prefix estimates for several traces, sharing runs per height."""
    out = {}
    m = chain.monoid
    for h in sorted({x.height for x in targets}):
        group = [x for x in targets if x.height == h]
        if h == 0:
            for x in group:
                out[x] = (Estimate(1.0, n_samples, 0.0), Estimate(1.0, n_samples, 0.0))
            continue
        counts = _clique_runs(chain, start, h, n_samples, seed + h)
        for x in group:
            cyl = sum(k for seq, k in counts.items() if leq(m, x, Trace(seq)))
            pre = counts.get(x.cliques, 0)
            out[x] = (Estimate.from_count(cyl, n_samples), Estimate.from_count(pre, n_samples))
    return out
