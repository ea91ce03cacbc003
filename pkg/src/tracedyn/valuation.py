"""Fibred valuations on a partial action and the chain of states-and-cliques.

A valuation is given by one nonnegative parameter per (state, letter). The sink
carries the zero parameter row, so a letter leading to the sink may still have a
positive weight, but any clique that sends mass to the sink is reported as a
violation because no probability law lives there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from .action import BOT, BOTTOM_LABEL, PartialAction
from .errors import InvalidValuation, NotAValuation, UnknownLetter
from .monoid import MonoidSpec, Trace, bits, cf_compatible, graded_mobius_transform, mobius_transform, popcount

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class ConcurrencyReport:
    passed: bool
    # (state, a, b, lhs, rhs) for each failing equation
    witnesses: tuple[tuple[str, str, str, float, float], ...] = ()


@dataclass(frozen=True)
class MobiusReport:
    transforms: dict[str, dict[str, float]]
    # (state, clique, value) for each failed condition
    violations: tuple[tuple[str, str, float], ...]
    tol: float

    @property
    def valid(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class FibredValuation:
    """Parameters ``params[state][letter]``; missing pairs are zero."""

    action: PartialAction
    params: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        pa = self.action
        if len(self.params) != pa.size or any(len(r) != pa.monoid.alphabet_size for r in self.params):
            raise ValueError("parameter table has the wrong shape")
        for row in self.params:
            for v in row:
                if not v >= 0.0:
                    raise ValueError(f"parameters must be nonnegative, got {v!r}")

    @classmethod
    def from_table(cls, action: PartialAction, table: Mapping[str, Mapping[str, float]]) -> "FibredValuation":
        rows = [[0.0] * action.monoid.alphabet_size for _ in range(action.size)]
        for state, row in table.items():
            s = action.index(state)
            for letter, value in row.items():
                rows[s][action.monoid.letter(letter)] = float(value)
        return cls(action, tuple(tuple(r) for r in rows))

    def to_table(self) -> dict[str, dict[str, float]]:
        names = self.action.monoid.names
        return {
            s: {names[a]: v for a, v in enumerate(row) if v != 0.0 or self.action.table[i][a] != BOT}
            for i, (s, row) in enumerate(zip(self.action.states, self.params))
        }

    def lam(self, s: int, a: int) -> float:
        return 0.0 if s == BOT else self.params[s][a]

    @property
    def monoid(self):
        return self.action.monoid

    def f(self, s: int, word) -> float:
        """Product of parameters along ``word`` starting at state index ``s``."""
        table = self.action.table
        acc = 1.0
        for a in word:
            if s == BOT:
                return 0.0
            acc *= self.params[s][a]
            s = table[s][a]
        return acc

    def support_respecting(self) -> bool:
        return all(
            v == 0.0
            for row, prow in zip(self.action.table, self.params)
            for t, v in zip(row, prow)
            if t == BOT
        )

    @cached_property
    def clique_values(self) -> tuple[dict[int, float], ...]:
        """f restricted to cliques, per state index."""
        cliques = self.monoid.cliques
        return tuple({c: self.f(s, bits(c)) for c in cliques} for s in range(self.action.size))

    @cached_property
    def clique_transforms(self) -> tuple[dict[int, float], ...]:
        """Möbius transform h of f on cliques, per state index."""
        return tuple(mobius_transform(self.monoid, fv) for fv in self.clique_values)

    @cached_property
    def concurrency(self) -> ConcurrencyReport:
        return check_concurrency(self)

    def h(self, s: int, c: int) -> float:
        return 0.0 if s == BOT else self.clique_transforms[s][c]

    def g(self, s: int, c: int) -> float:
        """Mass of the non-empty cliques that may follow ``c`` at state index ``s``."""
        if s == BOT:
            return 0.0
        m = self.monoid
        h = self.clique_transforms[s]
        return sum(h[d] for d in m.cliques[1:] if cf_compatible(m, c, d))


def valuation_from_labels(action: PartialAction, table: Mapping[str, Mapping[str, float]]) -> FibredValuation:
    return FibredValuation.from_table(action, table)


def check_concurrency(F: FibredValuation, tol: float = DEFAULT_TOL) -> ConcurrencyReport:
    pa = F.action
    m = pa.monoid
    names = m.names
    witnesses = []
    for s in range(pa.size):
        for a in range(m.alphabet_size):
            for b in bits(m.indep_masks[a]):
                if b <= a:
                    continue
                lhs = F.lam(s, a) * F.lam(pa.table[s][a], b)
                rhs = F.lam(s, b) * F.lam(pa.table[s][b], a)
                if abs(lhs - rhs) > tol:
                    witnesses.append((pa.states[s], names[a], names[b], lhs, rhs))
    return ConcurrencyReport(not witnesses, tuple(witnesses))


def eval_valuation(F: FibredValuation, state: str, x: Trace) -> float:
    """f_state(x), computed along the normal form of ``x``."""
    if not F.concurrency.passed:
        raise NotAValuation(f"parameters break {len(F.concurrency.witnesses)} concurrency equation(s)")
    return F.f(F.action.index(state), x.word())


def eval_word(F: FibredValuation, state: str, word) -> float:
    """Product of parameters along an explicit word, letters as names or indices."""
    m = F.monoid
    idx = [m.letter(a) if isinstance(a, str) else a for a in word]
    for a in idx:
        if not 0 <= a < m.alphabet_size:
            raise UnknownLetter(f"letter index {a} out of range")
    return F.f(F.action.index(state), idx)


def mobius_report(F: FibredValuation, tol: float = DEFAULT_TOL) -> MobiusReport:
    pa = F.action
    m = pa.monoid
    transforms = {}
    violations = []
    for s, state in enumerate(pa.states):
        h = F.clique_transforms[s]
        transforms[state] = {m.clique_name(c): h[c] for c in m.cliques}
        if abs(h[0]) > tol:
            violations.append((state, "1", h[0]))
        for c in m.cliques[1:]:
            if h[c] < -tol:
                violations.append((state, m.clique_name(c), h[c]))
            elif h[c] > tol and pa.run(s, bits(c)) == BOT:
                violations.append((state, m.clique_name(c), h[c]))
    return MobiusReport(transforms, tuple(violations), tol)


def _require_valid(F: FibredValuation, tol: float) -> None:
    if not F.concurrency.passed:
        raise InvalidValuation("concurrency equations fail")
    report = mobius_report(F, tol)
    if not report.valid:
        state, clique, value = report.violations[0]
        raise InvalidValuation(
            f"Möbius condition fails at state {state!r}, clique {clique!r} (h = {value:.3g})"
        )


@dataclass(frozen=True)
class ChainSpec:
    """Markov chain on (state, non-empty clique) pairs.

    ``initials[a]`` is the law of the first pair when starting from state ``a``;
    ``rows[i]`` maps successor indices to probabilities; rows listed in
    ``dead_rows`` are all-zero and can only be entered with probability zero.
    """

    monoid: MonoidSpec
    start: str
    index: tuple[tuple[str, int], ...]
    initials: dict[str, tuple[float, ...]]
    targets: tuple[str, ...]
    rows: tuple[dict[int, float], ...]
    g: dict[tuple[str, int], float]
    dead_rows: frozenset[int]
    position: dict[tuple[str, int], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "position", {k: i for i, k in enumerate(self.index)})

    @property
    def initial(self) -> tuple[float, ...]:
        return self.initials[self.start]

    def dense(self) -> np.ndarray:
        n = len(self.index)
        out = np.zeros((n, n))
        for i, row in enumerate(self.rows):
            for j, p in row.items():
                out[i, j] = p
        return out

    def after(self, i: int) -> str:
        """State reached once the clique of pair ``i`` is applied (the sink label if disabled)."""
        return self.targets[i]

    def P(self, src: tuple[str, int], dst: tuple[str, int]) -> float:
        return self.rows[self.position[src]].get(self.position[dst], 0.0)


def chain_spec(F: FibredValuation, start: str, tol: float = DEFAULT_TOL) -> ChainSpec:
    _require_valid(F, tol)
    pa = F.action
    m = pa.monoid
    nonempty = m.cliques[1:]
    s0 = pa.index(start)
    index = tuple((state, c) for state in pa.states for c in nonempty)
    position = {k: i for i, k in enumerate(index)}

    g = {}
    for s, state in enumerate(pa.states):
        for c in nonempty:
            g[(state, c)] = F.g(s, c)

    initials = {}
    for s, state in enumerate(pa.states):
        law = [0.0] * len(index)
        for c in nonempty:
            law[position[(state, c)]] = max(F.h(s, c), 0.0)
        initials[state] = tuple(law)

    rows = []
    dead = set()
    targets = []
    for i, (state, c) in enumerate(index):
        s = pa.index(state)
        target = pa.run(s, bits(c))
        targets.append(BOTTOM_LABEL if target == BOT else pa.states[target])
        if target == BOT:
            rows.append({})
            dead.add(i)
            continue
        gval = g[(pa.states[target], c)]
        if gval <= tol:
            if F.h(s, c) > tol:
                raise InvalidValuation(
                    f"g vanishes after clique {m.clique_name(c)!r} from {state!r} but the clique has mass"
                )
            rows.append({})
            dead.add(i)
            continue
        row = {}
        for d in nonempty:
            if cf_compatible(m, c, d):
                hv = F.h(target, d)
                if hv > 0.0:
                    row[position[(pa.states[target], d)]] = hv / gval
        rows.append(row)
    return ChainSpec(
        monoid=m,
        start=pa.states[s0],
        index=index,
        initials=initials,
        targets=tuple(targets),
        rows=tuple(rows),
        g=g,
        dead_rows=frozenset(dead),
    )


def prefix_probability(F: FibredValuation, state: str, x: Trace, tol: float = DEFAULT_TOL) -> float:
    """Probability that the first ``height(x)`` cliques multiply to exactly ``x``."""
    _require_valid(F, tol)
    s = F.action.index(state)
    return graded_mobius_transform(F.monoid, lambda y: F.f(s, y.word()), x)


def clique_identity_residual(F: FibredValuation, state: str, clique: int) -> float:
    """|f_b(c) g_{b.c}(c) - h_b(c)| for a non-empty clique ``c`` at state ``b``."""
    if clique == 0:
        raise ValueError("clique must be non-empty")
    s = F.action.index(state)
    target = F.action.run(s, bits(clique))
    return abs(F.f(s, bits(clique)) * F.g(target, clique) - F.h(s, clique))


def clique_size(c: int) -> int:
    return popcount(c)
