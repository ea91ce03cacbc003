"""Partial and total actions of a trace monoid on a finite state set.

A partial action is stored as a transition table indexed by state and letter,
with :data:`BOT` marking a disabled letter. Completing it adds the sink state
``⊥`` as an explicit last row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    AxiomIIViolated,
    AxiomIViolated,
    EmptyEnabledSet,
    InvalidSize,
    ReservedState,
    TransitionMismatch,
    UnknownState,
)
from .monoid import (
    MonoidSpec,
    Trace,
    bits,
    enumerate_cliques,
    new_monoid,
    parallel,
)

BOT = -1
BOTTOM_LABEL = "⊥"
RESERVED_LABELS = frozenset({"⊥", "bottom"})


@dataclass(frozen=True)
class Violation:
    kind: str  # "empty", "I" or "II"
    state: int
    a: int = -1
    b: int = -1


def axiom_violations(m: MonoidSpec, table: Sequence[Sequence[int]]) -> list[Violation]:
    """Every failure of the partial-action axioms, scanning (state, a, b) exhaustively."""
    out = []
    n_letters = m.alphabet_size
    for s, row in enumerate(table):
        if all(t == BOT for t in row):
            out.append(Violation("empty", s))
            continue
        for a in range(n_letters):
            sa = row[a]
            if sa == BOT:
                continue
            for b in bits(m.indep_masks[a]):
                sb = row[b]
                if sb != BOT:
                    sab = table[sa][b]
                    sba = table[sb][a]
                    if sab == BOT or sba == BOT or sab != sba:
                        out.append(Violation("I", s, a, b))
                elif table[sa][b] != BOT:
                    out.append(Violation("II", s, a, b))
    return out


@dataclass(frozen=True)
class PartialAction:
    """Validated partial action; construction raises on any axiom violation."""

    monoid: MonoidSpec
    states: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    state_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.states:
            raise UnknownState("a partial action needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise UnknownState(f"duplicate state labels in {self.states!r}")
        for s in self.states:
            if s in RESERVED_LABELS:
                raise ReservedState(f"state label {s!r} is reserved for the sink")
        n = len(self.states)
        if len(self.table) != n or any(len(r) != self.monoid.alphabet_size for r in self.table):
            raise ValueError("transition table has the wrong shape")
        for row in self.table:
            for t in row:
                if t != BOT and not 0 <= t < n:
                    raise UnknownState(f"transition target index {t} out of range")
        object.__setattr__(self, "state_index", {s: i for i, s in enumerate(self.states)})
        violations = axiom_violations(self.monoid, self.table)
        if violations:
            raise _violation_error(self, violations[0])

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, state: str | int) -> int:
        if isinstance(state, int):
            return state
        try:
            return self.state_index[state]
        except KeyError:
            raise UnknownState(f"unknown state {state!r}") from None

    def enabled_mask(self, state: str | int) -> int:
        row = self.table[self.index(state)]
        return sum(1 << a for a, t in enumerate(row) if t != BOT)

    def enabled(self, state: str | int) -> tuple[str, ...]:
        return tuple(self.monoid.names[a] for a in bits(self.enabled_mask(state)))

    def step(self, state: str, letter: str) -> str:
        """One-letter step; returns the sink label when the letter is disabled."""
        t = self.table[self.index(state)][self.monoid.letter(letter)]
        return BOTTOM_LABEL if t == BOT else self.states[t]

    def run(self, s: int, word: Iterable[int]) -> int:
        """Index-level fold of ``word`` from state index ``s``; ``BOT`` is absorbing."""
        for a in word:
            if s == BOT:
                return BOT
            s = self.table[s][a]
        return s

    def act_trace(self, s: int, x: Trace) -> int:
        return self.run(s, x.word())

    def describe(self) -> dict:
        names = self.monoid.names
        return {
            "states": list(self.states),
            "enabled": {s: list(self.enabled(s)) for s in self.states},
            "transitions": {
                s: {names[a]: self.states[t] for a, t in enumerate(row) if t != BOT}
                for s, row in zip(self.states, self.table)
            },
        }

    @cached_property
    def reachability(self) -> "ReachabilityReport":
        return reachability(self)


def _violation_error(pa: PartialAction, v: Violation):
    state = pa.states[v.state]
    names = pa.monoid.names
    if v.kind == "empty":
        return EmptyEnabledSet(state)
    if v.kind == "I":
        return AxiomIViolated(state, names[v.a], names[v.b])
    return AxiomIIViolated(state, names[v.a], names[v.b])


def build_partial_action(
    monoid: MonoidSpec,
    states: Sequence[str],
    enabled: Mapping[str, Iterable[str]],
    transitions: Mapping[str, Mapping[str, str]],
) -> PartialAction:
    """Validated partial action from labels.

    ``transitions`` must be defined exactly on the enabled (state, letter) pairs.
    """
    states = tuple(states)
    index = {s: i for i, s in enumerate(states)}
    for s in list(enabled) + list(transitions):
        if s not in index:
            raise UnknownState(f"unknown state {s!r}")
    table = []
    for s in states:
        row = [BOT] * monoid.alphabet_size
        en = {monoid.letter(a) for a in enabled.get(s, ())}
        moves = transitions.get(s, {})
        for a_name, target in moves.items():
            a = monoid.letter(a_name)
            if a not in en:
                raise TransitionMismatch(f"transition {s!r} --{a_name}--> given but {a_name!r} is not enabled")
            if target not in index:
                raise UnknownState(f"unknown target state {target!r}")
            row[a] = index[target]
        for a in en:
            if row[a] == BOT:
                raise TransitionMismatch(f"letter {monoid.names[a]!r} enabled at {s!r} but has no transition")
        table.append(tuple(row))
    return PartialAction(monoid, states, tuple(table))


@dataclass(frozen=True)
class TotalAction:
    """Total action on the states plus the sink, which is the last index."""

    monoid: MonoidSpec
    states: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]

    @property
    def bottom(self) -> int:
        return len(self.states) - 1

    def index(self, state: str | int) -> int:
        if isinstance(state, int):
            return state
        try:
            return self.states.index(state)
        except ValueError:
            raise UnknownState(f"unknown state {state!r}") from None

    def run(self, s: int, word: Iterable[int]) -> int:
        for a in word:
            s = self.table[s][a]
        return s

    def commutation_failures(self) -> list[tuple[int, int, int]]:
        """(state, a, b) with a || b where the two one-letter maps do not commute."""
        out = []
        for a in range(self.monoid.alphabet_size):
            for b in bits(self.monoid.indep_masks[a]):
                if b <= a:
                    continue
                for s in range(len(self.states)):
                    if self.table[self.table[s][a]][b] != self.table[self.table[s][b]][a]:
                        out.append((s, a, b))
        return out


def complete_total(pa: PartialAction) -> TotalAction:
    bottom = pa.size
    rows = [tuple(bottom if t == BOT else t for t in row) for row in pa.table]
    rows.append((bottom,) * pa.monoid.alphabet_size)
    ta = TotalAction(pa.monoid, pa.states + (BOTTOM_LABEL,), tuple(rows))
    bad = ta.commutation_failures()
    if bad:
        # unreachable for a validated partial action
        raise AssertionError(f"completion does not commute: {bad[:3]}")
    return ta


def act(action: PartialAction | TotalAction, state: str, x: Trace) -> str:
    """State reached from ``state`` along ``x``; the sink label if it gets disabled."""
    if isinstance(action, TotalAction):
        return action.states[action.run(action.index(state), x.word())]
    if state == BOTTOM_LABEL:
        return BOTTOM_LABEL
    t = action.act_trace(action.index(state), x)
    return BOTTOM_LABEL if t == BOT else action.states[t]


def language_membership(pa: PartialAction, state: str, x: Trace) -> bool:
    return pa.act_trace(pa.index(state), x) != BOT


@dataclass(frozen=True)
class ReachabilityReport:
    leads_to: frozenset[tuple[str, str]]
    essential_states: tuple[str, ...]
    irreducible_components: tuple[tuple[str, ...], ...]
    is_irreducible: bool


def reachability(pa: PartialAction) -> ReachabilityReport:
    n = pa.size
    succ = [sorted({t for t in row if t != BOT}) for row in pa.table]
    reach = []
    for s in range(n):
        # reflexive: the unit trace leads every state to itself
        seen = {s}
        stack = list(succ[s])
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(succ[u])
        reach.append(seen)
    essential = [s for s in range(n) if all(s in reach[t] for t in reach[s])]
    components = []
    for s in essential:
        comp = tuple(sorted(reach[s]))
        if comp not in components:
            components.append(comp)
    components.sort()
    leads = frozenset((pa.states[s], pa.states[t]) for s in range(n) for t in reach[s])
    return ReachabilityReport(
        leads_to=leads,
        essential_states=tuple(pa.states[s] for s in essential),
        irreducible_components=tuple(tuple(pa.states[s] for s in c) for c in components),
        is_irreducible=all(len(reach[s]) == n for s in range(n)),
    )


# built-in generators

def tip_top(m: MonoidSpec) -> PartialAction:
    """Action of ``m`` on its own cliques: a letter is removed if present, added if parallel."""
    cliques = enumerate_cliques(m)
    index = {c: i for i, c in enumerate(cliques)}
    table = []
    for c in cliques:
        row = []
        for a in range(m.alphabet_size):
            bit = 1 << a
            if c & bit:
                row.append(index[c & ~bit])
            elif parallel(m, bit, c):
                row.append(index[c | bit])
            else:
                row.append(BOT)
        table.append(tuple(row))
    return PartialAction(m, tuple(m.clique_name(c) for c in cliques), tuple(table))


def rabati_monoid(n: int, circular: bool = False) -> MonoidSpec:
    if circular:
        if n < 4:
            raise InvalidSize(f"circular Rabati strip needs n >= 4, got {n}")
        names = [f"a{i}" for i in range(n)]
        pairs = [
            (names[i], names[j])
            for i in range(n)
            for j in range(i + 1, n)
            if min(j - i, n - (j - i)) >= 2
        ]
    else:
        if n < 3:
            raise InvalidSize(f"in-line Rabati strip needs n >= 3 (two flips), got {n}")
        names = [f"a{i}" for i in range(1, n)]
        pairs = [(names[i], names[j]) for i in range(n - 1) for j in range(i + 2, n - 1)]
    return new_monoid(names, pairs)


def rabati(n: int, circular: bool = False) -> tuple[MonoidSpec, PartialAction]:
    """Flip action on domino tilings of the 2 x n strip (in-line or circular)."""
    m = rabati_monoid(n, circular)
    return m, tip_top(m)


def free_monoid(k: int = 2) -> MonoidSpec:
    names = [chr(ord("a") + i) for i in range(k)] if k <= 26 else [f"x{i}" for i in range(k)]
    return new_monoid(names, [])


def singleton_action(m: MonoidSpec, label: str = "*") -> PartialAction:
    """Trivial action of ``m`` on a one-point set, every letter enabled."""
    return PartialAction(m, (label,), ((0,) * m.alphabet_size,))


def acceptor_action(incidence: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> PartialAction:
    """Free-monoid action of an acceptor graph: one letter per admissible edge i -> j."""
    k = len(incidence)
    names = list(names) if names is not None else [f"s{i}" for i in range(k)]
    edges = [(i, j) for i in range(k) for j in range(k) if incidence[i][j]]
    m = new_monoid([f"{names[i]}>{names[j]}" for i, j in edges], [])
    table = []
    for i in range(k):
        table.append(tuple(j if src == i else BOT for src, j in edges))
    return PartialAction(m, tuple(names), tuple(table))
