"""Trace monoids, cliques, Cartier-Foata normal forms and Möbius transforms.

Letters are integer indices into ``MonoidSpec.names``. A clique is an ``int``
bitmask of pairwise independent letters; the empty clique is ``0``. A
:class:`Trace` is stored as its Cartier-Foata normal form, a tuple of
non-empty cliques, so structural equality is trace equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    AlphabetTooSmall,
    DuplicateLetter,
    LimitExceeded,
    ReflexivePair,
    UnknownLetter,
)
from .polynomial import IntPolynomial

DEFAULT_LIMIT = 12


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits(mask: int) -> tuple[int, ...]:
    """Letter indices set in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class MonoidSpec:
    """Alphabet with an irreflexive, symmetric independence relation.

    ``independence`` holds unordered index pairs as 2-element frozensets.
    Use :func:`new_monoid` to build one from labels.
    """

    names: tuple[str, ...]
    independence: frozenset[frozenset[int]] = frozenset()
    indep_masks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.names)
        if n < 2:
            raise AlphabetTooSmall(f"alphabet needs at least 2 letters, got {n}")
        if len(set(self.names)) != n:
            raise DuplicateLetter(f"duplicate letter names in {self.names!r}")
        masks = [0] * n
        for pair in self.independence:
            if len(pair) != 2:
                raise ReflexivePair(f"independence pair {sorted(pair)!r} is reflexive")
            i, j = sorted(pair)
            if not (0 <= i < n and 0 <= j < n):
                raise UnknownLetter(f"independence pair {(i, j)!r} out of range")
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        object.__setattr__(self, "indep_masks", tuple(masks))

    @property
    def alphabet_size(self) -> int:
        return len(self.names)

    @property
    def letter_names(self) -> tuple[str, ...]:
        return self.names

    @property
    def full_mask(self) -> int:
        return (1 << len(self.names)) - 1

    def dep_mask(self, a: int) -> int:
        """Letters dependent on ``a``, including ``a`` itself."""
        return self.full_mask & ~self.indep_masks[a]

    def independent(self, a: int, b: int) -> bool:
        return bool(self.indep_masks[a] >> b & 1)

    def letter(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownLetter(f"unknown letter {name!r}") from None

    @cached_property
    def cliques(self) -> tuple[int, ...]:
        return tuple(enumerate_cliques(self))

    @cached_property
    def clique_index(self) -> dict[int, int]:
        return {c: i for i, c in enumerate(self.cliques)}

    def clique_name(self, c: int) -> str:
        return ".".join(self.names[i] for i in bits(c)) if c else "1"

    def parse_clique(self, text: str) -> int:
        text = text.strip()
        if text in ("", "1"):
            return 0
        mask = 0
        for part in text.split("."):
            mask |= 1 << self.letter(part.strip())
        if not is_clique(self, mask):
            raise ValueError(f"{text!r} is not a clique")
        return mask


def new_monoid(names: Sequence[str], pairs: Iterable[tuple[str, str]] = ()) -> MonoidSpec:
    """Validated monoid from letter labels and independent label pairs."""
    names = tuple(names)
    if len(names) < 2:
        raise AlphabetTooSmall(f"alphabet needs at least 2 letters, got {len(names)}")
    seen = set()
    for n in names:
        if n in seen:
            raise DuplicateLetter(f"letter {n!r} listed twice")
        seen.add(n)
    index = {n: i for i, n in enumerate(names)}
    indep = set()
    for a, b in pairs:
        for x in (a, b):
            if x not in index:
                raise UnknownLetter(f"unknown letter {x!r} in independence pair")
        if a == b:
            raise ReflexivePair(f"pair ({a}, {b}) is reflexive")
        indep.add(frozenset((index[a], index[b])))
    return MonoidSpec(names, frozenset(indep))


def is_clique(m: MonoidSpec, mask: int) -> bool:
    for a in bits(mask):
        if mask & ~(1 << a) & ~m.indep_masks[a]:
            return False
    return True


def enumerate_cliques(m: MonoidSpec) -> list[int]:
    """All cliques including the empty one, sorted by size then letter indices."""
    out = [0]
    n = m.alphabet_size

    def extend(mask: int, candidates: int, start: int):
        for a in range(start, n):
            if candidates >> a & 1:
                c = mask | (1 << a)
                out.append(c)
                extend(c, candidates & m.indep_masks[a], a + 1)

    extend(0, m.full_mask, 0)
    out.sort(key=lambda c: (popcount(c), bits(c)))
    return out


def clique_relation(m: MonoidSpec, c: int, c2: int, kind: str = "cf") -> bool:
    """``kind='parallel'``: c x c2 within I. ``kind='cf'``: Cartier-Foata c -> c2."""
    if kind == "parallel":
        return all((m.indep_masks[a] & c2) == c2 for a in bits(c))
    if kind == "cf":
        return all(c & m.dep_mask(b) for b in bits(c2))
    raise ValueError(f"unknown clique relation {kind!r}")


def parallel(m: MonoidSpec, c: int, c2: int) -> bool:
    return clique_relation(m, c, c2, "parallel")


def cf_compatible(m: MonoidSpec, c: int, c2: int) -> bool:
    return clique_relation(m, c, c2, "cf")


@dataclass(frozen=True)
class Trace:
    """A trace in Cartier-Foata normal form; ``Trace()`` is the unit."""

    cliques: tuple[int, ...] = ()

    @property
    def length(self) -> int:
        return sum(popcount(c) for c in self.cliques)

    @property
    def height(self) -> int:
        return len(self.cliques)

    def __len__(self) -> int:
        return self.length

    def is_unit(self) -> bool:
        return not self.cliques

    def word(self) -> tuple[int, ...]:
        """A representative word: cliques in order, letters ascending inside each."""
        return tuple(a for c in self.cliques for a in bits(c))

    def first_clique(self) -> int:
        return self.cliques[0] if self.cliques else 0

    def prefix(self, n: int) -> "Trace":
        return Trace(self.cliques[:n])


UNIT = Trace()


def _append_letter(m: MonoidSpec, cliques: list[int], a: int) -> None:
    dep = m.dep_mask(a)
    j = len(cliques) - 1
    while j >= 0 and not (cliques[j] & dep):
        j -= 1
    if j + 1 < len(cliques):
        cliques[j + 1] |= 1 << a
    else:
        cliques.append(1 << a)


def normalize(m: MonoidSpec, word: Iterable[int | str]) -> Trace:
    """Cartier-Foata normal form of the trace represented by ``word``.

    Letters may be given as indices or names. Each new letter falls onto the
    topmost clique holding a letter it depends on and joins the clique above.
    """
    cliques: list[int] = []
    n = m.alphabet_size
    for a in word:
        if isinstance(a, str):
            a = m.letter(a)
        elif not 0 <= a < n:
            raise UnknownLetter(f"letter index {a} out of range")
        _append_letter(m, cliques, a)
    return Trace(tuple(cliques))


def append_letter(m: MonoidSpec, x: Trace, a: int) -> Trace:
    cliques = list(x.cliques)
    _append_letter(m, cliques, a)
    return Trace(tuple(cliques))


def concat(m: MonoidSpec, x: Trace, y: Trace) -> Trace:
    cliques = list(x.cliques)
    for a in y.word():
        _append_letter(m, cliques, a)
    return Trace(tuple(cliques))


def clique_trace(c: int) -> Trace:
    return Trace((c,)) if c else UNIT


def is_normal_form(m: MonoidSpec, cliques: Sequence[int]) -> bool:
    if any(c == 0 or not is_clique(m, c) for c in cliques):
        return False
    return all(cf_compatible(m, c, d) for c, d in zip(cliques, cliques[1:]))


def reverse(m: MonoidSpec, x: Trace) -> Trace:
    return normalize(m, reversed(x.word()))


def left_quotient(m: MonoidSpec, x: Trace, y: Trace) -> Trace | None:
    """The unique ``z`` with ``y = x.z``, or ``None`` if ``x`` does not divide ``y``."""
    rest = y
    for a in x.word():
        if not rest.first_clique() >> a & 1:
            return None
        word = list(rest.word())
        word.remove(a)  # first occurrence lies in the first clique
        rest = normalize(m, word)
    return rest


def leq(m: MonoidSpec, x: Trace, y: Trace) -> bool:
    return left_quotient(m, x, y) is not None


def right_quotient(m: MonoidSpec, y: Trace, z: Trace) -> Trace | None:
    """The unique ``x`` with ``y = x.z``, or ``None``."""
    q = left_quotient(m, reverse(m, z), reverse(m, y))
    return None if q is None else reverse(m, q)


def lub(m: MonoidSpec, x: Trace, y: Trace) -> Trace | None:
    """Least upper bound of ``x`` and ``y`` for left divisibility, or ``None``.

    Walks the letters of ``x`` against the residual of ``y``: a letter of ``x``
    either consumes a minimal occurrence in the residual, or must commute with
    every letter left in it.
    """
    rest = y
    for a in x.word():
        if rest.first_clique() >> a & 1:
            word = list(rest.word())
            word.remove(a)
            rest = normalize(m, word)
            continue
        letters = 0
        for c in rest.cliques:
            letters |= c
        if letters & m.dep_mask(a):
            return None
    return concat(m, x, rest)


@dataclass(frozen=True)
class OrderReport:
    leq: bool
    compatible: bool
    lub: Trace | None


def trace_order(m: MonoidSpec, x: Trace, y: Trace) -> OrderReport:
    join = lub(m, x, y)
    return OrderReport(leq=leq(m, x, y), compatible=join is not None, lub=join)


def mobius_polynomial(m: MonoidSpec) -> IntPolynomial:
    deg = max(popcount(c) for c in m.cliques)
    coeffs = [0] * (deg + 1)
    for c in m.cliques:
        k = popcount(c)
        coeffs[k] += (-1) ** k
    return IntPolynomial(tuple(coeffs))


def mobius_transform(m: MonoidSpec, f: Mapping[int, float]) -> dict[int, float]:
    """h(c) = sum over cliques c' >= c of (-1)^(|c'|-|c|) f(c')."""
    out = {}
    for c in m.cliques:
        k = popcount(c)
        acc = 0.0
        for d in m.cliques:
            if d & c == c:
                acc += (-1) ** (popcount(d) - k) * f[d]
        out[c] = acc
    return out


def graded_mobius_transform(m: MonoidSpec, f: Callable[[Trace], float] | Mapping[Trace, float], x: Trace) -> float:
    """Graded Möbius transform of ``f`` evaluated at ``x``."""
    fn = f.__getitem__ if isinstance(f, Mapping) else f
    if x.height == 0:
        base, top = UNIT, 0
    else:
        base, top = Trace(x.cliques[:-1]), x.cliques[-1]
    k = popcount(top)
    acc = 0.0
    for c in m.cliques:
        if c & top == top:
            acc += (-1) ** (popcount(c) - k) * fn(concat(m, base, clique_trace(c)))
    return acc


def traces_of_height(m: MonoidSpec, n: int) -> Iterator[Trace]:
    """All traces of height exactly ``n``, as chains of Cartier-Foata compatible cliques."""
    nonempty = m.cliques[1:]
    if n == 0:
        yield UNIT
        return

    def rec(prefix: tuple[int, ...]):
        if len(prefix) == n:
            yield Trace(prefix)
            return
        for c in nonempty:
            if not prefix or cf_compatible(m, prefix[-1], c):
                yield from rec(prefix + (c,))

    yield from rec(())


def height_class(m: MonoidSpec, x: Trace) -> list[Trace]:
    """Traces of the same height as ``x`` lying above it; the cliques when ``x`` is the unit."""
    if x.is_unit():
        return [clique_trace(c) for c in m.cliques]
    return [y for y in traces_of_height(m, x.height) if leq(m, x, y)]


def _sort_key(x: Trace):
    return (x.length, x.height, tuple(bits(c) for c in x.cliques))


def iter_levels(m: MonoidSpec, max_len: int) -> Iterator[set[Trace]]:
    """Sets of traces of length 0, 1, ..., max_len, built by appending letters and deduplicating."""
    level = {UNIT}
    yield level
    for _ in range(max_len):
        nxt = set()
        for x in level:
            for a in range(m.alphabet_size):
                nxt.add(append_letter(m, x, a))
        level = nxt
        yield level


def enumerate_traces(
    m: MonoidSpec,
    max_len: int,
    prefix: Trace | None = None,
    same_height: bool = False,
    limit: int = DEFAULT_LIMIT,
) -> list[Trace]:
    """All traces of length at most ``max_len``, optionally above ``prefix``.

    With ``prefix`` and ``same_height`` the result is the height class of the
    prefix, truncated at ``max_len``.
    """
    if max_len > limit:
        raise LimitExceeded(f"max_len {max_len} exceeds enumeration limit {limit}")
    if prefix is not None and same_height:
        found = [y for y in height_class(m, prefix) if y.length <= max_len]
    else:
        found = [x for level in iter_levels(m, max_len) for x in level]
        if prefix is not None:
            found = [y for y in found if leq(m, prefix, y)]
    return sorted(found, key=_sort_key)


def growth_coefficients(m: MonoidSpec, max_len: int, limit: int = DEFAULT_LIMIT) -> list[int]:
    """Number of traces of each length 0..max_len, by brute-force enumeration."""
    if max_len > limit:
        raise LimitExceeded(f"max_len {max_len} exceeds enumeration limit {limit}")
    return [len(level) for level in iter_levels(m, max_len)]


def count_normal_forms(m: MonoidSpec, max_len: int) -> list[int]:
    """Number of traces of each length, counting Cartier-Foata clique chains.

    Polynomial-time companion to :func:`growth_coefficients`.
    """
    nonempty = m.cliques[1:]
    succ = {c: [d for d in nonempty if cf_compatible(m, c, d)] for c in nonempty}
    # ways[k][c]: chains of total length k whose last clique is c
    ways = [dict.fromkeys(nonempty, 0) for _ in range(max_len + 1)]
    for c in nonempty:
        if popcount(c) <= max_len:
            ways[popcount(c)][c] += 1
    for k in range(1, max_len + 1):
        for c, w in ways[k].items():
            if w:
                for d in succ[c]:
                    j = k + popcount(d)
                    if j <= max_len:
                        ways[j][d] += w
    return [1] + [sum(ways[k].values()) for k in range(1, max_len + 1)]


_TOKEN = re.compile(r"^\s*([^\s^]+?)(?:\^(\d+))?\s*$")


def parse_word(m: MonoidSpec, text: str) -> list[int]:
    """Dot-separated letter labels, with optional ``^k`` powers; ``1`` or empty is the unit."""
    text = text.strip()
    if text in ("", "1"):
        return []
    word = []
    for part in text.split("."):
        match = _TOKEN.match(part)
        if not match:
            raise UnknownLetter(f"cannot parse letter {part!r}")
        a = m.letter(match.group(1))
        word.extend([a] * int(match.group(2) or 1))
    return word


def parse_trace(m: MonoidSpec, text: str) -> Trace:
    return normalize(m, parse_word(m, text))


def format_trace(m: MonoidSpec, x: Trace) -> str:
    """Normal form as ``a -> b -> a.c``; the unit prints as ``1``."""
    if x.is_unit():
        return "1"
    return " -> ".join(m.clique_name(c) for c in x.cliques)


def format_word(m: MonoidSpec, x: Trace) -> str:
    return ".".join(m.names[a] for a in x.word()) if x.cliques else "1"


def all_words(m: MonoidSpec, length: int) -> Iterator[tuple[int, ...]]:
    from itertools import product

    return product(range(m.alphabet_size), repeat=length)


def independent_pairs(m: MonoidSpec) -> list[tuple[int, int]]:
    return [(a, b) for a, b in combinations(range(m.alphabet_size), 2) if m.independent(a, b)]
