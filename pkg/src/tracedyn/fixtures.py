"""Small named examples used by the CLI builtins and the test suite."""

from __future__ import annotations

import math

from .action import PartialAction, free_monoid, rabati, singleton_action, tip_top
from .monoid import MonoidSpec, new_monoid
from .valuation import FibredValuation


def abc_monoid() -> MonoidSpec:
    """Three letters where only ``a`` and ``c`` commute."""
    return new_monoid("abc", [("a", "c")])


def product_monoid() -> MonoidSpec:
    """Direct product of two free monoids on two letters."""
    return new_monoid("abcd", [("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])


def strip4_action() -> PartialAction:
    """Tip-top action of ``abc_monoid``: flips on the 2 x 4 domino strip, letters renamed a, b, c."""
    return tip_top(abc_monoid())


def strip4_family(q: float) -> FibredValuation:
    """One-parameter Markov valuation on the 2 x 4 strip.

    From the empty tiling ``b`` has weight ``q`` and ``a``, ``c`` have weight
    ``p = 1 - sqrt(q)``; removing a letter always has weight 1.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    p = 1.0 - math.sqrt(q)
    table = {
        "1": {"a": p, "b": q, "c": p},
        "a": {"a": 1.0, "c": p},
        "b": {"b": 1.0},
        "c": {"a": p, "c": 1.0},
        "a.c": {"a": 1.0, "c": 1.0},
    }
    return FibredValuation.from_table(strip4_action(), table)


def tip_top_fixtures() -> dict[str, PartialAction]:
    """Tip-top actions whose uniform measure is checked against the clique formula."""
    return {
        "strip4": strip4_action(),
        "free2": tip_top(free_monoid(2)),
        "circular5": rabati(5, circular=True)[1],
        "inline5": rabati(5)[1],
        "product": tip_top(product_monoid()),
    }


def irreducible_fixtures() -> dict[str, PartialAction]:
    out = tip_top_fixtures()
    out["singleton_abc"] = singleton_action(abc_monoid())
    return out
