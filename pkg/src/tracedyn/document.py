"""JSON documents describing a monoid, an action and optionally a valuation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .action import PartialAction, build_partial_action, complete_total
from .errors import ActionError, UnknownLetter, UnknownState
from .monoid import MonoidSpec, new_monoid
from .valuation import FibredValuation


@dataclass
class ActionDocument:
    alphabet: list[str]
    independence: list[list[str]]
    states: list[str]
    enabled: dict[str, list[str]]
    transitions: dict[str, dict[str, str]]
    valuation: dict[str, dict[str, float]] | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj: dict) -> "ActionDocument":
        missing = [k for k in ("alphabet", "independence", "states", "enabled", "transitions") if k not in obj]
        if missing:
            raise ActionError(f"document lacks field(s) {missing}")
        known = {"alphabet", "independence", "states", "enabled", "transitions", "valuation"}
        return cls(
            alphabet=list(obj["alphabet"]),
            independence=[list(p) for p in obj["independence"]],
            states=list(obj["states"]),
            enabled={k: list(v) for k, v in obj["enabled"].items()},
            transitions={k: dict(v) for k, v in obj["transitions"].items()},
            valuation=obj.get("valuation"),
            extra={k: v for k, v in obj.items() if k not in known},
        )

    def to_json(self) -> dict:
        out = {
            "alphabet": self.alphabet,
            "independence": self.independence,
            "states": self.states,
            "enabled": self.enabled,
            "transitions": self.transitions,
        }
        if self.valuation is not None:
            out["valuation"] = self.valuation
        out.update(self.extra)
        return out

    def monoid(self) -> MonoidSpec:
        for pair in self.independence:
            if len(pair) != 2:
                raise ActionError(f"independence entries must be pairs, got {pair!r}")
        return new_monoid(self.alphabet, [tuple(p) for p in self.independence])

    def action(self) -> PartialAction:
        return build_partial_action(self.monoid(), self.states, self.enabled, self.transitions)

    def fibred_valuation(self, pa: PartialAction | None = None) -> FibredValuation | None:
        if self.valuation is None:
            return None
        pa = pa if pa is not None else self.action()
        for state, row in self.valuation.items():
            if state not in pa.state_index:
                raise UnknownState(f"valuation names unknown state {state!r}")
            for letter in row:
                if letter not in pa.monoid.names:
                    raise UnknownLetter(f"valuation names unknown letter {letter!r}")
        return FibredValuation.from_table(pa, self.valuation)


def document_for(pa: PartialAction, valuation: FibredValuation | None = None) -> ActionDocument:
    m = pa.monoid
    names = m.names
    desc = pa.describe()
    return ActionDocument(
        alphabet=list(names),
        independence=[[names[a], names[b]] for a in range(m.alphabet_size) for b in range(a + 1, m.alphabet_size) if m.independent(a, b)],
        states=desc["states"],
        enabled=desc["enabled"],
        transitions=desc["transitions"],
        valuation=valuation.to_table() if valuation is not None else None,
    )


def monoid_from_json(obj: dict) -> MonoidSpec:
    if "alphabet" not in obj:
        raise ActionError("monoid document lacks 'alphabet'")
    return new_monoid(list(obj["alphabet"]), [tuple(p) for p in obj.get("independence", [])])


def total_action_table(pa: PartialAction) -> dict[str, dict[str, str]]:
    ta = complete_total(pa)
    names = pa.monoid.names
    return {s: {names[a]: ta.states[t] for a, t in enumerate(row)} for s, row in zip(ta.states, ta.table)}
