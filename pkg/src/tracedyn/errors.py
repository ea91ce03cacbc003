"""Exception hierarchy.

Every domain failure raised by the library derives from :class:`TraceDynError`;
the CLI prints the class name so users can match on it.
"""

from __future__ import annotations


class TraceDynError(Exception):
    """Base class for all library errors."""


# monoid construction and traces
class DuplicateLetter(TraceDynError):
    pass


class UnknownLetter(TraceDynError):
    pass


class ReflexivePair(TraceDynError):
    pass


class AlphabetTooSmall(TraceDynError):
    pass


class LimitExceeded(TraceDynError):
    pass


# actions
class ActionError(TraceDynError):
    """Malformed or invalid action description."""


class UnknownState(ActionError):
    pass


class ReservedState(ActionError):
    pass


class TransitionMismatch(ActionError):
    """Transitions are not defined exactly on the enabled (state, letter) pairs."""


class EmptyEnabledSet(ActionError):
    def __init__(self, state):
        super().__init__(f"no letter enabled at state {state!r}")
        self.state = state


class AxiomViolation(ActionError):
    axiom = "?"

    def __init__(self, state, a, b, detail: str = ""):
        msg = f"axiom {self.axiom} fails at state {state!r} for letters {a!r} || {b!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.state = state
        self.a = a
        self.b = b

    @property
    def witness(self):
        return (self.state, self.a, self.b)


class AxiomIViolated(AxiomViolation):
    axiom = "(i)"


class AxiomIIViolated(AxiomViolation):
    axiom = "(ii)"


class InvalidSize(TraceDynError):
    pass


# valuations
class NotAValuation(TraceDynError):
    pass


class InvalidValuation(TraceDynError):
    pass


# uniform measure
class NotIrreducible(TraceDynError):
    pass


class NoRootInUnitInterval(TraceDynError):
    pass


class CocycleDegenerate(TraceDynError):
    pass


class ValidationFailed(TraceDynError):
    pass


# sampling
class DeadRow(TraceDynError):
    pass
