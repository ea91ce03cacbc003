"""Trace monoids, partial actions on finite state sets, and Markov measures on their executions."""

from __future__ import annotations

from .action import (
    BOT,
    BOTTOM_LABEL,
    PartialAction,
    TotalAction,
    act,
    acceptor_action,
    build_partial_action,
    complete_total,
    free_monoid,
    language_membership,
    rabati,
    rabati_monoid,
    reachability,
    singleton_action,
    tip_top,
)
from .document import ActionDocument, document_for
from .errors import TraceDynError
from .monoid import (
    UNIT,
    MonoidSpec,
    Trace,
    concat,
    enumerate_traces,
    growth_coefficients,
    leq,
    mobius_polynomial,
    new_monoid,
    normalize,
    parse_trace,
)
from .polynomial import IntPolynomial, PolyMatrix
from .sampler import Estimate, SampleRun, estimate_cylinder, estimate_prefix, sample_batch, sample_prefix
from .uniform import (
    CharacteristicData,
    characteristic_data,
    characteristic_root,
    mobius_matrix,
    theta_polynomial,
    uniform_valuation,
)
from .valuation import (
    ChainSpec,
    FibredValuation,
    chain_spec,
    check_concurrency,
    eval_valuation,
    eval_word,
    mobius_report,
    prefix_probability,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
