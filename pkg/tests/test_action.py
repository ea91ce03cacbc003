from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from tracedyn.action import (
    BOT,
    BOTTOM_LABEL,
    PartialAction,
    acceptor_action,
    act,
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
from tracedyn.errors import (
    AxiomIViolated,
    AxiomViolation,
    EmptyEnabledSet,
    InvalidSize,
    ReservedState,
    TransitionMismatch,
    UnknownLetter,
    UnknownState,
)
from tracedyn.fixtures import abc_monoid, product_monoid, strip4_action
from tracedyn.monoid import UNIT, all_words, concat, enumerate_traces, leq, new_monoid, normalize, parse_trace

TIP_TOP_MONOIDS = {
    "abc": abc_monoid(),
    "free2": free_monoid(2),
    "product": product_monoid(),
    "inline5": rabati_monoid(5),
    "circular5": rabati_monoid(5, circular=True),
}


def labels(pa):
    return pa.describe()


def test_tip_top_examples():
    pa = strip4_action()
    assert pa.enabled("a") == ("a", "c")
    assert pa.step("1", "a") == "a" and pa.step("a", "a") == "1"
    f = tip_top(free_monoid(2))
    assert f.enabled("1") == ("a", "b") and f.enabled("a") == ("a",) and f.enabled("b") == ("b",)


@pytest.mark.parametrize("name", sorted(TIP_TOP_MONOIDS))
def test_tip_top_definition(name):
    m = TIP_TOP_MONOIDS[name]
    pa = tip_top(m)
    assert len(pa.states) == len(m.cliques)
    for c in m.cliques:
        s = pa.index(m.clique_name(c))
        for a in range(m.alphabet_size):
            bit = 1 << a
            t = pa.table[s][a]
            if c & bit:
                assert pa.states[t] == m.clique_name(c & ~bit)
            elif all(m.independent(a, b) for b in range(m.alphabet_size) if c >> b & 1):
                assert pa.states[t] == m.clique_name(c | bit)
            else:
                assert t == BOT
    assert pa.reachability.is_irreducible


def test_rabati_generator():
    m, pa = rabati(4)
    assert m.alphabet_size == 3 and len(pa.states) == 5
    assert m.independent(0, 2) and not m.independent(0, 1)
    m7, _ = rabati(7)
    assert m7.alphabet_size == 6
    mc, _ = rabati(5, circular=True)
    assert mc.alphabet_size == 5
    # neighbours on the cycle, including the wrap-around pair, do not commute
    assert not mc.independent(0, 4) and mc.independent(0, 2)
    for bad in [(2, False), (3, True), (2, True)]:
        with pytest.raises(InvalidSize):
            rabati(*bad)


def test_singleton_and_completion():
    m = abc_monoid()
    one = singleton_action(m)
    ta = complete_total(one)
    assert ta.states == ("*", BOTTOM_LABEL)
    assert all(ta.table[0][a] == 0 for a in range(3))
    assert not ta.commutation_failures()
    assert one.reachability.is_irreducible

    ta = complete_total(strip4_action())
    assert len(ta.states) == 6
    assert all(t == ta.bottom for t in ta.table[ta.bottom])


def test_acceptor_completion():
    pa = acceptor_action([[1, 1], [1, 0]], ["x", "y"])
    ta = complete_total(pa)
    y = ta.index("y")
    assert ta.states[ta.run(y, [pa.monoid.letter("x>y")])] == BOTTOM_LABEL
    assert ta.states[ta.run(y, [pa.monoid.letter("y>x")])] == "x"


def test_act_examples():
    pa = strip4_action()
    m = pa.monoid
    assert act(pa, "1", parse_trace(m, "a.b")) == BOTTOM_LABEL
    for s in pa.states:
        assert act(pa, s, UNIT) == s
        if s != "1":
            assert act(pa, s, parse_trace(m, s)) == "1"
    assert language_membership(pa, "1", parse_trace(m, "a.c"))
    assert not language_membership(pa, "1", parse_trace(m, "a.b"))
    assert language_membership(pa, "b", UNIT)


@pytest.mark.parametrize("name", ["abc", "product", "inline5"])
def test_action_is_representative_independent(name):
    pa = tip_top(TIP_TOP_MONOIDS[name])
    m = pa.monoid
    ta = complete_total(pa)
    n = 6 if m.alphabet_size <= 3 else 5
    for length in range(n + 1):
        for w in all_words(m, length):
            x = normalize(m, w)
            for s in range(pa.size):
                assert ta.run(s, w) == ta.index(act(pa, pa.states[s], x))


@pytest.mark.parametrize("name", ["abc", "product"])
def test_support_is_downward_closed_and_multiplicative(name):
    pa = tip_top(TIP_TOP_MONOIDS[name])
    m = pa.monoid
    traces = enumerate_traces(m, 4)
    small = enumerate_traces(m, 2)
    for s in pa.states:
        for x in traces:
            if language_membership(pa, s, x):
                for y in traces:
                    if y.length <= x.length and leq(m, y, x):
                        assert language_membership(pa, s, y)
        for x in small:
            for y in small:
                lhs = language_membership(pa, s, concat(m, x, y))
                mid = act(pa, s, x)
                rhs = mid != BOTTOM_LABEL and language_membership(pa, mid, y)
                assert lhs == rhs


def test_reachability_examples():
    m = free_monoid(2)
    pa = build_partial_action(
        m,
        ["p", "q", "r"],
        {"p": ["a"], "q": ["a"], "r": ["a"]},
        {"p": {"a": "q"}, "q": {"a": "r"}, "r": {"a": "r"}},
    )
    rep = reachability(pa)
    assert rep.essential_states == ("r",)
    assert rep.irreducible_components == (("r",),)
    assert not rep.is_irreducible
    assert ("p", "r") in rep.leads_to and ("r", "p") not in rep.leads_to
    assert all((s, s) in rep.leads_to for s in pa.states)


def test_build_errors():
    m = free_monoid(2)
    with pytest.raises(TransitionMismatch):
        build_partial_action(m, ["x"], {"x": ["a"]}, {"x": {"a": "x", "b": "x"}})
    with pytest.raises(TransitionMismatch):
        build_partial_action(m, ["x"], {"x": ["a", "b"]}, {"x": {"a": "x"}})
    with pytest.raises(UnknownState):
        build_partial_action(m, ["x"], {"x": ["a"]}, {"x": {"a": "y"}})
    with pytest.raises(UnknownLetter):
        build_partial_action(m, ["x"], {"x": ["z"]}, {"x": {"z": "x"}})
    with pytest.raises(ReservedState):
        build_partial_action(m, ["⊥"], {"⊥": ["a"]}, {"⊥": {"a": "⊥"}})
    with pytest.raises(EmptyEnabledSet):
        build_partial_action(m, ["x", "y"], {"x": ["a"]}, {"x": {"a": "y"}})


def test_redirect_example_breaks_axiom_one():
    pa = strip4_action()
    doc = labels(pa)
    doc["transitions"]["a.c"]["a"] = "a.c"
    with pytest.raises(AxiomIViolated):
        build_partial_action(pa.monoid, doc["states"], doc["enabled"], doc["transitions"])


# random tables against the definition

def _random_action(data, m, n_states):
    states = [f"s{i}" for i in range(n_states)]
    enabled = {}
    step = {}
    for s in states:
        en = data.draw(st.sets(st.integers(0, m.alphabet_size - 1)))
        enabled[s] = en
        for a in en:
            step[(s, a)] = data.draw(st.sampled_from(states))
    return states, enabled, step


def _build(m, states, enabled, step):
    return build_partial_action(
        m,
        states,
        {s: [m.names[a] for a in en] for s, en in enabled.items()},
        {s: {m.names[a]: step[(s, a)] for a in en} for s, en in enabled.items()},
    )


def _witness_kind(err):
    if isinstance(err, EmptyEnabledSet):
        return ("empty", err.state, None, None)
    kind = "I" if isinstance(err, AxiomIViolated) else "II"
    return (kind, err.state, err.a, err.b)


def _oracle(m, states, enabled, step):
    viol = oracles.axiom_violations(states, range(m.alphabet_size), m.independence, enabled, step)
    return {(k, s, None if a is None else m.names[a], None if b is None else m.names[b]) for k, s, a, b in viol}


@given(st.data())
def test_validator_matches_definition(data):
    m = data.draw(st.sampled_from([abc_monoid(), product_monoid()]))
    states, enabled, step = _random_action(data, m, data.draw(st.integers(1, 3)))
    expected = _oracle(m, states, enabled, step)
    if expected:
        with pytest.raises((AxiomViolation, EmptyEnabledSet)) as info:
            _build(m, states, enabled, step)
        assert _witness_kind(info.value) in expected
    else:
        pa = _build(m, states, enabled, step)
        assert isinstance(pa, PartialAction)
        assert not complete_total(pa).commutation_failures()


def mutations(pa):
    """Every single-transition rewire and every single enabled-letter deletion."""
    doc = pa.describe()
    m = pa.monoid
    enabled = {s: {m.letter(a) for a in doc["enabled"][s]} for s in pa.states}
    step = {(s, m.letter(a)): t for s, row in doc["transitions"].items() for a, t in row.items()}
    for (s, a), t in step.items():
        for t2 in pa.states:
            if t2 != t:
                new = dict(step)
                new[(s, a)] = t2
                yield "rewire", enabled, new
        en = {k: set(v) for k, v in enabled.items()}
        en[s].discard(a)
        new = {k: v for k, v in step.items() if k != (s, a)}
        yield "delete", en, new


def mutation_outcomes(m, pa):
    """(caught correctly, missed, false alarms, oracle-valid) counts over all mutations."""
    caught = missed = false_alarm = benign = 0
    for _, enabled, step in mutations(pa):
        expected = _oracle(m, list(pa.states), enabled, step)
        try:
            _build(m, list(pa.states), enabled, step)
        except (AxiomViolation, EmptyEnabledSet) as err:
            if expected and _witness_kind(err) in expected:
                caught += 1
            else:
                false_alarm += 1
            continue
        if expected:
            missed += 1
        else:
            benign += 1
    return caught, missed, false_alarm, benign


@pytest.mark.parametrize("name", ["abc", "product", "inline5"])
def test_mutations_are_caught(name):
    m = TIP_TOP_MONOIDS[name]
    caught, missed, false_alarm, benign = mutation_outcomes(m, tip_top(m))
    assert missed == 0 and false_alarm == 0
    assert caught > 0


def test_reserved_label_in_states_tuple():
    m = free_monoid(2)
    with pytest.raises(ReservedState):
        PartialAction(m, ("bottom",), ((0, 0),))


def test_completion_of_every_small_action():
    # every valid action on one or two states of the abc monoid completes to a commuting total action
    m = abc_monoid()
    states = ["x", "y"]
    count = 0
    for en_x, en_y in itertools.product(range(1, 8), repeat=2):
        ex = {a for a in range(3) if en_x >> a & 1}
        ey = {a for a in range(3) if en_y >> a & 1}
        for targets in itertools.product(states, repeat=len(ex) + len(ey)):
            it = iter(targets)
            step = {("x", a): next(it) for a in sorted(ex)}
            step.update({("y", a): next(it) for a in sorted(ey)})
            enabled = {"x": ex, "y": ey}
            if _oracle(m, states, enabled, step):
                continue
            pa = _build(m, states, enabled, step)
            assert not complete_total(pa).commutation_failures()
            count += 1
    assert count > 0


def test_new_monoid_alias_for_docs():
    m = new_monoid(["x", "y"], [("x", "y")])
    pa = tip_top(m)
    assert pa.states == ("1", "x", "y", "x.y")
