from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from tracedyn.action import free_monoid, rabati_monoid
from tracedyn.errors import AlphabetTooSmall, DuplicateLetter, LimitExceeded, ReflexivePair, UnknownLetter
from tracedyn.fixtures import abc_monoid, product_monoid
from tracedyn.monoid import (
    UNIT,
    Trace,
    bits,
    clique_relation,
    concat,
    count_normal_forms,
    enumerate_cliques,
    enumerate_traces,
    format_trace,
    graded_mobius_transform,
    growth_coefficients,
    height_class,
    is_normal_form,
    leq,
    mobius_polynomial,
    mobius_transform,
    new_monoid,
    normalize,
    parse_trace,
    popcount,
    trace_order,
)

MONOIDS = {
    "abc": abc_monoid(),
    "free2": free_monoid(2),
    "product": product_monoid(),
    "inline5": rabati_monoid(5),
    "circular5": rabati_monoid(5, circular=True),
}


def words(m, max_len=8):
    return st.lists(st.integers(0, m.alphabet_size - 1), max_size=max_len)


monoid_and_word = st.sampled_from(sorted(MONOIDS)).flatmap(lambda k: st.tuples(st.just(MONOIDS[k]), words(MONOIDS[k])))


# construction

def test_new_monoid_abc():
    m = new_monoid("abc", [("a", "c")])
    assert m.alphabet_size == 3
    assert m.independent(0, 2) and m.independent(2, 0)
    assert not m.independent(0, 1)


@pytest.mark.parametrize(
    "names, pairs, err",
    [
        (["a"], [], AlphabetTooSmall),
        (["a", "a"], [], DuplicateLetter),
        (["a", "b"], [("a", "a")], ReflexivePair),
        (["a", "b"], [("a", "z")], UnknownLetter),
    ],
)
def test_new_monoid_errors(names, pairs, err):
    with pytest.raises(err):
        new_monoid(names, pairs)


# cliques

def test_cliques_abc(abc):
    assert [abc.clique_name(c) for c in enumerate_cliques(abc)] == ["1", "a", "b", "c", "a.c"]


def test_cliques_free():
    m = free_monoid(2)
    assert [m.clique_name(c) for c in m.cliques] == ["1", "a", "b"]


def test_cliques_seven_strip():
    m = rabati_monoid(7)
    assert m.alphabet_size == 6
    assert len(m.cliques) == 21


@pytest.mark.parametrize("name", sorted(MONOIDS))
def test_cliques_match_subset_filter(name):
    m = MONOIDS[name]
    expected = {frozenset(c) for c in oracles.cliques(m.alphabet_size, m.independence)}
    got = {frozenset(bits(c)) for c in m.cliques}
    assert got == expected
    keys = [(popcount(c), bits(c)) for c in m.cliques]
    assert keys == sorted(keys)


def test_clique_relations(abc):
    a, b, c = (abc.parse_clique(x) for x in "abc")
    assert clique_relation(abc, a, c, "parallel")
    assert not clique_relation(abc, a, c, "cf")
    assert clique_relation(abc, a, a, "cf")
    assert clique_relation(abc, a | c, b, "cf")


# normal forms

def test_normal_form_example(abc):
    x = parse_trace(abc, "a.b.c.a")
    assert format_trace(abc, x) == "a -> b -> a.c"
    assert x == parse_trace(abc, "a.b.a.c")
    assert normalize(abc, []) == UNIT and UNIT.height == 0 and UNIT.length == 0


@given(monoid_and_word)
def test_normalize_agrees_with_congruence(mw):
    m, w = mw
    x = normalize(m, w)
    assert x.length == len(w)
    assert is_normal_form(m, x.cliques)
    # every congruent word has the same normal form, and the representative is congruent
    cls = oracles.congruence_class(w, m.independence)
    assert tuple(x.word()) in cls
    for v in list(cls)[:20]:
        assert normalize(m, v) == x


@given(monoid_and_word, st.data())
def test_normal_form_equality_is_congruence(mw, data):
    m, w = mw
    v = data.draw(words(m, len(w)))
    same = oracles.canonical(w, m.independence) == oracles.canonical(v, m.independence)
    assert (normalize(m, w) == normalize(m, v)) == same


def test_concat_examples(abc):
    a, c = parse_trace(abc, "a"), parse_trace(abc, "c")
    assert concat(abc, a, c).cliques == (abc.parse_clique("a.c"),)
    ab = parse_trace(abc, "a.b")
    assert concat(abc, ab, UNIT) == ab
    assert concat(abc, ab, ab).height == 4


@given(monoid_and_word, st.data())
def test_concat_laws(mw, data):
    m, w = mw
    v = data.draw(words(m, 4))
    u = data.draw(words(m, 4))
    x, y, z = normalize(m, w), normalize(m, v), normalize(m, u)
    assert concat(m, x, y) == normalize(m, list(w) + list(v))
    assert concat(m, concat(m, x, y), z) == concat(m, x, concat(m, y, z))
    assert concat(m, x, y).length == x.length + y.length


# order

def test_order_examples(abc):
    a = parse_trace(abc, "a")
    assert trace_order(abc, UNIT, parse_trace(abc, "a.b.c")).leq
    assert trace_order(abc, a, parse_trace(abc, "a.b")).leq
    f = free_monoid(2)
    rep = trace_order(f, parse_trace(f, "a"), parse_trace(f, "b"))
    assert not rep.compatible and rep.lub is None
    rep = trace_order(abc, a, parse_trace(abc, "c"))
    assert rep.compatible and format_trace(abc, rep.lub) == "a.c"


def _small(m, n):
    return enumerate_traces(m, n)


@pytest.mark.parametrize("name", ["abc", "free2", "product"])
def test_leq_matches_word_oracle(name):
    m = MONOIDS[name]
    traces = _small(m, 3)
    for x in traces:
        for y in traces:
            assert leq(m, x, y) == oracles.divides(x.word(), y.word(), m.independence)


@pytest.mark.parametrize("name", ["abc", "product"])
def test_lub_is_least_common_upper_bound(name):
    m = MONOIDS[name]
    small = _small(m, 2)
    big = _small(m, 4)
    for x in small:
        for y in small:
            uppers = [z for z in big if leq(m, x, z) and leq(m, y, z)]
            rep = trace_order(m, x, y)
            if rep.lub is None:
                # no common bound at all within the bound x.y would need
                assert not uppers
            else:
                assert rep.lub in uppers
                assert all(leq(m, rep.lub, z) for z in uppers)


@pytest.mark.parametrize("name", ["abc", "free2"])
def test_partial_order_laws(name):
    m = MONOIDS[name]
    traces = _small(m, 3)
    rnd = random.Random(5)
    for x in traces:
        assert leq(m, x, x)
    for _ in range(400):
        x, y, z = rnd.sample(traces, 3)
        if leq(m, x, y) and leq(m, y, x):
            assert x == y
        if leq(m, x, y) and leq(m, y, z):
            assert leq(m, x, z)


# Möbius

def test_mobius_polynomials(abc):
    assert mobius_polynomial(abc).coeffs == (1, -3, 1)
    assert mobius_polynomial(free_monoid(2)).coeffs == (1, -2)
    m7 = rabati_monoid(7)
    expected = [0] * 4
    for c in oracles.cliques(6, m7.independence):
        expected[len(c)] += (-1) ** len(c)
    assert list(mobius_polynomial(m7).coeffs) == expected


def test_mobius_transform_examples(abc):
    p = 0.3
    h = mobius_transform(abc, {c: p ** popcount(c) for c in abc.cliques})
    assert h[0] == pytest.approx(1 - 3 * p + p * p, abs=1e-15)
    assert h[abc.parse_clique("a")] == pytest.approx(p - p * p, abs=1e-15)
    zero = mobius_transform(abc, dict.fromkeys(abc.cliques, 0.0))
    assert all(v == 0 for v in zero.values())


def test_graded_transform_examples(abc):
    p = 0.3
    f = lambda y: p ** y.length  # noqa: E731
    assert graded_mobius_transform(abc, f, UNIT) == pytest.approx(1 - 3 * p + p * p)
    assert graded_mobius_transform(abc, lambda y: 1.0, parse_trace(abc, "a")) == 0
    # (b) -> (b): only b sits above the top clique, so the value is f(bb) = p^2
    assert graded_mobius_transform(abc, f, parse_trace(abc, "b.b")) == pytest.approx(p * p)


@pytest.mark.parametrize("name", ["abc", "free2", "product"])
def test_second_inversion_formula(name):
    m = MONOIDS[name]
    rnd = random.Random(11)
    by_height = {}
    for h in range(1, 4):
        by_height[h] = list(_traces_of_height(m, h))
    pool = [UNIT] + [x for h in (1, 2, 3) for x in by_height[h]]
    values = {x: rnd.random() for x in pool}
    f = values.__getitem__
    for x in pool:
        cls = height_class(m, x) if not x.is_unit() else [Trace((c,)) if c else UNIT for c in m.cliques]
        total = sum(graded_mobius_transform(m, f, y) for y in cls if y in values)
        assert total == pytest.approx(values[x], abs=1e-12)


def _traces_of_height(m, h):
    from tracedyn.monoid import traces_of_height

    return traces_of_height(m, h)


# enumeration and growth

def test_enumerate_examples(abc):
    assert growth_coefficients(abc, 3) == [1, 3, 8, 21]
    a = parse_trace(abc, "a")
    found = enumerate_traces(abc, 4, prefix=a, same_height=True)
    assert [format_trace(abc, y) for y in found] == ["a", "a.c"]
    assert enumerate_traces(abc, 0) == [UNIT]
    with pytest.raises(LimitExceeded):
        enumerate_traces(abc, 13)


@pytest.mark.parametrize("name", sorted(MONOIDS))
def test_growth_matches_word_oracle(name):
    m = MONOIDS[name]
    n = 6 if m.alphabet_size <= 3 else 4
    assert growth_coefficients(m, n) == oracles.trace_counts(m.alphabet_size, m.independence, n)


@pytest.mark.parametrize("name", sorted(MONOIDS))
def test_growth_three_ways(name):
    m = MONOIDS[name]
    series = mobius_polynomial(m).series_inverse(8)
    assert growth_coefficients(m, 8) == series == count_normal_forms(m, 8)


@given(monoid_and_word)
def test_every_prefix_of_a_normal_form_is_a_normal_form(mw):
    m, w = mw
    x = normalize(m, w)
    for n in range(x.height + 1):
        assert is_normal_form(m, x.prefix(n).cliques)
        assert leq(m, x.prefix(n), x)
