import random

import pytest

import oracles
from regsep import generate as gen
from regsep import increment as inc
from regsep import transducer as td
from regsep.errors import AlphabetError, FormatError
from regsep.kernel import BINARY, Nfa, Tri
from regsep.predicates import PredicateHandle
from regsep.reset_vass import ResetVass

POWERS = PredicateHandle.pseudo(
    ResetVass.from_nfa(Nfa({"s", "t"}, BINARY, {("s", ("1",), "t"), ("t", ("0",), "t")}, "s", {"t"}))
)


def test_decompose_examples():
    one = PredicateHandle.finite({1})
    m = inc.IncrementingAutomaton({"q0", "qf"}, "x", {("q0", "x", 1, "qf")}, "q0", {("qf", one)})
    (part,) = inc.decompose(m)
    t, pred = part
    assert pred == one and t.relates("x", "a")
    assert [w for w in oracles.words("x", 3) if inc.member(m, w) is Tri.YES] == [("x",)]
    two = inc.IncrementingAutomaton(m.states, m.alphabet, m.edges, m.initial, {("qf", one), ("q0", one)})
    assert len(inc.decompose(two)) == 2
    none = inc.IncrementingAutomaton(m.states, m.alphabet, m.edges, m.initial, set())
    assert inc.decompose(none) == [] and inc.is_empty(none) is Tri.YES


def test_recompose_examples():
    m = inc.recompose([(td.identity("a"), PredicateHandle.finite({2}))])
    assert [w for w in oracles.words("a", 4) if inc.member(m, w) is Tri.YES] == [("a", "a")]
    assert inc.is_empty(inc.recompose([])) is Tri.YES
    with pytest.raises(FormatError):
        inc.recompose([(td.identity("ab"), PredicateHandle.finite({2}))])


def test_recompose_splits_long_reads():
    t = td.Transducer({0}, "a", "x", {(0, ("a", "a", "a"), ("x",), 0)}, 0, {0})
    m = inc.recompose([(t, PredicateHandle.finite({6}))])
    assert inc.member(m, "xx") is Tri.YES
    assert inc.member(m, "x") is Tri.NO


def test_member_and_emptiness_examples():
    m = inc.counting(POWERS)
    assert inc.member(m, "aaaa") is Tri.YES
    assert inc.member(m, "aaa") is Tri.NO
    assert inc.is_empty(m) is Tri.NO
    three_mod_four = Nfa({0, 1, 2, 3}, "a", {(i, ("a",), (i + 1) % 4) for i in range(4)}, 0, {3})
    part = (td.restriction(three_mod_four), POWERS)
    assert inc.is_empty(inc.recompose([part])) is Tri.YES


def test_membership_against_search():
    rng = random.Random(31)
    for _ in range(60):
        m = gen.random_incauto(rng)
        for w in oracles.words("ab", 3):
            assert inc.member(m, w) is Tri.of(oracles.incauto_accepts(m, w)), (m, w)


def test_round_trip():
    rng = random.Random(32)
    for _ in range(40):
        m = gen.random_incauto(rng)
        back = inc.recompose(inc.decompose(m), m.alphabet)
        for w in oracles.words("ab", 4):
            assert inc.member(back, w) is inc.member(m, w)


def test_apply_transduction():
    rng = random.Random(33)
    erase_b = td.homomorphism({"a": "a", "b": ""}, "ab")
    for _ in range(30):
        m = gen.random_incauto(rng)
        for t in (td.identity("ab"), erase_b, gen.random_transducer(rng, min_write=1)):
            image = inc.apply_transduction(t, m)
            for u in oracles.words("ab", 3):
                # only erase_b can shrink words; its inputs stay short enough here
                inputs = oracles.words("ab", len(u) + 2)
                expected = any(t.relates(u, v) and oracles.incauto_accepts(m, v) for v in inputs)
                got = inc.member(image, u)
                if t is not erase_b:
                    assert got is Tri.of(expected)
                elif expected:
                    assert got is Tri.YES
        empty = inc.apply_transduction(td.empty_transducer("ab", "ab"), m)
        assert inc.is_empty(empty) is Tri.YES


def test_nonempty_has_short_witness():
    rng = random.Random(34)
    found = 0
    for _ in range(60):
        m = gen.random_incauto(rng)
        if inc.is_empty(m) is Tri.NO:
            # iterative deepening: words come out shortest first
            witness = next((w for w in oracles.words("ab", 8) if oracles.incauto_accepts(m, w)), None)
            if witness is not None:
                found += 1
                assert inc.member(m, witness) is Tri.YES
        else:
            assert not any(oracles.incauto_accepts(m, w) for w in oracles.words("ab", 4))
    assert found > 10


def test_validation():
    with pytest.raises(FormatError):
        inc.IncrementingAutomaton({"q"}, "a", {("q", "a", 2, "q")}, "q", set())
    with pytest.raises(AlphabetError):
        inc.apply_transduction(td.identity("a"), inc.counting(POWERS, "b"))
