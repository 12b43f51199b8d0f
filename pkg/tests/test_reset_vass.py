import random

import pytest

import oracles
from regsep import _basis_py, basis
from regsep import generate as gen
from regsep import reset_vass as rv
from regsep import transducer as td
from regsep.errors import AlphabetError, ArityError, ParameterError
from regsep.kernel import Nfa, Tri


def one_counter_up_down():
    """a^n b^m with m <= n: a increments, b decrements."""
    edges = {
        ("p", ("a",), 0, "inc", "p"),
        ("p", (), None, "nop", "q"),
        ("q", ("b",), 0, "dec", "q"),
    }
    return rv.ResetVass({"p", "q"}, "ab", 1, edges, "p", {"q"})


def test_membership_examples():
    v = one_counter_up_down()
    assert rv.member(v, "aab")
    assert rv.member(v, "")
    assert not rv.member(v, "abb")
    assert not rv.member(v, "ba")


def test_empty_machine_is_empty():
    v = rv.ResetVass({"s"}, "a", 1, {("s", ("a",), 0, "dec", "s")}, "s", set())
    assert rv.is_empty(v)
    blocked = rv.ResetVass({"s", "t"}, "a", 1, {("s", (), 0, "dec", "t")}, "s", {"t"})
    assert rv.is_empty(blocked)


def test_reset_forgets_the_counter():
    edges = {
        ("p", ("a",), 0, "inc", "p"),
        ("p", (), 0, "reset", "q"),
        ("q", ("b",), 0, "dec", "q"),
        ("q", (), None, "nop", "f"),
    }
    v = rv.ResetVass({"p", "q", "f"}, "ab", 1, edges, "p", {"f"})
    assert rv.member(v, "aaa")
    assert not rv.member(v, "ab")


def test_step():
    v = one_counter_up_down()
    out = rv.step(v, ("p", (0,)), "aa", 100)
    assert rv.VassConfig("p", (2,)) in out.values and rv.VassConfig("q", (2,)) in out.values
    with pytest.raises(ArityError):
        rv.step(v, ("p", (0, 0)), "a", 100)
    with pytest.raises(ParameterError):
        rv.step(v, ("p", (0,)), "a", 0)


def test_coverability_agrees_with_forward_search():
    rng = random.Random(11)
    checked = both = 0
    seen_answers = set()
    for _ in range(150):
        v = gen.random_reset_vass(rng, max_states=5, max_counters=2, max_edges=10)
        reached, saturated = oracles.vass_forward(v, 12)
        for q in sorted(v.states):
            for vec in [(0,) * v.counters, (1,) * v.counters, (2,) + (0,) * (v.counters - 1)][: 1 + 2 * (v.counters > 0)]:
                ours = rv.is_coverable(v, (q, vec))
                if oracles.covers(reached, (q, vec)):
                    assert ours
                    both += 1
                elif saturated:
                    assert not ours
                checked += 1
                seen_answers.add(ours)
    assert checked > 300 and both > 50 and seen_answers == {True, False}


def test_membership_agrees_with_forward_search():
    rng = random.Random(12)
    for _ in range(80):
        v = gen.random_reset_vass(rng, max_states=4, max_counters=2, max_edges=9)
        for w in oracles.words("ab", 3):
            expected = oracles.vass_accepts(v, w)
            if expected is not None:
                assert rv.member(v, w) == expected


def test_intersect_union_and_transduction():
    rng = random.Random(13)
    for _ in range(25):
        a = gen.random_reset_vass(rng, max_states=3, max_counters=1, max_edges=6)
        b = gen.random_reset_vass(rng, max_states=3, max_counters=1, max_edges=6)
        t = gen.random_transducer(rng, max_states=2, max_edges=4, min_write=1)
        inter, uni = rv.intersect(a, b), rv.union(a, b)
        image = rv.apply_transduction(t, a)
        for w in oracles.words("ab", 3):
            x, y = oracles.vass_accepts(a, w), oracles.vass_accepts(b, w)
            if x is None or y is None:
                continue
            assert rv.member(inter, w) == (x and y)
            assert rv.member(uni, w) == (x or y)
        for w in oracles.words("ab", 3):
            # inputs producing w are at most |w| long
            expected = any(t.relates(w, i) and oracles.vass_accepts(a, i) for i in oracles.words("ab", len(w)))
            assert rv.member(image, w) == expected


def test_intersect_needs_equal_alphabets():
    a = rv.ResetVass.from_nfa(Nfa.universal("a"))
    b = rv.ResetVass.from_nfa(Nfa.universal("ab"))
    with pytest.raises(AlphabetError):
        rv.intersect(a, b)
    with pytest.raises(AlphabetError):
        rv.apply_transduction(td.identity("a"), b)


def test_trim_compact_relabel_keep_language():
    rng = random.Random(14)
    for _ in range(40):
        v = gen.random_reset_vass(rng, max_states=5, max_counters=2, max_edges=10)
        variants = [v.trim(), v.compact(), v.relabel(), v.letter_normalized()]
        for w in oracles.words("ab", 3):
            base = rv.member(v, w)
            assert all(rv.member(x, w) == base for x in variants)


def test_accepting_run_is_a_real_run():
    v = one_counter_up_down()
    verdict, path = rv.accepting_run(v, "aab", 1000)
    assert verdict is Tri.YES
    assert path[0][0] == rv.VassConfig("p", (0,))
    assert path[-1][0].state == "q" and path[-1][0].counters == (1,)
    assert "".join("".join(r) for _, r in path) == "aab"
    assert rv.accepting_run(v, "abb", 1000)[0] is Tri.NO


def test_boundedness_to_infinity():
    loop = rv.ResetVass({"p"}, "a", 1, {("p", ("a",), 0, "inc", "p")}, "p", set())
    words = rv.accepted_words(rv.boundedness_to_infinity(loop), 10, 100000).values
    assert {("a",) * m for m in range(11)} <= words
    # the pumping search cannot prove this one infinite, but must not call it finite
    assert rv.finiteness(rv.boundedness_to_infinity(one_counter_up_down()), 200) is not Tri.YES
    bounded = rv.ResetVass({"p"}, "a", 1, {("p", ("a",), 0, "reset", "p")}, "p", set())
    out = rv.boundedness_to_infinity(bounded)
    assert rv.finiteness(out, 200) is Tri.YES
    assert rv.accepted_words(out, 10, 100000).values == {()}


def test_finiteness_examples():
    finite = rv.ResetVass.from_nfa(Nfa.from_words(["ab", "b"], "ab"))
    assert rv.finiteness(finite, 100) is Tri.YES
    assert rv.finiteness(one_counter_up_down(), 100) is Tri.NO


def test_backends_agree():
    rng = random.Random(15)
    for _ in range(200):
        v = gen.random_reset_vass(rng, max_states=6, max_counters=3, max_edges=14)
        names = sorted(v.states, key=str)
        index = {q: i for i, q in enumerate(names)}
        edges = [(index[p], index[q], k, rv._CODES[x]) for p, _, k, x, q in sorted(v.edges, key=str)]
        target = [(index[q], (1,) * v.counters) for q in names if q in v.finals]
        init = (index[v.initial], (0,) * v.counters)
        for stop in (True, False):
            a = _basis_py.coverability_fixpoint(len(names), v.counters, edges, target, init, stop)
            b = basis.coverability_fixpoint(len(names), v.counters, edges, target, init, stop)
            assert a[0] == b[0]
            if not stop:
                assert [sorted(r) for r in a[2]] == [sorted(r) for r in b[2]]


def test_backend_is_reported():
    assert basis.BACKEND in ("cython", "python")
