import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from regsep import generate as gen
from regsep.errors import AlphabetError, ArityError, ParameterError
from regsep.kernel import (
    BINARY,
    PAD,
    Nfa,
    Tri,
    ap_binary_dfa,
    binary_reps,
    convolve,
    count_set,
    nu_value,
    parikh_pair,
    strongly_connected,
    to_binary,
)


@pytest.mark.parametrize("word, value", [("110", 6), ("", 0), ("1", 1), ("0101", 5)])
def test_nu_value(word, value):
    assert nu_value(word) == value


def test_nu_value_rejects_other_letters():
    with pytest.raises(AlphabetError):
        nu_value("12")


@pytest.mark.parametrize(
    "n, yes, no",
    [(6, ["110", "0110"], ["11"]), (0, ["", "0", "00"], ["1"]), (1, ["1", "01"], ["10"])],
)
def test_binary_reps_examples(n, yes, no):
    m = binary_reps(n)
    assert all(m.accepts(w) for w in yes)
    assert not any(m.accepts(w) for w in no)


def test_binary_reps_matches_value_on_short_words():
    for n in range(12):
        m = binary_reps(n)
        for w in oracles.words(BINARY, 6):
            assert m.accepts(w) == (nu_value(w) == n)


def test_canonical_representative_roundtrip():
    # the canonical word is the one without leading zeros
    for n in range(1 << 16):
        assert nu_value(to_binary(n)) == n
    for n in (0, 1, 2, 255, 40000, 65535):
        assert binary_reps(n).accepts(to_binary(n))


def test_convolve_examples():
    assert convolve(["1", "10"]).columns == (("1", "1"), (PAD, "0"))
    assert convolve(["abc"]).columns == (("a",), ("b",), ("c",))
    assert convolve(["", ""]).columns == ()
    with pytest.raises(ArityError):
        convolve([])


@given(st.lists(st.text(alphabet="ab", max_size=5), min_size=1, max_size=3))
def test_convolve_has_no_all_pad_column_and_inverts(ws):
    c = convolve(ws)
    assert all(any(x != PAD for x in col) for col in c.columns)
    assert c.deconvolve() == tuple(tuple(w) for w in ws)


def _nfa(words, alphabet="bc"):
    return Nfa.from_words(words, alphabet)


def test_parikh_examples():
    bc_star = Nfa({0, 1}, "bc", {(0, ("b",), 1), (1, ("c",), 0)}, 0, {0})
    sl = parikh_pair(bc_star, ("b", "c"))
    for x, y in itertools.product(range(6), repeat=2):
        assert ((x, y) in sl) == (x == y)
    sl = parikh_pair(_nfa(["bbc"]), ("b", "c"))
    assert [v for v in itertools.product(range(5), repeat=2) if v in sl] == [(2, 1)]
    assert parikh_pair(Nfa.empty("bc"), ("b", "c")).is_empty()


def test_parikh_agrees_with_enumeration():
    rng = random.Random(3)
    for _ in range(60):
        nfa = gen.random_nfa(rng, "bc", 6, 10)
        sl = parikh_pair(nfa, ("b", "c"))
        # a vector (x, y) can only come from a word of length x + y
        counts = {(w.count("b"), w.count("c")) for w in nfa.words_up_to(10)}
        for x in range(6):
            for y in range(11 - 6):
                assert ((x, y) in sl) == ((x, y) in counts)


@pytest.mark.parametrize("m, p, yes, no", [(0, 2, ["10"], ["11"]), (0, 1, ["", "1", "0110"], []), (3, 4, ["111"], ["100"])])
def test_ap_binary_dfa_examples(m, p, yes, no):
    d = ap_binary_dfa(m, p)
    assert all(d.accepts(w) for w in yes)
    assert not any(d.accepts(w) for w in no)


def test_ap_binary_dfa_agrees_with_arithmetic():
    for m, p in [(0, 2), (3, 4), (5, 3), (1, 1), (7, 5), (2, 6)]:
        d = ap_binary_dfa(m, p)
        for w in oracles.words(BINARY, 10):
            n = nu_value(w)
            assert d.accepts(w) == (n >= m and (n - m) % p == 0)


def test_ap_binary_dfa_needs_positive_period():
    with pytest.raises(ParameterError):
        ap_binary_dfa(0, 0)


def test_count_set_of_unary_automaton():
    # a^{2} u a^{3 + 4N}
    edges = {(0, ("a", "a"), 1), (0, ("a", "a", "a"), 2), (2, ("a", "a", "a", "a"), 2)}
    cs = count_set(Nfa({0, 1, 2}, "a", edges, 0, {1, 2}))
    assert [n for n in range(30) if n in cs] == [2] + list(range(3, 30, 4))


def test_boolean_operations_and_minimize():
    rng = random.Random(5)
    for _ in range(40):
        a, b = gen.random_nfa(rng), gen.random_nfa(rng)
        inter, uni, comp, mini = a.intersect(b), a.union(b), a.complement(), a.minimize()
        for w in oracles.words("ab", 5):
            x, y = a.accepts(w), b.accepts(w)
            assert inter.accepts(w) == (x and y)
            assert uni.accepts(w) == (x or y)
            assert comp.accepts(w) != x
            assert mini.accepts(w) == x
        assert len(mini.states) <= len(a.determinize().states)


def test_is_finite_matches_word_counts():
    rng = random.Random(8)
    for _ in range(60):
        a = gen.random_nfa(rng, "ab", 4, 6)
        n = len(a.states)
        # an infinite language has a word with length in [n, 2n]
        long_word = any(n <= len(w) <= 2 * n for w in a.words_up_to(2 * n))
        assert a.is_finite() == (not long_word)


def test_strongly_connected():
    succ = {1: [2], 2: [1, 3], 3: [], 4: [4]}
    comp = strongly_connected(list(succ), succ)
    assert comp[1] == comp[2] != comp[3]
    assert comp[4] != comp[3]


def test_tri_refuses_truthiness():
    assert ~Tri.YES is Tri.NO and ~Tri.UNKNOWN is Tri.UNKNOWN
    with pytest.raises(TypeError):
        bool(Tri.YES)


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=200), st.integers(min_value=1, max_value=9))
def test_ap_membership_hypothesis(m, p):
    d = ap_binary_dfa(m, p)
    for n in range(0, 300, 7):
        assert d.accepts(to_binary(n)) == (n >= m and (n - m) % p == 0)
