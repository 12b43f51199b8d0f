"""Acceptance criteria, one check per criterion.

Run with pytest (a summary line per criterion is printed at the end) or
directly: ``python tests/test_acceptance.py``.
"""

import os
import random
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import oracles  # noqa: E402
from regsep import generate as gen  # noqa: E402
from regsep import hopa as hp  # noqa: E402
from regsep import increment as inc  # noqa: E402
from regsep import logic as lg  # noqa: E402
from regsep import reset_vass as rv  # noqa: E402
from regsep import separability as sep  # noqa: E402
from regsep.kernel import BINARY, Nfa, Tri, nu_value, ordered  # noqa: E402
from regsep.predicates import PredicateHandle  # noqa: E402

RESULTS = {}


def report(number, title, ok, detail, seconds):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail}; {seconds:.1f}s)"
    RESULTS[number] = line
    print(line)
    return ok


def binary_words_hopa(words):
    edges = {("s", tuple(w), None, (), "f") for w in words}
    return hp.Hopa({"s", "f"}, BINARY, {"z"}, "z", 1, edges, "s", {"f"})


def unary_words_hopa(counts):
    edges = {("s", ("a",) * n, None, (), "f") for n in counts}
    return hp.Hopa({"s", "f"}, {"a"}, {"z"}, "z", 1, edges, "s", {"f"})


def unary_loop_hopa(start, period):
    """a^(start + period*N)."""
    edges = {("s", ("a",) * start, None, (), "f"), ("f", ("a",) * period, None, (), "f")}
    return hp.Hopa({"s", "f"}, {"a"}, {"z"}, "z", 1, edges, "s", {"f"})


def pseudo(nfa, name=""):
    return PredicateHandle.pseudo(rv.ResetVass.from_nfa(nfa), name)


POW2 = Nfa({0, 1}, BINARY, {(0, ("1",), 1), (1, ("0",), 1)}, 0, {1})
THREE_POW2 = Nfa({0, 1, 2}, BINARY, {(0, ("1",), 1), (1, ("1",), 2), (2, ("0",), 2)}, 0, {2})


# ---------------------------------------------------------------------------


def criterion_1():
    rng = random.Random(101)
    start = time.time()
    bad = hits = misses = 0
    for _ in range(200):
        v = gen.random_reset_vass(rng, max_states=8, max_counters=3, max_edges=15)
        target = (rng.choice(ordered(v.states)), tuple(rng.randint(0, 2) for _ in range(v.counters)))
        reached, saturated = oracles.vass_forward(v, 20)
        hit = oracles.covers(reached, target)
        if not (hit or saturated):
            continue
        hits += hit
        misses += not hit
        bad += rv.is_coverable(v, target) != hit
    seconds = time.time() - start
    # both answers must actually be exercised
    ok = bad == 0 and hits > 20 and misses > 20 and seconds < 60
    return report(1, "coverability vs forward search", ok,
                  f"{hits + misses} conclusive, {hits} covered, {bad} disagreements", seconds)


def criterion_2():
    rng = random.Random(102)
    start = time.time()
    bad = skipped = 0
    for _ in range(50):
        v0 = gen.random_reset_vass(rng, max_states=4, max_counters=2, max_edges=8)
        v1 = gen.random_reset_vass(rng, max_states=4, max_counters=2, max_edges=8)
        t = gen.random_transducer(rng, min_write=1)
        # every edge writes a letter, so runs producing <= 4 letters have <= 4 edges
        pairs = oracles.transducer_pairs(t, 4)
        tv, iv, uv = rv.apply_transduction(t, v0), rv.intersect(v0, v1), rv.union(v0, v1)
        inputs = {}
        for w in oracles.words("ab", 4):
            inputs[w] = (oracles.vass_accepts(v0, w, 20000), oracles.vass_accepts(v1, w, 20000))
        for w, (m0, m1) in inputs.items():
            if m0 is None or m1 is None:
                skipped += 1
                continue
            bad += rv.member(iv, w) != (m0 and m1)
            bad += rv.member(uv, w) != (m0 or m1)
            sources = [inputs.get(r, (None,))[0] for r, out in pairs if out == w]
            if None in sources:
                skipped += 1
                continue
            bad += rv.member(tv, w) != any(sources)
    seconds = time.time() - start
    return report(2, "transduction/intersection/union", bad == 0,
                  f"{bad} violations, {skipped} undecided by the oracle", seconds)


def criterion_3():
    rng = random.Random(103)
    start = time.time()
    bad = accepted = 0
    for _ in range(50):
        m = gen.random_incauto(rng)
        back = inc.recompose(inc.decompose(m), m.alphabet)
        for w in oracles.words("ab", 4):
            a, b = inc.member(m, w), inc.member(back, w)
            bad += a is not b
            accepted += a is Tri.YES
    seconds = time.time() - start
    return report(3, "decompose/recompose round trip", bad == 0 and accepted > 0,
                  f"{bad} violations, {accepted} accepted words", seconds)


def criterion_4():
    rng = random.Random(104)
    start = time.time()
    bad = 0
    add = lg.atomic_add_automaton().to_nfa()
    for x in range(33):
        for y in range(33):
            for z in {x + y, x + y + 1, x + y + 2, abs(x - y)}:
                bad += add.accepts(lg.reversed_convolution((x, y, z)).columns) != (z == x + y)
    formulas = 0
    for _ in range(100):
        nfa = gen.random_nfa(rng, BINARY, 3, 6)
        pred = PredicateHandle.pseudo(rv.ResetVass.from_nfa(nfa), "S")
        values = oracles.nu_values_upto(nfa, 80)
        f = gen.random_formula(rng, ("x", "y"), 3, ["S"])
        want = {v for v in oracles.relation(f, {"S": values}, 32) if max(v, default=0) <= 16}
        names = lg.tracks(f)
        if names:
            machine = lg.compile(lg.normalize(f, {"S": pred}), {"S": pred})
            got = lg.solutions(machine, len(names), 16)
        else:
            got = {()} if lg.truth(f, {"S": pred}) else set()
        bad += got != want
        formulas += 1

    def s(word):
        return pseudo(Nfa.from_words([word], BINARY), "S")

    one = lg.Exists(("x",), lg.And(lg.Eq1("x"), lg.Pred("S", "x")))
    two = lg.Exists(("x", "y", "z"), lg.And(lg.Eq1("x"), lg.Eq1("y"), lg.Add("x", "y", "z"), lg.Pred("S", "z")))
    worked = [lg.truth(one, {"S": s("1")}), lg.truth(two, {"S": s("10")}), not lg.truth(two, {"S": s("11")})]
    bad += worked.count(False)
    seconds = time.time() - start
    return report(4, "positive existential arithmetic", bad == 0 and seconds < 120,
                  f"{formulas} formulas, {bad} mismatches", seconds)


def criterion_5():
    rng = random.Random(105)
    start = time.time()
    bad = steps = 0
    for _ in range(10):
        g, words = gen.random_finite_binary_hopa(rng, max_words=3, max_value=64)
        lifted = hp.lift_to_unary(g)
        res = hp.run(lifted.machine, 400000, max_length=65)
        want = {("1",) + ("0",) * nu_value(w) for w in words}
        bad += res.saturated is not Tri.YES or res.words != want
        for trace in res.accepted.values():
            for (p, s, _), (q, s2, read) in zip(trace, trace[1:]):
                if p == q == lifted.unwind:
                    before = hp.measures(s, lifted.bottom, lifted.marker)
                    after = hp.measures(s2, lifted.bottom, lifted.marker)
                    bad += before.mu != len(read) + after.mu
                    bad += not after.sigma < before.sigma
                    steps += 1
    seconds = time.time() - start
    return report(5, "binary-to-unary lifting", bad == 0 and steps > 0 and seconds < 120,
                  f"{steps} unwinding steps checked, {bad} violations", seconds)


def criterion_6():
    start = time.time()
    pow2 = inc.counting(pseudo(POW2, "P"))
    three = inc.counting(pseudo(THREE_POW2, "Q"))
    disjoint = sep.intersect_empty_cc(pow2, three)
    shared = sep.intersect_empty_cc(pow2, pow2)
    powers = {n for n in range(4097) if oracles.is_power_of_two(n)}
    threes = {3 * p for p in powers if 3 * p <= 4096}
    ok = disjoint is (not powers & threes) and shared is (not powers) and disjoint and not shared
    seconds = time.time() - start
    return report(6, "intersection emptiness", ok and seconds < 60,
                  f"disjoint={disjoint}, self={shared}", seconds)


def power_set(values):
    """The power predicate over a machine with these binary values, as a membership test."""
    return lambda n: not oracles.is_power_of_two(n) or (n.bit_length() - 1) in values


def criterion_7():
    start = time.time()
    right_words = [["10"], ["11"], ["10", "11"], ["1", "100"], []]
    lefts = [("finite", [8]), ("finite", [4]), ("finite", [2, 8]), ("finite", [0, 1]),
             ("loop", (0, 1)), ("finite", [32])]
    bad = cases = witnesses = 0
    for words in right_words:
        values = {nu_value(w) for w in words}
        member = power_set(values)
        right = inc.counting(PredicateHandle.power(binary_words_hopa(words), "P"))
        for shape, arg in lefts:
            if cases == 20:
                break
            cases += 1
            left = unary_words_hopa(arg) if shape == "finite" else unary_loop_hopa(*arg)
            expected = shape == "finite" and not any(member(n) for n in arg)
            verdict, witness = sep.decide_regsep(left, right, 5000)
            if verdict is not Tri.of(expected):
                bad += 1
                continue
            if witness is not None:
                witnesses += 1
                inside = hp.run(left, 5000, max_length=64).words
                bad += not all(witness.accepts(w) for w in inside)
                bad += any(witness.accepts(("a",) * n) for n in range(65) if member(n))
    seconds = time.time() - start
    return report(7, "regular separability", bad == 0 and cases == 20 and seconds < 120,
                  f"{cases} instances, {witnesses} witnesses checked, {bad} violations", seconds)


def criterion_8():
    start = time.time()
    bad = []

    # boundedness to infinity
    loop = rv.ResetVass({"p"}, "a", 1, {("p", ("a",), 0, "inc", "p")}, "p", set())
    words = rv.accepted_words(sep.construct_lemma5(loop), 10, 100000).values
    if not {("a",) * m for m in range(11)} <= words:
        bad.append("bounded construction unbounded")
    reset = rv.ResetVass({"p"}, "a", 1, {("p", ("a",), 0, "reset", "p")}, "p", set())
    if rv.finiteness(sep.construct_lemma5(reset), 1000) is not Tri.YES:
        bad.append("bounded construction bounded")

    # finiteness to separability
    cases = [
        ("eps", rv.ResetVass({0}, {"a"}, 0, set(), 0, {0}), Tri.YES),
        ("a*", rv.ResetVass.from_nfa(Nfa.universal("a")), Tri.NO),
        ("empty", rv.ResetVass({0}, {"a"}, 0, set(), 0, set()), Tri.YES),
    ]
    for name, v, want in cases:
        k1, k2 = sep.construct_lemma7(v)
        verdict, witness = sep.decide_regsep_counting(k1, k2, 5000)
        if verdict is not want:
            bad.append(f"finiteness reduction {name}")
        if witness is not None:
            lengths = {n for n in range(65) if witness.accepts(("a",) * n)}
            if name == "eps" and lengths != {1}:
                bad.append("finiteness reduction eps witness")
            if name == "empty" and lengths:
                bad.append("finiteness reduction empty witness")

    # order-5 reduction
    for left, right, meets in [(["10"], ["10", "11"], Tri.YES), (["10"], ["11"], Tri.NO), ([], ["10"], Tri.NO)]:
        l1, l2 = sep.construct_lemma10(binary_words_hopa(left), binary_words_hopa(right))
        if sep.hopa_meets_counter(l1, l2, 200000, max_length=70) is not meets:
            bad.append(f"order-5 reduction {left} {right}")
        if left and hp.run(l1, 200000, max_length=70).words != {("1",) + ("0",) * 4}:
            bad.append("order-5 reduction language")
    seconds = time.time() - start
    return report(8, "reduction constructions", not bad, f"failures: {bad or 'none'}", seconds)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(check):
    assert check()


if __name__ == "__main__":
    outcomes = [check() for check in CRITERIA]
    sys.exit(0 if all(outcomes) else 1)
