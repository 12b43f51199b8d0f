"""Regular separability and intersection emptiness for the machine classes,
plus the reduction constructions built from them.

A regular separator of (L1, L2) is a regular R with L1 inside R and R
disjoint from L2.  Unary instances are settled by finiteness: when L2 holds
all but finitely many non-powers of two, a unary L1 is separable from L2
exactly when L1 is finite and disjoint from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import hopa as hp
from . import increment as inc
from . import reset_vass as rv
from .errors import AlphabetError, UsageError
from .kernel import (
    BINARY,
    Bounded,
    Nfa,
    Tri,
    ap_binary_dfa,
    binary_reps,
    count_set,
    nu_value,
    parikh_pair,
)
from .logic import And, Eq, Exists, Or, Plus, Pred, times, truth
from .predicates import Kind, PredicateHandle, covers_nonpowers, pred_member
from .transducer import Transducer, compose, image, invert, word_to_unary_length

INFINITE = "infinite"
UNARY = inc.UNARY


@dataclass(frozen=True)
class SeparatorWitness:
    """Deterministic complete recognizer plus a note on where it came from."""

    dfa: Nfa
    note: str = ""

    def __post_init__(self):
        if not (self.dfa.is_deterministic() and self.dfa.is_complete()):
            object.__setattr__(self, "dfa", self.dfa.determinize())

    def accepts(self, w) -> bool:
        return self.dfa.accepts(w)

    @property
    def alphabet(self) -> frozenset:
        return self.dfa.alphabet


def _unary_words(counts: Iterable[int], letter=UNARY) -> Nfa:
    return Nfa.from_words([(letter,) * n for n in counts], {letter})


# ---------------------------------------------------------------------------
# Unary characterisation


def unary_regsep(s0, s1: PredicateHandle, assume_cover: bool = False, budget: int = 10000):
    """Separate a^S0 from a^S1, where S1 must contain all but finitely many
    non-powers of two.  ``s0`` is a finite set of naturals or INFINITE.

    Returns (verdict, witness or None).
    """
    if not assume_cover and covers_nonpowers(s1) is not Tri.YES:
        raise UsageError("cannot certify that the predicate contains the non-powers of two")
    if s0 == INFINITE:
        return Tri.NO, None
    s0 = frozenset(s0)
    answers = [pred_member(s1, n, budget) for n in sorted(s0)]
    if Tri.YES in answers:
        return Tri.NO, None
    if Tri.UNKNOWN in answers:
        return Tri.UNKNOWN, None
    return Tri.YES, SeparatorWitness(_unary_words(s0).determinize(), "finite unary set")


def combine_separators(matrix: Sequence[Sequence[SeparatorWitness]], alphabet: Iterable | None = None) -> SeparatorWitness:
    """Union over rows of the intersection over each row; determinized."""
    cells = [w for row in matrix for w in row]
    if alphabet is None:
        if not cells:
            raise UsageError("an empty matrix needs an explicit alphabet")
        alphabet = cells[0].alphabet
    alphabet = frozenset(alphabet)
    if any(w.alphabet != alphabet for w in cells):
        raise AlphabetError("all separators must share one alphabet")
    result = Nfa.empty(alphabet)
    for row in matrix:
        acc = Nfa.universal(alphabet)
        for w in row:
            acc = acc.intersect(w.dfa).trim().relabel()
        result = result.union(acc).relabel()
    return SeparatorWitness(result.determinize(), "combined")


def shift_transduction(l: hp.Hopa, t: Transducer) -> hp.Hopa:
    """Machine for the preimage of L(l) under T."""
    return hp.apply_transduction(invert(t), l)


# ---------------------------------------------------------------------------
# Intersection for counting automata over pseudo predicates


def _with_output(t: Transducer, alphabet) -> Transducer:
    return Transducer(t.states, t.input_alphabet, t.output_alphabet | set(alphabet), t.edges, t.initial, t.finals)


def _two_letter_automaton(t: Transducer) -> Nfa:
    """Edges labelled b^(letters read) c^(letters written)."""
    edges = {(p, ("b",) * len(r) + ("c",) * len(w), q) for p, r, w, q in t.edges}
    return Nfa(t.states, {"b", "c"}, edges, t.initial, t.finals)


def _linear_term(base: int, periods, names):
    terms = [base] if base else []
    terms += [times(z, p) for z, p in zip(names, periods) if p]
    if not terms:
        return 0
    out = terms[0]
    for t in terms[1:]:
        out = Plus(out, t)
    return out


def semilinear_formula(sl, x: str = "x", y: str = "y"):
    """Formula in x, y whose solutions are the semilinear set."""
    branches = []
    for comp in sl.components:
        names = tuple(f"z{i + 1}" for i in range(len(comp.periods)))
        body = And(
            Eq(x, _linear_term(comp.base[0], [p[0] for p in comp.periods], names)),
            Eq(y, _linear_term(comp.base[1], [p[1] for p in comp.periods], names)),
        )
        branches.append(Exists(names, body) if names else body)
    return Or(*branches)


def intersect_empty_cc(l1: inc.IncrementingAutomaton, l2: inc.IncrementingAutomaton) -> bool:
    """Is L(l1) and L(l2) disjoint?  All predicates must be pseudo-kind."""
    for m in (l1, l2):
        for _, pred in m.accepts:
            if pred.kind is not Kind.PSEUDO:
                raise UsageError("intersection decision needs pseudo predicates")
    alphabet = l1.alphabet | l2.alphabet
    for t1, s1 in inc.decompose(l1):
        for t2, s2 in inc.decompose(l2):
            # pairs (a^y, a^x) with a common image word
            t = _compose_counts(_with_output(t1, alphabet), _with_output(t2, alphabet))
            sl = parikh_pair(_two_letter_automaton(t), ("b", "c"))
            if sl.is_empty():
                continue
            phi = Exists(("x", "y"), And(Pred("S1", "x"), semilinear_formula(sl), Pred("S2", "y")))
            if truth(phi, {"S1": s1, "S2": s2}):
                return False
    return True


def _compose_counts(t1: Transducer, t2: Transducer) -> Transducer:
    return compose(invert(t2), t1).letter_normalized()


# ---------------------------------------------------------------------------
# Separability of a HOPA language from a power-predicate counting language


def finite_counts(h: hp.Hopa, budget: int) -> Bounded:
    """Lengths of a finite unary HOPA language, grown until the rest is empty."""
    found = set()
    n = 0
    while True:
        rest = hp.intersect_regular(h, _unary_words(found).complement({UNARY}))
        empty = hp.is_empty(rest, budget)
        if empty is Tri.YES:
            return Bounded(frozenset(found), Tri.YES)
        if empty is Tri.UNKNOWN:
            return Bounded(frozenset(found), Tri.UNKNOWN)
        while True:
            answer = hp.member(h, (UNARY,) * n, budget)
            n += 1
            if answer is Tri.YES:
                found.add(n - 1)
                break
            if answer is Tri.UNKNOWN:
                return Bounded(frozenset(found), Tri.UNKNOWN)


def decide_regsep(l1: hp.Hopa, l2: inc.IncrementingAutomaton, budget: int = 10000):
    """Regular separability of L(l1) from L(l2), where every predicate of l2
    is power-kind.  Returns (verdict, witness or None)."""
    for _, pred in l2.accepts:
        if pred.kind is not Kind.POWER:
            raise UsageError("the right-hand machine needs power predicates")
    alphabet = l1.input_alphabet | l2.alphabet
    row = []
    unknown = False
    for t, pred in inc.decompose(l2):
        t = _with_output(t, alphabet)
        shifted = shift_transduction(l1, t)
        finite = hp.finiteness(shifted, budget)
        if finite is Tri.NO:
            return Tri.NO, None
        if finite is Tri.UNKNOWN:
            unknown = True
            continue
        counts = finite_counts(shifted, budget)
        if counts.verdict is Tri.UNKNOWN:
            unknown = True
            continue
        answers = [pred_member(pred, n, budget) for n in sorted(counts.values)]
        if Tri.YES in answers:
            return Tri.NO, None
        if Tri.UNKNOWN in answers:
            unknown = True
            continue
        outside = _unary_words(counts.values).complement({UNARY})
        covered = image(t, outside).with_alphabet(alphabet)
        row.append(SeparatorWitness(covered.complement(alphabet), "part separator"))
    if unknown:
        return Tri.UNKNOWN, None
    if not row:
        return Tri.YES, SeparatorWitness(Nfa.universal(alphabet), "no parts")
    return Tri.YES, combine_separators([row], alphabet)


# ---------------------------------------------------------------------------
# Counting machines (unary, one letter written per increment)


def counting_parts(m: inc.IncrementingAutomaton):
    """(domain count set, predicate) per part when every edge writes exactly
    the letters it counts; None otherwise."""
    if len(m.alphabet) > 1:
        return None
    letter = next(iter(m.alphabet), UNARY)
    if any(tuple(w) != (letter,) * b for _, w, b, _ in m.edges):
        return None
    return [(count_set(inc.domain_counts(t)), pred) for t, pred in inc.decompose(m)]


def _strip_leading_zeros() -> Transducer:
    edges = {
        ("z", ("0",), (), "z"),
        ("z", ("1",), ("1",), "c"),
        ("c", ("0",), ("0",), "c"),
        ("c", ("1",), ("1",), "c"),
    }
    return Transducer({"z", "c"}, BINARY, BINARY, edges, "z", {"z", "c"})


def _domain_binary(counts) -> Nfa:
    """Binary words whose value lies in the ultimately periodic set."""
    out = Nfa.empty(BINARY)
    for n in sorted(counts.finite):
        out = out.union(binary_reps(n)).relabel()
    for base, per in counts.progressions():
        out = out.union(ap_binary_dfa(base, per)).relabel()
    return out


def _part_values(counts, pred: PredicateHandle, budget: int):
    """Values of pred inside counts: (Tri finite, frozenset values or None)."""
    if counts.is_finite():
        answers = {n: pred_member(pred, n, budget) for n in counts.finite}
        if Tri.UNKNOWN in answers.values():
            return Tri.UNKNOWN, None
        return Tri.YES, frozenset(n for n, a in answers.items() if a is Tri.YES)
    if pred.kind is Kind.FINITE:
        return Tri.YES, frozenset(n for n in pred.values if n in counts)
    if pred.kind is Kind.POWER:
        return Tri.NO, None
    if pred.kind is Kind.REGULAR_UNARY:
        both = count_set(pred.machine.with_alphabet({UNARY}).intersect(_count_nfa(counts)))
        if not both.is_finite():
            return Tri.NO, None
        return Tri.YES, both.finite
    v = rv.intersect(pred.machine.with_alphabet(BINARY), rv.ResetVass.from_nfa(_domain_binary(counts)))
    canon = rv.apply_transduction(_strip_leading_zeros(), v.compact()).compact()
    graph = rv.configuration_graph(canon, budget)
    if graph is None:
        return rv.finiteness(canon, budget), None
    if not graph.is_finite():
        return Tri.NO, None
    words = graph.words_up_to(len(graph.states))
    return Tri.YES, frozenset(nu_value(w) for w in words)


def _count_nfa(counts) -> Nfa:
    """Unary automaton for an ultimately periodic set."""
    t, p = counts.threshold, counts.period
    states = list(range(t + p))
    edges = {(i, (UNARY,), i + 1) for i in range(t + p - 1)} | {(t + p - 1, (UNARY,), t)}
    finals = {i for i in counts.finite if i < t} | {t + r for r in counts.residues}
    return Nfa(states, {UNARY}, edges, 0, finals)


def decide_regsep_counting(k1: inc.IncrementingAutomaton, k2: inc.IncrementingAutomaton, budget: int = 10000):
    """Separability for two counting machines; the right one must contain
    all but finitely many non-powers of two whenever the left is infinite."""
    left, right = counting_parts(k1), counting_parts(k2)
    if left is None or right is None:
        return Tri.UNKNOWN, None
    letter = next(iter(k1.alphabet | k2.alphabet), UNARY)
    s0 = set()
    infinite = Tri.NO
    for counts, pred in left:
        finite, values = _part_values(counts, pred, budget)
        if finite is Tri.NO:
            infinite = Tri.YES
            break
        if finite is Tri.UNKNOWN:
            infinite = Tri.UNKNOWN
            continue
        s0 |= values
    if infinite is not Tri.NO:
        covered = any(
            len(counts.residues) == counts.period and covers_nonpowers(pred) is Tri.YES
            for counts, pred in right
        )
        if infinite is Tri.YES and covered:
            return Tri.NO, None
        return Tri.UNKNOWN, None
    unknown = False
    for n in sorted(s0):
        for counts, pred in right:
            if n not in counts:
                continue
            answer = pred_member(pred, n, budget)
            if answer is Tri.YES:
                return Tri.NO, None
            unknown |= answer is Tri.UNKNOWN
    if unknown:
        return Tri.UNKNOWN, None
    witness = SeparatorWitness(_unary_words(s0, letter).with_alphabet({letter}).determinize(), "finite unary set")
    return Tri.YES, witness


# ---------------------------------------------------------------------------
# Reduction constructions


def construct_lemma5(v: rv.ResetVass) -> rv.ResetVass:
    return rv.boundedness_to_infinity(v)


def two_ones() -> Nfa:
    """Binary words with at least two 1s (values that are not powers of two, except 0)."""
    edges = {(0, ("0",), 0), (0, ("1",), 1), (1, ("0",), 1), (1, ("1",), 2), (2, ("0",), 2), (2, ("1",), 2)}
    return Nfa({0, 1, 2}, BINARY, edges, 0, {2})


def construct_lemma7(v: rv.ResetVass):
    """(K1, K2): K1 counts the values of {1 0^|w| : w in L(v)}, K2 counts the
    values of words with at least two 1s.  They are separable iff L(v) is finite."""
    k = rv.apply_transduction(word_to_unary_length(v.alphabet), v).compact()
    k1 = inc.counting(PredicateHandle.pseudo(k.relabel(), "K"))
    k2 = inc.counting(PredicateHandle.pseudo(rv.ResetVass.from_nfa(two_ones()), "twoones"))
    return k1, k2


def _one_prefixed_counter(pred: PredicateHandle) -> inc.IncrementingAutomaton:
    """Machine for {1 0^n : n in pred}."""
    edges = {("q0", ("1",), 0, "q1"), ("q1", ("0",), 1, "q1")}
    return inc.IncrementingAutomaton({"q0", "q1"}, BINARY, edges, "q0", {("q1", pred)})


def construct_lemma10(g1: hp.Hopa, g2: hp.Hopa):
    """(L1, L2): L1 = {1 0^(2^v) : v a value of L(g1)} at order 5 and
    L2 = {1 0^n : n in the power predicate of g2}.  They intersect iff the
    value sets of g1 and g2 meet."""
    for g in (g1, g2):
        if g.order != 1:
            raise UsageError("the order-5 reduction takes order-1 machines")
        if not g.input_alphabet <= BINARY:
            raise AlphabetError("the order-5 reduction takes machines over {0,1}")
    l1 = hp.bin_to_unary(hp.bin_to_unary(g1)).relabel()
    l2 = _one_prefixed_counter(PredicateHandle.power(g2, "P2"))
    return l1, l2


def hopa_meets_counter(h: hp.Hopa, m: inc.IncrementingAutomaton, budget: int, max_length: int | None = None) -> Tri:
    """YES if some enumerated word of L(h) lies in L(m); NO if the
    enumeration saturates without one (with ``max_length`` that only covers
    words up to that length)."""
    res = hp.run(h, budget, max_length)
    unknown = res.saturated is not Tri.YES
    for w in sorted(res.accepted, key=lambda w: (len(w), w)):
        answer = inc.member(m, w, budget)
        if answer is Tri.YES:
            return Tri.YES
        unknown |= answer is Tri.UNKNOWN
    return Tri.UNKNOWN if unknown else Tri.NO
