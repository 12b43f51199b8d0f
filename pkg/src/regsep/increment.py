"""Incrementing automata: one counter that can only go up, and acceptance
pairs (state, predicate) that test the final counter value.

Each such machine is a finite union of languages T(a^P): a transducer T that
reads one ``a`` per increment and writes the edge word, applied to the unary
words whose length lies in the predicate P.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .errors import AlphabetError, FormatError
from .kernel import Nfa, Tri, as_word, count_set, fresh_names, freeze, ordered
from .predicates import PredicateHandle, pred_meets_ap, pred_member
from .transducer import Transducer, compose, image, invert

UNARY = "a"


@dataclass(frozen=True)
class IncrementingAutomaton:
    states: frozenset
    alphabet: frozenset
    edges: frozenset  # (src, word, add in {0, 1}, dst)
    initial: Hashable
    accepts: frozenset  # (state, PredicateHandle)

    def __post_init__(self):
        freeze(self, "states", frozenset(self.states))
        freeze(self, "alphabet", frozenset(self.alphabet))
        edges = set()
        for p, w, add, q in self.edges:
            w = as_word(w)
            if add not in (0, 1):
                raise FormatError(f"increment must be 0 or 1, got {add!r}")
            if p not in self.states or q not in self.states:
                raise FormatError(f"edge {p!r}->{q!r} uses an undeclared state")
            if not set(w) <= self.alphabet:
                raise AlphabetError(f"edge word {w!r} outside the alphabet")
            edges.add((p, w, add, q))
        freeze(self, "edges", frozenset(edges))
        freeze(self, "accepts", frozenset(self.accepts))
        if self.initial not in self.states:
            raise FormatError(f"initial state {self.initial!r} not declared")
        for q, pred in self.accepts:
            if q not in self.states:
                raise FormatError(f"acceptance pair uses undeclared state {q!r}")
            if not isinstance(pred, PredicateHandle):
                raise FormatError("acceptance pairs need predicate handles")

    def relabel(self) -> "IncrementingAutomaton":
        names = {q: f"c{i}" for i, q in enumerate(ordered(self.states))}
        return IncrementingAutomaton(
            set(names.values()),
            self.alphabet,
            {(names[p], w, b, names[q]) for p, w, b, q in self.edges},
            names[self.initial],
            {(names[q], pred) for q, pred in self.accepts},
        )


def counting(pred: PredicateHandle, letter=UNARY) -> IncrementingAutomaton:
    """Machine for {letter^n : n in pred}."""
    return IncrementingAutomaton({"q"}, {letter}, {("q", (letter,), 1, "q")}, "q", {("q", pred)})


def _pair_key(pair):
    q, pred = pair
    return (repr(q), pred.kind.value, pred.name, sorted(pred.values))


def decompose(m: IncrementingAutomaton) -> list:
    """One (transducer, predicate) part per acceptance pair."""
    parts = []
    edges = {(p, (UNARY,) * b, w, q) for p, w, b, q in m.edges}
    for q, pred in sorted(m.accepts, key=_pair_key):
        t = Transducer(m.states, {UNARY}, m.alphabet, edges, m.initial, {q})
        parts.append((t, pred))
    return parts


def _unary_steps(t: Transducer) -> Transducer:
    """Split edges reading a^m (m >= 2) into single-letter steps."""
    if not t.input_alphabet <= {UNARY}:
        raise FormatError(f"part transducers must read over {{{UNARY}}}")
    long_edges = [e for e in ordered(t.edges) if len(e[1]) > 1]
    if not long_edges:
        return t
    names = iter(fresh_names(t.states, sum(len(e[1]) - 1 for e in long_edges)))
    states = set(t.states)
    edges = set(t.edges) - set(long_edges)
    for p, r, w, q in long_edges:
        cur = p
        for _ in r[:-1]:
            nxt = next(names)
            states.add(nxt)
            edges.add((cur, (UNARY,), (), nxt))
            cur = nxt
        edges.add((cur, (UNARY,), w, q))
    return Transducer(states, t.input_alphabet, t.output_alphabet, edges, t.initial, t.finals)


def recompose(parts: Sequence, alphabet: Iterable = ()) -> IncrementingAutomaton:
    """Machine for the union of the T(a^P)."""
    start = ("init",)
    states = {start}
    edges = set()
    accepts = set()
    alphabet = set(alphabet)
    for i, (t, pred) in enumerate(parts):
        t = _unary_steps(t)
        alphabet |= t.output_alphabet
        states |= {(i, q) for q in t.states}
        edges.add((start, (), 0, (i, t.initial)))
        edges |= {((i, p), w, len(r), (i, q)) for p, r, w, q in t.edges}
        accepts |= {((i, f), pred) for f in t.finals}
    return IncrementingAutomaton(states, alphabet, edges, start, accepts)


def apply_transduction(t: Transducer, m: IncrementingAutomaton) -> IncrementingAutomaton:
    if not m.alphabet <= t.input_alphabet:
        raise AlphabetError("machine alphabet must be contained in the transducer's input alphabet")
    parts = [(compose(t, part), pred) for part, pred in decompose(m)]
    return recompose(parts, t.output_alphabet)


def _meets(pred: PredicateHandle, counts, budget: int) -> Tri:
    """Does ``pred`` meet the ultimately periodic set ``counts``?"""
    answers = [pred_member(pred, n, budget) for n in sorted(counts.finite)]
    answers += [pred_meets_ap(pred, base, per, budget) for base, per in counts.progressions()]
    return _any(answers)


def _any(answers) -> Tri:
    if Tri.YES in answers:
        return Tri.YES
    if Tri.UNKNOWN in answers:
        return Tri.UNKNOWN
    return Tri.NO


def counts_for_word(t: Transducer, w) -> Nfa:
    """Automaton over {a} for {a^n : (w, a^n) in T}."""
    w = as_word(w)
    alphabet = t.output_alphabet | set(w)
    probe = Nfa.from_words([w], alphabet)
    back = Transducer(t.states, t.input_alphabet, alphabet, t.edges, t.initial, t.finals)
    return image(invert(back), probe).with_alphabet({UNARY})


def member(m: IncrementingAutomaton, w, budget: int = 10000) -> Tri:
    w = as_word(w)
    if not set(w) <= m.alphabet:
        return Tri.NO
    answers = []
    for t, pred in decompose(m):
        counts = count_set(counts_for_word(t, w))
        answers.append(_meets(pred, counts, budget))
        if answers[-1] is Tri.YES:
            break
    return _any(answers)


def domain_counts(t: Transducer) -> Nfa:
    """Automaton over {a} for the read side of T."""
    return image(invert(t), Nfa.universal(t.output_alphabet)).with_alphabet({UNARY})


def is_empty(m: IncrementingAutomaton, budget: int = 10000) -> Tri:
    answers = [_meets(pred, count_set(domain_counts(t)), budget) for t, pred in decompose(m)]
    return ~_any(answers)
