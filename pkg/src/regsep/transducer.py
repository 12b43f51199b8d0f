"""Asynchronous transducers and the rational transductions used elsewhere.

An edge ``(p, read, write, q)`` reads the input word ``read`` and writes the
output word ``write``.  The relation realised by a transducer is the set of
pairs ``(output, input)``; ``apply`` direction is always input -> output.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import AlphabetError, FormatError, ParameterError
from .kernel import (
    BINARY,
    PAD,
    Bounded,
    Nfa,
    Tri,
    as_word,
    fresh_names,
    freeze,
    ordered,
)


@dataclass(frozen=True)
class Transducer:
    states: frozenset
    input_alphabet: frozenset
    output_alphabet: frozenset
    edges: frozenset  # (src, read, write, dst)
    initial: Hashable
    finals: frozenset

    def __post_init__(self):
        freeze(self, "states", frozenset(self.states))
        freeze(self, "input_alphabet", frozenset(self.input_alphabet))
        freeze(self, "output_alphabet", frozenset(self.output_alphabet))
        freeze(
            self,
            "edges",
            frozenset((p, as_word(r), as_word(w), q) for p, r, w, q in self.edges),
        )
        freeze(self, "finals", frozenset(self.finals))
        if self.initial not in self.states:
            raise FormatError(f"initial state {self.initial!r} not declared")
        if not self.finals <= self.states:
            raise FormatError("final states must be declared states")
        for p, r, w, q in self.edges:
            if p not in self.states or q not in self.states:
                raise FormatError(f"edge {p!r}->{q!r} uses an undeclared state")
            if not set(r) <= self.input_alphabet:
                raise AlphabetError(f"edge reads {r!r} outside the input alphabet")
            if not set(w) <= self.output_alphabet:
                raise AlphabetError(f"edge writes {w!r} outside the output alphabet")

    @cached_property
    def _out(self) -> dict:
        out = {q: [] for q in self.states}
        for p, r, w, q in ordered(self.edges):
            out[p].append((r, w, q))
        return out

    def letter_normalized(self) -> "Transducer":
        """Equivalent transducer whose edges read one letter, write one letter,
        or do neither."""
        long_edges = [e for e in ordered(self.edges) if len(e[1]) + len(e[2]) > 1]
        if not long_edges:
            return self
        need = sum(len(r) + len(w) - 1 for _, r, w, _ in long_edges)
        names = iter(fresh_names(self.states, need))
        states = set(self.states)
        edges = {e for e in self.edges if len(e[1]) + len(e[2]) <= 1}
        for p, r, w, q in long_edges:
            steps = [((a,), ()) for a in r] + [((), (b,)) for b in w]
            cur = p
            for rr, ww in steps[:-1]:
                nxt = next(names)
                states.add(nxt)
                edges.add((cur, rr, ww, nxt))
                cur = nxt
            rr, ww = steps[-1]
            edges.add((cur, rr, ww, q))
        return Transducer(
            states, self.input_alphabet, self.output_alphabet, edges, self.initial, self.finals
        )

    def relates(self, output, inp) -> bool:
        """Exact test for ``(output, inp)`` in the relation."""
        output, inp = as_word(output), as_word(inp)
        t = self.letter_normalized()
        start = (t.initial, 0, 0)
        seen = {start}
        stack = [start]
        while stack:
            p, i, j = stack.pop()
            if p in t.finals and i == len(inp) and j == len(output):
                return True
            for r, w, q in t._out[p]:
                if r and (i >= len(inp) or inp[i] != r[0]):
                    continue
                if w and (j >= len(output) or output[j] != w[0]):
                    continue
                cfg = (q, i + len(r), j + len(w))
                if cfg not in seen:
                    seen.add(cfg)
                    stack.append(cfg)
        return False

    def relabel(self) -> "Transducer":
        names = {q: i for i, q in enumerate(ordered(self.states))}
        names = {q: f"t{i}" for q, i in names.items()}
        return Transducer(
            set(names.values()),
            self.input_alphabet,
            self.output_alphabet,
            {(names[p], r, w, names[q]) for p, r, w, q in self.edges},
            names[self.initial],
            {names[q] for q in self.finals},
        )


def invert(t: Transducer) -> Transducer:
    """Swap the read and write labels; realises the inverse relation."""
    return Transducer(
        t.states,
        t.output_alphabet,
        t.input_alphabet,
        {(p, w, r, q) for p, r, w, q in t.edges},
        t.initial,
        t.finals,
    )


def compose(t1: Transducer, t2: Transducer) -> Transducer:
    """Run ``t2`` first, then feed its output to ``t1``."""
    if not t2.output_alphabet <= t1.input_alphabet:
        raise AlphabetError("output alphabet of t2 must be contained in input alphabet of t1")
    a, b = t2.letter_normalized(), t1.letter_normalized()
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    edges = set()
    while queue:
        p, q = queue.popleft()
        moves = []
        for r, w, p2 in a._out[p]:
            if not w:
                moves.append((r, (), (p2, q)))
            else:
                for r1, w1, q2 in b._out[q]:
                    if r1 == w:
                        moves.append((r, w1, (p2, q2)))
        for r1, w1, q2 in b._out[q]:
            if not r1:
                moves.append(((), w1, (p, q2)))
        for r, w, nxt in moves:
            edges.add(((p, q), r, w, nxt))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    finals = {(p, q) for p, q in seen if p in a.finals and q in b.finals}
    return Transducer(seen, t2.input_alphabet, t1.output_alphabet, edges, start, finals)


def apply_to_word(t: Transducer, w, budget: int) -> Bounded:
    """All outputs for input ``w`` found within ``budget`` expansions."""
    if budget < 1:
        raise ParameterError("budget must be positive")
    w = as_word(w)
    t = t.letter_normalized()
    start = (t.initial, 0, ())
    seen = {start}
    queue = deque([start])
    outputs = set()
    steps = 0
    while queue and steps < budget:
        p, i, out = queue.popleft()
        steps += 1
        if p in t.finals and i == len(w):
            outputs.add(out)
        for r, wr, q in t._out[p]:
            if r and (i >= len(w) or w[i] != r[0]):
                continue
            cfg = (q, i + len(r), out + wr)
            if cfg not in seen:
                seen.add(cfg)
                queue.append(cfg)
    return Bounded(frozenset(outputs), Tri.YES if not queue else Tri.UNKNOWN)


def image(t: Transducer, nfa: Nfa) -> Nfa:
    """Regular language T(L(nfa))."""
    a, m = t.letter_normalized(), nfa.letter_normalized()
    start = (m.initial, a.initial)
    seen = {start}
    queue = deque([start])
    edges = set()
    m_out = {q: [] for q in m.states}
    for p, w, q in ordered(m.edges):
        m_out[p].append((w, q))
    while queue:
        p, q = queue.popleft()
        moves = []
        for w, p2 in m_out[p]:
            if not w:
                moves.append(((), (p2, q)))
        for r, wr, q2 in a._out[q]:
            if not r:
                moves.append((wr, (p, q2)))
            else:
                for w, p2 in m_out[p]:
                    if w == r:
                        moves.append((wr, (p2, q2)))
        for label, nxt in moves:
            edges.add(((p, q), label, nxt))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    finals = {(p, q) for p, q in seen if p in m.finals and q in a.finals}
    return Nfa(seen, t.output_alphabet, edges, start, finals)


# ---------------------------------------------------------------------------
# Stock transductions


def identity(alphabet: Iterable) -> Transducer:
    alphabet = frozenset(alphabet)
    return Transducer({0}, alphabet, alphabet, {(0, (a,), (a,), 0) for a in alphabet}, 0, {0})


def empty_transducer(input_alphabet: Iterable, output_alphabet: Iterable) -> Transducer:
    return Transducer({0}, input_alphabet, output_alphabet, set(), 0, set())


def homomorphism(mapping: Mapping, output_alphabet: Iterable | None = None) -> Transducer:
    """Letter-to-word homomorphism; letters missing from ``mapping`` are not in the domain."""
    images = {a: as_word(v) for a, v in mapping.items()}
    if output_alphabet is None:
        output_alphabet = {b for v in images.values() for b in v}
    edges = {(0, (a,), v, 0) for a, v in images.items()}
    return Transducer({0}, images.keys(), output_alphabet, edges, 0, {0})


def inverse_homomorphism(mapping: Mapping, output_alphabet: Iterable | None = None) -> Transducer:
    return invert(homomorphism(mapping, output_alphabet))


def restriction(nfa: Nfa) -> Transducer:
    """Identity relation restricted to L(nfa)."""
    m = nfa.letter_normalized()
    edges = {(p, w, w, q) for p, w, q in m.edges}
    return Transducer(m.states, m.alphabet, m.alphabet, edges, m.initial, m.finals)


def word_to_unary_length(alphabet: Iterable = BINARY) -> Transducer:
    """Reads any w, writes 1 0^|w|."""
    alphabet = frozenset(alphabet)
    edges = {("s", (), ("1",), "f")} | {("f", (a,), ("0",), "f") for a in alphabet}
    return Transducer({"s", "f"}, alphabet, BINARY, edges, "s", {"f"})


def columns(arity: int, padded: bool) -> list:
    symbols = ("0", "1", PAD) if padded else ("0", "1")
    cols = itertools.product(symbols, repeat=arity)
    if padded:
        return [c for c in cols if any(a != PAD for a in c)]
    return list(cols)


def _check_positions(arity_in: int, positions: Sequence[int], arity_out: int):
    positions = tuple(positions)
    if len(positions) != arity_in:
        raise ParameterError("need one position per input track")
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise ParameterError("positions must be strictly increasing")
    if positions and (positions[0] < 0 or positions[-1] >= arity_out):
        raise ParameterError("position index out of range")
    return positions


def cylindrify(
    arity_in: int, positions: Sequence[int], arity_out: int, padded: bool = True
) -> Transducer:
    """Map an arity_in convolution to every arity_out convolution whose tracks
    at ``positions`` (0-based, increasing) are the input tracks.

    With ``padded=False`` all tracks have equal length (numbers aligned by
    leading zeros) and the new tracks are free bits in every column.
    """
    positions = _check_positions(arity_in, positions, arity_out)
    free = [i for i in range(arity_out) if i not in positions]
    in_cols = columns(arity_in, padded)
    out_cols = columns(arity_out, padded)

    def merge(col, fill):
        out = [None] * arity_out
        for i, a in zip(positions, col):
            out[i] = a
        for i, a in zip(free, fill):
            out[i] = a
        return tuple(out)

    if not padded:
        edges = {
            (0, (c,), (merge(c, fill),), 0)
            for c in in_cols
            for fill in itertools.product("01", repeat=len(free))
        }
        return Transducer({0}, in_cols, out_cols, edges, 0, {0})

    # state: (phase, tracks among `free` that have already ended)
    def fills(ended):
        choices = [(PAD,) if i in ended else ("0", "1", PAD) for i in free]
        for fill in itertools.product(*choices):
            yield fill, frozenset(i for i, a in zip(free, fill) if a == PAD)

    start = ("copy", frozenset())
    seen = {start}
    queue = deque([start])
    edges = set()
    while queue:
        phase, ended = state = queue.popleft()
        moves = []
        if phase == "copy":
            moves.append(((), (), ("ext", ended)))
            for c in in_cols:
                for fill, e2 in fills(ended):
                    moves.append(((c,), (merge(c, fill),), ("copy", e2)))
        else:
            blank = (PAD,) * arity_in
            for fill, e2 in fills(ended):
                if len(e2) < len(free):
                    moves.append(((), (merge(blank, fill),), ("ext", e2)))
        for r, w, nxt in moves:
            edges.add((state, r, w, nxt))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return Transducer(seen, in_cols, out_cols, edges, start, seen)


def project(arity_in: int, keep: Sequence[int], padded: bool = True) -> Transducer:
    """Homomorphism dropping every track not listed in ``keep``."""
    keep = _check_positions(len(tuple(keep)), keep, arity_in)
    in_cols = columns(arity_in, padded)
    out_cols = columns(len(keep), padded)
    edges = set()
    for c in in_cols:
        d = tuple(c[i] for i in keep)
        if padded and all(a == PAD for a in d):
            d_word = ()
        else:
            d_word = (d,)
        edges.add((0, (c,), d_word, 0))
    return Transducer({0}, in_cols, out_cols, edges, 0, {0})


def zero_normalizer(arity: int) -> Transducer:
    """Relates 0^i v to 0^j v where 0 is the all-zero column and v is empty or
    starts with a nonzero column: strips and re-pads leading zeros."""
    cols = columns(arity, padded=False)
    zero = ("0",) * arity
    edges = {("pad", (), (zero,), "pad"), ("pad", (), (), "strip")}
    edges.add(("strip", (zero,), (), "strip"))
    for c in cols:
        if c != zero:
            edges.add(("strip", (c,), (c,), "copy"))
        edges.add(("copy", (c,), (c,), "copy"))
    return Transducer({"pad", "strip", "copy"}, cols, cols, edges, "pad", {"strip", "copy"})
