"""Words, the binary-value map, finite automata, convolutions and Parikh images.

Words are tuples of hashable letters.  Plain strings are accepted wherever a
word is expected and are split into one-character letters, so ``"110"`` and
``("1", "1", "0")`` denote the same word.  Convolution letters are tuples.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple, Sequence

from .errors import AlphabetError, ArityError, FormatError, ParameterError

PAD = "□"
BINARY = frozenset({"0", "1"})

Word = tuple


class Tri(enum.Enum):
    """Three-valued verdict; UNKNOWN only comes out of budgeted procedures."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, flag: bool) -> "Tri":
        return cls.YES if flag else cls.NO

    @property
    def known(self) -> bool:
        return self is not Tri.UNKNOWN

    def __invert__(self) -> "Tri":
        if self is Tri.YES:
            return Tri.NO
        if self is Tri.NO:
            return Tri.YES
        return Tri.UNKNOWN

    def __bool__(self):
        raise TypeError("Tri has no truth value; compare against Tri.YES explicitly")


class Bounded(NamedTuple):
    """Result of a budgeted enumeration: what was found plus whether it is complete."""

    values: frozenset
    verdict: Tri


def as_word(w) -> Word:
    if isinstance(w, str):
        return tuple(w)
    return tuple(w)


def word_str(w: Word) -> str:
    return "".join(str(a) for a in w)


def ordered(items: Iterable) -> list:
    """Deterministic order for heterogeneous hashables (states may mix str/tuple)."""
    return sorted(items, key=repr)


def fresh_names(existing: Iterable, count: int, tag: str = "~") -> list:
    taken = set(existing)
    out = []
    i = 0
    while len(out) < count:
        cand = (tag, i)
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        i += 1
    return out


def freeze(obj, name, value):
    object.__setattr__(obj, name, value)


def nu_value(w) -> int:
    """Binary value of a {0,1}-word, most significant bit first."""
    value = 0
    for a in as_word(w):
        if a == "1":
            value = 2 * value + 1
        elif a == "0":
            value = 2 * value
        else:
            raise AlphabetError(f"symbol {a!r} is not a binary digit")
    return value


def to_binary(n: int) -> Word:
    """Canonical representative of n: no leading zeros, ε for zero."""
    if n < 0:
        raise ParameterError("negative number")
    return tuple(bin(n)[2:]) if n else ()


def strongly_connected(nodes: Iterable, succ: dict) -> dict:
    """Map each node to a representative of its strongly connected component
    (iterative Tarjan)."""
    index, low, comp = {}, {}, {}
    on_stack, stack = set(), []
    counter = 0
    for root in ordered(nodes):
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ.get(root, ())))]
        while work:
            node, it = work[-1]
            nxt = next(it, None)
            if nxt is None:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[node])
                if low[node] == index[node]:
                    while True:
                        x = stack.pop()
                        on_stack.discard(x)
                        comp[x] = node
                        if x == node:
                            break
            elif nxt not in index:
                index[nxt] = low[nxt] = counter
                counter += 1
                stack.append(nxt)
                on_stack.add(nxt)
                work.append((nxt, iter(succ.get(nxt, ()))))
            elif nxt in on_stack:
                low[node] = min(low[node], index[nxt])
    return comp


# ---------------------------------------------------------------------------
# Finite automata


@dataclass(frozen=True)
class Nfa:
    states: frozenset
    alphabet: frozenset
    edges: frozenset  # (src, word, dst)
    initial: Hashable
    finals: frozenset

    def __post_init__(self):
        freeze(self, "states", frozenset(self.states))
        freeze(self, "alphabet", frozenset(self.alphabet))
        freeze(self, "edges", frozenset((p, as_word(w), q) for p, w, q in self.edges))
        freeze(self, "finals", frozenset(self.finals))
        if self.initial not in self.states:
            raise FormatError(f"initial state {self.initial!r} not declared")
        if not self.finals <= self.states:
            raise FormatError("final states must be declared states")
        for p, w, q in self.edges:
            if p not in self.states or q not in self.states:
                raise FormatError(f"edge {p!r}->{q!r} uses an undeclared state")
            for a in w:
                if a not in self.alphabet:
                    raise AlphabetError(f"letter {a!r} not in alphabet")

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_words(cls, words: Iterable, alphabet: Iterable) -> "Nfa":
        words = ordered({as_word(w) for w in words})
        edges = {(0, w, 1) for w in words}
        return cls({0, 1}, alphabet, edges, 0, {1})

    @classmethod
    def universal(cls, alphabet: Iterable) -> "Nfa":
        alphabet = frozenset(alphabet)
        return cls({0}, alphabet, {(0, (a,), 0) for a in alphabet}, 0, {0})

    @classmethod
    def empty(cls, alphabet: Iterable) -> "Nfa":
        return cls({0}, alphabet, set(), 0, set())

    # -- structure -------------------------------------------------------------

    @cached_property
    def _out(self) -> dict:
        out = {q: [] for q in self.states}
        for p, w, q in ordered(self.edges):
            out[p].append((w, q))
        return out

    def letter_normalized(self) -> "Nfa":
        """Equivalent automaton whose edges read at most one letter."""
        long_edges = [e for e in ordered(self.edges) if len(e[1]) > 1]
        if not long_edges:
            return self
        need = sum(len(w) - 1 for _, w, _ in long_edges)
        names = iter(fresh_names(self.states, need))
        states = set(self.states)
        edges = {e for e in self.edges if len(e[1]) <= 1}
        for p, w, q in long_edges:
            cur = p
            for a in w[:-1]:
                nxt = next(names)
                states.add(nxt)
                edges.add((cur, (a,), nxt))
                cur = nxt
            edges.add((cur, (w[-1],), q))
        return Nfa(states, self.alphabet, edges, self.initial, self.finals)

    def _closure(self, sources: Iterable) -> frozenset:
        seen = set(sources)
        stack = list(seen)
        out = self._out
        while stack:
            p = stack.pop()
            for w, q in out[p]:
                if not w and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def _step(self, current: frozenset, letter) -> frozenset:
        out = self._out
        nxt = {q for p in current for w, q in out[p] if w == (letter,)}
        return self._closure(nxt)

    def accepts(self, word) -> bool:
        m = self.letter_normalized()
        cur = m._closure([m.initial])
        for a in as_word(word):
            if a not in m.alphabet:
                return False
            cur = m._step(cur, a)
            if not cur:
                return False
        return bool(cur & m.finals)

    def reachable(self) -> frozenset:
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            p = stack.pop()
            for _, q in self._out[p]:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def coreachable(self) -> frozenset:
        back = {q: [] for q in self.states}
        for p, _, q in self.edges:
            back[q].append(p)
        seen = set(self.finals)
        stack = list(seen)
        while stack:
            q = stack.pop()
            for p in back[q]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return frozenset(seen)

    def trim(self) -> "Nfa":
        useful = self.reachable() & self.coreachable()
        states = useful | {self.initial}
        edges = {(p, w, q) for p, w, q in self.edges if p in useful and q in useful}
        return Nfa(states, self.alphabet, edges, self.initial, self.finals & useful)

    def is_empty(self) -> bool:
        return not (self.reachable() & self.finals)

    def is_deterministic(self) -> bool:
        seen = set()
        for p, w, _ in self.edges:
            if len(w) != 1 or (p, w) in seen:
                return False
            seen.add((p, w))
        return True

    def is_complete(self) -> bool:
        have = {(p, w[0]) for p, w, _ in self.edges if len(w) == 1}
        return all((p, a) in have for p in self.states for a in self.alphabet)

    def is_finite(self) -> bool:
        """No cycle through a letter-reading edge among useful states."""
        m = self.trim()
        if m.is_empty():
            return True
        comp = strongly_connected(m.states, {p: [q for _, q in m._out[p]] for p in m.states})
        return not any(w and comp[p] == comp[q] for p, w, q in m.edges)

    def relabel(self) -> "Nfa":
        """Rename states to 0..n-1 in breadth-first discovery order."""
        names = {}
        queue = deque([self.initial])
        names[self.initial] = 0
        while queue:
            p = queue.popleft()
            for _, q in self._out[p]:
                if q not in names:
                    names[q] = len(names)
                    queue.append(q)
        for q in ordered(self.states):
            if q not in names:
                names[q] = len(names)
        return Nfa(
            set(names.values()),
            self.alphabet,
            {(names[p], w, names[q]) for p, w, q in self.edges},
            0,
            {names[q] for q in self.finals},
        )

    # -- boolean operations --------------------------------------------------

    def with_alphabet(self, alphabet: Iterable) -> "Nfa":
        alphabet = frozenset(alphabet) | self.alphabet
        return Nfa(self.states, alphabet, self.edges, self.initial, self.finals)

    def determinize(self) -> "Nfa":
        """Complete deterministic automaton over the same alphabet (states 0..n-1)."""
        m = self.letter_normalized()
        letters = ordered(m.alphabet)
        start = m._closure([m.initial])
        index = {start: 0}
        queue = deque([start])
        edges = set()
        finals = set()
        while queue:
            cur = queue.popleft()
            i = index[cur]
            if cur & m.finals:
                finals.add(i)
            for a in letters:
                nxt = m._step(cur, a)
                if nxt not in index:
                    index[nxt] = len(index)
                    queue.append(nxt)
                edges.add((i, (a,), index[nxt]))
        return Nfa(set(index.values()), m.alphabet, edges, 0, finals)

    def minimize(self) -> "Nfa":
        """Minimal trimmed deterministic automaton (dead state removed)."""
        d = self.determinize()
        letters = ordered(d.alphabet)
        delta = {(p, w[0]): q for p, w, q in d.edges}
        block = {q: int(q in d.finals) for q in d.states}
        count = len(set(block.values()))
        while True:
            sig = {q: (block[q],) + tuple(block[delta[q, a]] for a in letters) for q in d.states}
            ids = {}
            for q in sorted(d.states):
                ids.setdefault(sig[q], len(ids))
            block = {q: ids[sig[q]] for q in d.states}
            if len(ids) == count:
                break
            count = len(ids)
        edges = {(block[p], (a,), block[delta[p, a]]) for p in d.states for a in letters}
        m = Nfa(set(block.values()), d.alphabet, edges, block[0], {block[q] for q in d.finals})
        return m.trim().relabel()

    def complement(self, alphabet: Iterable = ()) -> "Nfa":
        d = self.with_alphabet(alphabet).determinize()
        return Nfa(d.states, d.alphabet, d.edges, d.initial, d.states - d.finals)

    def intersect(self, other: "Nfa") -> "Nfa":
        a, b = self.letter_normalized(), other.letter_normalized()
        start = (a.initial, b.initial)
        seen = {start}
        queue = deque([start])
        edges = set()
        while queue:
            p, q = queue.popleft()
            succ = []
            for w, p2 in a._out[p]:
                if not w:
                    succ.append(((), (p2, q)))
            for w, q2 in b._out[q]:
                if not w:
                    succ.append(((), (p, q2)))
            for w, p2 in a._out[p]:
                if w:
                    for v, q2 in b._out[q]:
                        if v == w:
                            succ.append((w, (p2, q2)))
            for w, nxt in succ:
                edges.add(((p, q), w, nxt))
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        finals = {(p, q) for p, q in seen if p in a.finals and q in b.finals}
        return Nfa(seen, a.alphabet | b.alphabet, edges, start, finals)

    def union(self, other: "Nfa") -> "Nfa":
        start = ("u",)
        states = {start} | {(0, p) for p in self.states} | {(1, q) for q in other.states}
        edges = {(start, (), (0, self.initial)), (start, (), (1, other.initial))}
        edges |= {((0, p), w, (0, q)) for p, w, q in self.edges}
        edges |= {((1, p), w, (1, q)) for p, w, q in other.edges}
        finals = {(0, q) for q in self.finals} | {(1, q) for q in other.finals}
        return Nfa(states, self.alphabet | other.alphabet, edges, start, finals)

    def words_up_to(self, max_len: int) -> frozenset:
        """All accepted words of length at most ``max_len``."""
        m = self.letter_normalized()
        letters = ordered(m.alphabet)
        found = set()
        layer = {(): m._closure([m.initial])}
        for _ in range(max_len + 1):
            nxt = {}
            for w, cur in layer.items():
                if cur & m.finals:
                    found.add(w)
                for a in letters:
                    s = m._step(cur, a)
                    if s:
                        nxt[w + (a,)] = s
            layer = nxt
        return frozenset(found)


def binary_reps(n: int) -> Nfa:
    """Recognizer of every w with nu(w) = n; leading zeros allowed."""
    if n < 0:
        raise ParameterError("negative number")
    bits = to_binary(n)
    states = set(range(len(bits) + 1))
    edges = {(0, ("0",), 0)}
    edges |= {(i, (b,), i + 1) for i, b in enumerate(bits)}
    return Nfa(states, BINARY, edges, 0, {len(bits)})


def ap_binary_dfa(m: int, p: int) -> Nfa:
    """Deterministic recognizer of binary words whose value lies in m + p*N."""
    if p < 1:
        raise ParameterError("period must be positive")
    if m < 0:
        raise ParameterError("offset must be nonnegative")
    target = m % p

    # below m the exact value is kept; from m on only the residue matters
    def succ(state, bit):
        kind, v = state
        if kind == "v":
            nv = 2 * v + bit
            return ("v", nv) if nv < m else ("r", nv % p)
        return ("r", (2 * v + bit) % p)

    start = ("v", 0) if m > 0 else ("r", 0)
    seen = {start}
    queue = deque([start])
    edges = set()
    while queue:
        s = queue.popleft()
        for bit in (0, 1):
            t = succ(s, bit)
            edges.add((s, (str(bit),), t))
            if t not in seen:
                seen.add(t)
                queue.append(t)
    finals = {s for s in seen if s[0] == "r" and s[1] == target}
    return Nfa(seen, BINARY, edges, start, finals)


# ---------------------------------------------------------------------------
# Convolutions


@dataclass(frozen=True)
class ConvolutionWord:
    columns: tuple
    arity: int

    def __post_init__(self):
        freeze(self, "columns", tuple(tuple(c) for c in self.columns))
        ended = [False] * self.arity
        for col in self.columns:
            if len(col) != self.arity:
                raise ArityError("column arity mismatch")
            if all(a == PAD for a in col):
                raise FormatError("all-pad column")
            for i, a in enumerate(col):
                if a == PAD:
                    ended[i] = True
                elif ended[i]:
                    raise FormatError(f"track {i} resumes after padding")

    def deconvolve(self) -> tuple:
        return tuple(
            tuple(col[i] for col in self.columns if col[i] != PAD) for i in range(self.arity)
        )

    def __len__(self):
        return len(self.columns)


def convolve(ws: Sequence) -> ConvolutionWord:
    ws = [as_word(w) for w in ws]
    if not ws:
        raise ArityError("convolution needs at least one word")
    length = max(len(w) for w in ws)
    cols = [tuple(w[j] if j < len(w) else PAD for w in ws) for j in range(length)]
    return ConvolutionWord(tuple(cols), len(ws))


# ---------------------------------------------------------------------------
# Ultimately periodic subsets of N (count sets of unary automata)


@dataclass(frozen=True)
class UltimatelyPeriodic:
    """``finite`` below ``threshold``; from there on n is in the set iff
    ``(n - threshold) % period`` lies in ``residues``."""

    finite: frozenset
    threshold: int
    period: int
    residues: frozenset

    def __contains__(self, n: int) -> bool:
        if n < self.threshold:
            return n in self.finite
        return (n - self.threshold) % self.period in self.residues

    def is_empty(self) -> bool:
        return not self.finite and not self.residues

    def is_finite(self) -> bool:
        return not self.residues

    def progressions(self) -> list:
        """The infinite part as sorted (base, period) progressions."""
        return [(self.threshold + r, self.period) for r in sorted(self.residues)]


def count_set(nfa: Nfa) -> UltimatelyPeriodic:
    """Lengths of the words accepted by an automaton over at most one letter."""
    if len(nfa.alphabet) > 1:
        raise AlphabetError("count sets need a unary alphabet")
    m = nfa.letter_normalized()
    letter = next(iter(m.alphabet), None)
    cur = m._closure([m.initial])
    seen = {}
    seq = []
    while cur not in seen:
        seen[cur] = len(seq)
        seq.append(cur)
        cur = m._step(cur, letter) if letter is not None else frozenset()
    threshold = seen[cur]
    period = len(seq) - threshold
    finite = frozenset(i for i in range(threshold) if seq[i] & m.finals)
    residues = frozenset(r for r in range(period) if seq[threshold + r] & m.finals)
    return UltimatelyPeriodic(finite, threshold, period, residues)


# ---------------------------------------------------------------------------
# Semilinear sets and two-letter Parikh images


@dataclass(frozen=True)
class LinearSet:
    base: tuple
    periods: tuple

    def contains(self, vec: Sequence[int]) -> bool:
        rest = tuple(v - b for v, b in zip(vec, self.base))
        if any(r < 0 for r in rest):
            return False
        # periods are nonnegative, so only vectors below `rest` matter
        seen = {tuple(0 for _ in rest)}
        stack = list(seen)
        while stack:
            cur = stack.pop()
            if cur == rest:
                return True
            for p in self.periods:
                nxt = tuple(c + d for c, d in zip(cur, p))
                if nxt not in seen and all(a <= b for a, b in zip(nxt, rest)):
                    seen.add(nxt)
                    stack.append(nxt)
        return False


@dataclass(frozen=True)
class SemilinearSet:
    arity: int
    components: tuple

    def __post_init__(self):
        for comp in self.components:
            vecs = (comp.base,) + tuple(comp.periods)
            if any(len(v) != self.arity for v in vecs):
                raise ArityError("vector arity mismatch")
            if any(x < 0 for v in vecs for x in v):
                raise ParameterError("semilinear vectors are nonnegative")

    def __contains__(self, vec) -> bool:
        return any(c.contains(tuple(vec)) for c in self.components)

    def is_empty(self) -> bool:
        return not self.components


def _simple_cycles(states: list, out: dict) -> set:
    """(state set, vector) of every simple cycle; out[p] = [(vec, q), ...]."""
    rank = {q: i for i, q in enumerate(states)}
    found = set()
    for start in states:
        r0 = rank[start]
        stack = [(start, frozenset([start]), (0, 0))]
        while stack:
            p, visited, vec = stack.pop()
            for v, q in out[p]:
                nv = (vec[0] + v[0], vec[1] + v[1])
                if q == start:
                    found.add((visited, nv))
                elif rank[q] > r0 and q not in visited:
                    stack.append((q, visited | {q}, nv))
    return found


def parikh_pair(nfa: Nfa, letters: Sequence | None = None) -> SemilinearSet:
    """Parikh image of a two-letter automaton as a semilinear set.

    Every accepting walk with visited state set U reduces, by cutting simple
    cycles that keep U intact, to a walk of at most |U|^2 + 2|U| edges; the
    cut cycles all live inside U.  So the image is the union over U of
    (short-walk vectors) + (simple cycles inside U)*.
    """
    if letters is None:
        letters = ordered(nfa.alphabet)
        if len(letters) != 2:
            raise AlphabetError("parikh_pair needs an alphabet of exactly two letters")
    b, c = letters
    extra = nfa.alphabet - {b, c}
    if extra:
        raise AlphabetError(f"letters {sorted(extra)} outside the two-letter alphabet")
    m = nfa.trim()
    if m.is_empty():
        return SemilinearSet(2, ())
    useful = ordered(m.reachable() & m.coreachable())
    bit = {q: 1 << i for i, q in enumerate(useful)}
    out = {q: [] for q in useful}
    for p, w, q in ordered(m.edges):
        out[p].append(((w.count(b), w.count(c)), q))
    n = len(useful)
    bound = n * n + 2 * n

    start = (m.initial, bit[m.initial], (0, 0))
    seen = {start}
    frontier = [start]
    bases: dict = {}
    for depth in range(bound + 1):
        nxt = []
        for p, mask, vec in frontier:
            if p in m.finals:
                bases.setdefault(mask, set()).add(vec)
            if depth == bound:
                continue
            for v, q in out[p]:
                cfg = (q, mask | bit[q], (vec[0] + v[0], vec[1] + v[1]))
                if cfg not in seen:
                    seen.add(cfg)
                    nxt.append(cfg)
        frontier = nxt
        if not frontier:
            break

    cycles = _simple_cycles(useful, out)
    components = set()
    for mask, vecs in bases.items():
        periods = sorted(
            {v for states, v in cycles if v != (0, 0) and all(bit[q] & mask for q in states)}
        )
        for vec in vecs:
            redundant = any(
                (vec[0] - p[0], vec[1] - p[1]) in vecs for p in periods
            )
            if not redundant:
                components.add(LinearSet(vec, tuple(periods)))
    comps = tuple(sorted(components, key=lambda c: (c.base, c.periods)))
    return SemilinearSet(2, comps)


def all_words(alphabet: Iterable, max_len: int):
    """Every word over ``alphabet`` of length at most ``max_len`` (shortlex)."""
    letters = ordered(alphabet)
    for n in range(max_len + 1):
        yield from itertools.product(letters, repeat=n)
