"""Reset VASS: counter machines whose edges increment, decrement, skip or
reset one counter.  Acceptance is by final control state alone.

Counters are numbered from 0 in the library; the file format uses 1-based
indices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple

from . import basis as _basis
from . import stats
from .errors import AlphabetError, ArityError, FormatError, ParameterError
from .kernel import Bounded, Nfa, Tri, as_word, fresh_names, freeze, ordered
from .transducer import Transducer

ACTIONS = ("inc", "dec", "nop", "reset")
_CODES = {"nop": _basis.NOP, "inc": _basis.INC, "dec": _basis.DEC, "reset": _basis.RESET}


class VassConfig(NamedTuple):
    state: Hashable
    counters: tuple


@dataclass(frozen=True)
class ResetVass:
    states: frozenset
    alphabet: frozenset
    counters: int
    edges: frozenset  # (src, word, counter or None, action, dst)
    initial: Hashable
    finals: frozenset

    def __post_init__(self):
        freeze(self, "states", frozenset(self.states))
        freeze(self, "alphabet", frozenset(self.alphabet))
        freeze(self, "finals", frozenset(self.finals))
        edges = set()
        for p, w, k, x, q in self.edges:
            if x not in ACTIONS:
                raise FormatError(f"unknown counter action {x!r}")
            if x == "nop":
                k = None
            elif not isinstance(k, int) or not 0 <= k < self.counters:
                raise ParameterError(f"counter index {k!r} out of range for {self.counters} counters")
            if p not in self.states or q not in self.states:
                raise FormatError(f"edge {p!r}->{q!r} uses an undeclared state")
            w = as_word(w)
            if not set(w) <= self.alphabet:
                raise AlphabetError(f"edge word {w!r} outside the alphabet")
            edges.add((p, w, k, x, q))
        freeze(self, "edges", frozenset(edges))
        if self.initial not in self.states:
            raise FormatError(f"initial state {self.initial!r} not declared")
        if not self.finals <= self.states:
            raise FormatError("final states must be declared states")
        if self.counters < 0:
            raise ParameterError("negative counter count")

    @classmethod
    def from_nfa(cls, nfa: Nfa, counters: int = 0) -> "ResetVass":
        edges = {(p, w, None, "nop", q) for p, w, q in nfa.edges}
        return cls(nfa.states, nfa.alphabet, counters, edges, nfa.initial, nfa.finals)

    @cached_property
    def _out(self) -> dict:
        out = {q: [] for q in self.states}
        for p, w, k, x, q in ordered(self.edges):
            out[p].append((w, k, x, q))
        return out

    def with_alphabet(self, alphabet: Iterable) -> "ResetVass":
        return ResetVass(self.states, alphabet, self.counters, self.edges, self.initial, self.finals)

    def with_counters(self, counters: int) -> "ResetVass":
        if counters < self.counters:
            raise ParameterError("cannot drop counters")
        return ResetVass(self.states, self.alphabet, counters, self.edges, self.initial, self.finals)

    def letter_normalized(self) -> "ResetVass":
        """Every edge reads at most one letter.  Letter edges become nop edges
        followed by a silent edge carrying the counter action, so products can
        synchronise letters without combining two actions on one edge."""
        todo = [e for e in ordered(self.edges) if len(e[1]) > 1 or (e[1] and e[3] != "nop")]
        if not todo:
            return self
        need = sum(len(w) for _, w, _, _, _ in todo)
        names = iter(fresh_names(self.states, need))
        states = set(self.states)
        edges = set(self.edges) - set(todo)
        for p, w, k, x, q in todo:
            cur = p
            for a in w:
                nxt = next(names)
                states.add(nxt)
                edges.add((cur, (a,), None, "nop", nxt))
                cur = nxt
            edges.add((cur, (), k, x, q))
        return ResetVass(states, self.alphabet, self.counters, edges, self.initial, self.finals)

    def compact(self) -> "ResetVass":
        """Drop states unreachable in the control graph and renumber the
        counters that are actually touched."""
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            p = queue.popleft()
            for _, _, _, q in self._out[p]:
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        edges = [e for e in self.edges if e[0] in seen]
        used = sorted({k for _, _, k, x, _ in edges if x != "nop"})
        index = {k: i for i, k in enumerate(used)}
        edges = {(p, w, index.get(k), x, q) for p, w, k, x, q in edges}
        return ResetVass(seen, self.alphabet, len(used), edges, self.initial, self.finals & seen)

    def trim(self) -> "ResetVass":
        """Drop states that cannot reach a final state in the control graph."""
        back = {q: [] for q in self.states}
        for p, _, _, _, q in self.edges:
            back[q].append(p)
        alive = set(self.finals)
        stack = list(alive)
        while stack:
            q = stack.pop()
            for p in back[q]:
                if p not in alive:
                    alive.add(p)
                    stack.append(p)
        alive.add(self.initial)
        edges = {e for e in self.edges if e[0] in alive and e[4] in alive}
        return ResetVass(alive, self.alphabet, self.counters, edges, self.initial, self.finals)

    def relabel(self) -> "ResetVass":
        names = {q: f"s{i}" for i, q in enumerate(ordered(self.states))}
        return ResetVass(
            set(names.values()),
            self.alphabet,
            self.counters,
            {(names[p], w, k, x, names[q]) for p, w, k, x, q in self.edges},
            names[self.initial],
            {names[q] for q in self.finals},
        )

    def to_nfa(self) -> Nfa:
        """The underlying automaton of a machine without counter actions."""
        if any(x != "nop" for _, _, _, x, _ in self.edges):
            raise FormatError("machine uses counters")
        return Nfa(
            self.states,
            self.alphabet,
            {(p, w, q) for p, w, _, _, q in self.edges},
            self.initial,
            self.finals,
        )

    def initial_config(self) -> VassConfig:
        return VassConfig(self.initial, (0,) * self.counters)


def fire(counters: tuple, k, action: str):
    """Counter vector after one action, or None when a decrement would go negative."""
    if action == "nop":
        return counters
    if action == "inc":
        return counters[:k] + (counters[k] + 1,) + counters[k + 1:]
    if action == "dec":
        if counters[k] == 0:
            return None
        return counters[:k] + (counters[k] - 1,) + counters[k + 1:]
    return counters[:k] + (0,) + counters[k + 1:]


def step(v: ResetVass, c: VassConfig, w, budget: int) -> Bounded:
    """Configurations reachable from ``c`` while reading exactly ``w``."""
    if budget < 1:
        raise ParameterError("budget must be positive")
    c = VassConfig(*c)
    if len(c.counters) != v.counters:
        raise ArityError(f"configuration has {len(c.counters)} counters, machine has {v.counters}")
    w = as_word(w)
    m = v.letter_normalized()
    start = (c.state, tuple(c.counters), 0)
    seen = {start}
    queue = deque([start])
    found = set()
    steps = 0
    while queue and steps < budget:
        q, vec, i = queue.popleft()
        steps += 1
        if i == len(w):
            found.add(VassConfig(q, vec))
        for r, k, x, q2 in m._out[q]:
            if r and (i >= len(w) or w[i] != r[0]):
                continue
            vec2 = fire(vec, k, x)
            if vec2 is None:
                continue
            cfg = (q2, vec2, i + len(r))
            if cfg not in seen:
                seen.add(cfg)
                queue.append(cfg)
    stats.record(steps=steps)
    return Bounded(frozenset(found), Tri.YES if not queue else Tri.UNKNOWN)


# ---------------------------------------------------------------------------
# Product constructions


def apply_transduction(t: Transducer, v: ResetVass) -> ResetVass:
    """Machine for T(L(v)): synchronised letters, transducer-only writes, and
    silent machine moves."""
    if not v.alphabet <= t.input_alphabet:
        raise AlphabetError("machine alphabet must be contained in the transducer's input alphabet")
    tn, vn = t.letter_normalized(), v.letter_normalized()
    start = (vn.initial, tn.initial)
    seen = {start}
    queue = deque([start])
    edges = set()
    while queue:
        p, q = src = queue.popleft()
        moves = []
        for w, k, x, p2 in vn._out[p]:
            if not w:
                moves.append(((), k, x, (p2, q)))
            else:
                for r, out, q2 in tn._out[q]:
                    if r == w:
                        moves.append((out, k, x, (p2, q2)))
        for r, out, q2 in tn._out[q]:
            if not r:
                moves.append((out, None, "nop", (p, q2)))
        for out, k, x, dst in moves:
            edges.add((src, out, k, x, dst))
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    finals = {(p, q) for p, q in seen if p in vn.finals and q in tn.finals}
    return ResetVass(seen, t.output_alphabet, v.counters, edges, start, finals)


def intersect(v0: ResetVass, v1: ResetVass) -> ResetVass:
    """Product with 2n counters: the left machine keeps counters 0..n-1, the
    right one is shifted to n..2n-1."""
    if v0.alphabet != v1.alphabet:
        raise AlphabetError("intersection needs equal alphabets")
    n = max(v0.counters, v1.counters)
    a, b = v0.with_counters(n).letter_normalized(), v1.with_counters(n).letter_normalized()
    start = (a.initial, b.initial)
    seen = {start}
    queue = deque([start])
    edges = set()
    while queue:
        p, q = src = queue.popleft()
        moves = []
        for w, k, x, p2 in a._out[p]:
            if w:
                for w1, _, _, q2 in b._out[q]:
                    if w1 == w:  # letter edges are nop after normalisation
                        moves.append((w, None, "nop", (p2, q2)))
            else:
                moves.append(((), k, x, (p2, q)))
        for w1, k, x, q2 in b._out[q]:
            if not w1:
                moves.append(((), None if k is None else n + k, x, (p, q2)))
        for w, k, x, dst in moves:
            edges.add((src, w, k, x, dst))
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    finals = {(p, q) for p, q in seen if p in a.finals and q in b.finals}
    return ResetVass(seen, v0.alphabet, 2 * n, edges, start, finals)


def union(v0: ResetVass, v1: ResetVass) -> ResetVass:
    if v0.alphabet != v1.alphabet:
        raise AlphabetError("union needs equal alphabets")
    n = max(v0.counters, v1.counters)
    start = ("u",)
    states = {start} | {(0, q) for q in v0.states} | {(1, q) for q in v1.states}
    edges = {(start, (), None, "nop", (0, v0.initial)), (start, (), None, "nop", (1, v1.initial))}
    for tag, v in ((0, v0), (1, v1)):
        edges |= {((tag, p), w, k, x, (tag, q)) for p, w, k, x, q in v.edges}
    finals = {(0, q) for q in v0.finals} | {(1, q) for q in v1.finals}
    return ResetVass(states, v0.alphabet, n, edges, start, finals)


# ---------------------------------------------------------------------------
# Coverability and emptiness


def upward_basis(v: ResetVass, targets: Iterable, init=None, stop_early: bool = True):
    """Run the backward fixpoint.  Returns (covered, basis) with basis mapping
    each state to its antichain of minimal counter vectors."""
    index = {q: i for i, q in enumerate(ordered(v.states))}
    names = ordered(v.states)
    edges = [(index[p], index[q], k, _CODES[x]) for p, _, k, x, q in ordered(v.edges)]
    tgts = []
    for q, vec in targets:
        vec = tuple(vec)
        if len(vec) != v.counters:
            raise ArityError(f"target has {len(vec)} counters, machine has {v.counters}")
        tgts.append((index[q], vec))
    init = VassConfig(*init) if init is not None else v.initial_config()
    if len(init.counters) != v.counters:
        raise ArityError("initial configuration arity mismatch")
    covered, steps, rows = _basis.coverability_fixpoint(
        len(names), v.counters, edges, tgts, (index[init.state], tuple(init.counters)), stop_early
    )
    size = sum(len(r) for r in rows)
    stats.record(steps=steps, basis_size=size)
    return covered, {names[i]: rows[i] for i in range(len(names)) if rows[i]}


def is_coverable(v: ResetVass, target, init=None) -> bool:
    target = VassConfig(*target)
    if target.state not in v.states:
        raise FormatError(f"unknown state {target.state!r}")
    covered, _ = upward_basis(v, [target], init)
    return covered


def is_empty(v: ResetVass) -> bool:
    zero = (0,) * v.counters
    if not v.finals:
        return True
    covered, _ = upward_basis(v, [(f, zero) for f in ordered(v.finals)])
    return not covered


def word_machine(word, alphabet: Iterable) -> ResetVass:
    return ResetVass.from_nfa(Nfa.from_words([as_word(word)], alphabet))


def member(v: ResetVass, w) -> bool:
    w = as_word(w)
    if not set(w) <= v.alphabet:
        return False
    if not any(x != "nop" for _, _, _, x, _ in v.edges):
        return v.to_nfa().accepts(w)
    return not is_empty(intersect(v, word_machine(w, v.alphabet)).compact())


def accepting_run(v: ResetVass, w, budget: int):
    """Breadth-first search for an accepting run on ``w``.  Returns
    (verdict, list of (config, letters read) or None)."""
    w = as_word(w)
    m = v.letter_normalized()
    start = (m.initial, (0,) * m.counters, 0)
    parent = {start: None}
    queue = deque([start])
    steps = 0
    while queue and steps < budget:
        cfg = queue.popleft()
        q, vec, i = cfg
        steps += 1
        if q in m.finals and i == len(w):
            stats.record(steps=steps)
            path = []
            while cfg is not None:
                prev = parent[cfg]
                read = w[prev[2]:cfg[2]] if prev is not None else ()
                path.append((VassConfig(cfg[0], cfg[1]), read))
                cfg = prev
            return Tri.YES, _merge_helper_states(path[::-1], v.states)
        for r, k, x, q2 in m._out[q]:
            if r and (i >= len(w) or w[i] != r[0]):
                continue
            vec2 = fire(vec, k, x)
            if vec2 is None:
                continue
            nxt = (q2, vec2, i + len(r))
            if nxt not in parent:
                parent[nxt] = cfg
                queue.append(nxt)
    stats.record(steps=steps)
    return (Tri.NO if not queue else Tri.UNKNOWN), None


def _merge_helper_states(path, states):
    """Fold steps through states added by letter normalisation into the
    next step through an original state."""
    out = []
    pending = ()
    for cfg, read in path:
        pending += read
        if cfg.state in states:
            out.append((cfg, pending))
            pending = ()
    return out


def boundedness_to_infinity(v: ResetVass) -> ResetVass:
    """Erase the input, add a final sink reachable silently from every state,
    and let the sink read one ``a`` per decrement of any counter."""
    (sink,) = fresh_names(v.states, 1, tag="sink")
    edges = {(p, (), k, x, q) for p, _, k, x, q in v.edges}
    edges |= {(p, (), None, "nop", sink) for p in v.states}
    edges |= {(sink, ("a",), k, "dec", sink) for k in range(v.counters)}
    return ResetVass(v.states | {sink}, {"a"}, v.counters, edges, v.initial, {sink})


# ---------------------------------------------------------------------------
# Budgeted language exploration


def accepted_words(v: ResetVass, max_len: int, budget: int) -> Bounded:
    """Accepted words of length at most ``max_len`` found by forward search."""
    m = v.letter_normalized()
    start = (m.initial, (0,) * m.counters, ())
    seen = {start}
    queue = deque([start])
    words = set()
    steps = 0
    while queue and steps < budget:
        q, vec, w = queue.popleft()
        steps += 1
        if q in m.finals:
            words.add(w)
        for r, k, x, q2 in m._out[q]:
            if len(w) + len(r) > max_len:
                continue
            vec2 = fire(vec, k, x)
            if vec2 is None:
                continue
            cfg = (q2, vec2, w + r)
            if cfg not in seen:
                seen.add(cfg)
                queue.append(cfg)
    stats.record(steps=steps)
    return Bounded(frozenset(words), Tri.YES if not queue else Tri.UNKNOWN)


def configuration_graph(v: ResetVass, budget: int):
    """Forward configuration graph as an Nfa, or None if it has more than
    ``budget`` configurations."""
    m = v.letter_normalized()
    start = VassConfig(m.initial, (0,) * m.counters)
    seen = {start}
    queue = deque([start])
    edges = set()
    while queue:
        if len(seen) > budget:
            stats.record(steps=len(seen))
            return None
        c = queue.popleft()
        for r, k, x, q2 in m._out[c.state]:
            vec2 = fire(c.counters, k, x)
            if vec2 is None:
                continue
            d = VassConfig(q2, vec2)
            edges.add((c, r, d))
            if d not in seen:
                seen.add(d)
                queue.append(d)
    stats.record(steps=len(seen))
    finals = {c for c in seen if c.state in m.finals}
    return Nfa(seen, m.alphabet, edges, start, finals)


def finiteness(v: ResetVass, budget: int) -> Tri:
    """Is L(v) finite?  YES when the configuration graph is finite and has no
    useful letter cycle; NO when a pumpable accepted run is found; otherwise
    UNKNOWN."""
    graph = configuration_graph(v, budget)
    if graph is not None:
        return Tri.of(graph.is_finite())
    m = v.letter_normalized()
    # search a run c -> c' with c <= c' at one state and a nonempty input in
    # between; by monotonicity the loop can be repeated forever
    start = VassConfig(m.initial, (0,) * m.counters)
    parent = {start: None}
    queue = deque([start])
    read = {start: 0}
    checked = 0
    while queue and checked < budget:
        c = queue.popleft()
        checked += 1
        for r, k, x, q2 in m._out[c.state]:
            vec2 = fire(c.counters, k, x)
            if vec2 is None:
                continue
            d = VassConfig(q2, vec2)
            if d in parent:
                continue
            parent[d] = c
            read[d] = read[c] + len(r)
            queue.append(d)
            anc = c
            while anc is not None:
                if (
                    anc.state == d.state
                    and read[d] > read[anc]
                    and all(a <= b for a, b in zip(anc.counters, d.counters))
                ):
                    zero = (0,) * m.counters
                    covered, _ = upward_basis(m, [(f, zero) for f in ordered(m.finals)], d)
                    if covered:
                        return Tri.NO
                    break
                anc = parent[anc]
    return Tri.UNKNOWN
