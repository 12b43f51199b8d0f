"""Higher-order stacks and higher-order pushdown automata (HOPA).

An order-k stack is stored as nested tuples: order 0 is a letter, order k is a
nonempty tuple of order-(k-1) stacks whose last entry is the top.  Machines
are explored breadth-first in a fixed edge order, so budgeted answers are
reproducible.  Order-1 machines additionally get exact emptiness and
finiteness through a context-free grammar.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, NamedTuple, Sequence

from . import stats
from .errors import AlphabetError, FormatError, ParameterError, ShapeError
from .kernel import (
    BINARY,
    Bounded,
    Nfa,
    Tri,
    as_word,
    fresh_names,
    freeze,
    nu_value,
    ordered,
    strongly_connected,
)
from .transducer import Transducer, restriction


class _Undefined:
    """Result of an instruction that does not apply to the stack."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        return False


UNDEFINED = _Undefined()


@dataclass(frozen=True)
class HigherOrderStack:
    order: int
    content: object

    def __post_init__(self):
        if self.order < 0:
            raise ParameterError("stack order must be nonnegative")
        _check_shape(self.order, self.content)

    @classmethod
    def bottom(cls, order: int, letter) -> "HigherOrderStack":
        content = letter
        for _ in range(order):
            content = (content,)
        return cls(order, content)

    @property
    def top(self):
        c = self.content
        for _ in range(self.order):
            c = c[-1]
        return c

    def __len__(self):
        return len(self.content) if self.order else 1


def _check_shape(order, content):
    if order == 0:
        if isinstance(content, tuple):
            raise ShapeError("order-0 stack must be a single letter")
        return
    if not isinstance(content, tuple) or not content:
        raise ShapeError(f"order-{order} stack must be a nonempty sequence")
    for s in content:
        _check_shape(order - 1, s)


def parse_instruction(instr):
    """Accepts ("push", i), ("pop", i), ("rew", letter) or the text forms
    push2 / pop1 / rew:x."""
    if isinstance(instr, tuple):
        kind, arg = instr
    else:
        text = str(instr)
        if text.startswith("rew:"):
            kind, arg = "rew", text[4:]
        elif text.startswith("push") or text.startswith("pop"):
            kind = "push" if text.startswith("push") else "pop"
            try:
                arg = int(text[len(kind):])
            except ValueError:
                raise FormatError(f"bad instruction {text!r}") from None
        else:
            raise FormatError(f"bad instruction {text!r}")
    if kind in ("push", "pop"):
        if not isinstance(arg, int) or arg < 1:
            raise FormatError(f"bad instruction level {arg!r}")
    elif kind != "rew":
        raise FormatError(f"bad instruction {instr!r}")
    return (kind, arg)


def instruction_text(instr) -> str:
    kind, arg = instr
    return f"rew:{arg}" if kind == "rew" else f"{kind}{arg}"


def _exec(order, content, kind, arg):
    if kind == "rew":
        if order == 1:
            return content[:-1] + (arg,)
        inner = _exec(order - 1, content[-1], kind, arg)
        return content[:-1] + (inner,)
    if arg == order:
        if kind == "push":
            return content + (content[-1],)
        if len(content) < 2:
            return UNDEFINED
        return content[:-1]
    inner = _exec(order - 1, content[-1], kind, arg)
    if inner is UNDEFINED:
        return UNDEFINED
    return content[:-1] + (inner,)


def stack_exec(s: HigherOrderStack, instr):
    """Apply one instruction; returns UNDEFINED where the operation is not defined."""
    kind, arg = parse_instruction(instr)
    if s.order == 0:
        raise ParameterError("instructions need a stack of order at least 1")
    if kind != "rew" and arg > s.order:
        raise ParameterError(f"level {arg} exceeds stack order {s.order}")
    out = _exec(s.order, s.content, kind, arg)
    if out is UNDEFINED:
        return UNDEFINED
    return _fast_stack(s.order, out)


def _fast_stack(order, content):
    # skips the shape check for stacks produced by instructions
    s = object.__new__(HigherOrderStack)
    object.__setattr__(s, "order", order)
    object.__setattr__(s, "content", content)
    return s


def _top(order, content):
    for _ in range(order):
        content = content[-1]
    return content


# ---------------------------------------------------------------------------
# Machines


@dataclass(frozen=True)
class Hopa:
    states: frozenset
    input_alphabet: frozenset
    stack_alphabet: frozenset
    bottom: Hashable
    order: int
    edges: frozenset  # (src, word, top letter or None for any, instructions, dst)
    initial: Hashable
    finals: frozenset

    def __post_init__(self):
        freeze(self, "states", frozenset(self.states))
        freeze(self, "input_alphabet", frozenset(self.input_alphabet))
        freeze(self, "stack_alphabet", frozenset(self.stack_alphabet) | {self.bottom})
        freeze(self, "finals", frozenset(self.finals))
        if self.order < 1:
            raise ParameterError("machine order must be at least 1")
        edges = set()
        for p, w, top, instrs, q in self.edges:
            w = as_word(w)
            instrs = tuple(parse_instruction(i) for i in instrs)
            if p not in self.states or q not in self.states:
                raise FormatError(f"edge {p!r}->{q!r} uses an undeclared state")
            if not set(w) <= self.input_alphabet:
                raise AlphabetError(f"edge word {w!r} outside the input alphabet")
            if top is not None and top not in self.stack_alphabet:
                raise AlphabetError(f"top letter {top!r} outside the stack alphabet")
            for kind, arg in instrs:
                if kind == "rew" and arg not in self.stack_alphabet:
                    raise AlphabetError(f"rewrite letter {arg!r} outside the stack alphabet")
                if kind != "rew" and arg > self.order:
                    raise ParameterError(f"instruction level {arg} exceeds order {self.order}")
            edges.add((p, w, top, instrs, q))
        freeze(self, "edges", frozenset(edges))
        if self.initial not in self.states:
            raise FormatError(f"initial state {self.initial!r} not declared")
        if not self.finals <= self.states:
            raise FormatError("final states must be declared states")

    @cached_property
    def _out(self) -> dict:
        out = {q: [] for q in self.states}
        for p, w, top, instrs, q in ordered(self.edges):
            out[p].append((w, top, instrs, q))
        return out

    def initial_stack(self) -> HigherOrderStack:
        return HigherOrderStack.bottom(self.order, self.bottom)

    def letter_normalized(self) -> "Hopa":
        """Every edge reads at most one letter; the top test stays on the first
        edge of a split chain and the instructions move to its last edge."""
        long_edges = [e for e in ordered(self.edges) if len(e[1]) > 1]
        if not long_edges:
            return self
        names = iter(fresh_names(self.states, sum(len(e[1]) - 1 for e in long_edges)))
        states = set(self.states)
        edges = set(self.edges) - set(long_edges)
        for p, w, top, instrs, q in long_edges:
            cur, test = p, top
            for a in w[:-1]:
                nxt = next(names)
                states.add(nxt)
                edges.add((cur, (a,), test, (), nxt))
                cur, test = nxt, None
            edges.add((cur, w[-1:], test, instrs, q))
        return self._replace(states=states, edges=edges)

    def single_final(self) -> "Hopa":
        """Same language with one final state, entered by silent edges."""
        (final,) = fresh_names(self.states, 1, tag="final")
        edges = set(self.edges) | {(f, (), None, (), final) for f in self.finals}
        return self._replace(states=self.states | {final}, edges=edges, finals={final})

    def _replace(self, **kw) -> "Hopa":
        fields = dict(
            states=self.states,
            input_alphabet=self.input_alphabet,
            stack_alphabet=self.stack_alphabet,
            bottom=self.bottom,
            order=self.order,
            edges=self.edges,
            initial=self.initial,
            finals=self.finals,
        )
        fields.update(kw)
        return Hopa(**fields)

    def relabel(self) -> "Hopa":
        names = {q: f"h{i}" for i, q in enumerate(ordered(self.states))}
        return self._replace(
            states=set(names.values()),
            edges={(names[p], w, t, i, names[q]) for p, w, t, i, q in self.edges},
            initial=names[self.initial],
            finals={names[q] for q in self.finals},
        )


def _successors(a: Hopa, state, content):
    top = _top(a.order, content)
    for w, test, instrs, q in a._out[state]:
        if test is not None and test != top:
            continue
        cur = content
        for kind, arg in instrs:
            cur = _exec(a.order, cur, kind, arg)
            if cur is UNDEFINED:
                break
        if cur is UNDEFINED:
            continue
        yield w, q, cur


class RunResult(NamedTuple):
    """Accepted words with one trace each; a trace is the sequence of
    (state, stack, letters read by the step into it) from the start."""

    accepted: dict
    saturated: Tri

    @property
    def words(self) -> frozenset:
        return frozenset(self.accepted)


def run(a: Hopa, budget: int, max_length: int | None = None, observer=None) -> RunResult:
    """Breadth-first exploration of configurations (state, stack, word read).

    ``observer`` is called with (state, stack) for every expanded configuration.
    """
    if budget < 1:
        raise ParameterError("budget must be positive")
    start = (a.initial, a.initial_stack().content, ())
    parent = {start: None}
    queue = deque([start])
    accepted = {}
    steps = 0
    while queue and steps < budget:
        cfg = queue.popleft()
        steps += 1
        q, content, word = cfg
        if observer is not None:
            observer(q, _fast_stack(a.order, content))
        if q in a.finals and word not in accepted:
            accepted[word] = _trace(a, parent, cfg)
        for w, q2, c2 in _successors(a, q, content):
            if max_length is not None and len(word) + len(w) > max_length:
                continue
            nxt = (q2, c2, word + w)
            if nxt not in parent:
                parent[nxt] = cfg
                queue.append(nxt)
    stats.record(steps=steps)
    return RunResult(accepted, Tri.YES if not queue else Tri.UNKNOWN)


def _trace(a, parent, cfg):
    steps = []
    while cfg is not None:
        prev = parent[cfg]
        read = cfg[2][len(prev[2]):] if prev is not None else ()
        steps.append((cfg[0], _fast_stack(a.order, cfg[1]), read))
        cfg = prev
    return tuple(reversed(steps))


def accepting_run(a: Hopa, w, budget: int):
    """Search restricted to prefixes of ``w``.  Returns (verdict, trace or
    None) with verdict YES/NO/UNKNOWN as in :func:`member`."""
    w = as_word(w)
    start = (a.initial, a.initial_stack().content, 0)
    parent = {start: None}
    queue = deque([start])
    steps = 0
    while queue and steps < budget:
        cfg = queue.popleft()
        q, content, i = cfg
        steps += 1
        if q in a.finals and i == len(w):
            stats.record(steps=steps)
            return Tri.YES, _word_trace(a, parent, cfg, w)
        for r, q2, c2 in _successors(a, q, content):
            if r != w[i:i + len(r)]:
                continue
            nxt = (q2, c2, i + len(r))
            if nxt not in parent:
                parent[nxt] = cfg
                queue.append(nxt)
    stats.record(steps=steps)
    return (Tri.NO if not queue else Tri.UNKNOWN), None


def _word_trace(a, parent, cfg, w):
    steps = []
    while cfg is not None:
        prev = parent[cfg]
        read = w[prev[2]:cfg[2]] if prev is not None else ()
        steps.append((cfg[0], _fast_stack(a.order, cfg[1]), read))
        cfg = prev
    return tuple(reversed(steps))


def member(a: Hopa, w, budget: int) -> Tri:
    """YES if an accepting run on ``w`` is found, NO if the search restricted
    to prefixes of ``w`` saturates without one, UNKNOWN otherwise.  Order 1
    is decided exactly."""
    w = as_word(w)
    if a.order == 1:
        return Tri.of(not _grammar_is_empty(intersect_regular(a, Nfa.from_words([w], a.input_alphabet | set(w)))))
    return accepting_run(a, w, budget)[0]


def is_empty(a: Hopa, budget: int) -> Tri:
    """Exact for order 1; budgeted search otherwise."""
    if a.order == 1:
        return Tri.of(_grammar_is_empty(a))
    start = (a.initial, a.initial_stack().content)
    seen = {start}
    queue = deque([start])
    steps = 0
    while queue and steps < budget:
        q, content = queue.popleft()
        steps += 1
        if q in a.finals:
            stats.record(steps=steps)
            return Tri.NO
        for _, q2, c2 in _successors(a, q, content):
            if (q2, c2) not in seen:
                seen.add((q2, c2))
                queue.append((q2, c2))
    stats.record(steps=steps)
    return Tri.YES if not queue else Tri.UNKNOWN


def apply_transduction(t: Transducer, a: Hopa) -> Hopa:
    """Machine for T(L(a)): product on control states, stack untouched."""
    if not a.input_alphabet <= t.input_alphabet:
        raise AlphabetError("machine alphabet must be contained in the transducer's input alphabet")
    tn, an = t.letter_normalized(), a.letter_normalized()
    start = (an.initial, tn.initial)
    seen = {start}
    queue = deque([start])
    edges = set()
    while queue:
        p, q = src = queue.popleft()
        moves = []
        for w, top, instrs, p2 in an._out[p]:
            if not w:
                moves.append(((), top, instrs, (p2, q)))
            else:
                for r, out, q2 in tn._out[q]:
                    if r == w:
                        moves.append((out, top, instrs, (p2, q2)))
        for r, out, q2 in tn._out[q]:
            if not r:
                moves.append((out, None, (), (p, q2)))
        for out, top, instrs, dst in moves:
            edges.add((src, out, top, instrs, dst))
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
    finals = {(p, q) for p, q in seen if p in an.finals and q in tn.finals}
    return Hopa(seen, t.output_alphabet, a.stack_alphabet, a.bottom, a.order, edges, start, finals)


def intersect_regular(a: Hopa, nfa: Nfa) -> Hopa:
    t = restriction(nfa.with_alphabet(nfa.alphabet | a.input_alphabet))
    return apply_transduction(t, a)


def contains(a: Hopa, w, budget: int) -> Tri:
    return member(a, w, budget)


# ---------------------------------------------------------------------------
# Order-1 machines as context-free grammars


class _Grammar(NamedTuple):
    start: object
    rules: dict  # nonterminal -> list of bodies; a body is a tuple of symbols
    terminals: frozenset


def _single_instruction_edges(a: Hopa):
    """Edges with at most one instruction each and an explicit top letter."""
    a = a.letter_normalized()
    names = iter(fresh_names(a.states, sum(max(len(e[3]) - 1, 0) for e in a.edges)))
    states = set(a.states)
    out = []
    for p, w, top, instrs, q in ordered(a.edges):
        tops = [top] if top is not None else ordered(a.stack_alphabet)
        chain = list(instrs) or [None]
        mids = [next(names) for _ in chain[:-1]]
        states.update(mids)
        path = [p] + mids + [q]
        for i, instr in enumerate(chain):
            word = w if i == 0 else ()
            for t in (tops if i == 0 else ordered(a.stack_alphabet)):
                out.append((path[i], word, t, instr, path[i + 1]))
    return states, out


def to_grammar(a: Hopa) -> _Grammar:
    """Grammar for an order-1 machine.

    ("P", p, X, q): from p with top cell X, runs until that cell is popped,
    landing in q.  ("A", p, X): from p with top cell X, reaches a final state
    without popping the cell.  The bottom cell is never popped.
    """
    if a.order != 1:
        raise ParameterError("grammar conversion needs an order-1 machine")
    states, edges = _single_instruction_edges(a)
    states = ordered(states)
    rules: dict = {}

    def add(lhs, body):
        rules.setdefault(lhs, []).append(tuple(body))

    for p, w, x, instr, p2 in edges:
        term = [("t", c) for c in w]
        if instr is None or instr[0] == "rew":
            y = x if instr is None else instr[1]
            add(("A", p, x), term + [("A", p2, y)])
            for q in states:
                add(("P", p, x, q), term + [("P", p2, y, q)])
        elif instr[0] == "pop":
            add(("P", p, x, p2), term)
        else:  # push: the copy of x sits on top
            add(("A", p, x), term + [("A", p2, x)])
            for r in states:
                add(("A", p, x), term + [("P", p2, x, r), ("A", r, x)])
                for q in states:
                    add(("P", p, x, q), term + [("P", p2, x, r), ("P", r, x, q)])
    for f in a.finals:
        for x in ordered(a.stack_alphabet):
            add(("A", f, x), [])
    return _Grammar(("A", a.initial, a.bottom), rules, a.input_alphabet)


def _productive(g: _Grammar) -> set:
    # worklist: each rule waits on a count of not-yet-productive symbols
    waiting = []
    users = {}
    ready = deque()
    for lhs, bodies in g.rules.items():
        for body in bodies:
            pending = {s for s in body if s[0] != "t"}
            waiting.append([lhs, len(pending)])
            for s in pending:
                users.setdefault(s, []).append(len(waiting) - 1)
            if not pending:
                ready.append(lhs)
    productive = set()
    while ready:
        n = ready.popleft()
        if n in productive:
            continue
        productive.add(n)
        for i in users.get(n, ()):
            waiting[i][1] -= 1
            if waiting[i][1] == 0:
                ready.append(waiting[i][0])
    return productive


def _useful_rules(g: _Grammar) -> dict:
    prod = _productive(g)
    if g.start not in prod:
        return {}
    rules = {
        lhs: [b for b in bodies if all(s[0] == "t" or s in prod for s in b)]
        for lhs, bodies in g.rules.items()
        if lhs in prod
    }
    reach = {g.start}
    stack = [g.start]
    while stack:
        n = stack.pop()
        for body in rules.get(n, ()):
            for s in body:
                if s[0] != "t" and s not in reach:
                    reach.add(s)
                    stack.append(s)
    return {lhs: rules[lhs] for lhs in reach}


def _grammar_is_empty(a: Hopa) -> bool:
    return not _useful_rules(to_grammar(a))


def _grammar_is_finite(rules: dict) -> bool:
    # nonterminals able to derive a nonempty word
    solid = set()
    changed = True
    while changed:
        changed = False
        for lhs, bodies in rules.items():
            if lhs not in solid and any(
                any(s[0] == "t" or s in solid for s in b) for b in bodies
            ):
                solid.add(lhs)
                changed = True
    # edge lhs -> s is growing if the rest of the body can produce a letter
    graph = {lhs: [] for lhs in rules}
    succ = {lhs: [] for lhs in rules}
    for lhs, bodies in rules.items():
        for b in bodies:
            for i, s in enumerate(b):
                if s[0] == "t":
                    continue
                rest = b[:i] + b[i + 1:]
                growing = any(r[0] == "t" or r in solid for r in rest)
                graph[lhs].append((s, growing))
                succ[lhs].append(s)
    comp = strongly_connected(rules, succ)
    return not any(
        growing and comp[lhs] == comp[s] for lhs, outs in graph.items() for s, growing in outs
    )


def _finite_words(rules: dict, start) -> frozenset:
    lang = {lhs: set() for lhs in rules}
    changed = True
    while changed:
        changed = False
        for lhs, bodies in rules.items():
            for b in bodies:
                parts = [{(s[1],)} if s[0] == "t" else lang[s] for s in b]
                words = {()}
                for part in parts:
                    words = {u + v for u in words for v in part}
                    if not words:
                        break
                new = words - lang[lhs]
                if new:
                    lang[lhs] |= new
                    changed = True
    return frozenset(lang[start])


def finiteness(a: Hopa, budget: int, infinite_after_lengths: int = 32) -> Tri:
    """Is L(a) finite?  Exact for order 1.  For higher orders: YES when the
    exploration saturates, NO once more than ``infinite_after_lengths``
    distinct accepted lengths show up, UNKNOWN otherwise."""
    if a.order == 1:
        rules = _useful_rules(to_grammar(a))
        return Tri.of(_grammar_is_finite(rules))
    res = run(a, budget)
    if res.saturated is Tri.YES:
        return Tri.YES
    if len({len(w) for w in res.accepted}) > infinite_after_lengths:
        return Tri.NO
    return Tri.UNKNOWN


def finite_language(a: Hopa, budget: int) -> Bounded:
    """All words of a finite language.  Order 1 uses the grammar; higher
    orders need the exploration to saturate."""
    if a.order == 1:
        rules = _useful_rules(to_grammar(a))
        if not rules:
            return Bounded(frozenset(), Tri.YES)
        if not _grammar_is_finite(rules):
            raise ParameterError("language is infinite")
        g = to_grammar(a)
        return Bounded(_finite_words(rules, g.start), Tri.YES)
    res = run(a, budget)
    return Bounded(res.words, res.saturated)


# ---------------------------------------------------------------------------
# Binary-to-unary lifting


class Lifted(NamedTuple):
    machine: Hopa
    unwind: Hashable  # state that turns the stored binary number into zeros
    bottom: Hashable
    marker: Hashable


def _fresh_letter(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def lift_to_unary(a: Hopa) -> Lifted:
    """Order-(k+2) machine for {1 0^n : n is the binary value of a word of L(a)}.

    The simulation copies the whole order-k stack at every letter, so the
    sequence of copies remembers the word read; the unwinding state then
    spends that record bit by bit, duplicating the remainder for every
    position it moves up.
    """
    if not a.input_alphabet <= BINARY:
        raise AlphabetError("binary-to-unary lifting needs an input alphabet within {0,1}")
    a = a.letter_normalized().single_final()
    k = a.order
    gamma = a.stack_alphabet
    bottom = _fresh_letter("⊥", gamma | BINARY)
    marker = _fresh_letter("$", gamma | BINARY | {bottom})
    entry, unwind, done = fresh_names(a.states, 3, tag="lift")
    (final,) = a.finals
    edges = {
        (entry, ("1",), bottom, (("push", k + 2), ("rew", marker), ("push", k + 1), ("rew", a.bottom)), a.initial),
        (final, (), None, (("pop", k + 1),), unwind),
        (unwind, (), "0", (("pop", k + 1), ("push", k + 2)), unwind),
        (unwind, ("0",), "1", (("pop", k + 1), ("push", k + 2)), unwind),
        (unwind, (), marker, (("pop", k + 2),), unwind),
        (unwind, (), bottom, (), done),
    }
    for p, w, top, instrs, q in a.edges:
        if not w:
            edges.add((p, (), top, instrs, q))
            continue
        for g in [top] if top is not None else ordered(gamma):
            record = (("rew", w[0]), ("push", k + 1), ("rew", g))
            edges.add((p, (), g, record + instrs, q))
    machine = Hopa(
        a.states | {entry, unwind, done},
        BINARY,
        gamma | BINARY | {bottom, marker},
        bottom,
        k + 2,
        edges,
        entry,
        {done},
    )
    return Lifted(machine, unwind, bottom, marker)


def bin_to_unary(a: Hopa) -> Hopa:
    return lift_to_unary(a).machine


class StackMeasure(NamedTuple):
    mu: int
    sigma: tuple


def measures(s: HigherOrderStack, bottom, marker) -> StackMeasure:
    """mu: sum over the stored records of the binary value spelled by their
    top letters; sigma: the record sizes (copies plus the marker copy)."""
    if s.order < 2:
        raise ShapeError("lifted stacks have order at least 2")
    content = s.content
    k = s.order - 2
    if _top(k + 1, content[0]) != bottom:
        raise ShapeError("lowest component must be the bottom scaffold")
    mu = 0
    sigma = []
    for comp in content[1:]:
        if _top(k, comp[0]) != marker:
            raise ShapeError("record must start with a marker copy")
        bits = [_top(k, t) for t in comp[1:]]
        if any(b not in BINARY for b in bits):
            raise ShapeError(f"record tops {bits!r} are not binary")
        mu += nu_value(bits)
        sigma.append(len(comp))
    return StackMeasure(mu, tuple(sigma))
