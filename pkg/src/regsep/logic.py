"""Positive existential arithmetic over (N, +, <=, 1) with unary predicates
given by reset VASS (pseudo predicates).

Formulas compile to reset VASS over tuple alphabets.  A k-ary relation is
encoded by equal-length words whose columns are k-tuples of bits, most
significant bit first, each number padded with leading zeros.  A compiled
machine accepts every padding length, so a formula's solution set is read
off by stripping leading zero columns.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import reset_vass as rv
from .errors import FormatError, UsageError
from .kernel import PAD, Nfa, Tri, convolve
from .predicates import Kind, PredicateHandle, pred_member
from .transducer import columns, compose, cylindrify, project, zero_normalizer


# ---------------------------------------------------------------------------
# Syntax


@dataclass(frozen=True)
class Plus:
    left: object
    right: object


@dataclass(frozen=True)
class Pred:
    name: str
    term: object


@dataclass(frozen=True)
class Le:
    left: object
    right: object


@dataclass(frozen=True)
class Eq:
    left: object
    right: object


@dataclass(frozen=True)
class Add:
    x: object
    y: object
    z: object


@dataclass(frozen=True)
class Eq1:
    term: object


@dataclass(frozen=True)
class And:
    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class Exists:
    variables: tuple
    body: object

    def __init__(self, variables, body):
        if isinstance(variables, str):
            variables = (variables,)
        object.__setattr__(self, "variables", tuple(variables))
        object.__setattr__(self, "body", body)


ATOMS = (Pred, Le, Eq, Add, Eq1)


def term_vars(t) -> frozenset:
    if isinstance(t, str):
        return frozenset([t])
    if isinstance(t, int):
        return frozenset()
    if isinstance(t, Plus):
        return term_vars(t.left) | term_vars(t.right)
    raise FormatError(f"not a term: {t!r}")


def _atom_terms(f):
    if isinstance(f, Pred):
        return (f.term,)
    if isinstance(f, (Le, Eq)):
        return (f.left, f.right)
    if isinstance(f, Add):
        return (f.x, f.y, f.z)
    return (f.term,)


def free_vars(f) -> frozenset:
    if isinstance(f, ATOMS):
        out = frozenset()
        for t in _atom_terms(f):
            out |= term_vars(t)
        return out
    if isinstance(f, (And, Or)):
        return frozenset().union(*(free_vars(p) for p in f.parts))
    if isinstance(f, Exists):
        return free_vars(f.body) - set(f.variables)
    raise FormatError(f"not a formula: {f!r}")


def all_vars(f) -> frozenset:
    if isinstance(f, ATOMS):
        return free_vars(f)
    if isinstance(f, (And, Or)):
        return frozenset().union(*(all_vars(p) for p in f.parts))
    return all_vars(f.body) | set(f.variables)


def predicate_names(f) -> frozenset:
    if isinstance(f, Pred):
        return frozenset([f.name])
    if isinstance(f, ATOMS):
        return frozenset()
    if isinstance(f, (And, Or)):
        return frozenset().union(*(predicate_names(p) for p in f.parts))
    return predicate_names(f.body)


# ---------------------------------------------------------------------------
# Normalisation


def is_normal(f) -> bool:
    if isinstance(f, Pred):
        return isinstance(f.term, str)
    if isinstance(f, Add):
        return all(isinstance(t, str) for t in (f.x, f.y, f.z))
    if isinstance(f, Eq1):
        return isinstance(f.term, str)
    if isinstance(f, (Le, Eq)):
        return False
    if isinstance(f, (And, Or)):
        return all(is_normal(p) for p in f.parts)
    return is_normal(f.body)


class _Flattener:
    """Turns terms into variables plus defining atoms, with fresh names
    ``_t1, _t2, ...`` that avoid every name already in the formula."""

    def __init__(self, taken):
        self.taken = set(taken)
        self.count = 0

    def fresh(self) -> str:
        while True:
            self.count += 1
            name = f"_t{self.count}"
            if name not in self.taken:
                self.taken.add(name)
                return name

    def term(self, t, defs, new, memo, target=None):
        """Variable holding the value of ``t``; writes into ``target`` when given."""
        if isinstance(t, str):
            if target is None:
                return t
            zero = self.fresh()
            new.append(zero)
            if target == t:
                # t = t still has to mention t, so keep it as t + 0 = t
                defs.append(Add(t, zero, t))
            else:
                defs += [Add(zero, zero, zero), Add(t, zero, target)]
            return target
        if target is None and t in memo:
            return memo[t]
        if isinstance(t, int):
            if t < 0:
                raise FormatError("constants must be naturals")
            if t > 1:
                return self.term(_constant_tree(t), defs, new, memo, target)
            var = target if target is not None else self.fresh()
            if target is None:
                new.append(var)
            defs.append(Eq1(var) if t == 1 else Add(var, var, var))
        elif isinstance(t, Plus):
            a = self.term(t.left, defs, new, memo)
            b = self.term(t.right, defs, new, memo)
            var = target if target is not None else self.fresh()
            if target is None:
                new.append(var)
            defs.append(Add(a, b, var))
        else:
            raise FormatError(f"not a term: {t!r}")
        if target is None:
            memo[t] = var
        return var


def _constant_tree(c: int):
    """Term for c built by doubling, so equal subterms share a variable."""
    bits = bin(c)[2:]
    t = 1
    for b in bits[1:]:
        t = Plus(t, t)
        if b == "1":
            t = Plus(t, 1)
    return t


def times(t, c: int):
    """Term for c * t (c >= 1) by doubling."""
    if c < 1:
        raise FormatError("multiplier must be positive")
    bits = bin(c)[2:]
    out = t
    for b in bits[1:]:
        out = Plus(out, out)
        if b == "1":
            out = Plus(out, t)
    return out


def normalize(f, bindings: Mapping | None = None):
    """Equivalent formula built from pred/add/eq1 atoms over variables, and/or,
    and exists.  Auxiliary variables are quantified right at their atom."""
    if bindings is not None:
        missing = predicate_names(f) - set(bindings)
        if missing:
            raise FormatError(f"unbound predicate name(s): {', '.join(sorted(missing))}")
    flat = _Flattener(all_vars(f))

    def wrap(new, defs, core):
        parts = defs + core
        body = parts[0] if len(parts) == 1 else And(*parts)
        return Exists(tuple(new), body) if new else body

    def go(g):
        if isinstance(g, (And, Or)):
            return type(g)(*(go(p) for p in g.parts))
        if isinstance(g, Exists):
            return Exists(g.variables, go(g.body))
        if is_normal(g):
            return g
        defs, new, memo = [], [], {}
        if isinstance(g, Pred):
            v = flat.term(g.term, defs, new, memo)
            return wrap(new, defs, [Pred(g.name, v)])
        if isinstance(g, Eq1):
            v = flat.term(g.term, defs, new, memo)
            return wrap(new, defs, [Eq1(v)])
        if isinstance(g, Add):
            z = g.z
            if isinstance(z, str):
                flat.term(Plus(g.x, g.y), defs, new, memo, target=z)
                return wrap(new, defs, [])
            zv = flat.term(z, defs, new, memo)
            flat.term(Plus(g.x, g.y), defs, new, memo, target=zv)
            return wrap(new, defs, [])
        if isinstance(g, Eq):
            left, right = g.left, g.right
            if not isinstance(right, str) and isinstance(left, str):
                left, right = right, left
            if isinstance(right, str):
                flat.term(left, defs, new, memo, target=right)
                return wrap(new, defs, [])
            b = flat.term(right, defs, new, memo)
            flat.term(left, defs, new, memo, target=b)
            return wrap(new, defs, [])
        # left <= right  iff  left + d = right for some d
        a = flat.term(g.left, defs, new, memo)
        b = flat.term(g.right, defs, new, memo)
        d = flat.fresh()
        new.append(d)
        return wrap(new, defs, [Add(a, d, b)])

    return go(f)


# ---------------------------------------------------------------------------
# Encodings


def encode(values: Sequence[int], length: int | None = None) -> tuple:
    """Equal-length most-significant-first column word for a tuple of naturals."""
    width = max((v.bit_length() for v in values), default=0)
    if length is None:
        length = width
    if length < width:
        raise FormatError("length too short for the values")
    rows = [format(v, "b").zfill(length) if length else "" for v in values]
    return tuple(tuple(r[i] for r in rows) for i in range(length))


def reversed_convolution(values: Sequence[int]):
    """Least-significant-bit-first convolution (0 is the empty word)."""
    words = [tuple(reversed(bin(v)[2:])) if v else () for v in values]
    return convolve(words)


def atomic_add_automaton(msb_first: bool = False) -> rv.ResetVass:
    """Counter-free recognizer of x + y = z on three tracks.

    Default: least-significant bit first, each track padded at its end, any
    trailing zeros allowed.  With ``msb_first`` the equal-length encoding used
    by ``compile`` instead.
    """
    if msb_first:
        return _msb_add((0, 1, 2), 3)
    edges = set()
    start = (0, frozenset())
    seen = {start}
    todo = [start]
    while todo:
        carry, ended = state = todo.pop()
        for col in columns(3, padded=True):
            if any(col[i] != PAD for i in ended):
                continue
            bits = [0 if c == PAD else int(c) for c in col]
            total = bits[0] + bits[1] + carry - bits[2]
            if total not in (0, 2):
                continue
            nxt = (total // 2, ended | {i for i in range(3) if col[i] == PAD})
            edges.add((state, (col,), nxt))
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    finals = {s for s in seen if s[0] == 0}
    return rv.ResetVass.from_nfa(Nfa(seen, columns(3, padded=True), edges, start, finals))


def _msb_add(tracks, arity) -> rv.ResetVass:
    """x + y = z read most significant bit first.  The state is the carry the
    lower positions still owe to the part already read."""
    ix, iy, iz = tracks
    edges = set()
    for owed in (0, 1):
        for col in columns(arity, padded=False):
            a, b, s = int(col[ix]), int(col[iy]), int(col[iz])
            incoming = s + 2 * owed - a - b
            if incoming in (0, 1):
                edges.add((owed, (col,), incoming))
    nfa = Nfa({0, 1}, columns(arity, padded=False), edges, 0, {0})
    return rv.ResetVass.from_nfa(nfa)


def _eq1_machine() -> rv.ResetVass:
    nfa = Nfa(
        {0, 1},
        columns(1, padded=False),
        {(0, (("0",),), 0), (0, (("1",),), 1)},
        0,
        {1},
    )
    return rv.ResetVass.from_nfa(nfa)


def _predicate_machine(handle: PredicateHandle) -> rv.ResetVass:
    v = handle.machine
    lifted = rv.ResetVass(
        v.states,
        columns(1, padded=False),
        v.counters,
        {(p, tuple((a,) for a in w), k, x, q) for p, w, k, x, q in v.edges},
        v.initial,
        v.finals,
    )
    return _tidy(rv.apply_transduction(zero_normalizer(1), lifted))


def _tidy(v: rv.ResetVass) -> rv.ResetVass:
    v = v.compact().trim()
    if v.counters == 0:
        # counter-free pieces are plain regular languages; keep them minimal
        return rv.ResetVass.from_nfa(v.to_nfa().minimize())
    return v


# ---------------------------------------------------------------------------
# Compilation


def tracks(f) -> list:
    """Track order of a compiled formula: its free variables, sorted."""
    return sorted(free_vars(f))


def compile(f, bindings: Mapping) -> rv.ResetVass:  # noqa: A001 - mirrors the operation name
    """Reset VASS accepting exactly the encodings of the solutions of ``f``."""
    if not is_normal(f):
        raise FormatError("compile needs a normalized formula")
    for name in predicate_names(f):
        if name not in bindings:
            raise FormatError(f"unbound predicate name: {name}")
        if bindings[name].kind is not Kind.PSEUDO:
            raise UsageError(f"predicate {name} is not pseudo-kind")
    return _compile(f, bindings)


def _lift(machine, inner: list, outer: list):
    if inner == outer:
        return machine
    positions = [outer.index(v) for v in inner]
    t = cylindrify(len(inner), positions, len(outer), padded=False)
    return _tidy(rv.apply_transduction(t, machine))


def _compile(f, bindings) -> rv.ResetVass:
    names = tracks(f)
    if isinstance(f, Pred):
        return _predicate_machine(bindings[f.name])
    if isinstance(f, Eq1):
        return _eq1_machine()
    if isinstance(f, Add):
        return _msb_add([names.index(v) for v in (f.x, f.y, f.z)], len(names))
    if isinstance(f, (And, Or)):
        alphabet = columns(len(names), padded=False)
        if not f.parts:
            nfa = Nfa.universal(alphabet) if isinstance(f, And) else Nfa.empty(alphabet)
            return rv.ResetVass.from_nfa(nfa)
        machines = [_lift(_compile(p, bindings), tracks(p), names) for p in f.parts]
        combine = rv.intersect if isinstance(f, And) else rv.union
        out = machines[0]
        for m in machines[1:]:
            out = _tidy(combine(out, m))
        return out
    inner = tracks(f.body)
    body = _compile(f.body, bindings)
    keep = [i for i, v in enumerate(inner) if v not in f.variables]
    if len(keep) == len(inner):
        return body
    shrink = compose(zero_normalizer(len(keep)), project(len(inner), keep, padded=False))
    return _tidy(rv.apply_transduction(shrink, body))


def truth(sentence, bindings: Mapping) -> bool:
    """Decide a sentence: strip the outer existential block and test the
    compiled body for nonemptiness."""
    loose = free_vars(sentence)
    if loose:
        raise UsageError(f"sentence has free variables: {', '.join(sorted(loose))}")
    body = sentence
    while isinstance(body, Exists):
        body = body.body
    if not all_vars(body):
        return _closed_value(body, bindings)
    normal = normalize(body, bindings)
    return not rv.is_empty(compile(normal, bindings))


def _term_value(t) -> int:
    if isinstance(t, int):
        return t
    return _term_value(t.left) + _term_value(t.right)


def _closed_value(f, bindings) -> bool:
    if isinstance(f, Pred):
        answer = pred_member(bindings[f.name], _term_value(f.term))
        if answer is Tri.UNKNOWN:
            raise UsageError(f"predicate {f.name} could not be decided at {_term_value(f.term)}")
        return answer is Tri.YES
    if isinstance(f, Le):
        return _term_value(f.left) <= _term_value(f.right)
    if isinstance(f, Eq):
        return _term_value(f.left) == _term_value(f.right)
    if isinstance(f, Add):
        return _term_value(f.x) + _term_value(f.y) == _term_value(f.z)
    if isinstance(f, Eq1):
        return _term_value(f.term) == 1
    if isinstance(f, And):
        return all(_closed_value(p, bindings) for p in f.parts)
    if isinstance(f, Or):
        return any(_closed_value(p, bindings) for p in f.parts)
    return _closed_value(f.body, bindings)


def solutions(machine: rv.ResetVass, arity: int, bound: int) -> set:
    """Tuples with entries <= bound accepted by a compiled machine."""
    length = max(bound.bit_length(), 1)
    out = set()
    for values in itertools.product(range(bound + 1), repeat=arity):
        if rv.member(machine, encode(values, length)):
            out.add(values)
    return out


# ---------------------------------------------------------------------------
# s-expression text form


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokens(text: str):
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormatError(f"unexpected character at offset {pos}")
        pos = m.end()
        yield m.group(1) or m.group(2) or m.group(3)


def _read(tokens, i):
    if i >= len(tokens):
        raise FormatError("unexpected end of formula")
    tok = tokens[i]
    if tok == "(":
        items = []
        i += 1
        while i < len(tokens) and tokens[i] != ")":
            item, i = _read(tokens, i)
            items.append(item)
        if i >= len(tokens):
            raise FormatError("unbalanced parentheses")
        return items, i + 1
    if tok == ")":
        raise FormatError("unexpected ')'")
    return tok, i + 1


def _term(x):
    if isinstance(x, list):
        if not x or x[0] != "+" or len(x) < 3:
            raise FormatError(f"bad term {x!r}")
        out = _term(x[1])
        for y in x[2:]:
            out = Plus(out, _term(y))
        return out
    if x.isdigit():
        return int(x)
    return x


def _formula(x):
    if not isinstance(x, list) or not x:
        raise FormatError(f"bad formula {x!r}")
    head, args = x[0], x[1:]
    arity = {"add": 3, "eq1": 1, "le": 2, "eq": 2, "pred": 2}
    if head in arity and len(args) != arity[head]:
        raise FormatError(f"{head} takes {arity[head]} arguments")
    if head == "exists":
        if len(args) != 2 or not isinstance(args[0], list):
            raise FormatError("exists takes a variable list and a body")
        return Exists(tuple(args[0]), _formula(args[1]))
    if head == "and":
        return And(*(_formula(a) for a in args))
    if head == "or":
        return Or(*(_formula(a) for a in args))
    if head == "add":
        return Add(*(_term(a) for a in args))
    if head == "eq1":
        return Eq1(_term(args[0]))
    if head == "le":
        return Le(_term(args[0]), _term(args[1]))
    if head == "eq":
        return Eq(_term(args[0]), _term(args[1]))
    if head == "pred":
        return Pred(args[0], _term(args[1]))
    raise FormatError(f"unknown connective {head!r}")


def from_sexpr(text: str):
    tokens = list(_tokens(text))
    tree, end = _read(tokens, 0)
    if end != len(tokens):
        raise FormatError("trailing input after formula")
    return _formula(tree)


def _term_text(t) -> str:
    if isinstance(t, Plus):
        return f"(+ {_term_text(t.left)} {_term_text(t.right)})"
    return str(t)


def to_sexpr(f) -> str:
    if isinstance(f, Exists):
        return f"(exists ({' '.join(f.variables)}) {to_sexpr(f.body)})"
    if isinstance(f, (And, Or)):
        head = "and" if isinstance(f, And) else "or"
        return "(" + " ".join([head] + [to_sexpr(p) for p in f.parts]) + ")"
    if isinstance(f, Pred):
        return f"(pred {f.name} {_term_text(f.term)})"
    head = {Add: "add", Eq1: "eq1", Le: "le", Eq: "eq"}[type(f)]
    return "(" + " ".join([head] + [_term_text(t) for t in _atom_terms(f)]) + ")"
