"""Brute-force reference implementations the tests compare against.

Nothing here uses the decision procedures under test: every oracle is a
bounded forward search or a direct evaluation over small numbers.
"""

from __future__ import annotations

import itertools
from collections import deque

from regsep import logic
from regsep.kernel import as_word, nu_value


def words(alphabet, max_len):
    letters = sorted(alphabet)
    for n in range(max_len + 1):
        yield from itertools.product(letters, repeat=n)


# -- reset VASS ----------------------------------------------------------------


def _fire(vec, k, action):
    if action == "nop":
        return vec
    vec = list(vec)
    if action == "inc":
        vec[k] += 1
    elif action == "dec":
        if vec[k] == 0:
            return None
        vec[k] -= 1
    else:
        vec[k] = 0
    return tuple(vec)


def vass_forward(v, depth):
    """Configurations reachable in at most ``depth`` edge firings, ignoring
    the input.  Returns (reached set, True when the search saturated)."""
    start = (v.initial, (0,) * v.counters)
    seen = {start}
    layer = [start]
    for _ in range(depth):
        nxt = []
        for q, vec in layer:
            for p, _, k, x, r in v.edges:
                if p != q:
                    continue
                vec2 = _fire(vec, k, x)
                if vec2 is not None and (r, vec2) not in seen:
                    seen.add((r, vec2))
                    nxt.append((r, vec2))
        layer = nxt
        if not layer:
            return seen, True
    return seen, not layer


def covers(reached, target):
    q, vec = target
    return any(r == q and all(a >= b for a, b in zip(u, vec)) for r, u in reached)


def vass_accepts(v, w, max_steps=2000):
    """Forward search over (state, counters, position); None if it does not
    settle within ``max_steps`` expansions."""
    w = as_word(w)
    start = (v.initial, (0,) * v.counters, 0)
    seen = {start}
    queue = deque([start])
    steps = 0
    while queue:
        steps += 1
        if steps > max_steps:
            return None
        q, vec, i = queue.popleft()
        if q in v.finals and i == len(w):
            return True
        for p, r, k, x, dst in v.edges:
            if p != q or tuple(w[i:i + len(r)]) != r:
                continue
            vec2 = _fire(vec, k, x)
            if vec2 is None:
                continue
            cfg = (dst, vec2, i + len(r))
            if cfg not in seen:
                seen.add(cfg)
                queue.append(cfg)
    return False


# -- transducers -----------------------------------------------------------------


def transducer_pairs(t, max_steps):
    """All (input, output) pairs produced by runs of at most ``max_steps`` edges."""
    out = set()
    layer = {(t.initial, (), ())}
    for _ in range(max_steps + 1):
        for q, r, w in layer:
            if q in t.finals:
                out.add((r, w))
        layer = {(dst, r + rr, w + ww) for q, r, w in layer for p, rr, ww, dst in t.edges if p == q}
    return out


# -- numbers -----------------------------------------------------------------------


def nu_values(nfa, max_len):
    """Binary values of accepted words up to ``max_len`` letters."""
    return {nu_value(w) for w in nfa.words_up_to(max_len)}


def nu_values_upto(nfa, bound, zeros=8):
    """n <= bound such that 0^i bin(n) is accepted for some i <= zeros.
    Enough leading zeros for automata with at most three states."""
    out = set()
    for n in range(bound + 1):
        bits = bin(n)[2:] if n else ""
        if any(nfa.accepts("0" * i + bits) for i in range(zeros + 1)):
            out.add(n)
    return out


def is_power_of_two(n):
    return n > 0 and n & (n - 1) == 0


# -- formulas ------------------------------------------------------------------------


def _term(t, env):
    if isinstance(t, int):
        return t
    if isinstance(t, str):
        return env[t]
    return _term(t.left, env) + _term(t.right, env)


def holds(f, env, sets, bound):
    """Direct evaluation; existential witnesses range over 0..bound."""
    if isinstance(f, logic.Pred):
        return _term(f.term, env) in sets[f.name]
    if isinstance(f, logic.Le):
        return _term(f.left, env) <= _term(f.right, env)
    if isinstance(f, logic.Eq):
        return _term(f.left, env) == _term(f.right, env)
    if isinstance(f, logic.Eq1):
        return _term(f.term, env) == 1
    if isinstance(f, logic.Add):
        return _term(f.x, env) + _term(f.y, env) == _term(f.z, env)
    if isinstance(f, logic.And):
        return all(holds(p, env, sets, bound) for p in f.parts)
    if isinstance(f, logic.Or):
        return any(holds(p, env, sets, bound) for p in f.parts)
    names = f.variables
    for values in itertools.product(range(bound + 1), repeat=len(names)):
        if holds(f.body, {**env, **dict(zip(names, values))}, sets, bound):
            return True
    return False


def _extend(names, rel, full, bound):
    missing = [n for n in full if n not in names]
    out = set()
    for t in rel:
        env = dict(zip(names, t))
        for extra in itertools.product(range(bound + 1), repeat=len(missing)):
            env.update(zip(missing, extra))
            out.add(tuple(env[n] for n in full))
    return out


def _join(left, right):
    (ln, lr), (rn, rr) = left, right
    names = sorted(set(ln) | set(rn))
    shared = [n for n in ln if n in rn]
    index = {}
    for t in rr:
        env = dict(zip(rn, t))
        index.setdefault(tuple(env[n] for n in shared), []).append(env)
    out = set()
    for t in lr:
        env = dict(zip(ln, t))
        for other in index.get(tuple(env[n] for n in shared), ()):
            both = {**env, **other}
            out.add(tuple(both[n] for n in names))
    return names, out


def relation(f, sets, bound):
    """Solution set of ``f`` over 0..bound for its free variables (sorted),
    built bottom-up with joins and projections."""
    names = sorted(logic.free_vars(f))
    if isinstance(f, logic.And):
        acc = ([], {()})
        for p in f.parts:
            acc = _join(acc, (sorted(logic.free_vars(p)), relation(p, sets, bound)))
        return acc[1]
    if isinstance(f, logic.Or):
        out = set()
        for p in f.parts:
            out |= _extend(sorted(logic.free_vars(p)), relation(p, sets, bound), names, bound)
        return out
    if isinstance(f, logic.Exists):
        inner = sorted(logic.free_vars(f.body))
        keep = [inner.index(n) for n in names]
        return {tuple(t[i] for i in keep) for t in relation(f.body, sets, bound)}
    return {
        values
        for values in itertools.product(range(bound + 1), repeat=len(names))
        if holds(f, dict(zip(names, values)), sets, bound)
    }


# -- predicates and incrementing automata -----------------------------------------------


def pred_values(p, bound):
    """Members of a finite, regular-unary or counter-free pseudo predicate up to ``bound``."""
    kind = p.kind.value
    if kind == "finite":
        return {n for n in p.values if n <= bound}
    if kind == "regular_unary":
        return {n for n in range(bound + 1) if p.machine.accepts("a" * n)}
    if kind == "pseudo" and p.machine.counters == 0:
        return nu_values_upto(p.machine.to_nfa(), bound)
    raise ValueError(f"no oracle for {kind}")


def incauto_accepts(m, w, bound=64):
    """Search over (state, position, counter) with the counter capped at ``bound``."""
    w = as_word(w)
    sets = {}
    start = (m.initial, 0, 0)
    seen = {start}
    stack = [start]
    while stack:
        q, i, n = stack.pop()
        if i == len(w):
            for state, pred in m.accepts:
                if state == q:
                    if pred not in sets:
                        sets[pred] = pred_values(pred, bound)
                    if n in sets[pred]:
                        return True
        for p, word, add, r in m.edges:
            if p != q or tuple(w[i:i + len(word)]) != word or n + add > bound:
                continue
            cfg = (r, i + len(word), n + add)
            if cfg not in seen:
                seen.add(cfg)
                stack.append(cfg)
    return False
