"""Random instances for testing and for the ``generate`` subcommand.

Every generator takes a ``random.Random`` so runs are reproducible from a
seed.  States are short strings so the results can be written to files.
"""

from __future__ import annotations

import random

from . import logic
from .hopa import Hopa
from .increment import IncrementingAutomaton
from .kernel import BINARY, Nfa
from .predicates import PredicateHandle
from .reset_vass import ACTIONS, ResetVass
from .transducer import Transducer


def _word(rng: random.Random, alphabet, max_len: int = 2) -> tuple:
    letters = sorted(alphabet)
    return tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len)))


def _names(n: int, tag: str = "q") -> list:
    return [f"{tag}{i}" for i in range(n)]


def _finals(rng, states) -> set:
    return {q for q in states if rng.random() < 0.35} or {rng.choice(states)}


def random_nfa(rng: random.Random, alphabet="ab", max_states: int = 6, max_edges: int = 12) -> Nfa:
    states = _names(rng.randint(1, max_states))
    edges = {
        (rng.choice(states), _word(rng, alphabet, 1), rng.choice(states))
        for _ in range(rng.randint(0, max_edges))
    }
    return Nfa(states, alphabet, edges, states[0], _finals(rng, states))


def random_reset_vass(
    rng: random.Random, alphabet="ab", max_states: int = 8, max_counters: int = 3, max_edges: int = 15
) -> ResetVass:
    states = _names(rng.randint(1, max_states))
    counters = rng.randint(0, max_counters)
    edges = set()
    for _ in range(rng.randint(0, max_edges)):
        action = rng.choice(ACTIONS) if counters else "nop"
        k = None if action == "nop" else rng.randrange(counters)
        edges.add((rng.choice(states), _word(rng, alphabet, 1), k, action, rng.choice(states)))
    return ResetVass(states, alphabet, counters, edges, states[0], _finals(rng, states))


def random_transducer(
    rng: random.Random, inputs="ab", outputs="ab", max_states: int = 4, max_edges: int = 8, min_write: int = 0
) -> Transducer:
    """``min_write=1`` keeps every run at most as long as its output."""
    states = _names(rng.randint(1, max_states), "t")
    edges = set()
    for _ in range(rng.randint(0, max_edges)):
        write = _word(rng, outputs, 2)
        while len(write) < min_write:
            write = _word(rng, outputs, 2)
        edges.add((rng.choice(states), _word(rng, inputs, 1), write, rng.choice(states)))
    return Transducer(states, inputs, outputs, edges, states[0], _finals(rng, states))


def random_predicate(rng: random.Random, name: str = "P") -> PredicateHandle:
    """A finite, regular-unary or counter-free pseudo predicate."""
    kind = rng.choice(["finite", "regular_unary", "pseudo"])
    if kind == "finite":
        return PredicateHandle.finite(rng.sample(range(8), rng.randint(0, 3)), name)
    if kind == "regular_unary":
        return PredicateHandle.regular_unary(random_nfa(rng, "a", 4, 6), name)
    return PredicateHandle.pseudo(ResetVass.from_nfa(random_nfa(rng, BINARY, 3, 6)), name)


def random_incauto(rng: random.Random, alphabet="ab", max_states: int = 4, max_edges: int = 7) -> IncrementingAutomaton:
    states = _names(rng.randint(1, max_states), "c")
    edges = {
        (rng.choice(states), _word(rng, alphabet, 1), rng.randint(0, 1), rng.choice(states))
        for _ in range(rng.randint(0, max_edges))
    }
    preds = [random_predicate(rng, f"P{i}") for i in range(rng.randint(1, 2))]
    accepts = {(rng.choice(states), rng.choice(preds)) for _ in range(rng.randint(1, 3))}
    return IncrementingAutomaton(states, alphabet, edges, states[0], accepts)


def random_order1_hopa(rng: random.Random, alphabet=BINARY, max_states: int = 4, max_edges: int = 8) -> Hopa:
    """Pushdown machine with a two-letter stack alphabet."""
    states = _names(rng.randint(1, max_states), "h")
    ops = [(), (("push", 1),), (("pop", 1),), (("rew", "x"),), (("push", 1), ("rew", "x"))]
    edges = set()
    for _ in range(rng.randint(1, max_edges)):
        top = rng.choice([None, "z", "x"])
        edges.add((rng.choice(states), _word(rng, alphabet, 1), top, rng.choice(ops), rng.choice(states)))
    return Hopa(states, alphabet, {"z", "x"}, "z", 1, edges, states[0], _finals(rng, states))


def random_finite_binary_hopa(rng: random.Random, max_words: int = 3, max_value: int = 64) -> tuple:
    """Order-1 machine for a few binary words of value at most ``max_value``;
    returns (machine, words)."""
    words = set()
    for _ in range(rng.randint(1, max_words)):
        n = rng.randint(0, max_value)
        bits = tuple(bin(n)[2:]) if n else ()
        words.add(("0",) * rng.randint(0, 1) + bits)
    edges = {("s", w, None, (), "f") for w in words}
    return Hopa({"s", "f"}, BINARY, {"z"}, "z", 1, edges, "s", {"f"}), words


def random_term(rng: random.Random, variables, depth: int):
    if depth <= 0 or rng.random() < 0.5:
        return rng.choice(list(variables) + [0, 1, 2])
    return logic.Plus(random_term(rng, variables, depth - 1), random_term(rng, variables, depth - 1))


def random_formula(rng: random.Random, variables=("x", "y"), depth: int = 3, predicates=()):
    """Positive existential formula over ``variables`` (plus quantified ones)."""
    if depth <= 0 or rng.random() < 0.3:
        kinds = ["le", "eq", "add", "eq1"] + (["pred"] if predicates else [])
        kind = rng.choice(kinds)
        if kind == "pred":
            return logic.Pred(rng.choice(list(predicates)), random_term(rng, variables, 1))
        if kind == "eq1":
            return logic.Eq1(rng.choice(list(variables)))
        if kind == "add":
            return logic.Add(*(rng.choice(list(variables)) for _ in range(3)))
        left, right = random_term(rng, variables, 1), random_term(rng, variables, 1)
        return logic.Le(left, right) if kind == "le" else logic.Eq(left, right)
    pick = rng.random()
    if pick < 0.4:
        return logic.And(*(random_formula(rng, variables, depth - 1, predicates) for _ in range(2)))
    if pick < 0.8:
        return logic.Or(*(random_formula(rng, variables, depth - 1, predicates) for _ in range(2)))
    fresh = f"v{depth}"
    return logic.Exists((fresh,), random_formula(rng, tuple(variables) + (fresh,), depth - 1, predicates))


GENERATORS = {
    "resetvass": random_reset_vass,
    "transducer": random_transducer,
    "hopa": random_order1_hopa,
    "incauto": random_incauto,
}
