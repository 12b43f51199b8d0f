"""Numerical predicates referenced by incrementing automata.

Four kinds:

* ``pseudo``: the binary values of a reset VASS language over {0,1};
* ``power``: every non-power of two, plus 2^v for each binary value v of a
  HOPA language;
* ``finite``: an explicit finite set;
* ``regular_unary``: the lengths accepted by a one-letter automaton.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import hopa as _hopa
from . import reset_vass as _rv
from .errors import AlphabetError, FormatError, ParameterError
from .kernel import (
    BINARY,
    Nfa,
    Tri,
    ap_binary_dfa,
    binary_reps,
    count_set,
    fresh_names,
)


class Kind(enum.Enum):
    PSEUDO = "pseudo"
    POWER = "power"
    FINITE = "finite"
    REGULAR_UNARY = "regular_unary"


@dataclass(frozen=True)
class PredicateHandle:
    kind: Kind
    name: str = ""
    machine: object = None  # ResetVass, Hopa or Nfa depending on kind
    values: frozenset = frozenset()

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "values", frozenset(self.values))
        expected = {
            Kind.PSEUDO: _rv.ResetVass,
            Kind.POWER: _hopa.Hopa,
            Kind.REGULAR_UNARY: Nfa,
        }
        if kind is Kind.FINITE:
            if self.machine is not None:
                raise FormatError("finite predicates carry a value set, not a machine")
            if any(not isinstance(v, int) or v < 0 for v in self.values):
                raise ParameterError("finite predicate values must be naturals")
            return
        if not isinstance(self.machine, expected[kind]):
            raise FormatError(f"{kind.value} predicate needs a {expected[kind].__name__}")
        if kind is Kind.PSEUDO and not self.machine.alphabet <= BINARY:
            raise AlphabetError("pseudo predicates need a machine over {0,1}")
        if kind is Kind.POWER and not self.machine.input_alphabet <= BINARY:
            raise AlphabetError("power predicates need a machine over {0,1}")
        if kind is Kind.REGULAR_UNARY and len(self.machine.alphabet) > 1:
            raise AlphabetError("regular unary predicates need a one-letter automaton")

    @classmethod
    def pseudo(cls, machine, name=""):
        return cls(Kind.PSEUDO, name, machine)

    @classmethod
    def power(cls, machine, name=""):
        return cls(Kind.POWER, name, machine)

    @classmethod
    def finite(cls, values, name=""):
        return cls(Kind.FINITE, name, None, frozenset(values))

    @classmethod
    def regular_unary(cls, nfa, name=""):
        return cls(Kind.REGULAR_UNARY, name, nfa)


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _binary_machine(v: _rv.ResetVass) -> _rv.ResetVass:
    return v.with_alphabet(BINARY)


def _pseudo_meets(v: _rv.ResetVass, nfa: Nfa) -> bool:
    reg = _rv.ResetVass.from_nfa(nfa.with_alphabet(BINARY))
    return not _rv.is_empty(_rv.intersect(_binary_machine(v), reg).compact())


def _power_exponent_in(p: PredicateHandle, k: int, budget: int) -> Tri:
    """Is k a binary value of a word of the power predicate's machine?"""
    probe = _hopa.intersect_regular(p.machine, binary_reps(k))
    return ~_hopa.is_empty(probe, budget)


def pred_member(p: PredicateHandle, n: int, budget: int = 10000) -> Tri:
    if n < 0:
        raise ParameterError("predicates hold naturals")
    if p.kind is Kind.FINITE:
        return Tri.of(n in p.values)
    if p.kind is Kind.REGULAR_UNARY:
        return Tri.of(n in count_set(p.machine))
    if p.kind is Kind.PSEUDO:
        return Tri.of(_pseudo_meets(p.machine, binary_reps(n)))
    if not is_power_of_two(n):
        return Tri.YES
    return _power_exponent_in(p, n.bit_length() - 1, budget)


def pred_meets_ap(p: PredicateHandle, m: int, per: int, budget: int = 10000) -> Tri:
    """Does the predicate meet the progression m + per*N?"""
    if per < 1:
        raise ParameterError("progression period must be positive")
    if m < 0:
        raise ParameterError("progression start must be a natural")
    if p.kind is Kind.FINITE:
        return Tri.of(any(v >= m and (v - m) % per == 0 for v in p.values))
    if p.kind is Kind.REGULAR_UNARY:
        cs = count_set(p.machine)
        # past max(m, threshold) both sides repeat with period per * cs.period
        limit = max(m, cs.threshold) + per * cs.period
        return Tri.of(any(x in cs for x in range(m, limit + 1, per)))
    if p.kind is Kind.PSEUDO:
        return Tri.of(_pseudo_meets(p.machine, ap_binary_dfa(m, per)))
    # among m, m+per, m+2*per at most two are powers of two, so the
    # non-power part always meets the progression
    return Tri.YES


def is_nonempty(p: PredicateHandle, budget: int = 10000) -> Tri:
    return pred_meets_ap(p, 0, 1, budget)


def _canonical_nonpowers() -> Nfa:
    """Canonical binary words of non-powers of two: ε (for 0) and words
    starting with 1 that contain a second 1."""
    edges = {
        ("s", ("1",), "one"),
        ("one", ("0",), "one"),
        ("one", ("1",), "two"),
        ("two", ("0",), "two"),
        ("two", ("1",), "two"),
    }
    return Nfa({"s", "one", "two"}, BINARY, edges, "s", {"s", "two"})


def _canonical_words(nfa: Nfa) -> Nfa:
    """Leading zeros removed: {v : 0^i v in L(nfa), v empty or starting with 1}."""
    m = nfa.letter_normalized()
    zeros = set()
    cur = m._closure([m.initial])
    while not cur <= zeros:
        zeros |= cur
        cur = m._step(cur, "0")
    (start,) = fresh_names(m.states, 1, tag="canon")
    edges = set(m.edges) | {(start, ("1",), q) for q in m._step(frozenset(zeros), "1")}
    finals = set(m.finals) | ({start} if zeros & m.finals else set())
    return Nfa(m.states | {start}, BINARY, edges, start, finals)


def covers_nonpowers(p: PredicateHandle) -> Tri:
    """Does the predicate contain all but finitely many non-powers of two?

    YES/NO where this can be certified from the handle, UNKNOWN otherwise.
    """
    if p.kind is Kind.POWER:
        return Tri.YES
    if p.kind is Kind.FINITE:
        return Tri.NO
    if p.kind is Kind.REGULAR_UNARY:
        # every residue class past the threshold holds infinitely many non-powers
        cs = count_set(p.machine)
        return Tri.of(len(cs.residues) == cs.period)
    if p.machine.counters == 0:
        nfa = p.machine.to_nfa().with_alphabet(BINARY)
        missing = _canonical_nonpowers().intersect(_canonical_words(nfa).complement(BINARY))
        return Tri.of(missing.is_finite())
    return Tri.UNKNOWN


def describe(p: PredicateHandle) -> str:
    if p.kind is Kind.FINITE:
        return "{" + ",".join(str(v) for v in sorted(p.values)) + "}"
    return f"{p.kind.value}:{p.name or '?'}"
