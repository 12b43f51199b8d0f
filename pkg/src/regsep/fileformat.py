"""Line-oriented definition files.

A file is a sequence of blocks.  Each block opens with an ``@kind NAME``
header and runs until the next header.  ``#`` at the start of a token starts
a comment, words are quoted (``""`` is the empty word) and every other item
is a bare token.  Example::

    @resetvass up
    states p q
    alphabet a
    counters 1
    init p
    final q
    edge p read:"a" counter:1 op:inc p
    edge p read:"" op:nop q

Counters are numbered from 1 in files and from 0 in the library.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import Iterable

from . import hopa as hp
from . import logic
from .errors import FormatError, RegsepError
from .increment import IncrementingAutomaton
from .kernel import ordered
from .predicates import Kind, PredicateHandle
from .reset_vass import ACTIONS, ResetVass
from .transducer import Transducer

MACHINE_KINDS = ("resetvass", "transducer", "hopa")
KINDS = MACHINE_KINDS + ("predicate", "incauto", "formula")
_PRED_KINDS = {
    "pseudo": Kind.PSEUDO,
    "power": Kind.POWER,
    "finite": Kind.FINITE,
    "regularunary": Kind.REGULAR_UNARY,
}
_PRED_WORDS = {v: k for k, v in _PRED_KINDS.items()}

_TOKEN = re.compile(r'(?:[^\s"]|"(?:[^"\\]|\\.)*")+')
_FIELD = re.compile(r"([a-z]+):(.*)", re.S)


@dataclass(frozen=True)
class Location:
    path: str
    line: int
    col: int = 1

    def __str__(self):
        return f"{self.path}:{self.line}:{self.col}"


class ParseError(FormatError):
    def __init__(self, where: Location, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class Entry:
    kind: str
    value: object
    where: Location | None = field(default=None, compare=False)
    ref: str | None = None  # machine name behind a predicate


@dataclass
class Workspace:
    entries: dict = field(default_factory=dict)

    def add(self, name: str, kind: str, value, ref=None, where=None) -> None:
        if name in self.entries:
            first = self.entries[name].where
            raise FormatError(f"duplicate name {name!r}" + (f" (first defined at {first})" if first else ""))
        self.entries[name] = Entry(kind, value, where, ref)

    def get(self, name: str, *kinds) -> Entry:
        if name not in self.entries:
            raise FormatError(f"no definition named {name!r}")
        entry = self.entries[name]
        if kinds and entry.kind not in kinds:
            raise RegsepError(f"{name!r} is a {entry.kind}, expected {' or '.join(kinds)}")
        return entry

    def predicates(self) -> dict:
        return {n: e.value for n, e in self.entries.items() if e.kind == "predicate"}

    def __eq__(self, other):
        if not isinstance(other, Workspace):
            return NotImplemented
        return self.entries == other.entries


# ---------------------------------------------------------------------------
# Reading


@dataclass
class _Token:
    text: str
    where: Location


@dataclass
class _Block:
    kind: str
    name: str
    header: list
    lines: list = field(default_factory=list)  # list of token lists
    raw: list = field(default_factory=list)  # (Location, text) for formulas


def _tokens(text: str, path: str, lineno: int) -> list:
    out = []
    for m in _TOKEN.finditer(text):
        if m.group().startswith("#"):
            break
        out.append(_Token(m.group(), Location(path, lineno, m.start() + 1)))
    return out


def _blocks(text: str, path: str) -> list:
    blocks = []
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = _tokens(line, path, lineno)
        if not toks:
            continue
        head = toks[0]
        if head.text.startswith("@"):
            kind = head.text[1:]
            if kind not in KINDS:
                raise ParseError(head.where, f"unknown block kind {kind!r}")
            if len(toks) < 2:
                raise ParseError(head.where, "block header needs a name")
            blocks.append(_Block(kind, toks[1].text, toks))
            continue
        if not blocks:
            raise ParseError(head.where, "content before the first block header")
        blocks[-1].lines.append(toks)
        blocks[-1].raw.append((head.where, line))
    return blocks


def _word(tok: _Token, text: str) -> tuple:
    if len(text) < 2 or not (text.startswith('"') and text.endswith('"')):
        raise ParseError(tok.where, f"expected a quoted word, got {text!r}")
    body = text[1:-1]
    return tuple(re.sub(r"\\(.)", r"\1", c) for c in re.findall(r"\\.|.", body, re.S))


def _fields(toks: list) -> tuple:
    """Split an edge line into bare tokens and key:value fields."""
    bare, fields = [], {}
    for tok in toks:
        m = _FIELD.fullmatch(tok.text)
        if m and not tok.text.startswith('"'):
            if m.group(1) in fields:
                raise ParseError(tok.where, f"repeated field {m.group(1)!r}")
            fields[m.group(1)] = (tok, m.group(2))
        else:
            bare.append(tok)
    return bare, fields


def _need(fields: dict, key: str, line_start: _Token) -> tuple:
    if key not in fields:
        raise ParseError(line_start.where, f"edge needs a {key}: field")
    return fields[key]


def _int(tok: _Token, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParseError(tok.where, f"expected an integer, got {text!r}") from None


_LIST_KEYS = ("init", "final", "alphabet", "input", "output", "stackalpha", "counters", "bottom")


class _Reader:
    """Shared line handling for the machine blocks."""

    def __init__(self, block: _Block, extra_keys=()):
        self.block = block
        self.states = None
        self.values = {}
        self.where = {}
        self.edges = []
        self.other = []
        for toks in block.lines:
            key = toks[0].text
            if key == "states":
                self.states = {t.text: t.where for t in toks[1:]}
            elif key == "edge":
                self.edges.append(toks)
            elif key in extra_keys:
                self.other.append(toks)
            elif key in _LIST_KEYS:
                if key in self.values:
                    raise ParseError(toks[0].where, f"repeated {key} line")
                self.values[key] = [t.text for t in toks[1:]]
                self.where[key] = toks[0].where
            else:
                raise ParseError(toks[0].where, f"unexpected line {key!r} in @{block.kind} block")
        if self.states is None:
            raise ParseError(block.header[0].where, f"@{block.kind} block needs a states line")

    def state(self, tok_or_text, where=None) -> str:
        if isinstance(tok_or_text, _Token):
            name, where = tok_or_text.text, tok_or_text.where
        else:
            name = tok_or_text
        if name not in self.states:
            raise ParseError(where, f"undeclared state {name!r}")
        return name

    def single(self, key) -> str:
        if key not in self.values or len(self.values[key]) != 1:
            where = self.where.get(key, self.block.header[0].where)
            raise ParseError(where, f"@{self.block.kind} block needs exactly one {key} state")
        return self.state(self.values[key][0], self.where[key])

    def finals(self) -> set:
        return {self.state(q, self.where["final"]) for q in self.values.get("final", [])}

    def letters(self, key) -> set:
        return set(self.values.get(key, []))

    def ends(self, toks) -> tuple:
        bare, fields = _fields(toks[1:])
        if len(bare) != 2:
            raise ParseError(toks[0].where, "edge needs exactly a source and a target state")
        return self.state(bare[0]), self.state(bare[1]), fields


def _guard(where: Location, build):
    """Attach a location to library validation errors."""
    try:
        return build()
    except ParseError:
        raise
    except RegsepError as exc:
        raise ParseError(where, str(exc)) from None


def _read_resetvass(block: _Block) -> ResetVass:
    r = _Reader(block)
    counters = 0
    if "counters" in r.values:
        where = r.where["counters"]
        if len(r.values["counters"]) != 1:
            raise ParseError(where, "counters takes one number")
        counters = _int(_Token("", where), r.values["counters"][0])
    edges = []
    for toks in r.edges:
        p, q, fields = r.ends(toks)
        tok, text = _need(fields, "read", toks[0])
        otok, op = fields.get("op", (toks[0], "nop"))
        if op not in ACTIONS:
            raise ParseError(otok.where, f"unknown counter action {op!r}")
        k = None
        if "counter" in fields:
            ktok, ktext = fields["counter"]
            k = _int(ktok, ktext) - 1
            if not 0 <= k < counters:
                raise ParseError(ktok.where, f"counter {k + 1} out of range 1..{counters}")
        elif op != "nop":
            raise ParseError(otok.where, f"op:{op} needs a counter: field")
        edges.append((p, _word(tok, text), k, op, q))
    where = block.header[0].where
    alphabet = r.letters("alphabet") | {a for e in edges for a in e[1]}
    return _guard(where, lambda: ResetVass(r.states, alphabet, counters, edges, r.single("init"), r.finals()))


def _read_transducer(block: _Block) -> Transducer:
    r = _Reader(block)
    edges = []
    for toks in r.edges:
        p, q, fields = r.ends(toks)
        rtok, rtext = _need(fields, "read", toks[0])
        wtok, wtext = _need(fields, "write", toks[0])
        edges.append((p, _word(rtok, rtext), _word(wtok, wtext), q))
    inputs = r.letters("input") | {a for e in edges for a in e[1]}
    outputs = r.letters("output") | {a for e in edges for a in e[2]}
    where = block.header[0].where
    return _guard(where, lambda: Transducer(r.states, inputs, outputs, edges, r.single("init"), r.finals()))


def _read_hopa(block: _Block) -> hp.Hopa:
    head = block.header
    if len(head) != 4 or head[2].text != "order":
        raise ParseError(head[0].where, "expected '@hopa NAME order K'")
    order = _int(head[3], head[3].text)
    r = _Reader(block)
    if "bottom" not in r.values or len(r.values["bottom"]) != 1:
        raise ParseError(head[0].where, "@hopa block needs one bottom letter")
    (bottom,) = r.values["bottom"]
    gamma = r.letters("stackalpha") | {bottom}
    edges = []
    for toks in r.edges:
        p, q, fields = r.ends(toks)
        rtok, rtext = _need(fields, "read", toks[0])
        ttok, top = fields.get("top", (toks[0], "*"))
        if top != "*" and top not in gamma:
            raise ParseError(ttok.where, f"undeclared stack letter {top!r}")
        otok, ops = fields.get("ops", (toks[0], ""))
        instrs = tuple(_guard(otok.where, lambda i=i: hp.parse_instruction(i)) for i in ops.split(";") if i)
        for kind, arg in instrs:
            if kind == "rew" and arg not in gamma:
                raise ParseError(otok.where, f"undeclared stack letter {arg!r}")
        edges.append((p, _word(rtok, rtext), None if top == "*" else top, instrs, q))
    alphabet = r.letters("alphabet") | {a for e in edges for a in e[1]}
    where = head[0].where
    return _guard(where, lambda: hp.Hopa(r.states, alphabet, gamma, bottom, order, edges, r.single("init"), r.finals()))


def _read_incauto(block: _Block, ws: Workspace) -> IncrementingAutomaton:
    r = _Reader(block, extra_keys=("accept",))
    edges = []
    for toks in r.edges:
        p, q, fields = r.ends(toks)
        rtok, rtext = _need(fields, "read", toks[0])
        atok, atext = _need(fields, "add", toks[0])
        edges.append((p, _word(rtok, rtext), _int(atok, atext), q))
    accepts = []
    for toks in r.other:
        bare, fields = _fields(toks[1:])
        if len(bare) != 1 or "pred" not in fields:
            raise ParseError(toks[0].where, "expected 'accept STATE pred:NAME'")
        ptok, pname = fields["pred"]
        if pname not in ws.entries or ws.entries[pname].kind != "predicate":
            raise ParseError(ptok.where, f"dangling reference to predicate {pname!r}")
        accepts.append((r.state(bare[0]), ws.entries[pname].value))
    alphabet = r.letters("alphabet") | {a for e in edges for a in e[1]}
    where = block.header[0].where
    return _guard(where, lambda: IncrementingAutomaton(r.states, alphabet, edges, r.single("init"), accepts))


def _read_predicate(block: _Block, ws: Workspace) -> tuple:
    bare, fields = _fields(block.header[2:])
    where = block.header[0].where
    if bare:
        raise ParseError(bare[0].where, f"unexpected token {bare[0].text!r}")
    if block.lines:
        raise ParseError(block.lines[0][0].where, "@predicate takes a single header line")
    if "kind" not in fields:
        raise ParseError(where, "predicate needs a kind: field")
    ktok, ktext = fields["kind"]
    if ktext not in _PRED_KINDS:
        raise ParseError(ktok.where, f"unknown predicate kind {ktext!r}")
    kind = _PRED_KINDS[ktext]
    if kind is Kind.FINITE:
        if "set" not in fields:
            raise ParseError(where, "finite predicate needs a set:{...} field")
        stok, stext = fields["set"]
        if not (stext.startswith("{") and stext.endswith("}")):
            raise ParseError(stok.where, "expected set:{n,...}")
        items = [s for s in stext[1:-1].split(",") if s]
        values = {_int(stok, s) for s in items}
        return _guard(where, lambda: PredicateHandle.finite(values, block.name)), None
    if "ref" not in fields:
        raise ParseError(where, f"{ktext} predicate needs a ref: field")
    rtok, ref = fields["ref"]
    want = "hopa" if kind is Kind.POWER else "resetvass"
    if ref not in ws.entries or ws.entries[ref].kind != want:
        raise ParseError(rtok.where, f"dangling reference to {want} {ref!r}")
    machine = ws.entries[ref].value
    if kind is Kind.REGULAR_UNARY:
        machine = _guard(rtok.where, machine.to_nfa)
    return _guard(where, lambda: PredicateHandle(kind, block.name, machine)), ref


def _read_formula(block: _Block, ws: Workspace):
    where = block.header[0].where
    if len(block.header) != 2:
        raise ParseError(block.header[2].where, "@formula header takes only a name")
    text = "\n".join(line for _, line in block.raw)
    if not text.strip():
        raise ParseError(where, "formula block is empty")
    f = _guard(block.raw[0][0], lambda: logic.from_sexpr(text))
    for name in sorted(logic.predicate_names(f)):
        if name not in ws.entries or ws.entries[name].kind != "predicate":
            raise ParseError(where, f"dangling reference to predicate {name!r}")
    return f


_ORDER = {k: i for i, k in enumerate(KINDS)}


def parse_text(text: str, path: str = "<string>", ws: Workspace | None = None) -> Workspace:
    return parse_many([(path, text)], ws)


def parse_files(paths: Iterable[str]) -> Workspace:
    sources = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            sources.append((path, fh.read()))
    return parse_many(sources)


def parse_many(sources, ws: Workspace | None = None) -> Workspace:
    """Parse (path, text) pairs into one workspace.  Machines are built
    first, then predicates, then the blocks that reference predicates."""
    ws = ws if ws is not None else Workspace()
    blocks = []
    seen = {n: e.where for n, e in ws.entries.items()}
    for path, text in sources:
        for b in _blocks(text, path):
            where = b.header[1].where
            if b.name in seen:
                raise ParseError(where, f"duplicate name {b.name!r} (first defined at {seen[b.name]})")
            seen[b.name] = where
            blocks.append(b)
    readers = {"resetvass": _read_resetvass, "transducer": _read_transducer, "hopa": _read_hopa}
    for b in sorted(blocks, key=lambda b: _ORDER[b.kind]):
        ref = None
        if b.kind in readers:
            value = readers[b.kind](b)
        elif b.kind == "predicate":
            value, ref = _read_predicate(b, ws)
        elif b.kind == "incauto":
            value = _read_incauto(b, ws)
        else:
            value = _read_formula(b, ws)
        ws.entries[b.name] = Entry(b.kind, value, b.header[1].where, ref)
    return ws


# ---------------------------------------------------------------------------
# Writing


_SAFE = re.compile(r'[^\s"#:;*@{}]+')


def _safe(x) -> bool:
    return isinstance(x, str) and _SAFE.fullmatch(x) is not None


def _state_names(states, initial) -> dict:
    if all(_safe(q) for q in states):
        return {q: q for q in states}
    rest = [q for q in ordered(states) if q != initial]
    return {q: f"q{i}" for i, q in enumerate([initial] + rest)}


def _quote(w) -> str:
    for a in w:
        if not isinstance(a, str) or len(a) != 1:
            raise FormatError(f"letter {a!r} cannot be written to a file")
    body = "".join(a.replace("\\", "\\\\").replace('"', '\\"') for a in w)
    return f'"{body}"'


def _letters(alphabet) -> str:
    _quote(tuple(alphabet))
    if any(not _safe(a) for a in alphabet):
        raise FormatError("alphabet letters must be plain characters")
    return " ".join(sorted(alphabet))


def _head(kind, name, names, extra=()) -> list:
    lines = [f"@{kind} {name}" + "".join(f" {e}" for e in extra)]
    lines.append("states " + " ".join(sorted(names.values())))
    return lines


def _tail(names, initial, finals) -> list:
    lines = [f"init {names[initial]}"]
    if finals:
        lines.append("final " + " ".join(sorted(names[q] for q in finals)))
    return lines


def write_resetvass(name: str, v: ResetVass) -> str:
    names = _state_names(v.states, v.initial)
    lines = _head("resetvass", name, names)
    lines.append("alphabet " + _letters(v.alphabet))
    lines.append(f"counters {v.counters}")
    lines += _tail(names, v.initial, v.finals)
    rows = []
    for p, w, k, x, q in v.edges:
        counter = "" if k is None else f" counter:{k + 1}"
        rows.append(f"edge {names[p]} read:{_quote(w)}{counter} op:{x} {names[q]}")
    return "\n".join(lines + sorted(rows)) + "\n"


def write_transducer(name: str, t: Transducer) -> str:
    names = _state_names(t.states, t.initial)
    lines = _head("transducer", name, names)
    lines.append("input " + _letters(t.input_alphabet))
    lines.append("output " + _letters(t.output_alphabet))
    lines += _tail(names, t.initial, t.finals)
    rows = [f"edge {names[p]} read:{_quote(r)} write:{_quote(w)} {names[q]}" for p, r, w, q in t.edges]
    return "\n".join(lines + sorted(rows)) + "\n"


def write_hopa(name: str, a: hp.Hopa) -> str:
    names = _state_names(a.states, a.initial)
    for g in a.stack_alphabet:
        if not _safe(g):
            raise FormatError(f"stack letter {g!r} cannot be written to a file")
    lines = _head("hopa", name, names, ("order", a.order))
    lines.append("alphabet " + _letters(a.input_alphabet))
    lines.append("stackalpha " + " ".join(sorted(a.stack_alphabet)))
    lines.append(f"bottom {a.bottom}")
    lines += _tail(names, a.initial, a.finals)
    rows = []
    for p, w, top, instrs, q in a.edges:
        ops = ";".join(hp.instruction_text(i) for i in instrs)
        rows.append(f"edge {names[p]} read:{_quote(w)} top:{'*' if top is None else top} ops:{ops} {names[q]}")
    return "\n".join(lines + sorted(rows)) + "\n"


def write_incauto(name: str, m: IncrementingAutomaton) -> str:
    names = _state_names(m.states, m.initial)
    lines = _head("incauto", name, names)
    lines.append("alphabet " + _letters(m.alphabet))
    lines += _tail(names, m.initial, ())
    rows = [f"edge {names[p]} read:{_quote(w)} add:{b} {names[q]}" for p, w, b, q in m.edges]
    rows += [f"accept {names[q]} pred:{pred.name}" for q, pred in m.accepts]
    return "\n".join(lines + sorted(rows)) + "\n"


def write_predicate(name: str, p: PredicateHandle, ref: str | None) -> str:
    kind = _PRED_WORDS[p.kind]
    if p.kind is Kind.FINITE:
        return f"@predicate {name} kind:{kind} set:{{{','.join(str(v) for v in sorted(p.values))}}}\n"
    if ref is None:
        raise FormatError(f"predicate {name!r} has no machine name to refer to")
    return f"@predicate {name} kind:{kind} ref:{ref}\n"


def write_formula(name: str, f) -> str:
    return f"@formula {name}\n{logic.to_sexpr(f)}\n"


def serialize(ws: Workspace) -> str:
    chunks = []
    for name in sorted(ws.entries, key=lambda n: (_ORDER[ws.entries[n].kind], n)):
        e = ws.entries[name]
        if e.kind == "predicate":
            chunks.append(write_predicate(name, e.value, e.ref))
        else:
            writer = globals()[f"write_{e.kind}"]
            chunks.append(writer(name, e.value))
    return "\n".join(chunks)


def renamed_handle(p: PredicateHandle, name: str) -> PredicateHandle:
    return dataclasses.replace(p, name=name)
