"""Command-line front end.

    regsep -i machines.txt empty up
    regsep -i machines.txt --json member up --word aab
    regsep -i defs.txt regsep left right

Exit status: 0 for a positive verdict, 1 for a negative one, 2 for unknown,
3 for bad input and 4 when a file cannot be read.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import generate as gen
from . import hopa as hp
from . import increment as inc
from . import logic
from . import reset_vass as rv
from . import separability as sep
from . import stats
from .errors import RegsepError, UsageError
from .fileformat import Workspace, parse_files, renamed_handle, serialize
from .kernel import Tri, as_word, word_str
from .predicates import PredicateHandle

EXIT = {Tri.YES: 0, Tri.NO: 1, Tri.UNKNOWN: 2}
BAD_INPUT = 3
UNREADABLE = 4


class Outcome:
    def __init__(self, verdict: str, code: int, witness=None, lines=()):
        self.verdict = verdict
        self.code = code
        self.witness = witness
        self.lines = list(lines)


def _tri(answer: Tri, yes: str, no: str) -> Outcome:
    word = {Tri.YES: yes, Tri.NO: no, Tri.UNKNOWN: "UNKNOWN"}[answer]
    return Outcome(word, EXIT[answer])


def _dfa_json(dfa) -> dict:
    return {
        "states": sorted(dfa.states),
        "initial": dfa.initial,
        "finals": sorted(dfa.finals),
        "edges": sorted([p, word_str(w), q] for p, w, q in dfa.edges),
    }


# ---------------------------------------------------------------------------
# Commands


def cmd_empty(ws: Workspace, args) -> Outcome:
    e = ws.get(args.name, "resetvass", "hopa", "incauto")
    if e.kind == "resetvass":
        answer = Tri.of(rv.is_empty(e.value))
    elif e.kind == "hopa":
        answer = hp.is_empty(e.value, args.budget)
    else:
        answer = inc.is_empty(e.value, args.budget)
    return _tri(answer, "EMPTY", "NONEMPTY")


def cmd_member(ws: Workspace, args) -> Outcome:
    e = ws.get(args.name, "resetvass", "hopa", "incauto")
    w = as_word(args.word)
    if e.kind == "resetvass":
        answer = Tri.of(rv.member(e.value, w))
    elif e.kind == "hopa":
        answer = hp.member(e.value, w, args.budget)
    else:
        answer = inc.member(e.value, w, args.budget)
    return _tri(answer, "MEMBER", "NONMEMBER")


def cmd_truth(ws: Workspace, args) -> Outcome:
    f = ws.get(args.name, "formula").value
    return _tri(Tri.of(logic.truth(f, ws.predicates())), "TRUE", "FALSE")


def cmd_intersect_empty(ws: Workspace, args) -> Outcome:
    left = ws.get(args.left, "incauto", "hopa")
    right = ws.get(args.right, "incauto")
    if left.kind == "incauto":
        answer = Tri.of(sep.intersect_empty_cc(left.value, right.value))
    else:
        answer = ~sep.hopa_meets_counter(left.value, right.value, args.budget)
    return _tri(answer, "EMPTY", "NONEMPTY")


def cmd_regsep(ws: Workspace, args) -> Outcome:
    left = ws.get(args.left, "hopa", "incauto")
    right = ws.get(args.right, "incauto")
    if left.kind == "hopa":
        answer, witness = sep.decide_regsep(left.value, right.value, args.budget)
    else:
        answer, witness = sep.decide_regsep_counting(left.value, right.value, args.budget)
    out = _tri(answer, "SEPARABLE", "INSEPARABLE")
    if witness is not None:
        out.witness = _dfa_json(witness.dfa)
    return out


def _construct(ws: Workspace, args) -> Workspace:
    out = Workspace()
    base = args.name
    if args.what == "bin2unary":
        out.add(f"{base}_unary", "hopa", hp.bin_to_unary(ws.get(base, "hopa").value).relabel())
    elif args.what == "lemma5":
        out.add(f"{base}_bounded", "resetvass", sep.construct_lemma5(ws.get(base, "resetvass").value).relabel())
    elif args.what == "lemma7":
        k1, k2 = sep.construct_lemma7(ws.get(base, "resetvass").value)
        for tag, m in (("k1", k1), ("k2", k2)):
            ((state, handle),) = m.accepts
            mname, pname = f"{base}_{tag}_values", f"{base}_{tag}_pred"
            out.add(mname, "resetvass", handle.machine.relabel())
            handle = renamed_handle(PredicateHandle.pseudo(handle.machine.relabel()), pname)
            out.add(pname, "predicate", handle, ref=mname)
            out.add(f"{base}_{tag}", "incauto", inc.IncrementingAutomaton(
                m.states, m.alphabet, m.edges, m.initial, {(state, handle)}
            ))
    else:
        if args.second is None:
            raise UsageError("construct lemma10 needs two machine names")
        l1, l2 = sep.construct_lemma10(ws.get(base, "hopa").value, ws.get(args.second, "hopa").value)
        out.add(f"{base}_l1", "hopa", l1)
        ((state, handle),) = l2.accepts
        gname, pname = f"{base}_g2", f"{base}_p2"
        out.add(gname, "hopa", handle.machine)
        handle = renamed_handle(handle, pname)
        out.add(pname, "predicate", handle, ref=gname)
        out.add(f"{base}_l2", "incauto", inc.IncrementingAutomaton(
            l2.states, l2.alphabet, l2.edges, l2.initial, {(state, handle)}
        ))
    return out


def cmd_construct(ws: Workspace, args) -> Outcome:
    text = serialize(_construct(ws, args))
    if args.out in (None, "-"):
        return Outcome("WRITTEN", 0, lines=[text.rstrip("\n")])
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    return Outcome("WRITTEN", 0, witness={"out": args.out})


def _vass_step(cfg, read) -> str:
    counters = ",".join(str(c) for c in cfg.counters)
    return f"{cfg.state} [{counters}] read {word_str(read)!r}"


def _hopa_step(state, stack, read) -> str:
    return f"{state} {stack.content!r} read {word_str(read)!r}"


def cmd_trace(ws: Workspace, args) -> Outcome:
    e = ws.get(args.name, "resetvass", "hopa")
    w = as_word(args.word)
    if e.kind == "resetvass":
        answer, path = rv.accepting_run(e.value, w, args.budget)
        steps = [_vass_step(c, r) for c, r in path or ()]
    else:
        answer, path = hp.accepting_run(e.value, w, args.budget)
        steps = [_hopa_step(*s) for s in path or ()]
    out = _tri(answer, "ACCEPTED", "REJECTED")
    out.lines = steps
    out.witness = steps or None
    return out


def cmd_generate(ws: Workspace, args) -> Outcome:
    rng = random.Random(args.seed)
    out = Workspace()
    name = args.name or f"random_{args.kind}"
    m = gen.GENERATORS[args.kind](rng)
    if args.kind == "incauto":
        renamed = {}
        for i, (_, pred) in enumerate(sorted(m.accepts, key=inc._pair_key)):
            if pred in renamed:
                continue
            pname = f"{name}_p{i}"
            ref = None
            if pred.machine is not None:
                ref = f"{name}_m{i}"
                machine = pred.machine
                if not isinstance(machine, rv.ResetVass):
                    machine = rv.ResetVass.from_nfa(machine)
                out.add(ref, "resetvass", machine)
            renamed[pred] = renamed_handle(pred, pname)
            out.add(pname, "predicate", renamed[pred], ref=ref)
        m = inc.IncrementingAutomaton(
            m.states, m.alphabet, m.edges, m.initial, {(q, renamed[p]) for q, p in m.accepts}
        )
    out.add(name, args.kind, m)
    text = serialize(out)
    return Outcome("GENERATED", 0, witness=text, lines=[text.rstrip("\n")])


COMMANDS = {
    "empty": cmd_empty,
    "member": cmd_member,
    "truth": cmd_truth,
    "intersect-empty": cmd_intersect_empty,
    "regsep": cmd_regsep,
    "construct": cmd_construct,
    "trace": cmd_trace,
    "generate": cmd_generate,
}


# ---------------------------------------------------------------------------
# Argument handling


def _shared() -> argparse.ArgumentParser:
    # defaults are suppressed so flags given after the subcommand do not
    # overwrite ones given before it
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("-i", "--input", action="append", dest="inputs", default=argparse.SUPPRESS,
                   metavar="FILE", help="definition file (repeatable)")
    p.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="exploration budget (default 10000)")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print one JSON object")
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for generate (default 0)")
    return p


def build_parser() -> argparse.ArgumentParser:
    shared = _shared()
    parser = argparse.ArgumentParser(
        prog="regsep", parents=[shared], description="Decision procedures for counter and pushdown languages."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("empty", parents=[shared], help="language emptiness")
    p.add_argument("name")
    p = sub.add_parser("member", parents=[shared], help="word membership")
    p.add_argument("name")
    p.add_argument("--word", required=True)
    p = sub.add_parser("truth", parents=[shared], help="truth of a closed formula")
    p.add_argument("name")
    p = sub.add_parser("intersect-empty", parents=[shared], help="is the intersection empty")
    p.add_argument("left")
    p.add_argument("right")
    p = sub.add_parser("regsep", parents=[shared], help="regular separability")
    p.add_argument("left")
    p.add_argument("right")
    p = sub.add_parser("construct", parents=[shared], help="build a reduction instance")
    p.add_argument("what", choices=["bin2unary", "lemma5", "lemma7", "lemma10"])
    p.add_argument("name")
    p.add_argument("second", nargs="?")
    p.add_argument("--out", help="output file (default: standard output)")
    p = sub.add_parser("trace", parents=[shared], help="print an accepting run")
    p.add_argument("name")
    p.add_argument("--word", required=True)
    p = sub.add_parser("generate", parents=[shared], help="print a random definition")
    p.add_argument("kind", choices=sorted(gen.GENERATORS))
    p.add_argument("--name")
    return parser


def _inputs(args) -> dict:
    names = [getattr(args, k) for k in ("name", "left", "right", "second") if getattr(args, k, None)]
    out = {"files": args.inputs, "names": names}
    if getattr(args, "word", None) is not None:
        out["word"] = args.word
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for key, default in (("inputs", []), ("budget", 10000), ("json", False), ("seed", 0)):
        if not hasattr(args, key):
            setattr(args, key, default)
    if args.budget < 1:
        print("error: --budget must be positive", file=sys.stderr)
        return BAD_INPUT
    try:
        ws = parse_files(args.inputs)
        with stats.collecting() as st:
            outcome = COMMANDS[args.command](ws, args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return UNREADABLE
    except (RegsepError, RecursionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    if args.json:
        report = {
            "command": args.command,
            "inputs": _inputs(args),
            "verdict": outcome.verdict,
            "stats": st.as_dict(),
        }
        if outcome.witness is not None:
            report["witness"] = outcome.witness
        print(json.dumps(report, sort_keys=True))
    else:
        for line in outcome.lines:
            print(line)
        print(outcome.verdict)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
