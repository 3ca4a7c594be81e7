"""Command-line interface.

Exit codes: 0 YES/FOUND, 2 input error, 3 exact NO, 4 inconclusive
(bounded search exhausted), 5 refused (no exact procedure exists or is
implemented for the requested combination).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from pdsync import fileformat as ff
from pdsync.automata import (
    BudgetExceeded,
    Dbca,
    Dfa,
    Dpda,
    Kind,
    MachineError,
    PartialDfa,
    Refused,
    SequentialTransducer,
    StackModel,
    run,
)
from pdsync.blind import decide_dbca_arbitrary, dpbca_sync_bounded
from pdsync.dfasync import careful_sync, find_sync_word_greedy, is_synchronizable_dfa, shortest_sync_word
from pdsync.pdasync import sync_search_bounded
from pdsync.reductions import (
    PcpInstance,
    combine_sync_gadget,
    dfa_subset_to_0turn_dca,
    pcp_brute_solve,
    pcp_to_0turn_same,
    pcp_to_1turn_acceptors,
    pcp_to_transducer,
)
from pdsync.transducers import run_transducer, trace_sync_search_bounded
from pdsync.turns import decide_0turn, decide_1turn_dca

EXIT_YES, EXIT_INPUT, EXIT_NO, EXIT_EXHAUSTED, EXIT_REFUSED = 0, 2, 3, 4, 5

_VERDICT_EXIT = {
    "FOUND": EXIT_YES,
    "YES": EXIT_YES,
    "NO": EXIT_NO,
    "PROVED_NO": EXIT_NO,
    "EXHAUSTED": EXIT_EXHAUSTED,
}


class InputError(Exception):
    pass


def default_max_nodes() -> int:
    raw = os.environ.get("PDSYNC_MAX_NODES", "")
    try:
        return int(raw) if raw else 100_000
    except ValueError:
        raise InputError(f"PDSYNC_MAX_NODES must be an integer, got {raw!r}") from None


def _load(path) -> ff.MachineFile:
    try:
        return ff.load_machine(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _word(machine, text):
    word = ff.parse_word(text)
    unknown = [s for s in word if s not in machine.alphabet]
    if unknown:
        raise InputError(f"symbol {unknown[0]!r} is not in the input alphabet")
    return word


def _model(args, required=True):
    if args.model is None:
        if required:
            raise InputError("--model is required for this machine kind")
        return None
    return StackModel(args.model)


def _report(args, machine, verdict, word=None, model=None, turns=None, reason="", stats=None, bound=None):
    """Print the verdict, optionally write the witness file, return the exit code."""
    if verdict in ("FOUND", "YES") and word is not None:
        ok, why = ff.check_word(machine, word, model, turns)
        if not ok:
            raise AssertionError(f"refusing to report an unverified witness: {why}")
    rec = ff.witness_record(machine, verdict, word, model, turns, reason, stats, bound)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(rec, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    if getattr(args, "json", False):
        print(json.dumps(rec, indent=2, ensure_ascii=False))
    else:
        line = verdict
        if word is not None:
            line += f": {ff.render_word(word)} (length {len(word)})"
        print(line)
        if reason:
            print(f"  {reason}")
        if bound:
            print(f"  length bound {bound['formula']} = {bound['bound']}")
    return _VERDICT_EXIT[verdict]


# ---------------------------------------------------------------------------
# verbs


def cmd_validate(args):
    mf = _load(args.file)
    if mf.kind != mf.declared:
        print(f"{args.file}: valid {mf.declared.value} (also satisfies {mf.kind.value})")
    else:
        print(f"{args.file}: valid {mf.kind.value}")
    return EXIT_YES


def cmd_simulate(args):
    m = _load(args.file).machine
    if args.start not in m.states:
        raise InputError(f"unknown state {args.start!r}")
    word = _word(m, args.word)
    if isinstance(m, Dpda):
        trace = run(m, args.start, word)
        for i, c in enumerate(trace.configs):
            print(f"{i:>3}  {c}")
        if trace.stuck:
            print(f"stuck at position {trace.stuck_at}: the bottom symbol was popped")
    elif isinstance(m, SequentialTransducer):
        state, out = run_transducer(m, args.start, word)
        print(f"state {state}, output {ff.render_word(out)}")
    elif isinstance(m, Dbca):
        state, counter = m.run(args.start, word)
        print(f"state {state}, counter {counter}")
    else:
        state = args.start
        print(f"  0  {state}")
        for i, s in enumerate(word, 1):
            state = m.transitions.get((state, s))
            if state is None:
                print(f"undefined transition on {s!r}")
                return EXIT_NO
            print(f"{i:>3}  {state}")
    return EXIT_YES


def cmd_check_word(args):
    m = _load(args.file).machine
    if args.witness:
        rec = ff.load_witness(args.witness)
        if rec.get("word") is None:
            raise InputError("witness file carries no word")
        ok = ff.verify_witness(m, rec) and rec.get("verified", False)
        print("witness reproduced" if ok else "witness does NOT reproduce")
        return EXIT_YES if ok else EXIT_NO
    if args.word is None:
        raise InputError("give --word or --witness")
    word = _word(m, args.word)
    model = _model(args, required=isinstance(m, (Dpda, Dbca)))
    ok, reason = ff.check_word(m, word, model, args.turns)
    if ok:
        return _report(args, m, "YES", word, model, args.turns)
    print(f"NO: {reason}")
    return EXIT_NO


def cmd_find_word(args):
    m = _load(args.file).machine
    max_nodes = args.max_nodes or default_max_nodes()
    if isinstance(m, SequentialTransducer):
        out = trace_sync_search_bounded(m, args.max_len, max_nodes, args.max_residual)
        return _report(args, m, out.verdict.value, out.word, reason=out.reason, stats=out.stats)
    if isinstance(m, Dbca):
        model = _model(args)
        out = dpbca_sync_bounded(m, model, args.max_len, max_nodes)
        return _report(args, m, out.verdict.value, out.word, model, reason=out.reason, stats=out.stats)
    if isinstance(m, Dpda):
        model = _model(args)
        out = sync_search_bounded(m, model, args.max_len, max_nodes, args.turns)
        return _report(args, m, out.verdict.value, out.word, model, args.turns, out.reason, out.stats)
    try:
        word = shortest_sync_word(m, max_nodes) if isinstance(m, Dfa) else careful_sync(m, max_nodes)
    except BudgetExceeded as exc:
        return _report(args, m, "EXHAUSTED", reason=str(exc))
    if word is None:
        return _report(args, m, "NO", reason="no synchronizing word exists")
    return _report(args, m, "FOUND", word)


def _refuse(message):
    print(f"refused: {message}", file=sys.stderr)
    print("  use find-word for a bounded search instead", file=sys.stderr)
    return EXIT_REFUSED


def cmd_decide(args):
    mf = _load(args.file)
    m, kind = mf.machine, mf.kind
    if isinstance(m, SequentialTransducer):
        return _refuse("trace synchronization of sequential transducers is undecidable")
    if isinstance(m, PartialDfa):
        if kind == Kind.DFA:
            if not is_synchronizable_dfa(m):
                return _report(args, m, "NO", reason="some pair of states can never be merged")
            return _report(args, m, "YES", find_sync_word_greedy(m))
        word = careful_sync(m)
        if word is None:
            return _report(args, m, "NO", reason="no careful synchronizing word exists")
        return _report(args, m, "YES", word)
    model = _model(args)
    max_nodes = args.max_nodes or default_max_nodes()
    if isinstance(m, Dbca):
        if model is StackModel.ARBITRARY:
            d = decide_dbca_arbitrary(m)
            return _report(args, m, "YES" if d.answer else "NO", d.witness, model, reason=d.reason)
        out = dpbca_sync_bounded(m, model, args.max_len, max_nodes)
        return _report(args, m, out.verdict.value, out.word, model, reason=out.reason, stats=out.stats)
    counter = kind in (Kind.DCA, Kind.DPBCA)
    if args.turns == 0:
        try:
            d = decide_0turn(m, model)
        except Refused as exc:
            return _refuse(str(exc))
        return _report(args, m, "YES" if d.answer else "NO", d.witness, model, 0, d.reason)
    if args.turns == 1:
        if not counter:
            return _refuse("1-turn synchronization of general DPDAs is undecidable in every stack model")
        out, bound = decide_1turn_dca(m, model, args.max_len, max_nodes, args.exponent)
        return _report(args, m, out.verdict.value, out.word, model, 1, out.reason, out.stats, bound.to_json())
    if args.turns is not None:
        return _refuse(f"no exact procedure is available for {args.turns}-turn synchronization")
    if kind == Kind.DPBCA:
        out = dpbca_sync_bounded(m, model, args.max_len, max_nodes)
        return _report(args, m, out.verdict.value, out.word, model, reason=out.reason, stats=out.stats)
    what = "counter automata" if counter else "DPDAs"
    return _refuse(f"synchronization of deterministic {what} is undecidable in the {model.value}-stack model")


def _pcp(args) -> PcpInstance:
    try:
        return PcpInstance(tuple(args.a), tuple(args.b))
    except (MachineError, ValueError) as exc:
        raise InputError(str(exc)) from None


def _emit(args, machine, provenance, path=None):
    text = ff.serialize_machine(machine, provenance)
    path = path or args.out
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_reduce(args):
    c = args.construction
    if c == "pcp-acceptors":
        pcp = _pcp(args)
        if not (args.out_a and args.out_b):
            raise InputError("pcp-acceptors needs --out-a and --out-b")
        ma, mb = pcp_to_1turn_acceptors(pcp)
        note = "undefined (state, input, top) triples go to qfail with the stack unchanged"
        for side, m, path in (("A", ma, args.out_a), ("B", mb, args.out_b)):
            prov = {"construction": "pcp 1-turn acceptor", "side": side, "source": pcp.to_json(), "notes": [note]}
            _emit(args, m, prov, path)
    elif c == "sync-gadget":
        if len(args.inputs) != 2:
            raise InputError("sync-gadget needs two machine files")
        m1, m2 = (_load(p).machine for p in args.inputs)
        if not (isinstance(m1, Dpda) and isinstance(m2, Dpda)):
            raise InputError("sync-gadget inputs must be pushdown or counter automata")
        prov = {"construction": "synchronization gadget", "source": list(args.inputs)}
        _emit(args, combine_sync_gadget(m1, m2), prov)
    elif c == "pcp-0turn-same":
        pcp = _pcp(args)
        _emit(args, pcp_to_0turn_same(pcp), {"construction": "pcp 0-turn same-stack machine", "source": pcp.to_json()})
    elif c == "pcp-transducer":
        pcp = _pcp(args)
        _emit(args, pcp_to_transducer(pcp), {"construction": "pcp trace-synchronization transducer", "source": pcp.to_json()})
    elif c == "dfa-subset-0turn":
        if len(args.inputs) != 1 or not args.subset:
            raise InputError("dfa-subset-0turn needs one DFA file and --subset")
        dfa = _load(args.inputs[0]).machine
        if not isinstance(dfa, Dfa):
            raise InputError("dfa-subset-0turn needs a total DFA")
        prov = {"construction": "subset synchronization to 0-turn counter automaton", "source": args.inputs[0], "subset": args.subset}
        _emit(args, dfa_subset_to_0turn_dca(dfa, args.subset), prov)
    return EXIT_YES


def cmd_oracle(args):
    if args.problem == "pcp":
        pcp = _pcp(args)
        sol = pcp_brute_solve(pcp, args.max_indices)
        if sol is None:
            print(f"EXHAUSTED: no solution with at most {args.max_indices} indices")
            return EXIT_EXHAUSTED
        print("FOUND: " + " ".join(map(str, sol)))
        print(f"  {pcp.top(sol)}")
        return EXIT_YES
    if not args.inputs:
        raise InputError("shortest-sync needs a DFA file")
    m = _load(args.inputs[0]).machine
    if not isinstance(m, Dfa):
        raise InputError("shortest-sync needs a total DFA")
    try:
        word = shortest_sync_word(m, args.max_nodes or default_max_nodes())
    except BudgetExceeded as exc:
        print(f"EXHAUSTED: {exc}")
        return EXIT_EXHAUSTED
    if word is None:
        print("NO: the automaton is not synchronizing")
        return EXIT_NO
    print(f"FOUND: {ff.render_word(word)} (length {len(word)})")
    return EXIT_YES


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pdsync", description="Synchronizing words for automata with a stack.")
    sub = p.add_subparsers(dest="command", required=True)
    models = [m.value for m in StackModel]

    s = sub.add_parser("validate", help="check a machine file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("simulate", help="run a word from one state")
    s.add_argument("file")
    s.add_argument("--from", dest="start", required=True)
    s.add_argument("--word", required=True, help="whitespace-separated symbols")
    s.set_defaults(func=cmd_simulate)

    def searchy(s, turns=True):
        s.add_argument("file")
        s.add_argument("--model", choices=models)
        if turns:
            s.add_argument("--turns", type=int, default=None)
        s.add_argument("--out", help="write a witness file")
        s.add_argument("--json", action="store_true", help="print the witness record")

    s = sub.add_parser("check-word", help="check a candidate synchronizing word")
    searchy(s)
    s.add_argument("--word")
    s.add_argument("--witness", help="witness file to re-verify")
    s.set_defaults(func=cmd_check_word)

    s = sub.add_parser("find-word", help="bounded search for a synchronizing word")
    searchy(s)
    s.add_argument("--max-len", type=int, default=32)
    s.add_argument("--max-nodes", type=int, default=None)
    s.add_argument("--max-residual", type=int, default=64)
    s.set_defaults(func=cmd_find_word)

    s = sub.add_parser("decide", help="run an exact decision procedure")
    searchy(s)
    s.add_argument("--max-len", type=int, default=64)
    s.add_argument("--max-nodes", type=int, default=None)
    s.add_argument("--exponent", type=int, default=1, help="constant in the 1-turn length bound")
    s.set_defaults(func=cmd_decide)

    s = sub.add_parser("reduce", help="build a reduction instance")
    s.add_argument(
        "construction",
        choices=["pcp-acceptors", "sync-gadget", "pcp-0turn-same", "dfa-subset-0turn", "pcp-transducer"],
    )
    s.add_argument("inputs", nargs="*", help="machine files the construction consumes")
    s.add_argument("--a", nargs="+", help="top tiles")
    s.add_argument("--b", nargs="+", help="bottom tiles")
    s.add_argument("--subset", nargs="+")
    s.add_argument("--out")
    s.add_argument("--out-a")
    s.add_argument("--out-b")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("oracle", help="brute-force reference answers")
    s.add_argument("problem", choices=["pcp", "shortest-sync"])
    s.add_argument("inputs", nargs="*")
    s.add_argument("--a", nargs="+")
    s.add_argument("--b", nargs="+")
    s.add_argument("--max-indices", type=int, default=6)
    s.add_argument("--max-nodes", type=int, default=None)
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "a", None) is not None or getattr(args, "b", None) is not None:
        if args.a is None or args.b is None:
            print("error: give both --a and --b", file=sys.stderr)
            return EXIT_INPUT
    for name in ("turns", "max_len", "max_nodes", "max_indices"):
        value = getattr(args, name, None)
        if value is not None and value < 0:
            print(f"error: --{name.replace('_', '-')} must be nonnegative", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except ff.ParseError as exc:
        print(str(exc), file=sys.stderr)
    except (InputError, MachineError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
