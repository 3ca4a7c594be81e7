"""JSON exchange format for machines and witnesses.

Machine files carry ``"format": "pdsync-machine/1"``, a kind tag, the state
and symbol declarations and one record per transition.  Parsing goes through
three layers (JSON syntax, the shipped JSON schema, and machine validation)
and every problem is reported as a :class:`Diagnostic` with the offending
field and, where known, its line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional

import jsonschema

from pdsync.automata import (
    Dbca,
    Dca,
    Dfa,
    Dpbca,
    Dpda,
    Kind,
    MachineError,
    PartialDfa,
    SequentialTransducer,
    StackModel,
    ValidationError,
    as_word,
    count_strokes,
    run,
    validate,
)
from pdsync.blind import check_dbca_sync_word
from pdsync.pdasync import Counterexample, check_n_turn_sync_word, check_sync_word
from pdsync.transducers import check_trace_sync, run_transducer

MACHINE_FORMAT = "pdsync-machine/1"
WITNESS_FORMAT = "pdsync-witness/1"


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict:
    text = resources.files("pdsync").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class Diagnostic:
    message: str
    path: str = ""
    line: Optional[int] = None
    column: Optional[int] = None

    def render(self, source: str = "<input>") -> str:
        where = source
        if self.line is not None:
            where += f":{self.line}"
            if self.column is not None:
                where += f":{self.column}"
        if self.path:
            where += f": {self.path}"
        return f"{where}: {self.message}"


class ParseError(MachineError):
    def __init__(self, diagnostics: List[Diagnostic], source: str = "<input>"):
        self.diagnostics = list(diagnostics)
        self.source = source
        super().__init__("\n".join(d.render(source) for d in self.diagnostics))


@dataclass
class MachineFile:
    machine: object
    kind: Kind
    declared: Kind
    provenance: Optional[Dict] = None


def _positions(text: str) -> Dict[str, int]:
    """Offsets of top-level values and of each ``transitions`` record."""
    dec = json.JSONDecoder()
    out: Dict[str, int] = {}

    def skip(pos, chars=" \t\r\n"):
        while pos < len(text) and text[pos] in chars:
            pos += 1
        return pos

    try:
        pos = skip(0)
        if text[pos] != "{":
            return out
        pos = skip(pos + 1)
        while text[pos] != "}":
            key, pos = dec.raw_decode(text, pos)
            pos = skip(skip(pos) + 1)
            out[key] = pos
            if key == "transitions" and text[pos] == "[":
                i, p = 0, skip(pos + 1)
                while text[p] != "]":
                    out[f"transitions[{i}]"] = p
                    _, p = dec.raw_decode(text, p)
                    p = skip(p, " \t\r\n,")
                    i += 1
            _, pos = dec.raw_decode(text, pos)
            pos = skip(pos, " \t\r\n,")
    except (ValueError, IndexError):
        pass
    return out


def _line(text: str, offset: Optional[int]) -> Optional[int]:
    return None if offset is None else text.count("\n", 0, offset) + 1


def _json_path(path) -> str:
    out = ""
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out


def _record_key(kind: Kind, rec: Dict):
    if kind in (Kind.DPDA, Kind.DCA, Kind.DPBCA):
        return (rec["from"], rec["input"], rec["top"])
    return (rec["from"], rec["input"])


def _build(doc: Dict, kind: Kind):
    records = doc["transitions"]
    common = dict(initial=doc.get("initial"), finals=tuple(doc.get("finals", ())))
    delta, dups = {}, []
    for i, rec in enumerate(records):
        key = _record_key(kind, rec)
        if key in delta:
            dups.append(Diagnostic(f"duplicate transition for ({', '.join(key)})", f"transitions[{i}]"))
        if kind in (Kind.DPDA, Kind.DCA, Kind.DPBCA):
            delta[key] = (rec["to"], tuple(rec["push"]))
        elif kind == Kind.DBCA:
            delta[key] = (rec["to"], rec["delta"])
        elif kind == Kind.TRANSDUCER:
            delta[key] = (rec["to"], tuple(rec["output"]))
        else:
            delta[key] = rec["to"]
    states, sigma = doc["states"], doc["alphabet"]
    if kind in (Kind.DPDA, Kind.DCA, Kind.DPBCA):
        cls = {Kind.DPDA: Dpda, Kind.DCA: Dca, Kind.DPBCA: Dpbca}[kind]
        machine = cls(states, sigma, doc["stack_alphabet"], delta, **common)
    elif kind == Kind.DBCA:
        machine = Dbca(states, sigma, delta, **common)
    elif kind == Kind.TRANSDUCER:
        machine = SequentialTransducer(states, sigma, doc["output_alphabet"], delta, **common)
    else:
        machine = (Dfa if kind == Kind.DFA else PartialDfa)(states, sigma, delta, **common)
    return machine, dups


def parse_machine(data, source: str = "<input>") -> MachineFile:
    """Parse and certify a machine document; raises :class:`ParseError`."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError([Diagnostic(f"not valid UTF-8: {exc.reason}")], source) from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError([Diagnostic(f"JSON syntax error: {exc.msg}", line=exc.lineno, column=exc.colno)], source) from None
    pos = _positions(data)

    def located(message, path):
        top = path.split(".")[0]
        rec = path.split("]")[0] + "]" if path.startswith("transitions[") else None
        offset = pos.get(rec) if rec else pos.get(top)
        return Diagnostic(message, path, _line(data, offset))

    validator = jsonschema.Draft202012Validator(load_schema("machine"))
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        raise ParseError([located(e.message, _json_path(e.absolute_path)) for e in errors], source)
    declared = Kind(doc["kind"])
    machine, dups = _build(doc, declared)
    if dups:
        raise ParseError([located(d.message, d.path) for d in dups], source)
    try:
        cert = validate(machine, declared)
    except ValidationError as exc:
        index = {}
        for i, r in enumerate(doc["transitions"]):
            index.setdefault("(" + ", ".join(_record_key(declared, r)) + ")", i)
            index.setdefault(f"({r['from']}, {r['input']})", i)
        diags = []
        for v in exc.violations:
            hit = next((i for k, i in index.items() if k in v), None)
            diags.append(located(v, f"transitions[{hit}]" if hit is not None else ""))
        raise ParseError(diags, source) from None
    return MachineFile(machine, cert.kind, declared, doc.get("provenance"))


def load_machine(path) -> MachineFile:
    with open(path, "rb") as fh:
        return parse_machine(fh.read(), str(path))


def machine_kind(machine) -> Kind:
    for cls, kind in (
        (Dpbca, Kind.DPBCA),
        (Dca, Kind.DCA),
        (Dpda, Kind.DPDA),
        (Dbca, Kind.DBCA),
        (SequentialTransducer, Kind.TRANSDUCER),
        (Dfa, Kind.DFA),
        (PartialDfa, Kind.PARTIAL_DFA),
    ):
        if isinstance(machine, cls):
            return kind
    raise MachineError(f"cannot serialize {type(machine).__name__}")


def machine_to_dict(machine, provenance: Optional[Dict] = None) -> Dict:
    """Canonical document: declarations as given, transitions in declaration order."""
    kind = machine_kind(machine)
    doc = {"format": MACHINE_FORMAT, "kind": kind.value, "states": list(machine.states), "alphabet": list(machine.alphabet)}
    records = []
    if isinstance(machine, Dpda):
        doc["stack_alphabet"] = list(machine.stack_alphabet)
        for q in machine.states:
            for s in machine.input_alphabet:
                for g in machine.stack_alphabet:
                    hit = machine.transitions.get((q, s, g))
                    if hit is not None:
                        records.append({"from": q, "input": s, "top": g, "to": hit[0], "push": list(hit[1])})
    else:
        if isinstance(machine, SequentialTransducer):
            doc["output_alphabet"] = list(machine.output_alphabet)
        for q in machine.states:
            for s in machine.alphabet:
                hit = machine.transitions.get((q, s))
                if hit is None:
                    continue
                if isinstance(machine, Dbca):
                    records.append({"from": q, "input": s, "to": hit[0], "delta": hit[1]})
                elif isinstance(machine, SequentialTransducer):
                    records.append({"from": q, "input": s, "to": hit[0], "output": list(hit[1])})
                else:
                    records.append({"from": q, "input": s, "to": hit})
    if machine.initial is not None:
        doc["initial"] = machine.initial
    if machine.finals:
        doc["finals"] = list(machine.finals)
    doc["transitions"] = records
    if provenance:
        doc["provenance"] = provenance
    return doc


def dumps_document(doc: Dict) -> str:
    """Two-space indented JSON with one transition record per line."""
    lines = ["{"]
    items = list(doc.items())
    for n, (key, value) in enumerate(items):
        comma = "," if n < len(items) - 1 else ""
        if key == "transitions" and value:
            lines.append('  "transitions": [')
            for i, rec in enumerate(value):
                sep = "," if i < len(value) - 1 else ""
                lines.append("    " + json.dumps(rec, ensure_ascii=False) + sep)
            lines.append("  ]" + comma)
        elif isinstance(value, dict):
            body = json.dumps(value, indent=2, ensure_ascii=False).replace("\n", "\n  ")
            lines.append(f"  {json.dumps(key)}: {body}{comma}")
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value, ensure_ascii=False)}{comma}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize_machine(machine, provenance: Optional[Dict] = None) -> str:
    return dumps_document(machine_to_dict(machine, provenance))


def canonical(text) -> str:
    mf = parse_machine(text)
    return serialize_machine(mf.machine, mf.provenance)


# ---------------------------------------------------------------------------
# witnesses


def render_word(word) -> str:
    return " ".join(word) if word else "ε"


def parse_word(text: str):
    text = text.strip()
    return () if text in ("", "ε", "eps") else as_word(text)


def _runs(machine, word) -> List[Dict]:
    out = []
    for q in machine.states:
        if isinstance(machine, Dpda):
            trace = run(machine, q, word)
            rec = {"start": q, "state": trace.final.state, "stack": list(trace.final.stack)}
            if not trace.stuck:
                rec["turns"] = count_strokes(trace.heights()) - 1
        elif isinstance(machine, Dbca):
            state, counter = machine.run(q, word)
            rec = {"start": q, "state": state, "counter": counter}
        elif isinstance(machine, SequentialTransducer):
            state, outw = run_transducer(machine, q, word)
            rec = {"start": q, "state": state, "output": list(outw)}
        else:
            img = machine.image([q], word)
            if img is None:
                continue
            rec = {"start": q, "state": next(iter(img))}
        out.append(rec)
    return out


def check_word(machine, word, model=None, turns: Optional[int] = None):
    """Uniform checker across kinds: ``(ok, reason)``."""
    word = as_word(word)
    if isinstance(machine, Dpda):
        model = StackModel(model or StackModel.ARBITRARY)
        res = check_sync_word(machine, word, model)
        if isinstance(res, Counterexample):
            return False, res.reason
        if turns is not None:
            ok, per = check_n_turn_sync_word(machine, word, turns, model)
            if not ok:
                worst = max(per, key=per.get)
                return False, f"run from {worst} makes {per[worst]} turns (bound {turns})"
        return True, ""
    if isinstance(machine, Dbca):
        res = check_dbca_sync_word(machine, word, model or StackModel.ARBITRARY)
        if isinstance(res, Counterexample):
            return False, res.reason
        return True, ""
    if isinstance(machine, SequentialTransducer):
        res = check_trace_sync(machine, word)
        return res.ok, res.reason
    img = machine.image(machine.states, word)
    if img is None:
        return False, "the word uses an undefined transition"
    if len(img) != 1:
        return False, f"word leaves {len(img)} states: {', '.join(sorted(img))}"
    return True, ""


def witness_record(
    machine,
    verdict: str,
    word=None,
    model=None,
    turn_bound: Optional[int] = None,
    reason: str = "",
    stats: Optional[Dict] = None,
    bound_report: Optional[Dict] = None,
) -> Dict:
    rec = {
        "format": WITNESS_FORMAT,
        "verdict": verdict,
        "kind": machine_kind(machine).value,
        "model": None if model is None else StackModel(model).value,
        "turn_bound": turn_bound,
        "word": None if word is None else list(word),
    }
    if word is not None:
        rec["verified"] = check_word(machine, word, model, turn_bound)[0]
        rec["runs"] = _runs(machine, tuple(word))
    if reason:
        rec["reason"] = reason
    if bound_report:
        rec["bound_report"] = bound_report
    if stats:
        rec["stats"] = json.loads(json.dumps(stats, default=list))
    return rec


def validate_witness(rec: Dict) -> None:
    errors = list(jsonschema.Draft202012Validator(load_schema("witness")).iter_errors(rec))
    if errors:
        raise ParseError([Diagnostic(e.message, _json_path(e.absolute_path)) for e in errors], "<witness>")


def load_witness(path) -> Dict:
    with open(path, "rb") as fh:
        text = fh.read().decode("utf-8")
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError([Diagnostic(f"JSON syntax error: {exc.msg}", line=exc.lineno, column=exc.colno)], str(path)) from None
    validate_witness(rec)
    return rec


def verify_witness(machine, rec: Dict) -> bool:
    """Re-run the checker; the recorded verdict and runs must be reproduced."""
    if rec.get("word") is None:
        return False
    ok, _ = check_word(machine, rec["word"], rec.get("model"), rec.get("turn_bound"))
    return ok == rec.get("verified", False) and _runs(machine, tuple(rec["word"])) == rec.get("runs")

