"""Machine models, configuration semantics, run traces and stroke accounting.

Stacks are tuples of stack symbols with the deepest symbol first, so the top
of the stack is ``stack[-1]``.  The reserved bottom symbol is :data:`BOTTOM`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple

BOTTOM = "bot"

State = str
Symbol = str
Word = Tuple[Symbol, ...]
Stack = Tuple[Symbol, ...]


class MachineError(ValueError):
    """Raised when a machine or configuration is malformed."""


class ValidationError(MachineError):
    """A machine violates the invariants of the kind it was claimed to be.

    ``violations`` lists every problem found; ``strongest_kind`` is the most
    specific kind the machine does satisfy (or ``None``).
    """

    def __init__(self, violations, strongest_kind=None):
        self.violations = list(violations)
        self.strongest_kind = strongest_kind
        super().__init__("; ".join(self.violations) or "invalid machine")


class Kind(str, enum.Enum):
    DFA = "dfa"
    PARTIAL_DFA = "partial-dfa"
    DPDA = "dpda"
    DCA = "dca"
    DPBCA = "dpbca"
    DBCA = "dbca"
    TRANSDUCER = "transducer"


class StackModel(str, enum.Enum):
    EMPTY = "empty"
    SAME = "same"
    ARBITRARY = "arbitrary"


class _Stuck:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "STUCK"

    def __bool__(self):
        return False


#: Outcome of stepping a configuration whose bottom symbol was popped.
STUCK = _Stuck()


def as_word(word) -> Word:
    """Normalise a word given as a tuple/list of symbols or a whitespace-separated string."""
    if isinstance(word, str):
        return tuple(word.split())
    return tuple(word)


def render_stack(stack: Stack) -> str:
    return "".join("⊥" if s == BOTTOM else s for s in stack) or "ε"


# ---------------------------------------------------------------------------
# finite automata


@dataclass(frozen=True, eq=False)
class PartialDfa:
    """Deterministic finite automaton whose transition map may be partial."""

    states: Tuple[State, ...]
    alphabet: Tuple[Symbol, ...]
    transitions: Mapping[Tuple[State, Symbol], State]
    initial: Optional[State] = None
    finals: Tuple[State, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions", dict(self.transitions))
        object.__setattr__(self, "finals", tuple(self.finals))

    def delta(self, state: State, symbol: Symbol) -> Optional[State]:
        return self.transitions.get((state, symbol))

    def image(self, subset: Iterable[State], word) -> Optional[frozenset]:
        """Image of a set of states under ``word``; ``None`` if some transition is undefined."""
        current = frozenset(subset)
        for symbol in as_word(word):
            nxt = set()
            for q in current:
                t = self.transitions.get((q, symbol))
                if t is None:
                    return None
                nxt.add(t)
            current = frozenset(nxt)
        return current

    def is_total(self) -> bool:
        return all((q, s) in self.transitions for q in self.states for s in self.alphabet)

    def table(self) -> List[List[int]]:
        """Transition table ``table[letter][state] -> state index`` (-1 when undefined)."""
        index = {q: i for i, q in enumerate(self.states)}
        return [
            [index[self.transitions[(q, s)]] if (q, s) in self.transitions else -1 for q in self.states]
            for s in self.alphabet
        ]


@dataclass(frozen=True, eq=False)
class Dfa(PartialDfa):
    """Total deterministic finite automaton."""


# ---------------------------------------------------------------------------
# pushdown automata


@dataclass(frozen=True)
class Configuration:
    state: State
    stack: Stack

    @property
    def height(self) -> int:
        return len(self.stack)

    def __str__(self):
        return f"({self.state}, {render_stack(self.stack)})"


@dataclass(frozen=True, eq=False)
class Dpda:
    """Real-time deterministic pushdown automaton.

    ``transitions`` maps ``(state, input, top)`` to ``(target, push)`` where
    ``push`` replaces the top symbol.
    """

    states: Tuple[State, ...]
    input_alphabet: Tuple[Symbol, ...]
    stack_alphabet: Tuple[Symbol, ...]
    transitions: Mapping[Tuple[State, Symbol, Symbol], Tuple[State, Stack]]
    initial: Optional[State] = None
    finals: Tuple[State, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "input_alphabet", tuple(self.input_alphabet))
        object.__setattr__(self, "stack_alphabet", tuple(self.stack_alphabet))
        object.__setattr__(
            self,
            "transitions",
            {k: (t, tuple(p)) for k, (t, p) in dict(self.transitions).items()},
        )
        object.__setattr__(self, "finals", tuple(self.finals))

    @property
    def alphabet(self) -> Tuple[Symbol, ...]:
        return self.input_alphabet

    def initial_config(self, state: State) -> Configuration:
        return Configuration(state, (BOTTOM,))

    def step(self, config: Configuration, symbol: Symbol):
        """One move on ``symbol``; returns :data:`STUCK` if the bottom was already popped."""
        if not config.stack:
            return STUCK
        top = config.stack[-1]
        try:
            target, push = self.transitions[(config.state, symbol, top)]
        except KeyError:
            raise MachineError(f"no transition for ({config.state}, {symbol}, {top})") from None
        return Configuration(target, config.stack[:-1] + push)

    def accepts(self, word) -> bool:
        if self.initial is None:
            raise MachineError("machine has no initial state")
        trace = run(self, self.initial, word)
        return trace.stuck_at is None and trace.final.state in self.finals


class Dca(Dpda):
    """A DPDA with exactly one non-bottom stack symbol."""


class Dpbca(Dca):
    """A partially blind deterministic counter automaton."""


def counter_symbol(machine: Dpda) -> Symbol:
    others = [g for g in machine.stack_alphabet if g != BOTTOM]
    if len(others) != 1:
        raise MachineError(f"not a counter automaton: stack alphabet {machine.stack_alphabet}")
    return others[0]


@dataclass(frozen=True, eq=False)
class Dbca:
    """Deterministic blind counter automaton over an integer counter."""

    states: Tuple[State, ...]
    alphabet: Tuple[Symbol, ...]
    transitions: Mapping[Tuple[State, Symbol], Tuple[State, int]]
    initial: Optional[State] = None
    finals: Tuple[State, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "transitions", dict(self.transitions))
        object.__setattr__(self, "finals", tuple(self.finals))

    def underlying_dfa(self) -> Dfa:
        return Dfa(self.states, self.alphabet, {k: t for k, (t, _) in self.transitions.items()})

    def run(self, state: State, word) -> Tuple[State, int]:
        counter = 0
        for symbol in as_word(word):
            state, d = self.transitions[(state, symbol)]
            counter += d
        return state, counter


@dataclass(frozen=True, eq=False)
class SequentialTransducer:
    """Deterministic letter-to-word transducer with a total transition map."""

    states: Tuple[State, ...]
    alphabet: Tuple[Symbol, ...]
    output_alphabet: Tuple[Symbol, ...]
    transitions: Mapping[Tuple[State, Symbol], Tuple[State, Word]]
    initial: Optional[State] = None
    finals: Tuple[State, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "output_alphabet", tuple(self.output_alphabet))
        object.__setattr__(
            self, "transitions", {k: (t, tuple(o)) for k, (t, o) in dict(self.transitions).items()}
        )
        object.__setattr__(self, "finals", tuple(self.finals))

    def underlying_dfa(self) -> Dfa:
        return Dfa(self.states, self.alphabet, {k: t for k, (t, _) in self.transitions.items()})


# ---------------------------------------------------------------------------
# runs


@dataclass(frozen=True)
class RunTrace:
    start: State
    word: Word
    configs: Tuple[Configuration, ...]
    stuck_at: Optional[int] = None

    @property
    def final(self) -> Configuration:
        return self.configs[-1]

    @property
    def stuck(self) -> bool:
        return self.stuck_at is not None

    def heights(self) -> List[int]:
        return [c.height for c in self.configs]


def step(machine: Dpda, config: Configuration, symbol: Symbol):
    return machine.step(config, symbol)


def run(machine: Dpda, start: State, word) -> RunTrace:
    """Simulate ``word`` from ``(start, ⊥)``; the trace stops at the first stuck move."""
    word = as_word(word)
    config = machine.initial_config(start)
    configs = [config]
    for i, symbol in enumerate(word):
        nxt = machine.step(config, symbol)
        if nxt is STUCK:
            return RunTrace(start, word, tuple(configs), stuck_at=i)
        config = nxt
        configs.append(config)
    return RunTrace(start, word, tuple(configs))


def count_strokes(heights: Sequence[int]) -> int:
    """Minimal number of monotone strokes covering a height sequence."""
    strokes, direction = 1, 0
    for prev, cur in zip(heights, heights[1:]):
        sign = (cur > prev) - (cur < prev)
        if sign == 0:
            continue
        if direction == 0:
            direction = sign
        elif sign != direction:
            strokes += 1
            direction = sign
    return strokes


def stroke_decomposition(trace: RunTrace) -> Tuple[int, int]:
    """``(strokes, turns)`` of a non-stuck trace."""
    if trace.stuck:
        raise MachineError("stroke decomposition of a stuck run")
    strokes = count_strokes(trace.heights())
    return strokes, strokes - 1


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Certified:
    machine: object
    kind: Kind


def _check_dfa_like(m, total: bool) -> List[str]:
    errs = []
    states, alphabet = set(m.states), set(m.alphabet)
    if len(states) != len(m.states):
        errs.append("duplicate state names")
    if len(alphabet) != len(m.alphabet):
        errs.append("duplicate input symbols")
    if not m.states:
        errs.append("no states declared")
    for (q, s), target in m.transitions.items():
        t = target[0] if isinstance(target, tuple) else target
        if q not in states:
            errs.append(f"transition ({q}, {s}): undeclared state {q!r}")
        if s not in alphabet:
            errs.append(f"transition ({q}, {s}): undeclared symbol {s!r}")
        if t not in states:
            errs.append(f"transition ({q}, {s}): undeclared target state {t!r}")
    if total:
        for q in m.states:
            for s in m.alphabet:
                if (q, s) not in m.transitions:
                    errs.append(f"transition undefined for ({q}, {s})")
    errs.extend(_check_initial_finals(m, states))
    return errs


def _check_initial_finals(m, states) -> List[str]:
    errs = []
    if m.initial is not None and m.initial not in states:
        errs.append(f"undeclared initial state {m.initial!r}")
    for f in m.finals:
        if f not in states:
            errs.append(f"undeclared final state {f!r}")
    return errs


def _check_dpda(m: Dpda) -> List[str]:
    errs = []
    states, sigma, gamma = set(m.states), set(m.input_alphabet), set(m.stack_alphabet)
    if not m.states:
        errs.append("no states declared")
    if BOTTOM not in gamma:
        errs.append(f"stack alphabet lacks the bottom symbol {BOTTOM!r}")
    for (q, s, g), (t, push) in m.transitions.items():
        where = f"transition ({q}, {s}, {g})"
        if q not in states:
            errs.append(f"{where}: undeclared state {q!r}")
        if t not in states:
            errs.append(f"{where}: undeclared target state {t!r}")
        if s not in sigma:
            errs.append(f"{where}: undeclared input symbol {s!r}")
        if g not in gamma:
            errs.append(f"{where}: undeclared stack symbol {g!r}")
        for x in push:
            if x not in gamma:
                errs.append(f"{where}: undeclared pushed symbol {x!r}")
        if BOTTOM in push:
            if push.index(BOTTOM) != 0 or push.count(BOTTOM) != 1 or g != BOTTOM:
                errs.append(f"{where}: bottom not prefix / read symbol not bottom")
        elif g == BOTTOM and push:
            errs.append(f"{where}: bottom replaced by a non-bottom symbol")
    for q in m.states:
        for s in m.input_alphabet:
            for g in m.stack_alphabet:
                if (q, s, g) not in m.transitions:
                    errs.append(f"transition undefined for ({q}, {s}, {g})")
    errs.extend(_check_initial_finals(m, states))
    return errs


def blindness_violations(m: Dpda) -> List[str]:
    """Transitions of a counter automaton that inspect the counter for zero."""
    c = counter_symbol(m)
    errs = []
    for q in m.states:
        for s in m.input_alphabet:
            on_c = m.transitions.get((q, s, c))
            on_b = m.transitions.get((q, s, BOTTOM))
            if on_c is None or on_b is None:
                continue
            (tc, pc), (tb, pb) = on_c, on_b
            if tc != tb:
                errs.append(f"blindness violated at ({q}, {s}): targets {tc} / {tb} differ")
            elif pc == () and pb == ():
                continue
            elif pc[:1] == (c,) and pb[:1] == (BOTTOM,) and pc[1:] == pb[1:]:
                continue
            else:
                errs.append(
                    f"blindness violated at ({q}, {s}): pushes {render_stack(pc)} / {render_stack(pb)} differ"
                )
    return errs


def classify(machine) -> Tuple[Optional[Kind], List[str]]:
    """Strongest kind ``machine`` satisfies, plus violations of its base kind."""
    if isinstance(machine, SequentialTransducer):
        errs = _check_dfa_like(machine, total=True)
        outs = set(machine.output_alphabet)
        for (q, s), (_, out) in machine.transitions.items():
            for x in out:
                if x not in outs:
                    errs.append(f"transition ({q}, {s}): undeclared output symbol {x!r}")
        return (None if errs else Kind.TRANSDUCER), errs
    if isinstance(machine, Dbca):
        errs = _check_dfa_like(machine, total=True)
        for (q, s), (_, d) in machine.transitions.items():
            if d not in (-1, 0, 1):
                errs.append(f"transition ({q}, {s}): counter delta {d} not in {{-1, 0, 1}}")
        return (None if errs else Kind.DBCA), errs
    if isinstance(machine, PartialDfa):
        partial = _check_dfa_like(machine, total=False)
        if partial:
            return None, partial
        total = _check_dfa_like(machine, total=True)
        return (Kind.PARTIAL_DFA if total else Kind.DFA), total
    if isinstance(machine, Dpda):
        errs = _check_dpda(machine)
        if errs:
            return None, errs
        if len([g for g in machine.stack_alphabet if g != BOTTOM]) != 1:
            return Kind.DPDA, []
        if blindness_violations(machine):
            return Kind.DCA, []
        return Kind.DPBCA, []
    raise MachineError(f"unknown machine type {type(machine).__name__}")


_REFINES = {
    Kind.DFA: {Kind.DFA},
    Kind.PARTIAL_DFA: {Kind.DFA, Kind.PARTIAL_DFA},
    Kind.DPDA: {Kind.DPDA, Kind.DCA, Kind.DPBCA},
    Kind.DCA: {Kind.DCA, Kind.DPBCA},
    Kind.DPBCA: {Kind.DPBCA},
    Kind.DBCA: {Kind.DBCA},
    Kind.TRANSDUCER: {Kind.TRANSDUCER},
}


def validate(machine, claimed: Optional[Kind] = None) -> Certified:
    """Certify ``machine`` with the strongest kind it satisfies.

    Raises :class:`ValidationError` listing every violated invariant when the
    machine is malformed or does not meet ``claimed``.
    """
    kind, errs = classify(machine)
    if claimed is not None:
        claimed = Kind(claimed)
        if kind is None or kind not in _REFINES[claimed]:
            if claimed == Kind.DPBCA and isinstance(machine, Dpda) and not errs:
                try:
                    errs = errs + blindness_violations(machine)
                except MachineError as exc:
                    errs = errs + [str(exc)]
            elif claimed in (Kind.DCA, Kind.DPBCA) and kind == Kind.DPDA:
                errs = errs + ["stack alphabet must have exactly one non-bottom symbol"]
            elif not errs:
                errs = [f"machine is a {kind.value if kind else 'invalid machine'}, not a {claimed.value}"]
            raise ValidationError(errs, kind)
    elif kind is None:
        raise ValidationError(errs, None)
    return Certified(machine, kind)


def kind_class(kind: Kind):
    return {
        Kind.DFA: Dfa,
        Kind.PARTIAL_DFA: PartialDfa,
        Kind.DPDA: Dpda,
        Kind.DCA: Dca,
        Kind.DPBCA: Dpbca,
        Kind.DBCA: Dbca,
        Kind.TRANSDUCER: SequentialTransducer,
    }[kind]


def integer_counter_run(machine: Dpda, start: State, word) -> Optional[Tuple[State, int]]:
    """Run a partially blind counter automaton with an integer counter.

    Returns ``None`` when the counter would go below zero.  Independent of
    :func:`run`; used to cross-check stack semantics.
    """
    c = counter_symbol(machine)
    state, counter = start, 0
    for symbol in as_word(word):
        target, push = machine.transitions[(state, symbol, c)]
        delta = len(push) - 1
        if counter + delta < 0:
            return None
        state, counter = target, counter + delta
    return state, counter


class BudgetExceeded(RuntimeError):
    """An exact search stopped at its configured node cap."""

    def __init__(self, message, nodes=0):
        super().__init__(message)
        self.nodes = nodes


class Refused(MachineError):
    """A decision was requested for a combination with no exact procedure."""
