"""Exact procedures for finite-turn synchronization.

0-turn DPDAs reduce to careful synchronization of partial DFAs.  For 1-turn
DCAs each start state ``q`` gets a staged copy ``M_q`` that simulates the
machine on spread-out words and only accepts runs with at most one turn that
end on an empty counter; the product of all ``M_q`` is a 1-turn multi-counter
machine whose accepted words encode synchronizing words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Optional, Tuple

from pdsync.automata import (
    BOTTOM,
    Dca,
    Dpda,
    MachineError,
    PartialDfa,
    Refused,
    StackModel,
    as_word,
    counter_symbol,
)
from pdsync.counters import MultiCounterMachine, mcm_bounded_emptiness
from pdsync.dfasync import careful_sync, sync_from_into_any
from pdsync.pdasync import SearchOutcome, SyncWitness, Verdict, check_n_turn_sync_word, check_sync_word


@dataclass(frozen=True)
class Decision:
    """Exact answer of a decision procedure; ``witness`` is set for YES."""

    answer: bool
    witness: Optional[Tuple[str, ...]] = None
    reason: str = ""


def restrict_to_bottom(machine: Dpda) -> PartialDfa:
    """Keep exactly the moves ``δ(q, σ, ⊥) = (q', ⊥)``."""
    delta = {}
    for q in machine.states:
        for s in machine.input_alphabet:
            hit = machine.transitions.get((q, s, BOTTOM))
            if hit is not None and hit[1] == (BOTTOM,):
                delta[(q, s)] = hit[0]
    return PartialDfa(machine.states, machine.input_alphabet, delta)


def top_symbol_dfa(machine: Dpda) -> PartialDfa:
    """Partial DFA on ``Q × Γ`` remembering only the top stack symbol; pops are undefined."""
    states = tuple((q, g) for q in machine.states for g in machine.stack_alphabet)
    delta = {}
    for (q, s, g), (t, push) in machine.transitions.items():
        if push:
            delta[((q, g), s)] = (t, push[-1])
    return PartialDfa(states, machine.input_alphabet, delta)


def decide_0turn(machine: Dpda, model) -> Decision:
    """Decide 0-turn synchronizability in the EMPTY or ARBITRARY model."""
    model = StackModel(model)
    if model is StackModel.SAME:
        if isinstance(machine, Dca):
            raise Refused(
                "0-turn synchronization of counter automata in the same-stack model has no "
                "implemented exact procedure; use bounded search (find-word --turns 0)"
            )
        raise Refused("0-turn synchronization of DPDAs in the same-stack model is undecidable")
    if model is StackModel.EMPTY:
        word = careful_sync(restrict_to_bottom(machine))
    else:
        pdfa = top_symbol_dfa(machine)
        start = [(q, BOTTOM) for q in machine.states]
        targets = [[(q, g) for g in machine.stack_alphabet] for q in machine.states]
        word = sync_from_into_any(pdfa, start, targets)
    if word is None:
        return Decision(False, reason="no 0-turn synchronizing word exists")
    ok, _ = check_n_turn_sync_word(machine, word, 0, model)
    if not ok:
        raise AssertionError(f"0-turn witness {word} failed verification")
    return Decision(True, word)


# ---------------------------------------------------------------------------
# staged machines for 1-turn counter automata


class StagedState(NamedTuple):
    base: str
    stage: int
    parity: int

    def __str__(self):
        return f"({self.base},{self.stage},{self.parity})"


def staged_transitions(dca: Dca) -> Dict:
    """Transition table shared by every ``M_q``: ``(staged, σ, top) -> (staged', push)``."""
    c = counter_symbol(dca)
    table = {}
    for (p, a, top), (t, push) in dca.transitions.items():
        ups = len(push) - 1
        if top == BOTTOM:
            if push == (BOTTOM,):
                table[(StagedState(p, 1, 0), a, BOTTOM)] = (StagedState(t, 1, 1), push)
                table[(StagedState(p, 4, 0), a, BOTTOM)] = (StagedState(t, 4, 1), push)
            elif ups > 0:
                table[(StagedState(p, 1, 0), a, BOTTOM)] = (StagedState(t, 2, 1), push)
        else:
            if ups >= 0:
                # the appendix writes (p,1,0) here; a counter above zero means stage two
                table[(StagedState(p, 2, 0), a, c)] = (StagedState(t, 2, 1), push)
            if ups == -1:
                table[(StagedState(p, 2, 0), a, c)] = (StagedState(t, 3, 1), push)
            if ups in (-1, 0):
                table[(StagedState(p, 3, 0), a, c)] = (StagedState(t, 3, 1), push)
    for r in dca.states:
        for b in dca.input_alphabet:
            table[(StagedState(r, 1, 1), b, BOTTOM)] = (StagedState(r, 1, 0), (BOTTOM,))
            table[(StagedState(r, 2, 1), b, c)] = (StagedState(r, 2, 0), (c,))
            table[(StagedState(r, 3, 1), b, c)] = (StagedState(r, 3, 0), (c,))
            table[(StagedState(r, 3, 1), b, BOTTOM)] = (StagedState(r, 4, 0), (BOTTOM,))
            table[(StagedState(r, 4, 1), b, BOTTOM)] = (StagedState(r, 4, 0), (BOTTOM,))
    return table


class StagedMachine:
    """``M_q``: deterministic partial 1-turn counter automaton on staged states.

    Undefined moves reject.  Counter values are kept as integers.
    """

    def __init__(self, dca: Dca, start, table=None):
        self.dca = dca
        self.counter = counter_symbol(dca)
        self.transitions = staged_transitions(dca) if table is None else table
        self.initial = StagedState(start, 1, 0)
        self.alphabet = dca.input_alphabet

    @property
    def states(self):
        return tuple(StagedState(q, i, b) for q in self.dca.states for i in (1, 2, 3, 4) for b in (0, 1))

    @staticmethod
    def is_final(state: StagedState) -> bool:
        return state.stage in (1, 4) and state.parity == 0

    def step(self, state, count: int, symbol):
        top = self.counter if count > 0 else BOTTOM
        hit = self.transitions.get((state, symbol, top))
        if hit is None:
            return None
        target, push = hit
        return target, count + len(push) - 1

    def run(self, word):
        """List of ``(state, counter)`` after each prefix, or ``None`` if rejected."""
        config = (self.initial, 0)
        out = [config]
        for symbol in as_word(word):
            config = self.step(*config, symbol)
            if config is None:
                return None
            out.append(config)
        return out

    def accepts(self, word) -> bool:
        trace = self.run(word)
        return trace is not None and self.is_final(trace[-1][0]) and trace[-1][1] == 0


def build_mq(dca: Dca, q) -> StagedMachine:
    if q not in dca.states:
        raise MachineError(f"unknown state {q!r}")
    return StagedMachine(dca, q)


def spread_out(word, alphabet) -> Tuple[str, ...]:
    """Insert the first alphabet symbol after every letter."""
    if not alphabet:
        raise MachineError("spread-out needs a nonempty alphabet")
    pad = alphabet[0]
    out = []
    for a in as_word(word):
        out += [a, pad]
    return tuple(out)


SYNC_DEC = "sync:dec"
SYNC_FINAL = "sync:final"


def build_1turn_product(dca: Dca, model) -> MultiCounterMachine:
    """Product of the staged machines of all start states, one counter each."""
    model = StackModel(model)
    c = counter_symbol(dca)
    table = staged_transitions(dca)
    n = len(dca.states)
    sigma_sync = dca.input_alphabet[0]
    zeros = (0,) * n

    def diagonal(state) -> bool:
        return (
            isinstance(state, tuple)
            and len({s.base for s in state}) == 1
            and all(s.parity == 0 for s in state)
        )

    def base_moves(state, symbol, counters):
        targets, deltas = [], []
        for s, k in zip(state, counters):
            hit = table.get((s, symbol, c if k > 0 else BOTTOM))
            if hit is None:
                return []
            targets.append(hit[0])
            deltas.append(len(hit[1]) - 1)
        return [(tuple(targets), tuple(deltas))]

    if model is StackModel.SAME:

        def moves(state, symbol, counters):
            if state == SYNC_DEC:
                if symbol != sigma_sync:
                    return []
                out = [(SYNC_DEC, (-1,) * n)]
                if not any(counters):
                    out.append((SYNC_FINAL, zeros))
                return out
            if state == SYNC_FINAL:
                return []
            out = base_moves(state, symbol, counters)
            if symbol == sigma_sync and diagonal(state):
                out.append((SYNC_DEC, zeros))
            return out

        def is_final(state):
            return state == SYNC_FINAL

    elif model is StackModel.EMPTY:
        moves = base_moves

        def is_final(state):
            return diagonal(state) and all(s.stage in (1, 4) for s in state)

    else:
        moves = base_moves
        is_final = diagonal

    per_symbol = {a: 0 for a in dca.input_alphabet}
    for (_, a, _) in table:
        per_symbol[a] += 1
    transitions = sum(t**n for t in per_symbol.values())
    states = (8 * n) ** n
    if model is StackModel.SAME:
        transitions += n * 4**n + 2
        states += 2
    return MultiCounterMachine(
        dca.input_alphabet,
        n,
        tuple(StagedState(q, 1, 0) for q in dca.states),
        moves,
        is_final,
        require_zero=model is not StackModel.ARBITRARY,
        one_turn=True,
        nondeterministic=model is StackModel.SAME,
        state_count=states,
        transition_count=transitions,
        metadata={"model": model.value, "sigma_sync": sigma_sync},
    )


@dataclass
class BoundReport:
    """Word-length bound ``(m·s)^(c·m)`` for nonempty 1-turn ``m``-counter machines."""

    bound: int
    counters: int
    transitions: int
    exponent: int
    max_len: int
    max_nodes: int
    formula: str = field(init=False)

    def __post_init__(self):
        self.formula = f"({self.counters}*{self.transitions})^({self.exponent}*{self.counters})"

    @property
    def budget_covers_bound(self) -> bool:
        return self.max_len >= self.bound

    def to_json(self) -> Dict:
        return {
            "bound": str(self.bound),
            "formula": self.formula,
            "counters": self.counters,
            "transitions": self.transitions,
            "exponent": self.exponent,
            "max_len": self.max_len,
            "max_nodes": self.max_nodes,
        }


def recover_witness(product: MultiCounterMachine, word, trail) -> Tuple[str, ...]:
    """Map an accepted spread-out word back to the simulated word (odd positions)."""
    word = tuple(word)
    if product.metadata.get("model") == StackModel.SAME.value:
        cut = trail.index(SYNC_DEC)
        word = word[: cut - 1]
    return word[0::2]


def decide_1turn_dca(
    dca: Dca, model, max_len: int = 64, max_nodes: int = 200_000, exponent: int = 1
) -> Tuple[SearchOutcome, BoundReport]:
    """Bounded decision of 1-turn synchronizability for a counter automaton.

    The verdict is PROVED_NO only when the explored length reaches the
    theoretical bound; otherwise an unsuccessful search is EXHAUSTED.
    """
    model = StackModel(model)
    if exponent < 1:
        raise ValueError("exponent constant must be positive")
    product = build_1turn_product(dca, model)
    m, s = product.num_counters, product.transition_count
    report = BoundReport((m * s) ** (exponent * m), m, s, exponent, max_len, max_nodes)
    outcome = mcm_bounded_emptiness(product, max_len=max_len, max_nodes=max_nodes)
    if outcome.found:
        spread = outcome.word
        word = recover_witness(product, spread, outcome.stats["trail"])
        ok, _ = check_n_turn_sync_word(dca, word, 1, model)
        if not ok:
            raise AssertionError(f"product witness {word} is not a 1-turn synchronizing word")
        w = check_sync_word(dca, word, model)
        witness = SyncWitness(w.word, w.model, w.finals, w.turns, 1)
        stats = dict(outcome.stats)
        stats["product_word"] = spread
        del stats["trail"]
        return SearchOutcome(Verdict.FOUND, witness=witness, word=word, stats=stats), report
    stats = outcome.stats
    complete = stats.get("frontier_empty") or stats.get("depth_completed", 0) >= report.bound
    if complete and report.budget_covers_bound:
        return SearchOutcome(Verdict.PROVED_NO, reason="no accepted word up to the length bound", stats=stats), report
    reason = outcome.reason
    if stats.get("frontier_empty"):
        reason += "; the budget is below the length bound, so the verdict stays inconclusive"
    return SearchOutcome(Verdict.EXHAUSTED, reason=reason, stats=stats), report
