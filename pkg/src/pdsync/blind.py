"""Synchronization of (partially) blind counter automata via product machines.

The ``|Q|``-fold product runs one copy of the automaton per start state with
one counter each.  Synchronizing words are the accepted words of the product,
where acceptance is a diagonal state plus zero counters.  For the SAME and
ARBITRARY models fresh pad letters count the counters down after the diagonal
is reached; witnesses drop the pads again.
"""

from __future__ import annotations

from typing import Optional, Tuple, Union

from pdsync.automata import (
    Dbca,
    Dpbca,
    MachineError,
    StackModel,
    ValidationError,
    as_word,
    blindness_violations,
    counter_symbol,
)
from pdsync.counters import MultiCounterMachine, mcm_bounded_emptiness
from pdsync.dfasync import find_sync_word_greedy, is_synchronizable_dfa
from pdsync.pdasync import Counterexample, SearchOutcome, SyncWitness, Verdict, check_sync_word
from pdsync.turns import Decision

PAD_PREFIX = "pad:"
DRAIN = "drain"


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "'"
    return name


def is_pad(symbol: str, mcm: MultiCounterMachine) -> bool:
    return symbol in mcm.metadata.get("pad_letters", ())


def _component_moves(machine: Union[Dpbca, Dbca]):
    """``(state, symbol) -> (target, delta)`` for either counter representation."""
    if isinstance(machine, Dbca):
        return dict(machine.transitions)
    c = counter_symbol(machine)
    out = {}
    for (q, s, top), (t, push) in machine.transitions.items():
        if top == c:
            out[(q, s)] = (t, len(push) - 1)
    return out


def build_blind_product(machine: Union[Dpbca, Dbca], model) -> MultiCounterMachine:
    """Product machine whose accepted words (minus pads) synchronize ``machine``.

    A partially blind automaton blocks below zero; a :class:`Dbca` keeps
    integer counters and needs pads in both directions for the SAME model.
    """
    model = StackModel(model)
    if not isinstance(machine, Dbca):
        errs = blindness_violations(machine)
        if errs:
            raise ValidationError(errs)
    blind = isinstance(machine, Dbca)
    delta = _component_moves(machine)
    states = machine.states
    n = len(states)
    alphabet = list(machine.alphabet)

    if model is StackModel.ARBITRARY:
        pads = [_fresh(f"{PAD_PREFIX}{i + 1}", alphabet) for i in range(n)]
        pad_moves = {}
        for i, p in enumerate(pads):
            down = tuple(-1 if j == i else 0 for j in range(n))
            pad_moves[p] = [down] if not blind else [down, tuple(-d for d in down)]
    elif model is StackModel.SAME:
        pads = [_fresh(f"{PAD_PREFIX}all", alphabet)]
        pad_moves = {pads[0]: [(-1,) * n]}
        if blind:
            pads.append(_fresh(f"{PAD_PREFIX}up", alphabet + pads))
            pad_moves[pads[1]] = [(1,) * n]
    else:
        pads, pad_moves = [], {}

    def diagonal(state) -> Optional[str]:
        if state[0] == DRAIN:
            return state[1]
        first = state[0]
        return first if all(q == first for q in state) else None

    def moves(state, symbol, counters):
        if symbol in pad_moves:
            q = diagonal(state)
            if q is None:
                return []
            return [((DRAIN, q), d) for d in pad_moves[symbol]]
        if state[0] == DRAIN:
            return []
        targets, deltas = [], []
        for q in state:
            t, d = delta[(q, symbol)]
            targets.append(t)
            deltas.append(d)
        return [(tuple(targets), tuple(deltas))]

    def is_final(state):
        return diagonal(state) is not None

    return MultiCounterMachine(
        alphabet + pads,
        n,
        tuple(states),
        moves,
        is_final,
        blind=blind,
        nondeterministic=blind and model is StackModel.ARBITRARY,
        state_count=n**n + (n if pads else 0),
        transition_count=n**n * len(alphabet) + (n + n) * len(pads),
        metadata={"model": model.value, "pad_letters": tuple(pads)},
    )


def strip_pads(mcm: MultiCounterMachine, word) -> Tuple[str, ...]:
    return tuple(s for s in word if not is_pad(s, mcm))


def check_dbca_sync_word(machine: Dbca, word, model):
    """Synchronization check for integer blind counters."""
    model = StackModel(model)
    word = as_word(word)
    ends = {q: machine.run(q, word) for q in machine.states}
    finals = {s for s, _ in ends.values()}
    if len(finals) != 1:
        return Counterexample(word, f"runs end in different states {sorted(finals)}")
    counters = {c for _, c in ends.values()}
    if model is StackModel.EMPTY and counters != {0}:
        return Counterexample(word, f"counters end at {sorted(counters)}, not all zero")
    if model is StackModel.SAME and len(counters) != 1:
        return Counterexample(word, f"counters end at different values {sorted(counters)}")
    return ends


def dpbca_sync_bounded(
    machine: Union[Dpbca, Dbca], model, max_len: int = 32, max_nodes: int = 200_000
) -> SearchOutcome:
    """Bounded search for a synchronizing word through the product machine."""
    model = StackModel(model)
    product = build_blind_product(machine, model)
    outcome = mcm_bounded_emptiness(product, max_len=max_len, max_nodes=max_nodes)
    if not outcome.found:
        return outcome
    word = strip_pads(product, outcome.word)
    stats = dict(outcome.stats)
    stats["product_word"] = outcome.word
    del stats["trail"]
    if isinstance(machine, Dbca):
        res = check_dbca_sync_word(machine, word, model)
        if isinstance(res, Counterexample):
            raise AssertionError(f"product witness {word} failed: {res.reason}")
        return SearchOutcome(Verdict.FOUND, witness=res, word=word, stats=stats)
    res = check_sync_word(machine, word, model)
    if not isinstance(res, SyncWitness):
        raise AssertionError(f"product witness {word} failed: {res.reason}")
    return SearchOutcome(Verdict.FOUND, witness=res, word=word, stats=stats)


def decide_dbca_arbitrary(machine: Dbca) -> Decision:
    """Counters never influence a blind run, so only the state projection matters."""
    if not isinstance(machine, Dbca):
        raise MachineError("expected a blind counter automaton")
    dfa = machine.underlying_dfa()
    if not is_synchronizable_dfa(dfa):
        return Decision(False, reason="the underlying DFA is not synchronizable")
    return Decision(True, find_sync_word_greedy(dfa))

