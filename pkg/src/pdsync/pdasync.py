"""Checking and bounded search of synchronizing words for DPDAs.

Synchronizability of DPDAs and DCAs is undecidable in every stack model, so
the search here is a semi-decision procedure: exact up to its length and node
caps, and explicit when it gives up.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Optional, Tuple

from pdsync.automata import (
    BOTTOM,
    Configuration,
    Dpda,
    StackModel,
    State,
    Word,
    as_word,
    count_strokes,
    run,
)


class Verdict(str, enum.Enum):
    FOUND = "FOUND"
    EXHAUSTED = "EXHAUSTED"
    PROVED_NO = "PROVED_NO"


@dataclass(frozen=True)
class SyncWitness:
    word: Word
    model: StackModel
    finals: Tuple[Tuple[State, Configuration], ...]
    turns: Tuple[Tuple[State, int], ...]
    turn_bound: Optional[int] = None

    @property
    def state(self) -> State:
        return self.finals[0][1].state

    @property
    def turn_bound_ok(self) -> Optional[bool]:
        if self.turn_bound is None:
            return None
        return all(t <= self.turn_bound for _, t in self.turns)

    def verify(self, machine: Dpda) -> bool:
        """Re-simulate and compare with the recorded final configurations."""
        again = check_sync_word(machine, self.word, self.model)
        return isinstance(again, SyncWitness) and again.finals == self.finals


@dataclass(frozen=True)
class Counterexample:
    word: Word
    reason: str
    states: Tuple[State, ...] = ()


@dataclass
class SearchOutcome:
    verdict: Verdict
    witness: object = None
    word: Optional[Word] = None
    reason: str = ""
    stats: Dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.verdict is Verdict.FOUND


def _turns(trace) -> int:
    return count_strokes(trace.heights()) - 1


def check_sync_word(machine: Dpda, word, model) -> SyncWitness | Counterexample:
    """Check that ``word`` synchronizes ``machine`` in the given stack model."""
    model = StackModel(model)
    word = as_word(word)
    traces = [run(machine, q, word) for q in machine.states]
    for t in traces:
        if t.stuck:
            return Counterexample(word, f"run from {t.start} is stuck at position {t.stuck_at}", (t.start,))
        if not t.final.stack:
            return Counterexample(word, f"run from {t.start} popped the bottom symbol", (t.start,))
    first = traces[0]
    for t in traces[1:]:
        if t.final.state != first.final.state:
            return Counterexample(
                word,
                f"runs from {first.start} and {t.start} end in {first.final.state} and {t.final.state}",
                (first.start, t.start),
            )
    if model is StackModel.EMPTY:
        for t in traces:
            if t.final.stack != (BOTTOM,):
                return Counterexample(word, f"run from {t.start} ends with stack {t.final}", (t.start,))
    elif model is StackModel.SAME:
        for t in traces[1:]:
            if t.final.stack != first.final.stack:
                return Counterexample(
                    word, f"runs from {first.start} and {t.start} end with different stacks", (first.start, t.start)
                )
    return SyncWitness(
        word,
        model,
        tuple((t.start, t.final) for t in traces),
        tuple((t.start, _turns(t)) for t in traces),
    )


def check_n_turn_sync_word(machine: Dpda, word, n: int, model) -> Tuple[bool, Dict[State, int]]:
    """``(ok, turns)``: ``word`` synchronizes and every run makes at most ``n`` turns."""
    if n < 0:
        raise ValueError("turn bound must be nonnegative")
    word = as_word(word)
    turns = {}
    for q in machine.states:
        t = run(machine, q, word)
        if not t.stuck:
            turns[q] = _turns(t)
    result = check_sync_word(machine, word, model)
    ok = isinstance(result, SyncWitness) and all(v <= n for v in turns.values())
    return ok, turns


def model_chain_holds(machine: Dpda, word, model) -> bool:
    """A witness for a stronger stack model is one for every weaker model."""
    order = [StackModel.EMPTY, StackModel.SAME, StackModel.ARBITRARY]
    i = order.index(StackModel(model))
    return all(isinstance(check_sync_word(machine, word, m), SyncWitness) for m in order[i:])


# ---------------------------------------------------------------------------
# bounded search


class _Analysis:
    """Stack-independent facts about a machine used for sound pruning.

    ``locked`` is the largest state set from which, with a non-bottom symbol on
    top, no move pops or leaves the set; such a run never sees the bottom again
    and its height never decreases.
    """

    def __init__(self, machine: Dpda):
        m = machine
        upper = [g for g in m.stack_alphabet if g != BOTTOM]
        locked = set(m.states)
        changed = True
        while changed:
            changed = False
            for q in list(locked):
                for s in m.input_alphabet:
                    if any(
                        not m.transitions[(q, s, g)][1] or m.transitions[(q, s, g)][0] not in locked for g in upper
                    ):
                        locked.discard(q)
                        changed = True
                        break
        self.locked = frozenset(locked)
        succ_all = {q: {m.transitions[(q, s, g)][0] for s in m.input_alphabet for g in m.stack_alphabet} for q in m.states}
        succ_up = {q: {m.transitions[(q, s, g)][0] for s in m.input_alphabet for g in upper} for q in m.states}
        self.reach = {q: _closure(q, succ_all) for q in m.states}
        self.reach_locked = {q: _closure(q, succ_up) for q in self.locked}

    def region(self, state, stack) -> FrozenSet:
        if stack[-1] != BOTTOM and state in self.locked:
            return self.reach_locked[state]
        return self.reach[state]


def _closure(q, succ) -> FrozenSet:
    seen = {q}
    todo = [q]
    while todo:
        for t in succ[todo.pop()]:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return frozenset(seen)


def sync_search_bounded(
    machine: Dpda,
    model,
    max_len: int = 32,
    max_nodes: int = 100_000,
    turn_bound: Optional[int] = None,
) -> SearchOutcome:
    """Breadth-first search for a shortest synchronizing word.

    Nodes are the sets of distinct run configurations (tagged with stroke
    phases when ``turn_bound`` is set); since the machine is deterministic the
    set fixes all future behaviour, so deduplicating on it is exact.  Nodes are
    pruned when a run is stuck, exceeds the turn bound, or the runs can provably
    never meet in one state (or, for the empty model, never return to ``⊥``).
    The result is the lexicographically least shortest witness, re-verified.
    """
    model = StackModel(model)
    if max_len < 0 or max_nodes <= 0:
        raise ValueError("limits must be positive")
    info = _Analysis(machine)
    letters = machine.input_alphabet
    bound = None if turn_bound is None else turn_bound + 1
    trans = machine.transitions
    cache: Dict = {}
    pruned = {"stuck": 0, "turns": 0, "regions": 0}

    def advance(elem, symbol):
        key = (elem, symbol)
        hit = cache.get(key, key)
        if hit is not key:
            return hit
        if bound is None:
            state, stack = elem
        else:
            (state, stack), direction, strokes = elem
        res = None
        if stack:
            target, push = trans[(state, symbol, stack[-1])]
            new_stack = stack[:-1] + push
            if new_stack:
                if bound is None:
                    res = (target, new_stack)
                else:
                    sign = (len(push) > 1) - (len(push) < 1)
                    if sign:
                        if direction == 0:
                            direction = sign
                        elif sign != direction:
                            direction, strokes = sign, strokes + 1
                    if strokes > bound:
                        res = "turns"
                    elif (
                        model is StackModel.EMPTY
                        and strokes == bound
                        and direction > 0
                        and len(new_stack) > 1
                    ):
                        res = "turns"
                    else:
                        res = ((target, new_stack), direction, strokes)
        cache[key] = res
        return res

    def config(elem):
        return elem if bound is None else elem[0]

    def viable(node) -> bool:
        common = None
        for elem in node:
            state, stack = config(elem)
            if model is StackModel.EMPTY and len(stack) > 1 and state in info.locked:
                return False
            reg = info.region(state, stack)
            common = reg if common is None else common & reg
            if not common:
                return False
        return True

    def is_goal(node) -> bool:
        states = {config(e)[0] for e in node}
        if len(states) != 1:
            return False
        if model is StackModel.EMPTY:
            return all(config(e)[1] == (BOTTOM,) for e in node)
        if model is StackModel.SAME:
            return len({config(e)[1] for e in node}) == 1
        return True

    start_cfgs = [(q, (BOTTOM,)) for q in machine.states]
    start = frozenset(start_cfgs if bound is None else [(c, 0, 1) for c in start_cfgs])

    def finish(node_word):
        w = check_sync_word(machine, node_word, model)
        if not isinstance(w, SyncWitness):
            raise AssertionError(f"search produced a non-witness {node_word}: {w.reason}")
        if turn_bound is not None:
            w = SyncWitness(w.word, w.model, w.finals, w.turns, turn_bound)
            if not w.turn_bound_ok:
                raise AssertionError(f"search witness {node_word} exceeds {turn_bound} turns")
        return SearchOutcome(Verdict.FOUND, witness=w, word=w.word, stats=stats)

    stats = {"nodes": 1, "depth_completed": 0, "pruned": pruned}
    if is_goal(start):
        return finish(())
    parent = {start: None}
    rejected = set()
    frontier = [start]
    depth = 0
    while frontier and depth < max_len:
        nxt_frontier = []
        for node in frontier:
            for symbol in letters:
                succ = []
                dead = False
                for elem in node:
                    r = advance(elem, symbol)
                    if r is None or r == "turns":
                        pruned["stuck" if r is None else "turns"] += 1
                        dead = True
                        break
                    succ.append(r)
                if dead:
                    continue
                child = frozenset(succ)
                if child in parent or child in rejected:
                    continue
                if not viable(child):
                    pruned["regions"] += 1
                    rejected.add(child)
                    continue
                parent[child] = (node, symbol)
                if is_goal(child):
                    word = [symbol]
                    cur = node
                    while parent[cur] is not None:
                        cur, s = parent[cur]
                        word.append(s)
                    stats["nodes"] = len(parent)
                    stats["depth_completed"] = depth
                    return finish(tuple(reversed(word)))
                if len(parent) > max_nodes:
                    stats.update(nodes=len(parent), depth_completed=depth, frontier=len(nxt_frontier))
                    return SearchOutcome(
                        Verdict.EXHAUSTED, reason=f"node cap {max_nodes} reached at depth {depth + 1}", stats=stats
                    )
                nxt_frontier.append(child)
        frontier = nxt_frontier
        depth += 1
    stats.update(nodes=len(parent), depth_completed=depth, frontier=len(frontier))
    if not frontier:
        stats["frontier_empty"] = True
        reason = "search space exhausted: every branch was pruned"
    else:
        reason = f"length cap {max_len} reached"
    return SearchOutcome(Verdict.EXHAUSTED, reason=reason, stats=stats)
