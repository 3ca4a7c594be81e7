"""Trace synchronization of sequential transducers.

A word trace-synchronizes a transducer when all runs end in one state and
emit the same output.  The search tracks, per distinct run, the state and the
output not yet matched by every other run ("residual").  Outputs only grow,
so two residuals where neither is a prefix of the other can never be
reconciled and the node is dropped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Tuple

from pdsync.automata import SequentialTransducer, State, Word, as_word
from pdsync.pdasync import SearchOutcome, Verdict


def run_transducer(t: SequentialTransducer, state: State, word) -> Tuple[State, Word]:
    out = []
    for symbol in as_word(word):
        state, emitted = t.transitions[(state, symbol)]
        out.extend(emitted)
    return state, tuple(out)


@dataclass(frozen=True)
class TraceCheck:
    ok: bool
    pair: Tuple[State, ...] = ()
    position: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def check_trace_sync(t: SequentialTransducer, word) -> TraceCheck:
    """Compare every run with the first one; report the first disagreement."""
    word = as_word(word)
    runs = [(q, *run_transducer(t, q, word)) for q in t.states]
    q0, s0, o0 = runs[0]
    for q, s, o in runs[1:]:
        if o != o0:
            pos = next((i for i, (x, y) in enumerate(zip(o0, o)) if x != y), min(len(o0), len(o)))
            return TraceCheck(False, (q0, q), pos, f"outputs from {q0} and {q} differ at position {pos}")
        if s != s0:
            return TraceCheck(False, (q0, q), None, f"runs from {q0} and {q} end in {s0} and {s}")
    return TraceCheck(True)


def _is_prefix(u, v) -> bool:
    return len(u) <= len(v) and v[: len(u)] == u


def trace_sync_search_bounded(
    t: SequentialTransducer, max_len: int = 24, max_nodes: int = 100_000, max_residual: int = 64
) -> SearchOutcome:
    """Breadth-first search for a shortest trace-synchronizing word.

    Nodes are sets of ``(state, residual)``.  Residuals longer than
    ``max_residual`` are pruned, which may lose witnesses; the count is
    reported under ``stats["pruned"]["residual"]``.
    """
    if max_len < 0 or max_nodes <= 0 or max_residual < 0:
        raise ValueError("limits must be positive")
    pruned = {"conflict": 0, "residual": 0}
    stats = {"nodes": 1, "depth_completed": 0, "pruned": pruned}
    start = frozenset((q, ()) for q in t.states)

    def is_goal(node):
        return len(node) == 1 and next(iter(node))[1] == ()

    def advance(node, symbol):
        moved = []
        for state, res in node:
            target, out = t.transitions[(state, symbol)]
            moved.append((target, res + out))
        shortest = min((r for _, r in moved), key=len)
        for _, r in moved:
            if not _is_prefix(shortest, r):
                pruned["conflict"] += 1
                return None
        k = len(shortest)
        moved = [(s, r[k:]) for s, r in moved]
        rs = sorted({r for _, r in moved}, key=len)
        for a, b in zip(rs, rs[1:]):
            if not _is_prefix(a, b):
                pruned["conflict"] += 1
                return None
        if len(rs[-1]) > max_residual:
            pruned["residual"] += 1
            return None
        return frozenset(moved)

    def finish(word):
        check = check_trace_sync(t, word)
        if not check:
            raise AssertionError(f"search produced a non-witness {word}: {check.reason}")
        return SearchOutcome(Verdict.FOUND, witness=check, word=tuple(word), stats=stats)

    if is_goal(start):
        return finish(())
    parent = {start: None}
    frontier = [start]
    depth = 0
    while frontier and depth < max_len:
        nxt = []
        for node in frontier:
            for symbol in t.alphabet:
                child = advance(node, symbol)
                if child is None or child in parent:
                    continue
                parent[child] = (node, symbol)
                if is_goal(child):
                    word = [symbol]
                    cur = node
                    while parent[cur] is not None:
                        cur, s = parent[cur]
                        word.append(s)
                    stats.update(nodes=len(parent), depth_completed=depth)
                    return finish(word[::-1])
                if len(parent) > max_nodes:
                    stats.update(nodes=len(parent), depth_completed=depth, frontier=len(nxt))
                    return SearchOutcome(
                        Verdict.EXHAUSTED, reason=f"node cap {max_nodes} reached at depth {depth + 1}", stats=stats
                    )
                nxt.append(child)
        frontier = nxt
        depth += 1
    stats.update(nodes=len(parent), depth_completed=depth, frontier=len(frontier))
    if not frontier:
        stats["frontier_empty"] = True
        reason = "search space exhausted"
        if pruned["residual"]:
            reason += f" ({pruned['residual']} nodes cut by the residual cap)"
    else:
        reason = f"length cap {max_len} reached"
    return SearchOutcome(Verdict.EXHAUSTED, reason=reason, stats=stats)


def naive_trace_sync(t: SequentialTransducer, max_len: int) -> Optional[Word]:
    """Shortest, then lexicographically least, witness by plain enumeration."""
    for n in range(max_len + 1):
        for word in itertools.product(t.alphabet, repeat=n):
            if check_trace_sync(t, word):
                return word
    return None
