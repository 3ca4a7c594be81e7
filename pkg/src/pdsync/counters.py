"""Multi-counter machines and bounded emptiness search.

A :class:`MultiCounterMachine` reads one letter per move and updates ``k``
counters by a delta vector.  Counters are partially blind by default: a move
that would take a counter below zero is blocked.  Machines are described by a
``moves`` callback so that large products stay implicit.
"""

from __future__ import annotations

from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from pdsync.pdasync import SearchOutcome, Verdict

Counters = Tuple[int, ...]
Move = Tuple[Hashable, Tuple[int, ...]]


class MultiCounterMachine:
    """Real-time machine with ``num_counters`` counters.

    ``moves(state, symbol, counters)`` returns the possible ``(target, deltas)``
    pairs; it may inspect ``counters`` to express zero tests.  Acceptance is a
    final state, plus all counters zero when ``require_zero`` is set.
    """

    def __init__(
        self,
        alphabet: Sequence[str],
        num_counters: int,
        initial,
        moves: Callable[[Hashable, str, Counters], Iterable[Move]],
        is_final: Callable[[Hashable], bool],
        *,
        require_zero: bool = True,
        one_turn: bool = False,
        blind: bool = False,
        nondeterministic: bool = False,
        state_count: Optional[int] = None,
        transition_count: Optional[int] = None,
        metadata: Optional[Dict] = None,
    ):
        self.alphabet = tuple(alphabet)
        self.num_counters = num_counters
        self.initial = initial
        self.moves = moves
        self.is_final = is_final
        self.require_zero = require_zero
        self.one_turn = one_turn
        self.blind = blind
        self.nondeterministic = nondeterministic
        self.state_count = state_count
        self.transition_count = transition_count
        self.metadata = dict(metadata or {})

    @classmethod
    def from_table(cls, alphabet, num_counters, initial, table, finals, **kw):
        """Explicit machine from ``{(state, symbol): [(target, deltas), ...]}``."""
        table = {k: [(t, tuple(d)) for t, d in v] for k, v in table.items()}
        finals = frozenset(finals)
        states = {initial} | {s for s, _ in table} | {t for v in table.values() for t, _ in v}
        kw.setdefault("nondeterministic", any(len(v) > 1 for v in table.values()))
        return cls(
            alphabet,
            num_counters,
            initial,
            lambda s, a, c: table.get((s, a), ()),
            finals.__contains__,
            state_count=len(states),
            transition_count=sum(len(v) for v in table.values()),
            **kw,
        )

    def accepting(self, state, counters: Counters) -> bool:
        if not self.is_final(state):
            return False
        return not self.require_zero or not any(counters)

    def successors(self, state, counters: Counters, symbol) -> List[Tuple[Hashable, Counters]]:
        out = []
        for target, deltas in self.moves(state, symbol, counters):
            new = tuple(c + d for c, d in zip(counters, deltas))
            if not self.blind and any(c < 0 for c in new):
                continue
            out.append((target, new))
        return out

    def run(self, word) -> Optional[Tuple[Hashable, Counters]]:
        """Unique run of a deterministic machine; ``None`` when blocked."""
        state, counters = self.initial, (0,) * self.num_counters
        for symbol in word:
            succ = self.successors(state, counters, symbol)
            if not succ:
                return None
            if len(succ) > 1:
                raise ValueError("run() needs a deterministic machine")
            state, counters = succ[0]
        return state, counters

    def accepts(self, word) -> bool:
        """Membership by exploring all runs (handles nondeterminism)."""
        configs = {(self.initial, (0,) * self.num_counters)}
        for symbol in word:
            configs = {n for s, c in configs for n in self.successors(s, c, symbol)}
            if not configs:
                return False
        return any(self.accepting(s, c) for s, c in configs)


def mcm_bounded_emptiness(mcm: MultiCounterMachine, max_len: int = 64, max_nodes: int = 200_000) -> SearchOutcome:
    """Breadth-first search for a shortest accepted word.

    Configurations are ``(state, counters)``, extended by the set of counters
    that already decremented when the machine is flagged 1-turn (an increment
    after that is blocked).  Returns FOUND with the lexicographically least
    shortest word and its state trail, or EXHAUSTED; an empty frontier is
    reported in the statistics because it proves the language empty.
    """
    if max_len < 0 or max_nodes <= 0:
        raise ValueError("budget must be positive")
    zero = (0,) * mcm.num_counters
    start = (mcm.initial, zero, 0)
    stats: Dict = {"nodes": 1, "depth_completed": 0}

    def found(node):
        word, trail = [], [node[0]]
        cur = node
        while parent[cur] is not None:
            cur, symbol = parent[cur]
            word.append(symbol)
            trail.append(cur[0])
        word.reverse()
        trail.reverse()
        stats.update(nodes=len(parent), trail=trail)
        return SearchOutcome(Verdict.FOUND, word=tuple(word), stats=stats)

    parent: Dict = {start: None}
    if mcm.accepting(mcm.initial, zero):
        return found(start)
    frontier = [start]
    depth = 0
    while frontier and depth < max_len:
        nxt = []
        for node in frontier:
            state, counters, turned = node
            for symbol in mcm.alphabet:
                for target, deltas in mcm.moves(state, symbol, counters):
                    new = tuple(c + d for c, d in zip(counters, deltas))
                    if not mcm.blind and any(c < 0 for c in new):
                        continue
                    t = turned
                    if mcm.one_turn:
                        blocked = False
                        for i, d in enumerate(deltas):
                            if d > 0 and turned >> i & 1:
                                blocked = True
                                break
                            if d < 0:
                                t |= 1 << i
                        if blocked:
                            continue
                    child = (target, new, t)
                    if child in parent:
                        continue
                    parent[child] = (node, symbol)
                    if mcm.accepting(target, new):
                        stats["depth_completed"] = depth
                        return found(child)
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
        return SearchOutcome(Verdict.EXHAUSTED, reason="every reachable configuration explored", stats=stats)
    return SearchOutcome(Verdict.EXHAUSTED, reason=f"length cap {max_len} reached", stats=stats)
