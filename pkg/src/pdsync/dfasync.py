"""Synchronization of finite automata: pair merging, subset BFS, careful sync."""

from __future__ import annotations

from typing import Iterable, Optional

from pdsync import kernels
from pdsync.automata import Dfa, MachineError, PartialDfa, Word

DEFAULT_MAX_SUBSETS = 1 << 21


def _require_total(dfa: PartialDfa):
    if not dfa.is_total():
        raise MachineError("operation requires a total DFA")


def _mask(dfa: PartialDfa, states: Iterable) -> int:
    index = {q: i for i, q in enumerate(dfa.states)}
    m = 0
    for q in states:
        try:
            m |= 1 << index[q]
        except KeyError:
            raise MachineError(f"unknown state {q!r}") from None
    return m


def _word(dfa: PartialDfa, letters) -> Optional[Word]:
    if letters is None:
        return None
    return tuple(dfa.alphabet[a] for a in letters)


def is_synchronizable_dfa(dfa: Dfa) -> bool:
    """True iff every pair of states can be merged by some word."""
    _require_total(dfa)
    n = len(dfa.states)
    dist, _ = kernels.pair_merge_table(dfa.table(), n)
    return all(d >= 0 for d in dist)


def find_sync_word_greedy(dfa: Dfa) -> Optional[Word]:
    """Synchronizing word built by repeatedly merging the closest pair.

    At most ``n - 1`` rounds each append a word of length at most ``n(n-1)/2``,
    so the result has length below ``n**3``.
    """
    _require_total(dfa)
    n = len(dfa.states)
    table = dfa.table()
    dist, nxt = kernels.pair_merge_table(table, n)
    current = set(range(n))
    letters = []
    while len(current) > 1:
        best = None
        members = sorted(current)
        for i, p in enumerate(members):
            for q in members[i + 1:]:
                d = dist[p * n + q]
                if d < 0:
                    return None
                if best is None or d < best[0]:
                    best = (d, p, q)
        _, p, q = best
        while p != q:
            a = nxt[p * n + q]
            letters.append(a)
            row = table[a]
            current = {row[s] for s in current}
            p, q = row[p], row[q]
            if p > q:
                p, q = q, p
    return _word(dfa, letters)


def sync_from_into_subset(
    dfa: PartialDfa, start: Iterable, target: Iterable, max_subsets: int = DEFAULT_MAX_SUBSETS
) -> Optional[Word]:
    """Shortest (then lexicographically least) word ``w`` with ``δ(start, w) ⊆ target``.

    Letters undefined on some member of the current subset are not applicable.
    """
    s0, s1 = _mask(dfa, start), _mask(dfa, target)
    if not s0 or not s1:
        raise MachineError("subsets must be nonempty")
    letters = kernels.subset_bfs(dfa.table(), len(dfa.states), s0, [s1], max_subsets)
    return _word(dfa, letters)


def sync_into_subset(dfa: PartialDfa, target: Iterable, max_subsets: int = DEFAULT_MAX_SUBSETS):
    return sync_from_into_subset(dfa, dfa.states, target, max_subsets)


def sync_from_into_any(
    dfa: PartialDfa, start: Iterable, targets, max_subsets: int = DEFAULT_MAX_SUBSETS
) -> Optional[Word]:
    """Like :func:`sync_from_into_subset` but succeeds on entering any of ``targets``."""
    s0 = _mask(dfa, start)
    masks = [_mask(dfa, t) for t in targets]
    letters = kernels.subset_bfs(dfa.table(), len(dfa.states), s0, masks, max_subsets)
    return _word(dfa, letters)


def shortest_sync_word(dfa: Dfa, max_subsets: int = DEFAULT_MAX_SUBSETS) -> Optional[Word]:
    """Exact shortest synchronizing word by BFS over the subset lattice."""
    _require_total(dfa)
    return careful_sync(dfa, max_subsets)


def careful_sync(pdfa: PartialDfa, max_subsets: int = DEFAULT_MAX_SUBSETS) -> Optional[Word]:
    """Shortest word synchronizing a partial DFA without using undefined transitions."""
    return sync_from_into_any(pdfa, pdfa.states, [[q] for q in pdfa.states], max_subsets)


def synchronizes(dfa: PartialDfa, word, subset=None) -> bool:
    img = dfa.image(dfa.states if subset is None else subset, word)
    return img is not None and len(img) == 1


def cerny(n: int) -> Dfa:
    """Černý automaton: ``a`` rotates the states, ``b`` maps 0 to 1 and fixes the rest."""
    states = tuple(str(i) for i in range(n))
    delta = {}
    for i in range(n):
        delta[(str(i), "a")] = str((i + 1) % n)
        delta[(str(i), "b")] = "1" if i == 0 else str(i)
    return Dfa(states, ("a", "b"), delta)
