"""Machine constructions from hardness reductions.

Each builder returns a machine together with enough structure to check the
claimed correspondence on small instances: PCP solutions become synchronizing
words, common accepted words become gadget witnesses, and so on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from pdsync.automata import (
    BOTTOM,
    Dca,
    Dfa,
    Dpda,
    MachineError,
    SequentialTransducer,
    Word,
)

SYNC_A = "sync:a"
SYNC_B = "sync:b"
BITS = ("0", "1")


def index_symbol(i: int) -> str:
    """Marked index letter for tile ``i`` (1-based)."""
    return f"idx:{i}"


@dataclass(frozen=True)
class PcpInstance:
    a: Tuple[str, ...]
    b: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError("PCP lists must be nonempty and of equal length")
        for tile in self.a + self.b:
            if not tile or set(tile) - set("01"):
                raise ValueError(f"PCP tiles must be nonempty binary words, got {tile!r}")

    @property
    def n(self) -> int:
        return len(self.a)

    def top(self, indices: Sequence[int]) -> str:
        return "".join(self.a[i - 1] for i in indices)

    def bottom(self, indices: Sequence[int]) -> str:
        return "".join(self.b[i - 1] for i in indices)

    def solves(self, indices: Sequence[int]) -> bool:
        return bool(indices) and self.top(indices) == self.bottom(indices)

    def encode(self, indices: Sequence[int]) -> Word:
        """Tile blocks ``ī a_i # b_i #`` for an index sequence."""
        word: List[str] = []
        for i in indices:
            word.append(index_symbol(i))
            word.extend(self.a[i - 1])
            word.append("#")
            word.extend(self.b[i - 1])
            word.append("#")
        return tuple(word)

    def to_json(self) -> Dict:
        return {"a": list(self.a), "b": list(self.b)}


def pcp_brute_solve(pcp: PcpInstance, max_indices: int) -> Optional[List[int]]:
    """Shortest, then lexicographically least, solution with at most ``max_indices`` tiles."""
    if max_indices < 1:
        raise ValueError("max_indices must be at least 1")
    layer: List[Tuple[int, ...]] = [()]
    for _ in range(max_indices):
        nxt = []
        for seq in layer:
            for i in range(1, pcp.n + 1):
                cand = seq + (i,)
                top, bot = pcp.top(cand), pcp.bottom(cand)
                if top == bot:
                    return list(cand)
                if top.startswith(bot) or bot.startswith(top):
                    nxt.append(cand)
        layer = nxt
    return None


def enumerate_pcp(n: int, max_tile: int):
    """Every PCP instance with ``n`` tile pairs over binary tiles of length ``1..max_tile``."""
    tiles = ["".join(t) for k in range(1, max_tile + 1) for t in itertools.product("01", repeat=k)]
    for a in itertools.product(tiles, repeat=n):
        for b in itertools.product(tiles, repeat=n):
            yield PcpInstance(a, b)


# ---------------------------------------------------------------------------
# tile-reading chains


def _chain_states(prefix: str, pcp: PcpInstance, i: int) -> List[str]:
    length = len(pcp.a[i - 1]) + 1 + len(pcp.b[i - 1])
    return [f"{prefix}t{i}.{k}" for k in range(length + 1)]


def _add_chains(delta, prefix, pcp, push_a: bool, exit_state):
    """Tile chains reading ``a_i # b_i``; ``delta(q, s, target, x)`` records a move emitting ``x``."""
    states = []
    for i in range(1, pcp.n + 1):
        chain = _chain_states(prefix, pcp, i)
        states.extend(chain)
        text = pcp.a[i - 1] + "#" + pcp.b[i - 1]
        split = len(pcp.a[i - 1])
        for k, sym in enumerate(text):
            pushes = (k < split) if push_a else (k > split)
            delta(chain[k], sym, chain[k + 1], sym if pushes else None)
        delta(chain[-1], "#", exit_state, None)
    return states


def _pcp_letters(pcp: PcpInstance) -> Tuple[str, ...]:
    return tuple(index_symbol(i) for i in range(1, pcp.n + 1))


def pcp_to_1turn_acceptors(pcp: PcpInstance) -> Tuple[Dpda, Dpda]:
    """Real-time 1-turn DPDAs whose languages intersect iff ``pcp`` is solvable.

    ``M_A`` accepts ``ī₁ a_{i₁} # b_{i₁} # ⋯ ī_m a_{i_m} # b_{i_m} # $ (a_{i₁}⋯a_{i_m})ᴿ $``;
    ``M_B`` the same with the reversed ``b`` concatenation after ``$``.
    """
    return _acceptor(pcp, push_a=True), _acceptor(pcp, push_a=False)


def _acceptor(pcp: PcpInstance, push_a: bool) -> Dpda:
    sigma = BITS + ("#", "$") + _pcp_letters(pcp)
    gamma = (BOTTOM,) + BITS
    delta = {}

    def put(q, s, target, pushed):
        for g in gamma:
            delta[(q, s, g)] = (target, (g,) if pushed is None else (g, pushed))

    chains = _add_chains(put, "", pcp, push_a, "q0bar")
    for q in ("q0", "q0bar"):
        for i in range(1, pcp.n + 1):
            put(q, index_symbol(i), f"t{i}.0", None)
    put("q0bar", "$", "qcheck", None)
    for x in BITS:
        delta[("qcheck", x, x)] = ("qcheck", ())
    delta[("qcheck", "$", BOTTOM)] = ("qf", (BOTTOM,))
    states = ("q0", "q0bar", "qcheck", "qfail", "qf") + tuple(chains)
    for q in states:
        for s in sigma:
            for g in gamma:
                delta.setdefault((q, s, g), ("qfail", (g,)))
    return Dpda(states, sigma, gamma, delta, initial="q0", finals=("qf",))


def decode_acceptor_word(pcp: PcpInstance, word) -> Optional[List[int]]:
    """Index sequence of a word in the displayed acceptor language shape, else ``None``."""
    word = tuple(word)
    if word.count("$") != 2 or word[-1] != "$":
        return None
    head = word[: word.index("$")]
    indices: List[int] = []
    pos = 0
    while pos < len(head):
        sym = head[pos]
        if not sym.startswith("idx:"):
            return None
        i = int(sym[4:])
        if not 1 <= i <= pcp.n:
            return None
        block = pcp.encode([i])
        if head[pos:pos + len(block)] != block:
            return None
        indices.append(i)
        pos += len(block)
    return indices or None


def combine_sync_gadget(m1: Dpda, m2: Dpda) -> Dpda:
    """Machine synchronizable iff ``m1`` and ``m2`` accept a common word.

    For a common word ``w`` the word ``a w b`` (followed by ``b`` per unit of
    leftover stack height in the empty model) synchronizes every state into
    the sink ``sync:qs``.
    """
    if set(m1.input_alphabet) != set(m2.input_alphabet):
        raise MachineError("gadget inputs must share the input alphabet")
    for m in (m1, m2):
        if m.initial is None:
            raise MachineError("gadget inputs need initial states")
        if SYNC_A in m.input_alphabet or SYNC_B in m.input_alphabet:
            raise MachineError("gadget inputs may not use the reserved letters")
    sigma = tuple(m1.input_alphabet) + (SYNC_A, SYNC_B)
    gamma = [BOTTOM]
    for g in list(m1.stack_alphabet) + list(m2.stack_alphabet) + ["1"]:
        if g not in gamma:
            gamma.append(g)
    gamma = tuple(gamma)
    qs = "sync:qs"
    delta = {}
    states: List[str] = []
    for tag, m in (("L", m1), ("R", m2)):
        name = lambda q, tag=tag: f"{tag}:{q}"  # noqa: E731
        trap = f"sync:qf{1 if tag == 'L' else 2}"
        start = name(m.initial)
        own = set(m.stack_alphabet)
        for q in m.states:
            states.append(name(q))
            for s in m.input_alphabet:
                for g in gamma:
                    if g in own:
                        t, push = m.transitions[(q, s, g)]
                        delta[(name(q), s, g)] = (name(t), push)
                    else:
                        delta[(name(q), s, g)] = (trap, (g, "1"))
            for g in gamma:
                if g == BOTTOM:
                    delta[(name(q), SYNC_A, g)] = (start, (BOTTOM,))
                else:
                    delta[(name(q), SYNC_A, g)] = (trap, (g,))
                if q in m.finals:
                    delta[(name(q), SYNC_B, g)] = (qs, (g,))
                elif g == BOTTOM:
                    delta[(name(q), SYNC_B, g)] = (trap, (BOTTOM, "1"))
                else:
                    delta[(name(q), SYNC_B, g)] = (trap, (g,))
        for s in sigma:
            for g in gamma:
                if s == SYNC_A and g == BOTTOM:
                    delta[(trap, s, g)] = (start, (BOTTOM,))
                else:
                    delta[(trap, s, g)] = (trap, (g, "1"))
    for s in sigma:
        for g in gamma:
            delta[(qs, s, g)] = (qs, (BOTTOM,)) if g == BOTTOM else (qs, ())
    states += ["sync:qf1", "sync:qf2", qs]
    cls = Dca if len(gamma) == 2 else Dpda
    return cls(tuple(states), sigma, gamma, delta)


def gadget_witness(pcp_or_word, drain: int = 0) -> Word:
    """``a w b`` followed by ``drain`` extra ``b`` letters."""
    return (SYNC_A,) + tuple(pcp_or_word) + (SYNC_B,) * (1 + drain)


def acceptor_common_word(pcp: PcpInstance, indices: Sequence[int]) -> Word:
    """Word accepted by both PCP acceptors for a solution ``indices``."""
    check = tuple(reversed(pcp.top(indices)))
    return pcp.encode(indices) + ("$",) + check + ("$",)


# ---------------------------------------------------------------------------
# 0-turn same-stack construction and its transducer variant


def _zero_turn_parts(pcp: PcpInstance):
    sigma = BITS + ("#", SYNC_A) + _pcp_letters(pcp)
    side_states = {}
    for j in ("A", "B"):
        names = [f"{j}:q0", f"{j}:q0u"]
        names += [q for i in range(1, pcp.n + 1) for q in _chain_states(f"{j}:", pcp, i)]
        side_states[j] = names
    return sigma, side_states


def pcp_to_0turn_same(pcp: PcpInstance) -> Dpda:
    """Real-time 0-turn DPDA synchronizable in the same-stack model iff ``pcp`` is solvable.

    Side ``A`` pushes the ``a`` tiles and side ``B`` the ``b`` tiles; reading
    ``##`` after complete blocks moves both into ``sync``, where the stacks
    agree exactly when the index sequence solves the instance.
    """
    sigma, sides = _zero_turn_parts(pcp)
    gamma = (BOTTOM,) + BITS
    delta = {}
    for j in ("A", "B"):
        fail = f"{j}:fail"
        q0, q0u = f"{j}:q0", f"{j}:q0u"

        def put(q, s, target, pushed):
            for g in gamma:
                delta[(q, s, g)] = (target, (g,) if pushed is None else (g, pushed))

        _add_chains(put, f"{j}:", pcp, j == "A", q0u)
        for q in (q0, q0u):
            for i in range(1, pcp.n + 1):
                put(q, index_symbol(i), f"{j}:t{i}.0", None)
        for g in BITS:
            delta[(q0u, "#", g)] = ("sync", (g,))
        for q in sides[j]:
            for g in gamma:
                delta[(q, SYNC_A, g)] = (q0, (BOTTOM,)) if g == BOTTOM else (fail, (g,))
            for s in sigma:
                for g in gamma:
                    delta.setdefault((q, s, g), (fail, (g, "1")))
        for s in sigma:
            for g in gamma:
                if s == SYNC_A and g == BOTTOM:
                    delta[(fail, s, g)] = (q0, (BOTTOM,))
                else:
                    delta[(fail, s, g)] = (fail, (g, "1"))
    for s in sigma:
        for g in gamma:
            if s == SYNC_A and g == BOTTOM:
                delta[("sync", s, g)] = ("A:q0", (BOTTOM,))
            else:
                delta[("sync", s, g)] = ("sync", (g,))
    states = tuple(sides["A"] + sides["B"] + ["A:fail", "B:fail", "sync"])
    return Dpda(states, sigma, gamma, delta)


def same_stack_witness(pcp: PcpInstance, indices: Sequence[int]) -> Word:
    return (SYNC_A,) + pcp.encode(indices) + ("#",)


def pcp_to_transducer(pcp: PcpInstance) -> SequentialTransducer:
    """Sequential transducer trace-synchronizable iff ``pcp`` is solvable.

    Pushes of the 0-turn construction become outputs; ``a`` emits the reset
    marker ``r`` everywhere and the failure states emit ``A`` or ``B``.
    """
    sigma, sides = _zero_turn_parts(pcp)
    delta = {}
    for j in ("A", "B"):
        fail = f"{j}:fail"
        q0, q0u = f"{j}:q0", f"{j}:q0u"

        def put(q, s, target, emitted):
            delta[(q, s)] = (target, () if emitted is None else (emitted,))

        _add_chains(put, f"{j}:", pcp, j == "A", q0u)
        for q in (q0, q0u):
            for i in range(1, pcp.n + 1):
                put(q, index_symbol(i), f"{j}:t{i}.0", None)
        delta[(q0u, "#")] = ("sync", ())
        for q in sides[j]:
            delta[(q, SYNC_A)] = (q0, ("r",))
            for s in sigma:
                delta.setdefault((q, s), (fail, (j,)))
        for s in sigma:
            delta[(fail, s)] = (q0, ("r",)) if s == SYNC_A else (fail, (j,))
    for s in sigma:
        delta[("sync", s)] = ("A:q0", ("r",)) if s == SYNC_A else ("sync", ())
    states = tuple(sides["A"] + sides["B"] + ["A:fail", "B:fail", "sync"])
    return SequentialTransducer(states, sigma, BITS + ("r", "A", "B"), delta)


# ---------------------------------------------------------------------------
# subset synchronization into a 0-turn counter automaton


def dfa_subset_to_0turn_dca(dfa: Dfa, subset) -> Dca:
    """Counter automaton 0-turn synchronizable iff ``dfa`` can be driven into ``subset``.

    If ``w`` maps every state into the subset, ``w a a`` synchronizes into
    ``sync:sync``.  States outside the subset mark the counter on ``a`` and are
    then held in ``sync:stall`` forever.
    """
    subset = set(subset)
    if not subset or not subset <= set(dfa.states):
        raise MachineError("subset must be a nonempty set of DFA states")
    if not dfa.is_total():
        raise MachineError("operation requires a total DFA")
    stall, sink = "sync:stall", "sync:sync"
    mark = "N"
    sigma = tuple(dfa.alphabet) + (SYNC_A,)
    gamma = (BOTTOM, mark)
    delta = {}
    for q in dfa.states:
        for s in dfa.alphabet:
            for g in gamma:
                delta[(q, s, g)] = (dfa.transitions[(q, s)], (g,))
        delta[(q, SYNC_A, BOTTOM)] = (stall, (BOTTOM,)) if q in subset else (stall, (BOTTOM, mark))
        delta[(q, SYNC_A, mark)] = (q, (mark,))
    delta[(stall, SYNC_A, BOTTOM)] = (sink, (BOTTOM,))
    delta[(stall, SYNC_A, mark)] = (stall, (mark,))
    for q in (stall, sink):
        for s in sigma:
            for g in gamma:
                delta.setdefault((q, s, g), (q, (g,)))
    return Dca(tuple(dfa.states) + (stall, sink), sigma, gamma, delta)
