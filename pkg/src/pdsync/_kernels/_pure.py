"""Pure-Python subset and pair kernels.

States are indices ``0..n-1``; a subset is an ``int`` bitmask.  ``table`` is
indexed ``table[letter][state]`` and holds ``-1`` for undefined transitions.
"""

from collections import deque

from pdsync.automata import BudgetExceeded


def image(table, mask, letter):
    """Image of ``mask`` under ``letter``, or ``-1`` if some member has no transition."""
    row = table[letter]
    out = 0
    while mask:
        low = mask & -mask
        t = row[low.bit_length() - 1]
        if t < 0:
            return -1
        out |= 1 << t
        mask ^= low
    return out


def subset_bfs(table, n, start, targets, max_nodes):
    """Lexicographically least shortest word driving ``start`` into one of ``targets``.

    Returns a list of letter indices, or ``None`` if the reachable subsets never
    fit inside a target.  Raises :class:`BudgetExceeded` past ``max_nodes``.
    """
    targets = list(targets)

    def is_goal(m):
        for t in targets:
            if m & ~t == 0:
                return True
        return False

    if is_goal(start):
        return []
    parent = {start: (None, -1)}
    queue = deque([start])
    k = len(table)
    while queue:
        m = queue.popleft()
        for a in range(k):
            nxt = image(table, m, a)
            if nxt < 0 or nxt in parent:
                continue
            parent[nxt] = (m, a)
            if is_goal(nxt):
                word = []
                cur = nxt
                while True:
                    prev, letter = parent[cur]
                    if prev is None:
                        break
                    word.append(letter)
                    cur = prev
                word.reverse()
                return word
            if len(parent) > max_nodes:
                raise BudgetExceeded(f"subset search exceeded {max_nodes} nodes", len(parent))
            queue.append(nxt)
    return None


def pair_merge_table(table, n):
    """Shortest merging distances for all state pairs of a total DFA.

    Returns ``(dist, nxt)`` as flat lists indexed ``p * n + q``: ``dist`` is the
    length of a shortest word mapping ``p`` and ``q`` to one state (``-1`` if
    none) and ``nxt`` the least letter starting such a word.
    """
    k = len(table)
    pre = [[[] for _ in range(n)] for _ in range(k)]
    for a in range(k):
        row = table[a]
        for q in range(n):
            pre[a][row[q]].append(q)
    dist = [-1] * (n * n)
    queue = deque()
    for q in range(n):
        dist[q * n + q] = 0
        queue.append((q, q))
    while queue:
        p, q = queue.popleft()
        d = dist[p * n + q] + 1
        for a in range(k):
            for p2 in pre[a][p]:
                for q2 in pre[a][q]:
                    if dist[p2 * n + q2] < 0:
                        dist[p2 * n + q2] = d
                        queue.append((p2, q2))
    nxt = [-1] * (n * n)
    for p in range(n):
        for q in range(n):
            d = dist[p * n + q]
            if d <= 0:
                continue
            for a in range(k):
                if dist[table[a][p] * n + table[a][q]] == d - 1:
                    nxt[p * n + q] = a
                    break
    return dist, nxt
