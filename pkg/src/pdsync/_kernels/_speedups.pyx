# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled subset and pair kernels (at most 64 states)."""

from libc.stdint cimport uint64_t, int64_t
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from libcpp.pair cimport pair
from libcpp.deque cimport deque

from pdsync.automata import BudgetExceeded

MAX_STATES = 64


cdef inline int64_t _image(const vector[vector[int]]& table, uint64_t mask, int letter) nogil:
    cdef uint64_t out = 0
    cdef int t, bit
    cdef const vector[int]* row = &table[letter]
    while mask:
        bit = __builtin_ctzll(mask)
        t = row[0][bit]
        if t < 0:
            return -1
        out |= (<uint64_t>1) << t
        mask &= mask - 1
    return <int64_t>out


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef vector[vector[int]] _table(object table, int n) except *:
    if n > MAX_STATES:
        raise ValueError("compiled kernel supports at most 64 states")
    cdef vector[vector[int]] out
    cdef vector[int] row
    for r in table:
        row.clear()
        for x in r:
            row.push_back(<int>x)
        out.push_back(row)
    return out


def image(table, mask, int letter):
    cdef vector[vector[int]] t = _table(table, len(table[0]) if table else 0)
    return _image(t, <uint64_t>mask, letter)


def subset_bfs(table, int n, start, targets, long max_nodes):
    cdef vector[vector[int]] t = _table(table, n)
    cdef vector[uint64_t] goals
    for g in targets:
        goals.push_back(<uint64_t>g)
    cdef uint64_t s = <uint64_t>start
    cdef size_t gi
    for gi in range(goals.size()):
        if s & ~goals[gi] == 0:
            return []
    cdef unordered_map[uint64_t, pair[uint64_t, int]] parent
    cdef deque[uint64_t] queue
    cdef int k = <int>t.size()
    cdef int a
    cdef uint64_t m, nxt, cur
    cdef int64_t img
    cdef bint goal
    parent[s] = pair[uint64_t, int](s, -1)
    queue.push_back(s)
    while not queue.empty():
        m = queue.front()
        queue.pop_front()
        for a in range(k):
            img = _image(t, m, a)
            if img < 0:
                continue
            nxt = <uint64_t>img
            if parent.count(nxt):
                continue
            parent[nxt] = pair[uint64_t, int](m, a)
            goal = False
            for gi in range(goals.size()):
                if nxt & ~goals[gi] == 0:
                    goal = True
                    break
            if goal:
                word = []
                cur = nxt
                while parent[cur].second >= 0:
                    word.append(parent[cur].second)
                    cur = parent[cur].first
                word.reverse()
                return word
            if <long>parent.size() > max_nodes:
                raise BudgetExceeded(f"subset search exceeded {max_nodes} nodes", parent.size())
            queue.push_back(nxt)
    return None


def pair_merge_table(table, int n):
    cdef vector[vector[int]] t = _table(table, n)
    cdef int k = <int>t.size()
    cdef vector[vector[vector[int]]] pre
    pre.resize(k)
    cdef int a, p, q, p2, q2, d, i, j
    for a in range(k):
        pre[a].resize(n)
        for q in range(n):
            pre[a][t[a][q]].push_back(q)
    cdef vector[int] dist
    dist.assign(n * n, -1)
    cdef deque[int] queue
    for q in range(n):
        dist[q * n + q] = 0
        queue.push_back(q * n + q)
    while not queue.empty():
        i = queue.front()
        queue.pop_front()
        p = i // n
        q = i % n
        d = dist[i] + 1
        for a in range(k):
            for j in range(<int>pre[a][p].size()):
                p2 = pre[a][p][j]
                for q2 in pre[a][q]:
                    if dist[p2 * n + q2] < 0:
                        dist[p2 * n + q2] = d
                        queue.push_back(p2 * n + q2)
    cdef vector[int] nxt
    nxt.assign(n * n, -1)
    for p in range(n):
        for q in range(n):
            d = dist[p * n + q]
            if d <= 0:
                continue
            for a in range(k):
                if dist[t[a][p] * n + t[a][q]] == d - 1:
                    nxt[p * n + q] = a
                    break
    return list(dist), list(nxt)
