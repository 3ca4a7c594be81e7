"""Kernel selection.

The compiled extension is used when it imported and the instance fits in 64
states; set ``PDSYNC_PURE=1`` to force the pure-Python kernels.
"""

import os

from pdsync._kernels import _pure

try:
    if os.environ.get("PDSYNC_PURE"):
        raise ImportError("pure kernels requested")
    from pdsync._kernels import _speedups
except ImportError:
    _speedups = None

BACKEND = "compiled" if _speedups is not None else "pure"


def _pick(n):
    if _speedups is not None and n <= _speedups.MAX_STATES:
        return _speedups
    return _pure


def subset_bfs(table, n, start, targets, max_nodes):
    return _pick(n).subset_bfs(table, n, start, list(targets), max_nodes)


def pair_merge_table(table, n):
    return _pick(n).pair_merge_table(table, n)
