import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdsync import kernels
from pdsync._kernels import _pure
from pdsync.automata import BudgetExceeded

try:
    from pdsync._kernels import _speedups
except ImportError:  # extension not built
    _speedups = None

compiled = pytest.mark.skipif(_speedups is None, reason="compiled kernels not built")


def random_table(rng, n, k, partial=0.0):
    return [[-1 if rng.random() < partial else rng.randrange(n) for _ in range(n)] for _ in range(k)]


def test_backend_name():
    assert kernels.BACKEND in ("compiled", "pure")


def test_pure_image():
    table = [[1, 2, 0], [0, 0, -1]]
    assert _pure.image(table, 0b011, 0) == 0b110
    assert _pure.image(table, 0b100, 1) == -1


@compiled
@given(st.integers(0, 2**31), st.integers(1, 10), st.integers(1, 3), st.sampled_from([0.0, 0.1, 0.3]))
def test_compiled_subset_bfs_matches_pure(seed, n, k, partial):
    rng = random.Random(seed)
    table = random_table(rng, n, k, partial)
    start = rng.randrange(1, 1 << n)
    targets = [1 << q for q in range(n)]
    a = _pure.subset_bfs(table, n, start, targets, 10**6)
    b = _speedups.subset_bfs(table, n, start, targets, 10**6)
    assert a == b


@compiled
@given(st.integers(0, 2**31), st.integers(1, 9), st.integers(1, 3))
def test_compiled_pair_table_matches_pure(seed, n, k):
    table = random_table(random.Random(seed), n, k)
    assert _pure.pair_merge_table(table, n) == _speedups.pair_merge_table(table, n)


@compiled
def test_compiled_budget():
    table = [[(i + 1) % 10 for i in range(10)], [1 if i == 0 else i for i in range(10)]]
    with pytest.raises(BudgetExceeded):
        _speedups.subset_bfs(table, 10, (1 << 10) - 1, [1], 5)


def test_large_instances_fall_back_to_pure():
    n = 70
    table = [[min(i + 1, n - 1) for i in range(n)]]
    start = (1 << n) - 1
    word = kernels.subset_bfs(table, n, start, [1 << (n - 1)], 10**5)
    assert word == [0] * (n - 1)
