"""Compare the compiled subset-lattice kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py --sizes 8 10 12 --repeat 3
"""

import argparse
import random
import statistics
import time

from pdsync._kernels import _pure
from pdsync.dfasync import cerny

try:
    from pdsync._kernels import _speedups
except ImportError:
    _speedups = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times), result


def random_table(rng, n, k):
    return [[rng.randrange(n) for _ in range(n)] for _ in range(k)]


def cases(sizes, seed):
    rng = random.Random(seed)
    for n in sizes:
        c = cerny(n)
        full = (1 << n) - 1
        yield f"subset_bfs cerny({n})", "subset_bfs", (c.table(), n, full, [1 << q for q in range(n)], 10**7)
    for n in sizes:
        # a cycle and a transposition generate every permutation, so from a
        # half-size start the search walks all C(n, n/2) subsets; no target
        n1 = n + 4
        perms = [[(i + 1) % n1 for i in range(n1)], [1, 0] + list(range(2, n1))]
        half = (1 << (n1 // 2)) - 1
        yield f"subset_bfs perm({n1}) full", "subset_bfs", (perms, n1, half, [], 10**7)
    for n in sizes:
        n2 = n * 4
        yield f"pair_merge random({n2})", "pair_merge_table", (random_table(rng, n2, 2), n2)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[8, 10, 12])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    if _speedups is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
    print(f"{'case':<28}{'pure (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    for label, name, call in cases(args.sizes, args.seed):
        tp, _, rp = best_of(lambda: getattr(_pure, name)(*call), args.repeat)
        if _speedups is None:
            print(f"{label:<28}{tp:>12.4f}{'-':>14}{'-':>10}")
            continue
        tc, _, rc = best_of(lambda: getattr(_speedups, name)(*call), args.repeat)
        if rp != rc:
            raise SystemExit(f"{label}: backends disagree")
        print(f"{label:<28}{tp:>12.4f}{tc:>14.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
