"""Compare the numba and numpy reduced-count kernels.

    python benchmarks/bench_dp.py [--repeat 5]

Both kernels are called directly, so LENSPEC_DISABLE_NUMBA does not apply here.
Outputs are checked for equality before timing.
"""

import argparse
import timeit

import numpy as np

from lenspec import kernels

CASES = [(11, (1, 2, 3)), (64, (1, 3, 7)), (40, (1, 3, 7, 11)), (60, (1, 7, 11, 13, 17)),
         (100, (1, 11, 21, 31, 41, 61)), (49, (1, 6, 15, 7))]


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is unavailable or disabled; nothing to compare")
    print(f"{'case':<28}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for q, s in CASES:
        arr = np.array(s, dtype=np.int64)
        a = kernels._reduced_counts_numba(q, arr)  # also triggers compilation
        b = kernels._reduced_counts_numpy(q, s)
        assert np.array_equal(a, b), (q, s)
        t_nb = min(timeit.repeat(lambda: kernels._reduced_counts_numba(q, arr), number=1, repeat=args.repeat))
        t_np = min(timeit.repeat(lambda: kernels._reduced_counts_numpy(q, s), number=1, repeat=args.repeat))
        label = f"L({q};{','.join(map(str, s))})"
        print(f"{label:<28}{t_nb * 1e3:>12.2f}{t_np * 1e3:>12.2f}{t_np / t_nb:>10.1f}x")


if __name__ == "__main__":
    main()
