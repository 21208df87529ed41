#!/usr/bin/env python3
"""Time the three polynomial-evaluation strategies across input sizes.

Reports wall clock plus allocation counts; the in-place strategy allocates
exactly two buffers regardless of size, the naive vectorized strategy four.
"""

import argparse
import time

from ndview import arange, float64
from ndview.counters import counting
from ndview.demos import EvalStrategy, evaluate_f


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[1000, 10000, 100000])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    for size in args.sizes:
        x = arange(0.0, float(size), 1.0, float64)
        for strategy in EvalStrategy:
            best = float("inf")
            for _ in range(args.repeat):
                with counting() as tally:
                    t0 = time.perf_counter()
                    evaluate_f(x, strategy)
                    best = min(best, time.perf_counter() - t0)
            print(f"size={size:>8} strategy={strategy.value:<12} "
                  f"best={best * 1e3:8.2f}ms buffers={tally.buffers_allocated} "
                  f"bytes={tally.bytes_allocated}")
        print()


if __name__ == "__main__":
    main()
