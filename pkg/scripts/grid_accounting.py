#!/usr/bin/env python3
"""Sweep the distance-grid size and tabulate dense vs broadcast accounting.

The scalar-op ratio tends to 1/3 and the byte ratio levels off around 4.5x
as n grows, since the broadcast method only materializes full-grid buffers
for the final two stages.
"""

import argparse
import time

from ndview.demos import GridMethod, distance_grid


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 50])
    args = parser.parse_args()

    header = (f"{'n':>4} {'dense ops':>12} {'bcast ops':>12} {'op ratio':>9} "
              f"{'dense MB':>9} {'bcast MB':>9} {'byte ratio':>10} "
              f"{'dense s':>8} {'bcast s':>8}")
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        t0 = time.perf_counter()
        _, dense = distance_grid(n, GridMethod.DENSE)
        t_dense = time.perf_counter() - t0
        t0 = time.perf_counter()
        _, bcast = distance_grid(n, GridMethod.BROADCAST)
        t_bcast = time.perf_counter() - t0
        assert dense.checksum == bcast.checksum
        print(f"{n:>4} {dense.scalar_ops:>12} {bcast.scalar_ops:>12} "
              f"{bcast.scalar_ops / dense.scalar_ops:>9.4f} "
              f"{dense.bytes_allocated / 1e6:>9.2f} "
              f"{bcast.bytes_allocated / 1e6:>9.2f} "
              f"{dense.bytes_allocated / bcast.bytes_allocated:>10.3f} "
              f"{t_dense:>8.3f} {t_bcast:>8.3f}")


if __name__ == "__main__":
    main()
