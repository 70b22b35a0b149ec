"""Find the smallest |Y| from which lazy evaluation beats eager evaluation
on (S,?,?) and (?,?,O) patterns; this sets the automatic strategy threshold.

    python benchmarks/tune_threshold.py
"""

from __future__ import annotations

import sys

from ik2tree.bench import tune_lazy_threshold


def main() -> int:
    threshold, table = tune_lazy_threshold()
    print("ysize,eager_us,lazy_us")
    for ny, e, lz in table:
        print(f"{ny},{e:.2f},{lz:.2f}")
    print(f"# lazy wins from |Y| = {threshold}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
