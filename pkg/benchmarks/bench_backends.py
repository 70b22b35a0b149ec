"""Compiled kernels against the pure-Python fallback on identical queries.

Prints the per-backend CSV rows, then one speedup line per query class.

    python benchmarks/bench_backends.py [--queries N] [--seed S]
"""

from __future__ import annotations

import argparse
import sys

from ik2tree import _backend, bench


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not _backend.COMPILED_AVAILABLE:
        print("compiled kernels are not built; only the python backend is timed", file=sys.stderr)
    rows = bench.backends_suite(n_queries=args.queries, seed=args.seed)
    bench.write_csv(rows)
    by = {(r.query_class, r.backend): r for r in rows}
    for cls in dict.fromkeys(r.query_class for r in rows):
        if (cls, "compiled") in by:
            py, c = by[(cls, "python")], by[(cls, "compiled")]
            print(f"# {cls}: compiled {py.us_per_query / c.us_per_query:.1f}x faster "
                  f"({c.us_per_query:.1f} vs {py.us_per_query:.1f} us/query)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
