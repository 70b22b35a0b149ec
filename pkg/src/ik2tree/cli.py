"""Command line: build, query, stats and bench.

Input formats
  plain     one triple per line, ``x y z`` as non-negative integers
  rdf       one triple per line, three whitespace-separated terms
  temporal  one change per line, ``x z t``

Lines starting with ``#`` are comments in the plain and temporal formats.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import _backend, bench
from .errors import IK2Error, InputError, ParseError
from .generators import commnet_like, rdf_like
from .ik2tree import (MODE_PLAIN, MODE_RDF, MODE_TEMPORAL, Any, Fixed, IK2Tree, Range,
                      TriplePattern)
from .layout import LevelSchedule
from .rdf import DEFAULT_LAZY_THRESHOLD, RdfDataset, choose_strategy, evaluate, read_triples
from .temporal import Instant, Interval, Semantics, TemporalIndex, read_changes

MODES = {"plain": MODE_PLAIN, "rdf": MODE_RDF, "temporal": MODE_TEMPORAL}
MODE_NAMES = {v: k for k, v in MODES.items()}


def parse_plain(lines) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        toks = text.split()
        if len(toks) != 3:
            raise ParseError(f"expected 3 fields 'x y z', got {len(toks)}", lineno)
        try:
            row = tuple(int(t) for t in toks)
        except ValueError:
            raise ParseError(f"non-integer field in {text!r}", lineno) from None
        if min(row) < 0:
            raise ParseError(f"negative id in {text!r}", lineno)
        rows.append(row)
    return np.unique(np.asarray(rows, dtype=np.int64).reshape(-1, 3), axis=0)


def _dims(text: str | None, count: int) -> list[int] | None:
    if text is None:
        return None
    try:
        dims = [int(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"bad dimension list {text!r}") from None
    if len(dims) != count or min(dims) < 1:
        raise InputError(f"expected {count} positive sizes, got {text!r}")
    return dims


def _schedule(text: str | None, n: int, default):
    return default(n) if text is None else LevelSchedule.parse(text, n)


def build_index(path, mode: str, k: str | None = None, dims: str | None = None):
    """Build the in-memory index for ``mode`` from a text file."""
    if mode == "rdf":
        ds = read_triples(path)
        if k is not None:
            ds = read_triples(path, LevelSchedule.parse(k, max(ds.index.nx, 1)))
        return ds
    if mode == "temporal":
        changes = read_changes(path)
        arr = np.asarray([tuple(c) for c in changes], dtype=np.int64).reshape(-1, 3)
        given = _dims(dims, 2)
        if given:
            n_nodes, n_instants = given
        else:
            n_nodes = int(max(arr[:, 0].max(), arr[:, 1].max())) + 1 if len(arr) else 1
            n_instants = int(arr[:, 2].max()) + 1 if len(arr) else 1
        sched = None if k is None else LevelSchedule.parse(k, n_nodes)
        return TemporalIndex.build(arr, n_nodes, n_instants, sched)
    with open(path, encoding="utf-8") as fh:
        arr = parse_plain(fh)
    given = _dims(dims, 3)
    if given:
        nx, ny, nz = given
    else:
        nx, ny, nz = ((int(v) + 1 for v in arr.max(axis=0)) if len(arr) else (1, 1, 1))
    sched = _schedule(k, max(nx, nz), LevelSchedule.uniform)
    return IK2Tree.build(arr, nx, ny, nz, sched)


def _inner(index) -> IK2Tree:
    if isinstance(index, RdfDataset):
        return index.index
    if isinstance(index, TemporalIndex):
        return index.inner
    return index


def stats_line(index) -> str:
    tree = _inner(index)
    n = len(tree)
    bpt = f"{tree.size_bits / n:.3f}" if n else "nan"
    return (f"triples={n} nx={tree.nx} ysize={tree.ysize} nz={tree.nz} "
            f"k={','.join(map(str, tree.schedule.ks))} |T|={len(tree.T)} |L|={len(tree.L)} "
            f"bits_per_triple={bpt}")


def save_index(index, out) -> None:
    if isinstance(index, RdfDataset):
        index.save(out)
    elif isinstance(index, TemporalIndex):
        index.save(out)
    else:
        Path(out).write_bytes(index.to_bytes(MODE_PLAIN))


def load_index(path):
    data = Path(path).read_bytes()
    tree, mode = IK2Tree.from_bytes(data)
    if mode == MODE_RDF:
        return RdfDataset.load(path)
    if mode == MODE_TEMPORAL:
        return TemporalIndex.from_bytes(data)
    return tree


def parse_slot(tok: str):
    """``?`` (any), ``?lo-hi`` (closed range) or an integer."""
    if tok == "?":
        return Any
    if tok.startswith("?"):
        lo, sep, hi = tok[1:].partition("-")
        if not sep:
            raise InputError(f"bad range slot {tok!r}; expected ?lo-hi")
        try:
            return Range(int(lo), int(hi))
        except ValueError:
            raise InputError(f"bad range slot {tok!r}") from None
    try:
        return Fixed(int(tok))
    except ValueError:
        raise InputError(f"bad slot {tok!r}; expected ?, ?lo-hi or an integer") from None


def run_query(index, tokens: list[str], strategy: str = "auto", at: int | None = None,
              interval: tuple[int, int] | None = None, semantics: str = "weak",
              threshold: int = DEFAULT_LAZY_THRESHOLD) -> list[str]:
    """Result lines for a query against any kind of index."""
    if isinstance(index, RdfDataset):
        if len(tokens) != 3:
            raise InputError("an rdf query needs 3 slots")
        return [" ".join(t) for t in evaluate(index, tokens, strategy, threshold)]
    if isinstance(index, TemporalIndex):
        if len(tokens) != 2:
            raise InputError("a temporal query needs 2 slots: x z")
        x, z = (parse_slot(t) for t in tokens)
        if (at is None) == (interval is None):
            raise InputError("give exactly one of --at or --interval")
        when = Instant(at) if at is not None else Interval(*interval, Semantics(semantics))
        return [f"{a} {b}" for a, b in index.query(x, z, when)]
    if len(tokens) != 3:
        raise InputError("a plain query needs 3 slots: x y z")
    pattern = TriplePattern(*(parse_slot(t) for t in tokens))
    if strategy == "auto":
        strategy = choose_strategy(pattern, index.ysize, threshold)
    rows = index.query(pattern, strategy)
    return [f"{x} {y} {z}" for x, y, z in rows]


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _rate(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"must be in (0, 1]: {v}")
    return v


def cmd_build(args) -> int:
    index = build_index(args.input, args.mode, args.k, args.dims)
    save_index(index, args.output)
    print(stats_line(index))
    return 0


def cmd_query(args) -> int:
    index = load_index(args.index)
    lines = run_query(index, args.pattern, args.strategy, args.at, args.interval,
                      args.semantics, args.threshold)
    out = sys.stdout
    for line in lines:
        out.write(line + "\n")
    print(f"# {len(lines)} results", file=sys.stderr)
    return 0


def cmd_stats(args) -> int:
    index = load_index(args.index)
    mode = "rdf" if isinstance(index, RdfDataset) else (
        "temporal" if isinstance(index, TemporalIndex) else "plain")
    print(f"mode={mode} {stats_line(index)} backend={_backend.current()}")
    return 0


def cmd_bench(args) -> int:
    if args.suite == "rdf-patterns":
        if args.input:
            ds = read_triples(args.input)
            triples = np.asarray(ds.index.triples(), dtype=np.int64).reshape(-1, 3)
            n, ny = ds.index.nx, ds.index.ysize
        else:
            triples = rdf_like(args.terms, args.predicates, args.triples, args.seed)
            n, ny = args.terms, args.predicates
        sched = None if args.k is None else LevelSchedule.parse(args.k, n)
        rows = bench.rdf_suite(triples, n, ny, n, args.queries, args.seed, schedule=sched,
                               sampling=args.sampling)
    elif args.suite == "temporal":
        if args.input:
            arr = np.asarray([tuple(c) for c in read_changes(args.input)], dtype=np.int64).reshape(-1, 3)
            nodes = int(arr[:, :2].max()) + 1 if len(arr) else 1
            instants = int(arr[:, 2].max()) + 1 if len(arr) else 1
        else:
            nodes, instants = args.nodes, args.instants
            arr = commnet_like(nodes, instants, args.contacts, args.seed)
        sched = None if args.k is None else LevelSchedule.parse(args.k, nodes)
        rows = bench.temporal_suite(arr, nodes, instants, args.queries, args.seed,
                                    schedule=sched, interval=args.interval)
    else:
        rows = bench.backends_suite(n_queries=args.queries, seed=args.seed)
    bench.write_csv(rows)
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ik2tree", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an index file from text")
    b.add_argument("input")
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--mode", choices=sorted(MODES), default="plain")
    b.add_argument("--k", help="K schedule: one value (uniform) or a comma-separated prefix")
    b.add_argument("--dims", help="plain: NX,NY,NZ; temporal: NODES,INSTANTS (default: from data)")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="run one pattern against an index")
    q.add_argument("index")
    q.add_argument("pattern", nargs="+", help="slots: ?, ?lo-hi (plain) or a literal")
    q.add_argument("--strategy", choices=("auto", "eager", "lazy"), default="auto")
    q.add_argument("--threshold", type=_positive, default=DEFAULT_LAZY_THRESHOLD,
                   help="minimum |Y| for automatic lazy evaluation")
    q.add_argument("--at", type=int, help="temporal: time instant")
    q.add_argument("--interval", type=int, nargs=2, metavar=("TL", "TR"),
                   help="temporal: closed time interval")
    q.add_argument("--semantics", choices=("weak", "strong"), default="weak")
    q.set_defaults(func=cmd_query)

    s = sub.add_parser("stats", help="print index statistics")
    s.add_argument("index")
    s.set_defaults(func=cmd_stats)

    be = sub.add_parser("bench", help="benchmark against the multiple-k2-tree baseline (CSV)")
    be.add_argument("--suite", choices=("rdf-patterns", "temporal", "backends"), default="rdf-patterns")
    be.add_argument("--input", help="triple file (rdf-patterns) or change log (temporal)")
    be.add_argument("--queries", type=_positive, default=500)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--k")
    be.add_argument("--sampling", choices=("term", "triple"), default="term")
    be.add_argument("--terms", type=_positive, default=20_000)
    be.add_argument("--predicates", type=_positive, default=256)
    be.add_argument("--triples", type=_positive, default=100_000)
    be.add_argument("--nodes", type=_positive, default=1000)
    be.add_argument("--instants", type=_positive, default=10_000)
    be.add_argument("--contacts", type=_positive, default=250_000)
    be.add_argument("--interval", type=_positive, default=10)
    be.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IK2Error, OSError) as exc:
        print(f"ik2tree: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
