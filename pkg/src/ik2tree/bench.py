"""Benchmark suites comparing the Ik2-tree with per-value k2-tree baselines.

Every suite returns ``Row`` records; ``write_csv`` prints them with the
columns ``query_class, backend, us_per_query, us_per_result, queries,
results``.  Times are wall-clock through the public query API.

Query workloads bind their constant slots from the data so that queries
are not trivially empty.  With ``sampling="term"`` (the default) every
distinct binding is equally likely; ``"triple"`` samples stored triples,
which favours heavy subjects and objects.
"""

from __future__ import annotations

import csv
import statistics
import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import _backend
from .generators import commnet_like, rdf_like
from .ik2tree import IK2Tree
from .k2tree import MultiK2Tree
from .layout import LevelSchedule
from .temporal import Instant, Interval, MultiDiffK2Tree, Semantics, TemporalIndex

PATTERN_CLASSES = ("(S,P,O)", "(S,P,?)", "(S,?,O)", "(S,?,?)",
                   "(?,P,O)", "(?,P,?)", "(?,?,O)", "(?,?,?)")

TEMPORAL_CLASSES = ("instant-direct", "instant-reverse", "weak-direct", "weak-reverse",
                    "strong-direct", "strong-reverse")


@dataclass
class Row:
    query_class: str
    backend: str
    us_per_query: float
    us_per_result: float
    queries: int
    results: int


def write_csv(rows: Sequence[Row], out=None) -> None:
    out = out or sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f.name for f in fields(Row)])
    for r in rows:
        d = asdict(r)
        d["us_per_query"] = f"{r.us_per_query:.3f}"
        d["us_per_result"] = f"{r.us_per_result:.3f}" if r.results else "nan"
        w.writerow(d.values())


def time_queries(fn: Callable, queries: Sequence) -> tuple[float, int]:
    """Seconds spent answering every query once, and the total result count."""
    results = 0
    t0 = time.perf_counter()
    for q in queries:
        results += len(fn(q))
    return time.perf_counter() - t0, results


def _row(cls: str, backend: str, seconds: float, n: int, results: int) -> Row:
    us = seconds * 1e6
    return Row(cls, backend, us / max(n, 1), us / results if results else float("nan"), n, results)


def repeat_median(fn: Callable, queries: Sequence, runs: int = 5) -> tuple[float, int, list[float]]:
    """Median seconds over ``runs`` passes, the result count and every pass time."""
    times, results = [], 0
    for _ in range(runs):
        dt, results = time_queries(fn, queries)
        times.append(dt)
    return statistics.median(times), results, times


# -- RDF-style patterns ---------------------------------------------------

def pattern_queries(triples: np.ndarray, cls: str, n: int, seed=0,
                    sampling: str = "term") -> list[tuple]:
    """``n`` id-level patterns of the given class, e.g. ``"(S,?,?)"``.

    Bound slots come from stored triples, so every query has a result.
    """
    rng = np.random.default_rng(seed)
    bound = [i for i, ch in enumerate(cls.strip("()").split(",")) if ch != "?"]
    if not len(triples):
        return []
    if not bound:
        picks = np.zeros((n, 3), dtype=np.int64)
    elif sampling == "term":
        keys = np.unique(triples[:, bound], axis=0)
        picks = np.zeros((n, 3), dtype=np.int64)
        picks[:, bound] = keys[rng.integers(0, len(keys), n)]
    elif sampling == "triple":
        picks = triples[rng.integers(0, len(triples), n)]
    else:
        raise ValueError(f"unknown sampling {sampling!r}")
    return [tuple(int(v) if i in bound else None for i, v in enumerate(row)) for row in picks.tolist()]


def rdf_suite(triples: np.ndarray, nx: int, ysize: int, nz: int, n_queries: int = 500,
              seed: int = 0, classes: Sequence[str] = PATTERN_CLASSES,
              schedule: LevelSchedule | None = None, sampling: str = "term",
              include_baseline: bool = True) -> list[Row]:
    """Every pattern class against the Ik2-tree (eager, and lazy where it
    applies) and the multiple-k2-tree baseline."""
    if schedule is None:
        schedule = LevelSchedule.hybrid(max(nx, nz, 1))
    tree = IK2Tree.build(triples, nx, ysize, nz, schedule)
    base = MultiK2Tree.build(triples, nx, ysize, nz, schedule) if include_baseline else None
    rows = []
    for i, cls in enumerate(classes):
        queries = pattern_queries(triples, cls, n_queries, seed + i, sampling)
        runs = [("ik2tree-eager", lambda q: tree.query(q, "eager"))]
        if cls.split(",")[1] == "?":
            runs.append(("ik2tree-lazy", lambda q: tree.query(q, "lazy")))
        if base is not None:
            runs.append(("mk2tree", base.query))
        for name, fn in runs:
            dt, res = time_queries(fn, queries)
            rows.append(_row(cls, name, dt, len(queries), res))
    return rows


def tune_lazy_threshold(ysizes: Sequence[int] = (8, 16, 32, 64, 128, 256, 512, 1024),
                        n_terms: int = 20_000, triples_per_predicate: int = 200,
                        n_queries: int = 300, seed: int = 0, runs: int = 3):
    """Smallest |Y| from which lazy beats eager on ``(S,?,?)`` and ``(?,?,O)``.

    Returns ``(threshold, table)`` where ``table`` lists
    ``(ysize, eager_us, lazy_us)`` per size; ``threshold`` is ``None`` if
    lazy never wins.
    """
    table = []
    for ny in ysizes:
        triples = rdf_like(n_terms, ny, ny * triples_per_predicate, seed)
        tree = IK2Tree.build(triples, n_terms, ny, n_terms, LevelSchedule.hybrid(n_terms))
        qs = (pattern_queries(triples, "(S,?,?)", n_queries, seed)
              + pattern_queries(triples, "(?,?,O)", n_queries, seed + 1))
        eager, _, _ = repeat_median(lambda q: tree.query(q, "eager"), qs, runs)
        lazy, _, _ = repeat_median(lambda q: tree.query(q, "lazy"), qs, runs)
        table.append((ny, eager / len(qs) * 1e6, lazy / len(qs) * 1e6))
    threshold = None
    for ny, e, lz in reversed(table):
        if lz < e:
            threshold = ny
        else:
            break
    return threshold, table


# -- temporal --------------------------------------------------------------

def temporal_queries(n_nodes: int, n_instants: int, cls: str, n: int, seed=0,
                     interval: int = 10) -> list[tuple]:
    """``(x, z, when)`` triples for a temporal query class."""
    rng = np.random.default_rng(seed)
    kind, direction = cls.split("-")
    out = []
    for _ in range(n):
        node = int(rng.integers(0, n_nodes))
        tl = int(rng.integers(0, n_instants))
        tr = min(n_instants - 1, tl + interval - 1)
        if kind == "instant":
            when = Instant(tl)
        else:
            when = Interval(tl, tr, Semantics.WEAK if kind == "weak" else Semantics.STRONG)
        out.append((node, None, when) if direction == "direct" else (None, node, when))
    return out


def temporal_suite(changes: np.ndarray, n_nodes: int, n_instants: int, n_queries: int = 500,
                   seed: int = 0, classes: Sequence[str] = TEMPORAL_CLASSES,
                   schedule: LevelSchedule | None = None, interval: int = 10,
                   include_baseline: bool = True) -> list[Row]:
    idx = TemporalIndex.build(changes, n_nodes, n_instants, schedule)
    base = MultiDiffK2Tree.build(changes, n_nodes, n_instants, schedule) if include_baseline else None
    rows = []
    for i, cls in enumerate(classes):
        queries = temporal_queries(n_nodes, n_instants, cls, n_queries, seed + i, interval)
        runs = [("ik2tree", lambda q: idx.query(*q))]
        if base is not None:
            runs.append(("mk2tree", lambda q: base.query(*q)))
        for name, fn in runs:
            dt, res = time_queries(fn, queries)
            rows.append(_row(cls, name, dt, len(queries), res))
    return rows


# -- compiled vs pure Python -------------------------------------------------

def backends_suite(n_terms: int = 2000, ysize: int = 64, n_triples: int = 20_000,
                   n_queries: int = 100, seed: int = 0) -> list[Row]:
    """The same queries through each available kernel backend."""
    triples = rdf_like(n_terms, ysize, n_triples, seed)
    tree = IK2Tree.build(triples, n_terms, ysize, n_terms, LevelSchedule.hybrid(n_terms))
    changes = commnet_like(200, 500, 5000, seed)
    idx = TemporalIndex.build(changes, 200, 500)
    work = [
        ("(S,?,?)-eager", lambda q: tree.query(q, "eager"),
         pattern_queries(triples, "(S,?,?)", n_queries, seed)),
        ("(S,?,?)-lazy", lambda q: tree.query(q, "lazy"),
         pattern_queries(triples, "(S,?,?)", n_queries, seed)),
        ("(?,P,?)-eager", lambda q: tree.query(q, "eager"),
         pattern_queries(triples, "(?,P,?)", n_queries, seed + 1)),
        ("weak-direct", lambda q: idx.query(*q), temporal_queries(200, 500, "weak-direct", n_queries, seed)),
    ]
    rows = []
    for name in _backend.available():
        with _backend.use(name):
            for cls, fn, qs in work:
                dt, res = time_queries(fn, qs)
                rows.append(_row(cls, name, dt, len(qs), res))
    return rows
