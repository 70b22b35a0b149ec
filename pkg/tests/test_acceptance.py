"""Acceptance checks, one test per criterion.

Every test records a PASS/FAIL line that is printed in the terminal summary.
The performance checks time the public query API with the default kernels.
"""

from __future__ import annotations

import itertools
import math
import statistics
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import EXAMPLE_TRIPLES, EXAMPLE_CHANGES, LAZY_RESULT, LAZY_TRIPLES, record
from ik2tree import Any, Fixed, IK2Tree, Range, TriplePattern
from ik2tree.bench import pattern_queries, temporal_queries, time_queries
from ik2tree.cli import load_index, save_index
from ik2tree.errors import FormatError
from ik2tree.generators import commnet_like, evolving_graph, random_triples, rdf_like, rdf_lines
from ik2tree.k2tree import K2Tree, MultiK2Tree
from ik2tree.layout import LevelSchedule
from ik2tree.oracle import PlainTripleStore, TemporalOracle, oracle_eval
from ik2tree.rdf import RdfDataset, ingest
from ik2tree.temporal import Instant, Interval, MultiDiffK2Tree, Semantics, TemporalIndex

SHAPES = ["".join(s) for s in itertools.product("FRA", repeat=3)]


def random_constraint(rng, kind, n):
    if kind == "F":
        return Fixed(int(rng.integers(0, n)))
    if kind == "R":
        lo = int(rng.integers(0, n))
        return Range(lo, int(rng.integers(lo, n)))
    return Any


def random_pattern(rng, shape, dims):
    return TriplePattern(*(random_constraint(rng, k, n) for k, n in zip(shape, dims)))


def oracle_corpus(n_relations=200, n_patterns=108, seed=2024):
    """Random relations (dims up to 64 x 256 x 64, up to 10**4 triples) with
    patterns cycling through all 27 constraint shapes."""
    rng = np.random.default_rng(seed)
    for i in range(n_relations):
        nx, nz = (int(v) for v in rng.integers(1, 65, 2))
        ny = int(rng.integers(1, 257))
        n = int(rng.integers(0, 10_001))
        data = random_triples(nx, ny, nz, n, rng)
        sched = [LevelSchedule.uniform(max(nx, nz)), LevelSchedule.uniform(max(nx, nz), 4),
                 LevelSchedule.from_prefix(max(nx, nz), [4, 2])][i % 3]
        patterns = [random_pattern(rng, SHAPES[j % 27], (nx, ny, nz)) for j in range(n_patterns)]
        yield data, (nx, ny, nz), sched, patterns


# -- 1 ----------------------------------------------------------------------

def test_criterion_01_worked_examples():
    t0 = time.perf_counter()
    problems = []
    tree = IK2Tree.build(EXAMPLE_TRIPLES, 8, 3, 8, LevelSchedule.uniform(8))
    n0 = tree.root_cursors()[0]
    n3 = tree.children(n0)[3]
    n4 = tree.children(n3)[0]
    n5 = tree.root_cursors()[2]
    n6 = tree.children(n5)[2]
    n7 = tree.children(n6)[0]
    got = [tree.node_bits(n) for n in (n0, n3, n4, n5, n6, n7)]
    if got != [[0, 1, 1], [1, 0], [1], [0, 1, 1], [1, 0], [1]]:
        problems.append(f"node bitmaps {got}")
    if not tree.contains((6, 1, 0)):
        problems.append("(6,1,0) missing")
    for strategy in ("eager", "lazy"):
        if tree.query((2, None, 2), strategy) != [(2, 1, 2)]:
            problems.append(f"(2,?,2) {strategy}")

    lazy = IK2Tree.build(LAZY_TRIPLES, 8, 3, 8, LevelSchedule.uniform(8))
    if set(lazy.query((None, None, None), "lazy")) != LAZY_RESULT:
        problems.append("lazy walk-through result set")

    idx = TemporalIndex.build(EXAMPLE_CHANGES, 8, 3, LevelSchedule.uniform(8))
    histories = {(6, 5): [True, True, True], (7, 5): [True, True, False]}
    for (x, z), want in histories.items():
        if [idx.active_at(x, z, t) for t in range(3)] != want:
            problems.append(f"history of ({x},{z})")
    inner = idx.inner
    p = inner.children(inner.root_cursors()[3])[2]
    leaves = inner.children(p)
    if [inner.node_bits(n) for n in (p, leaves[1], leaves[3])] != [[1, 0, 1], [1, 0], [1, 1]]:
        problems.append("temporal node bitmaps")
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 1.0
    record(1, ok, f"worked examples, {elapsed * 1e3:.0f} ms {problems or ''}")
    assert ok, problems


# -- 2 and 3 -----------------------------------------------------------------

def test_criterion_02_eager_matches_oracle():
    t0 = time.perf_counter()
    shapes, mismatches, checked = set(), 0, 0
    for data, dims, sched, patterns in oracle_corpus():
        tree = IK2Tree.build(data, *dims, sched)
        store = PlainTripleStore.build(data, *dims)
        for p in patterns:
            shapes.add(p.shape())
            checked += 1
            if tree.query_eager(p) != oracle_eval(store, p):
                mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and len(shapes) == 27 and elapsed < 60
    record(2, ok, f"{checked} eager queries over 200 relations, {len(shapes)} shapes, "
                  f"{mismatches} mismatches, {elapsed:.1f} s")
    assert ok


def test_criterion_03_lazy_matches_eager():
    mismatches, checked = 0, 0
    for data, dims, sched, patterns in oracle_corpus():
        tree = IK2Tree.build(data, *dims, sched)
        for p in patterns:
            if isinstance(p.y, Fixed):
                continue
            checked += 1
            if tree.query_lazy(p) != tree.query_eager(p):
                mismatches += 1
    ok = mismatches == 0
    record(3, ok, f"{checked} lazy queries (Any/Range y), {mismatches} mismatches")
    assert ok


# -- 4 -----------------------------------------------------------------------

def test_criterion_04_bit_reorganisation():
    rng = np.random.default_rng(44)
    bad = 0
    for i in range(50):
        nx, nz = (int(v) for v in rng.integers(1, 65, 2))
        ny = int(rng.integers(1, 65))
        data = random_triples(nx, ny, nz, int(rng.integers(0, 3000)), rng)
        sched = LevelSchedule.hybrid(max(nx, nz)) if i % 2 else LevelSchedule.uniform(max(nx, nz), 3)
        tree = IK2Tree.build(data, nx, ny, nz, sched)
        per = [K2Tree.build(data[data[:, 1] == y][:, [0, 2]], nx, nz, sched) for y in range(ny)]
        bits = sum(len(t.T) + len(t.L) for t in per)
        ones = sum(t.T.ones + t.L.ones for t in per)
        bad += (tree.size_bits != bits) or (tree.popcount != ones)
    record(4, bad == 0, f"50 relations, {bad} with differing bit or popcount totals")
    assert bad == 0


# -- 5 -----------------------------------------------------------------------

def test_criterion_05_space_bound():
    rng = np.random.default_rng(55)
    violations, cases = [], 0
    for n in (64, 256, 1024):
        for density in (1e-3, 3e-3, 1e-2, 3e-2, 1e-1):
            for _ in range(3):
                m = max(1, int(round(density * n * n)))
                cells = np.unique(rng.integers(0, n * n, m))
                pairs = np.stack([cells // n, cells % n], axis=1)
                tree = K2Tree.build(pairs, n, n, LevelSchedule.uniform(n, 2))
                e = len(tree)
                k2 = 4
                bound = k2 * e * (math.ceil(math.log(n * n / e, k2)) + 2)
                cases += 1
                if tree.size_bits > bound:
                    violations.append((n, density, tree.size_bits, bound))
    record(5, not violations, f"{cases} relations, {len(violations)} above the bound")
    assert not violations, violations


# -- 6 -----------------------------------------------------------------------

def test_criterion_06_temporal_oracle():
    rng = np.random.default_rng(66)
    mismatches, containment, queries = 0, 0, 0
    per_kind = 500
    for _ in range(50):
        n = int(rng.integers(2, 201))
        ti = int(rng.integers(2, 201))
        rate = float(rng.uniform(0.01, 0.25))
        changes = evolving_graph(n, ti, rate, rng, density=float(rng.uniform(0.005, 0.05)))
        idx = TemporalIndex.build(changes, n, ti)
        oracle = TemporalOracle(changes, n, ti)
        for q in range(per_kind):
            node = int(rng.integers(0, n))
            tl = int(rng.integers(0, ti))
            tr = int(rng.integers(tl, min(ti, tl + 40)))
            t = int(rng.integers(tl, tr + 1))
            slots = ((node, None), (None, node))
            for x, z in slots:
                res = {}
                for name, when in (("instant", Instant(t)), ("weak", Interval(tl, tr, Semantics.WEAK)),
                                   ("strong", Interval(tl, tr, Semantics.STRONG))):
                    got = idx.query(x, z, when)
                    queries += 1
                    if got != oracle.query(x, z, when):
                        mismatches += 1
                    res[name] = set(got)
                if not (res["strong"] <= res["instant"] <= res["weak"]):
                    containment += 1
    ok = mismatches == 0 and containment == 0
    record(6, ok, f"{queries} temporal queries on 50 graphs, {mismatches} mismatches, "
                  f"{containment} containment violations")
    assert ok


# -- 7, 8, 9: directional performance ------------------------------------------

def per_run_ratios(slow_fn, fast_fn, queries, runs=5):
    """Interleaved passes; returns per-run slow/fast ratios and median times."""
    slow_t, fast_t = [], []
    for _ in range(runs):
        slow_t.append(time_queries(slow_fn, queries)[0])
        fast_t.append(time_queries(fast_fn, queries)[0])
    ratios = [s / f for s, f in zip(slow_t, fast_t)]
    return ratios, statistics.median(slow_t), statistics.median(fast_t)


@pytest.fixture(scope="module")
def rdf256():
    n = 20_000
    t = rdf_like(n, 256, 150_000, seed=7)
    sched = LevelSchedule.hybrid(n)
    return t, IK2Tree.build(t, n, 256, n, sched), MultiK2Tree.build(t, n, 256, n, sched)


def test_criterion_07_unbounded_predicate_vs_baseline(rdf256):
    triples, tree, base = rdf256
    parts, ok = [], True
    for cls in ("(S,?,?)", "(?,?,O)"):
        qs = pattern_queries(triples, cls, 400, seed=7)
        ratios, slow, fast = per_run_ratios(base.query, tree.query, qs)
        med = statistics.median(ratios)
        cls_ok = med >= 2.0 and max(ratios) >= 1.5
        ok &= cls_ok
        parts.append(f"{cls} median {med:.2f}x (min {min(ratios):.2f}x)")
    record(7, ok, f"|Y|=256, {len(triples)} triples, ik2tree vs multiple k2-trees: "
                  + "; ".join(parts))
    assert ok


def test_criterion_08_lazy_vs_eager():
    n, ny = 20_000, 4096
    t = rdf_like(n, ny, 300_000, seed=8)
    tree = IK2Tree.build(t, n, ny, n, LevelSchedule.hybrid(n))
    parts, ok = [], True
    for cls in ("(S,?,?)", "(?,?,O)"):
        qs = pattern_queries(t, cls, 400, seed=8)
        ratios, eager, lazy = per_run_ratios(lambda q: tree.query(q, "eager"),
                                             lambda q: tree.query(q, "lazy"), qs)
        frac = lazy / eager
        ok &= frac <= 0.67
        parts.append(f"{cls} lazy/eager {frac:.2f}")
    record(8, ok, f"|Y|={ny}, {len(t)} triples: " + "; ".join(parts))
    assert ok


def test_criterion_09_temporal_vs_baseline():
    nodes, instants = 1000, 10_000
    log = commnet_like(nodes, instants, 250_000, seed=9)
    idx = TemporalIndex.build(log, nodes, instants)
    base = MultiDiffK2Tree.build(log, nodes, instants)
    parts, worst = [], math.inf
    for i, cls in enumerate(("instant-direct", "instant-reverse", "weak-direct", "weak-reverse",
                             "strong-direct", "strong-reverse")):
        qs = temporal_queries(nodes, instants, cls, 100, seed=90 + i)
        _, slow, fast = per_run_ratios(lambda q: base.query(*q), lambda q: idx.query(*q), qs)
        worst = min(worst, slow / fast)
        parts.append(f"{cls} {slow / fast:.0f}x")
    ok = worst >= 5.0
    record(9, ok, f"{len(log)} changes over {instants} instants: " + ", ".join(parts))
    assert ok


# -- 10 ----------------------------------------------------------------------

def full_scan(index):
    if isinstance(index, RdfDataset):
        return index.triples()
    if isinstance(index, TemporalIndex):
        return [index.query(None, None, Instant(t)) for t in range(index.n_instants)]
    return index.triples()


def test_criterion_10_serialization(tmp_path):
    rng = np.random.default_rng(10)
    failures = []
    for i in range(20):
        mode = ("plain", "rdf", "temporal")[i % 3]
        if mode == "plain":
            dims = [int(v) for v in rng.integers(1, 100, 3)]
            index = IK2Tree.build(random_triples(*dims, int(rng.integers(0, 3000)), rng), *dims,
                                  LevelSchedule.hybrid(max(dims[0], dims[2])))
        elif mode == "rdf":
            index = ingest(rdf_lines(rdf_like(300, 20, int(rng.integers(1, 2000)), rng)))
        else:
            n, ti = int(rng.integers(2, 60)), int(rng.integers(1, 40))
            index = TemporalIndex.build(evolving_graph(n, ti, 0.1, rng), n, ti)
        path = tmp_path / f"d{i}.ik2"
        save_index(index, path)
        back = load_index(path)
        if type(back) is not type(index) or full_scan(back) != full_scan(index):
            failures.append((i, mode))
        data = path.read_bytes()
        for broken in (b"JUNK" + data[4:], data[: len(data) // 2], data[:10]):
            path.write_bytes(broken)
            try:
                load_index(path)
                failures.append((i, mode, "accepted a damaged file"))
            except FormatError:
                pass
    record(10, not failures, f"20 datasets over 3 modes round-trip, damaged files rejected "
                             f"{failures or ''}")
    assert not failures


# -- 11 ----------------------------------------------------------------------

def cli(*args):
    return subprocess.run([sys.executable, "-m", "ik2tree.cli", *map(str, args)],
                          capture_output=True, text=True, check=True).stdout


def test_criterion_11_determinism(tmp_path):
    rng = np.random.default_rng(11)
    plain = tmp_path / "p.txt"
    plain.write_text("".join(f"{x} {y} {z}\n" for x, y, z in random_triples(50, 20, 50, 800, rng)))
    rdf = tmp_path / "r.nt"
    rdf.write_text("\n".join(rdf_lines(rdf_like(500, 30, 3000, rng))) + "\n")
    temporal = tmp_path / "t.txt"
    temporal.write_text("".join(f"{x} {z} {t}\n" for x, z, t in evolving_graph(30, 20, 0.1, rng)))
    jobs = [
        ("plain", plain, [["?", "?", "?"], ["3", "?", "?"]], []),
        ("rdf", rdf, [["?", "?", "?"], ["<r1>", "?", "?"]], []),
        ("temporal", temporal, [["?", "?"], ["4", "?"]], ["--interval", "2", "9"]),
    ]
    diffs = []
    for mode, src, patterns, extra in jobs:
        outs = []
        for run in range(2):
            out = tmp_path / f"{mode}{run}.ik2"
            stats = cli("build", src, "-o", out, "--mode", mode)
            answers = [cli("query", out, *p, *extra) for p in patterns]
            files = [out.read_bytes()]
            if mode == "rdf":
                files += [(tmp_path / f"{mode}{run}.ik2.so.dict").read_bytes(),
                          (tmp_path / f"{mode}{run}.ik2.p.dict").read_bytes()]
            outs.append((stats, answers, files))
        if outs[0] != outs[1]:
            diffs.append(mode)
    record(11, not diffs, f"two runs per mode give identical files and output {diffs or ''}")
    assert not diffs
