from __future__ import annotations

import itertools

import numpy as np
import pytest

from conftest import EXAMPLE_TRIPLES, LAZY_RESULT, LAZY_TRIPLES
from ik2tree import Any, Fixed, IK2Tree, Range, TriplePattern
from ik2tree.errors import FormatError, InputError, NavigationError, UnsupportedStrategyError
from ik2tree.generators import random_triples
from ik2tree.ik2tree import MODE_PLAIN, MODE_RDF
from ik2tree.k2tree import K2Tree
from ik2tree.layout import LevelSchedule
from ik2tree.oracle import PlainTripleStore, oracle_eval


@pytest.fixture
def example():
    return IK2Tree.build(EXAMPLE_TRIPLES, 8, 3, 8, LevelSchedule.uniform(8))


def test_worked_example_nodes(example):
    roots = example.root_cursors()
    n0 = roots[0]
    assert example.node_bits(n0) == [0, 1, 1]
    n3 = example.children(n0)[3]  # rows 2-3, columns 2-3
    assert (n3.row, n3.col, n3.width) == (2, 2, 2)
    assert example.node_bits(n3) == [1, 0]
    assert n3.active == (1, 2)
    n4 = example.children(n3)[0]
    assert example.node_bits(n4) == [1]
    assert n4.active == (1,)
    n5 = roots[2]  # rows 4-7, columns 0-3
    assert example.node_bits(n5) == [0, 1, 1]
    n6 = example.children(n5)[2]
    assert example.node_bits(n6) == [1, 0]
    n7 = example.children(n6)[0]
    assert (n7.row, n7.col) == (6, 0)
    assert example.node_bits(n7) == [1]


def test_worked_example_queries(example, backend):
    assert example.contains((6, 1, 0))
    assert not example.contains((6, 0, 0))
    assert example.query((2, None, 2)) == [(2, 1, 2)]
    assert example.query((2, None, 2), "lazy") == [(2, 1, 2)]
    assert example.triples() == sorted(EXAMPLE_TRIPLES, key=lambda t: (t[0], t[2], t[1]))


def test_lazy_walkthrough(backend):
    tree = IK2Tree.build(LAZY_TRIPLES, 8, 3, 8, LevelSchedule.uniform(8))
    n0 = tree.root_cursors()[0]
    n1, _, _, n2 = tree.children(n0)
    assert tree.node_bits(n0) == [0, 1, 1]
    assert tree.node_bits(n1) == [0, 1]
    assert tree.node_bits(n2) == [1, 1]
    lazy = tree.query((None, None, None), "lazy")
    assert set(lazy) == LAZY_RESULT
    assert lazy == tree.query((None, None, None), "eager")


def test_navigation_errors(example):
    leaf = example.children(example.children(example.root_cursors()[0])[3])[0]
    assert example.children(leaf) == []
    with pytest.raises(NavigationError):
        example.child_base(leaf)
    empty_root = example.root_cursors()[1]  # rows 0-3, columns 4-7 hold only (1,0,5)
    assert example.node_bits(empty_root) == [1, 0, 0]


def test_walk_visits_every_node(example):
    nodes = list(example.walk())
    assert sum(n.width for n in nodes) == example.size_bits


SHAPES = list(itertools.product("FRA", repeat=3))


def random_pattern(rng, shape, dims):
    out = []
    for kind, n in zip(shape, dims):
        if kind == "F":
            out.append(Fixed(int(rng.integers(0, n))))
        elif kind == "R":
            lo = int(rng.integers(0, n))
            out.append(Range(lo, int(rng.integers(lo, n))))
        else:
            out.append(Any)
    return TriplePattern(*out)


@pytest.mark.parametrize("k", ["2", "4", "3,2"])
def test_all_shapes_against_oracle(backend, k):
    rng = np.random.default_rng(11)
    for trial in range(6):
        nx, ny, nz = (int(v) for v in rng.integers(1, 40, 3))
        data = random_triples(nx, ny, nz, int(rng.integers(0, 600)), rng)
        tree = IK2Tree.build(data, nx, ny, nz, LevelSchedule.parse(k, max(nx, nz)))
        store = PlainTripleStore.build(data, nx, ny, nz)
        for shape in SHAPES:
            p = random_pattern(rng, shape, (nx, ny, nz))
            want = oracle_eval(store, p)
            assert tree.query(p) == want, (trial, p)
            if not isinstance(p.y, Fixed):
                assert tree.query(p, "lazy") == want, (trial, p)


def test_pattern_coercion():
    p = TriplePattern.coerce((1, None, (2, 5)))
    assert p == TriplePattern(Fixed(1), Any, Range(2, 5))
    assert p.shape() == "FAR"
    assert TriplePattern.coerce((range(0, 3), "?", 0)).x == Range(0, 2)
    with pytest.raises(InputError):
        TriplePattern.coerce((1, 2))
    with pytest.raises(InputError):
        Range(3, 2)
    with pytest.raises(InputError):
        TriplePattern.coerce(("a", 1, 1))


def test_query_errors(example):
    with pytest.raises(UnsupportedStrategyError):
        example.query((0, 1, 0), "lazy")
    with pytest.raises(UnsupportedStrategyError):
        example.query((0, 1, 0), "bogus")
    with pytest.raises(InputError):
        example.query((8, None, None))
    with pytest.raises(InputError):
        example.contains((0, 3, 0))
    with pytest.raises(InputError):
        IK2Tree.build([(0, 3, 0)], 8, 3, 8)


def test_reorganises_per_value_trees():
    rng = np.random.default_rng(5)
    for _ in range(10):
        nx, ny, nz = (int(v) for v in rng.integers(1, 50, 3))
        data = random_triples(nx, ny, nz, int(rng.integers(0, 800)), rng)
        sched = LevelSchedule.hybrid(max(nx, nz))
        tree = IK2Tree.build(data, nx, ny, nz, sched)
        per = [K2Tree.build(data[data[:, 1] == y][:, [0, 2]], nx, nz, sched) for y in range(ny)]
        assert tree.size_bits == sum(t.size_bits for t in per)
        assert tree.popcount == sum(t.T.ones + t.L.ones for t in per)


def test_serialization(example):
    data = example.to_bytes(MODE_RDF)
    back, mode = IK2Tree.from_bytes(data)
    assert mode == MODE_RDF
    assert back == example
    assert back.triples() == example.triples()
    with pytest.raises(FormatError):
        IK2Tree.from_bytes(b"XK2X" + data[4:])
    with pytest.raises(FormatError):
        IK2Tree.from_bytes(data[:-1])
    with pytest.raises(FormatError):
        IK2Tree.from_bytes(data[:20])
    with pytest.raises(FormatError):
        IK2Tree.from_bytes(data + b"\0")
    bad = bytearray(example.to_bytes(MODE_PLAIN))
    bad[4] = 99
    with pytest.raises(FormatError):
        IK2Tree.from_bytes(bytes(bad))


def test_empty_tree(backend):
    tree = IK2Tree.build([], 5, 4, 5)
    assert len(tree) == 0
    assert tree.triples() == []
    assert tree.query((None, None, 2), "lazy") == []
