from __future__ import annotations

import numpy as np

from ik2tree.oracle import PlainTripleStore, TemporalOracle, oracle_eval, oracle_temporal
from ik2tree.temporal import Instant, Interval, Semantics


def test_store_orders_by_x_z_y():
    store = PlainTripleStore.build([(1, 0, 0), (0, 2, 1), (0, 1, 1), (0, 0, 3), (0, 1, 1)], 2, 3, 4)
    assert len(store) == 4
    assert store.triples() == [(0, 1, 1), (0, 2, 1), (0, 0, 3), (1, 0, 0)]


def test_eval_filters():
    store = PlainTripleStore.build([(1, 0, 0), (0, 2, 1), (0, 1, 1), (0, 0, 3)], 2, 3, 4)
    assert oracle_eval(store, (0, None, None)) == [(0, 1, 1), (0, 2, 1), (0, 0, 3)]
    assert oracle_eval(store, (None, (1, 2), 1)) == [(0, 1, 1), (0, 2, 1)]
    assert oracle_eval(store, (1, 1, None)) == []


def test_temporal_replay_definitions():
    # on at 1, off at 3, on again at 4
    changes = [(0, 1, 1), (0, 1, 3), (0, 1, 4)]
    o = TemporalOracle(changes, 2, 6)
    assert [o.active_at(0, 1, t) for t in range(6)] == [False, True, True, False, True, True]
    assert o.query(0, None, Interval(2, 3, Semantics.WEAK)) == [(0, 1)]
    assert o.query(0, None, Interval(2, 3, Semantics.STRONG)) == []
    assert o.query(0, None, Interval(4, 5, Semantics.STRONG)) == [(0, 1)]
    assert oracle_temporal(changes, 2, 6, None, 1, Instant(3)) == []


def test_state_is_parity_of_toggles():
    rng = np.random.default_rng(0)
    n, ti = 5, 12
    cells = {(int(a), int(b), int(t)) for a, b, t in
             zip(rng.integers(0, n, 60), rng.integers(0, n, 60), rng.integers(0, ti, 60))}
    o = TemporalOracle(sorted(cells), n, ti)
    for x in range(n):
        for z in range(n):
            for t in range(ti):
                parity = sum(1 for a, b, s in cells if (a, b) == (x, z) and s <= t) % 2
                assert o.active_at(x, z, t) == bool(parity)
