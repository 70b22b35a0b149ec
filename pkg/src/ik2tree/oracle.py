"""Brute-force references for the tests.

Nothing here uses a tree.  Triple queries are a filter over a plain array;
temporal queries replay every toggle into a dense ``(instant, x, z)`` state
tensor and then apply the any/all definitions of the interval semantics
directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ik2tree import TriplePattern, _bounds, constraint
from .temporal import Instant, Interval, Semantics, When, _records


@dataclass(frozen=True)
class PlainTripleStore:
    """Duplicate-free triples sorted by ``(x, z, y)``, with dimension sizes."""

    data: np.ndarray
    nx: int
    ysize: int
    nz: int

    @classmethod
    def build(cls, triples, nx: int, ysize: int, nz: int) -> PlainTripleStore:
        arr = np.asarray(triples if isinstance(triples, np.ndarray) else list(triples),
                         dtype=np.int64).reshape(-1, 3)
        arr = np.unique(arr, axis=0)
        arr = arr[np.lexsort((arr[:, 1], arr[:, 2], arr[:, 0]))]
        return cls(arr, nx, ysize, nz)

    def __len__(self) -> int:
        return len(self.data)

    def triples(self) -> list[tuple[int, int, int]]:
        return [tuple(r) for r in self.data.tolist()]


def oracle_eval(store: PlainTripleStore, pattern) -> list[tuple[int, int, int]]:
    p = TriplePattern.coerce(pattern)
    (xlo, xhi), (ylo, yhi), (zlo, zhi) = p.bounds(store.nx, store.ysize, store.nz)
    d = store.data
    keep = ((d[:, 0] >= xlo) & (d[:, 0] <= xhi) & (d[:, 1] >= ylo) & (d[:, 1] <= yhi)
            & (d[:, 2] >= zlo) & (d[:, 2] <= zhi))
    return [tuple(r) for r in d[keep].tolist()]


class TemporalOracle:
    """Dense per-instant snapshots rebuilt from the change log."""

    def __init__(self, changes, n_nodes: int, n_instants: int):
        arr = _records(changes)
        self.n_nodes = n_nodes
        self.n_instants = n_instants
        toggles = np.zeros((n_instants, n_nodes, n_nodes), dtype=bool)
        toggles[arr[:, 2], arr[:, 0], arr[:, 1]] = True
        state = np.zeros((n_instants, n_nodes, n_nodes), dtype=bool)
        current = np.zeros((n_nodes, n_nodes), dtype=bool)
        for t in range(n_instants):
            current = current ^ toggles[t]
            state[t] = current
        self.state = state

    def active_at(self, x: int, z: int, t: int) -> bool:
        return bool(self.state[t, x, z])

    def query(self, x=None, z=None, when: When = Instant(0)) -> list[tuple[int, int]]:
        xlo, xhi = _bounds(constraint(x), self.n_nodes, "x")
        zlo, zhi = _bounds(constraint(z), self.n_nodes, "z")
        tl, tr = (when.t, when.t) if isinstance(when, Instant) else (when.tl, when.tr)
        window = self.state[tl:tr + 1, xlo:xhi + 1, zlo:zhi + 1]
        if isinstance(when, Interval) and when.semantics is Semantics.STRONG:
            sub = window.all(axis=0)
        else:
            sub = window.any(axis=0)
        xs, zs = np.nonzero(sub)
        return list(zip((xs + xlo).tolist(), (zs + zlo).tolist()))


def oracle_temporal(changes, n_nodes: int, n_instants: int, x=None, z=None,
                    when: When = Instant(0)) -> list[tuple[int, int]]:
    return TemporalOracle(changes, n_nodes, n_instants).query(x, z, when)


__all__ = ["PlainTripleStore", "oracle_eval", "TemporalOracle", "oracle_temporal",
           "Instant", "Interval", "Semantics"]
