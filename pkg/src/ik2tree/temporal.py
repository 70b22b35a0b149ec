"""Differential temporal graphs on top of the Ik2-tree.

Time is the partitioning dimension.  The tree stores a triple ``(x, t, z)``
whenever the edge ``x -> z`` toggles at instant ``t``; a record at ``t = 0``
means the edge is present in the initial snapshot.  The state of an edge at
``t`` is the parity of its changes in ``[0, t]``, read off the leaf with rank
on ``L``.

Intervals are closed, ``[tl, tr]``.  Changes that matter for an interval are
those in ``(tl, tr]``: a change at ``tl`` is already part of the state at
``tl``.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np

from . import _backend
from ._pykernels import INSTANT, STRONG, WEAK
from .errors import FormatError, InputError, ParseError
from .ik2tree import MODE_TEMPORAL, IK2Tree, _bounds, constraint
from .k2tree import K2Forest
from .layout import LevelSchedule


class ChangeRecord(NamedTuple):
    x: int
    z: int
    t: int


class Semantics(enum.Enum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass(frozen=True)
class Instant:
    t: int


@dataclass(frozen=True)
class Interval:
    tl: int
    tr: int
    semantics: Semantics = Semantics.WEAK

    def __post_init__(self):
        if self.tl > self.tr:
            raise InputError(f"inverted interval [{self.tl}, {self.tr}]")
        object.__setattr__(self, "semantics", Semantics(self.semantics))


When = Union[Instant, Interval]


def default_schedule(n_nodes: int) -> LevelSchedule:
    """K=4 on the first level and K=2 below."""
    return LevelSchedule.from_prefix(max(n_nodes, 1), [4, 2])


def parse_changes(lines: Iterable[str]) -> list[ChangeRecord]:
    """Parse ``x z t`` records; blank lines and ``#`` comments are skipped."""
    out = []
    for lineno, line in enumerate(lines, 1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        toks = text.split()
        if len(toks) != 3:
            raise ParseError(f"expected 3 fields 'x z t', got {len(toks)}", lineno)
        try:
            x, z, t = (int(tok) for tok in toks)
        except ValueError:
            raise ParseError(f"non-integer field in {text!r}", lineno) from None
        if min(x, z, t) < 0:
            raise ParseError(f"negative id in {text!r}", lineno)
        out.append(ChangeRecord(x, z, t))
    return out


def read_changes(path) -> list[ChangeRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_changes(fh)


def format_changes(changes: Iterable[ChangeRecord]) -> str:
    return "".join(f"{c.x} {c.z} {c.t}\n" for c in changes)


def _records(changes) -> np.ndarray:
    """Changes as an ``(n, 3)`` int64 array of ``(x, z, t)``."""
    if isinstance(changes, np.ndarray):
        return changes.astype(np.int64, copy=False).reshape(-1, 3)
    return np.asarray([tuple(c) for c in changes], dtype=np.int64).reshape(-1, 3)


def _check(arr: np.ndarray, n_nodes: int, n_instants: int) -> None:
    if not len(arr):
        return
    lo, hi = arr.min(axis=0), arr.max(axis=0)
    if (lo < 0).any() or hi[0] >= n_nodes or hi[1] >= n_nodes or hi[2] >= n_instants:
        raise InputError(f"change outside {n_nodes} nodes x {n_instants} instants")
    if len(np.unique(arr, axis=0)) != len(arr):
        raise InputError("duplicate (x, z, t) change record")


def _when(when: When, n_instants: int) -> tuple[int, int, int]:
    if isinstance(when, Instant):
        tl = tr = when.t
        mode = INSTANT
    elif isinstance(when, Interval):
        tl, tr = when.tl, when.tr
        mode = WEAK if when.semantics is Semantics.WEAK else STRONG
    else:
        raise InputError(f"expected Instant or Interval, got {when!r}")
    if tl < 0 or tr >= n_instants:
        raise InputError(f"time [{tl}, {tr}] outside [0, {n_instants})")
    return tl, tr, mode


class TemporalIndex:
    """Change events of an evolving graph in one Ik2-tree with rank on ``L``."""

    def __init__(self, inner: IK2Tree):
        if not inner.l_rank_enabled:
            raise InputError("a temporal index needs rank support on L")
        self.inner = inner

    @classmethod
    def build(cls, changes, n_nodes: int, n_instants: int,
              schedule: LevelSchedule | None = None) -> TemporalIndex:
        arr = _records(changes)
        _check(arr, n_nodes, n_instants)
        if schedule is None:
            schedule = default_schedule(n_nodes)
        triples = arr[:, [0, 2, 1]]
        inner = IK2Tree.build(triples, n_nodes, n_instants, n_nodes, schedule, l_rank_enabled=True)
        return cls(inner)

    @property
    def n_nodes(self) -> int:
        return self.inner.nx

    @property
    def n_instants(self) -> int:
        return self.inner.ysize

    @property
    def n_changes(self) -> int:
        return len(self.inner)

    @property
    def size_bits(self) -> int:
        return self.inner.size_bits

    def __eq__(self, other) -> bool:
        if not isinstance(other, TemporalIndex):
            return NotImplemented
        return self.inner == other.inner

    __hash__ = None

    def query(self, x=None, z=None, when: When = Instant(0), prune: bool = True) -> list[tuple[int, int]]:
        """Edges ``(x, z)`` inside the constraints that satisfy ``when``, row-major.

        ``prune=False`` disables the all-zero-prefix pruning; results must not
        change, which is what the tests check.
        """
        tl, tr, mode = _when(when, self.n_instants)
        xlo, xhi = _bounds(constraint(x), self.n_nodes, "x")
        zlo, zhi = _bounds(constraint(z), self.n_nodes, "z")
        xs, zs = _backend.kernels.temporal_query(self.inner, xlo, xhi, zlo, zhi, tl, tr, mode, prune)
        xs = np.asarray(xs, dtype=np.int64)
        zs = np.asarray(zs, dtype=np.int64)
        order = np.lexsort((zs, xs))
        return list(zip(xs[order].tolist(), zs[order].tolist()))

    def active_at(self, x: int, z: int, t: int) -> bool:
        for v, n, what in ((x, self.n_nodes, "x"), (z, self.n_nodes, "z"), (t, self.n_instants, "t")):
            if not 0 <= v < n:
                raise InputError(f"{what}={v} outside [0, {n})")
        xs, _ = _backend.kernels.temporal_query(self.inner, x, x, z, z, t, t, INSTANT, True)
        return len(xs) > 0

    def neighbors(self, x: int, when: When) -> list[int]:
        return [z for _, z in self.query(x, None, when)]

    def reverse_neighbors(self, z: int, when: When) -> list[int]:
        return [x for x, _ in self.query(None, z, when)]

    def changes(self) -> list[ChangeRecord]:
        return sorted(ChangeRecord(x, z, t) for x, t, z in self.inner.triples())

    def to_bytes(self) -> bytes:
        return self.inner.to_bytes(MODE_TEMPORAL)

    @classmethod
    def from_bytes(cls, data: bytes) -> TemporalIndex:
        inner, mode = IK2Tree.from_bytes(data)
        if mode != MODE_TEMPORAL:
            raise FormatError(f"index mode {mode} is not temporal")
        if not inner.l_rank_enabled:
            raise FormatError("temporal index stored without rank support on L")
        return cls(inner)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> TemporalIndex:
        return cls.from_bytes(Path(path).read_bytes())


class MultiDiffK2Tree:
    """Baseline: one k2-tree of change events per instant.

    A query probes the trees of instants ``0..tr`` one at a time and counts
    the changes it finds for each cell.  This is the reduced form of the
    synchronized multi-tree traversal; it is only used for benchmarks.
    """

    def __init__(self, forest: K2Forest):
        self.forest = forest

    @classmethod
    def build(cls, changes, n_nodes: int, n_instants: int,
              schedule: LevelSchedule | None = None) -> MultiDiffK2Tree:
        arr = _records(changes)
        _check(arr, n_nodes, n_instants)
        if schedule is None:
            schedule = default_schedule(n_nodes)
        return cls(K2Forest.build(arr[:, [0, 2, 1]], n_nodes, n_instants, n_nodes, schedule))

    @property
    def n_nodes(self) -> int:
        return self.forest.nrows

    @property
    def n_instants(self) -> int:
        return self.forest.n_trees

    @property
    def size_bits(self) -> int:
        return self.forest.size_bits

    def query(self, x=None, z=None, when: When = Instant(0)) -> list[tuple[int, int]]:
        tl, tr, mode = _when(when, self.n_instants)
        xr = _bounds(constraint(x), self.n_nodes, "x")
        zr = _bounds(constraint(z), self.n_nodes, "z")
        xs, ts, zs = self.forest.query(0, tr, xr, zr)
        if not len(xs):
            return []
        cell = xs * self.n_nodes + zs
        cells, inv = np.unique(cell, return_inverse=True)
        before = np.bincount(inv, weights=ts <= tl, minlength=len(cells)).astype(np.int64)
        changed = np.bincount(inv, weights=ts > tl, minlength=len(cells)) > 0
        active = (before & 1) == 1
        if mode == WEAK:
            keep = active | changed
        elif mode == STRONG:
            keep = active & ~changed
        else:
            keep = active
        hit = cells[keep]
        return list(zip((hit // self.n_nodes).tolist(), (hit % self.n_nodes).tolist()))
