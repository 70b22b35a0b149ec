"""Plain k2-trees over a single binary relation, and a forest of them.

The forest packs several k2-trees that share one schedule into a single pair
of bitmaps with per-tree offsets.  It backs the multiple-k2-tree baseline:
one tree per value of the third dimension, queried one tree at a time.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from . import _backend
from .bitvector import BitVector, concat
from .errors import InputError, NavigationError
from .layout import Geometry, LevelSchedule, path_prefixes


def _as_range(r, n: int, what: str) -> tuple[int, int]:
    """Inclusive (lo, hi) from an int, a step-1 ``range`` or ``None`` (everything)."""
    if r is None:
        lo, hi = 0, n - 1
    elif isinstance(r, range):
        if r.step != 1:
            raise InputError(f"{what} range must have step 1")
        lo, hi = r.start, r.stop - 1
    elif isinstance(r, tuple):
        lo, hi = r
    else:
        lo = hi = int(r)
    if lo > hi:
        raise InputError(f"empty or inverted {what} range [{lo}, {hi}]")
    if lo < 0 or hi >= n:
        raise InputError(f"{what} range [{lo}, {hi}] outside [0, {n})")
    return int(lo), int(hi)


def _build_levels(rows: np.ndarray, cols: np.ndarray, schedule: LevelSchedule) -> list[np.ndarray]:
    """Bits of every level, computed independently per level.

    A level-``l`` node exists iff its parent node (level ``l-1``) is non-empty,
    so its position is ``(index of parent among non-empty parents) * K**2 +
    child digit``.
    """
    ks = schedule.ks
    prefixes = path_prefixes(rows, cols, schedule)
    levels = []
    for level, k in enumerate(ks):
        kk = k * k
        here = np.unique(prefixes[level])
        if level == 0:
            parents = np.zeros(1, dtype=np.int64)
        else:
            parents = np.unique(prefixes[level - 1])
        bits = np.zeros(len(parents) * kk, dtype=np.uint8)
        pos = np.searchsorted(parents, here // kk) * kk + here % kk
        bits[pos] = 1
        levels.append(bits)
    return levels


class K2Tree:
    """A binary relation over ``[0, nrows) x [0, ncols)`` stored as bitmaps ``T`` and ``L``."""

    def __init__(self, T: BitVector, L: BitVector, schedule: LevelSchedule, nrows: int, ncols: int):
        if not schedule.fits(max(nrows, ncols)):
            raise InputError(f"schedule side {schedule.side} < {max(nrows, ncols)}")
        self.T = T
        self.L = L
        self.schedule = schedule
        self.nrows = nrows
        self.ncols = ncols
        self.geometry = Geometry(T, len(L), schedule, 1)
        self._arrays = None

    @classmethod
    def build(cls, pairs: Iterable[tuple[int, int]] | np.ndarray, nrows: int, ncols: int,
              schedule: LevelSchedule | None = None) -> K2Tree:
        if schedule is None:
            schedule = LevelSchedule.uniform(max(nrows, ncols, 1))
        arr = np.asarray(pairs if isinstance(pairs, np.ndarray) else list(pairs), dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if len(arr):
            r, c = arr[:, 0], arr[:, 1]
            if r.min() < 0 or r.max() >= nrows or c.min() < 0 or c.max() >= ncols:
                raise InputError(f"pair outside [0,{nrows}) x [0,{ncols})")
        if not schedule.fits(max(nrows, ncols)):
            raise InputError(f"schedule side {schedule.side} < {max(nrows, ncols)}")
        levels = _build_levels(arr[:, 0], arr[:, 1], schedule)
        T = concat(levels[:-1])
        L = BitVector.build(levels[-1], rank_support=False)
        return cls(T, L, schedule, nrows, ncols)

    # forest protocol used by the kernels: a single tree at offset 0
    @property
    def forest_arrays(self):
        if self._arrays is None:
            g = self.geometry
            self._arrays = _ForestArrays(self.T, self.L, g.ks, g.sub, [0], [0],
                                         [g.level_start], [g.level_ones])
        return self._arrays

    @property
    def e(self) -> int:
        return self.L.ones

    def __len__(self) -> int:
        return self.L.ones

    @property
    def size_bits(self) -> int:
        return len(self.T) + len(self.L)

    def _bit(self, pos: int) -> int:
        n_t = len(self.T)
        return self.T.access(pos) if pos < n_t else self.L.access(pos - n_t)

    def child_base(self, pos: int) -> int:
        """Start in ``T:L`` of the children of the 1-bit at ``pos`` in ``T``."""
        if not 0 <= pos < len(self.T):
            raise NavigationError(f"position {pos} is not an internal node")
        if not self.T.access(pos):
            raise NavigationError(f"bit {pos} is 0 and has no children")
        g = self.geometry
        level = g.level_of(pos)
        k = g.ks[level + 1]
        return g.level_start[level + 1] + (self.T.rank1(pos) - g.level_ones[level]) * k * k

    def query(self, rows=None, cols=None, prune: bool = True) -> list[tuple[int, int]]:
        """Ones inside ``rows x cols``, row-major.

        ``rows``/``cols`` accept an int, a step-1 ``range`` or ``None`` for the
        whole dimension.  ``prune=False`` descends every non-empty branch and
        filters at the cells; it exists to check that pruning is sound.
        """
        rlo, rhi = _as_range(rows, self.nrows, "row")
        clo, chi = _as_range(cols, self.ncols, "column")
        xs, _, zs = _backend.kernels.forest_query(self.forest_arrays, 0, 0, rlo, rhi, clo, chi, prune)
        xs = np.asarray(xs, dtype=np.int64)
        zs = np.asarray(zs, dtype=np.int64)
        order = np.lexsort((zs, xs))
        return list(zip(xs[order].tolist(), zs[order].tolist()))

    def cell(self, r: int, c: int) -> bool:
        return bool(self.query(r, c))

    def neighbors(self, r: int) -> list[int]:
        return [c for _, c in self.query(r, None)]

    def reverse_neighbors(self, c: int) -> list[int]:
        return [r for r, _ in self.query(None, c)]

    def pairs(self) -> list[tuple[int, int]]:
        return self.query()

    def level_bits(self) -> list[list[int]]:
        g = self.geometry
        both = self.T.tolist() + self.L.tolist()
        return [both[g.level_start[i]:g.level_start[i + 1]] for i in range(g.h)]


class _ForestArrays:
    """Packed bitmaps plus per-tree offsets, in the shape the kernels expect."""

    __slots__ = ("T", "L", "ks", "sub", "t_off", "l_off", "level_start", "level_ones",
                 "np_cache")

    def __init__(self, T, L, ks, sub, t_off, l_off, level_start, level_ones):
        self.T = T
        self.L = L
        self.ks = tuple(ks)
        self.sub = tuple(sub)
        self.t_off = list(t_off)
        self.l_off = list(l_off)
        self.level_start = [tuple(r) for r in level_start]
        self.level_ones = [tuple(r) for r in level_ones]
        self.np_cache = None


class K2Forest:
    """``n`` k2-trees with a common schedule, packed into shared bitmaps.

    Tree ``t`` holds the pairs ``(x, z)`` of every triple ``(x, t, z)``.
    """

    def __init__(self, trees: list[K2Tree], schedule: LevelSchedule, nrows: int, ncols: int):
        self.schedule = schedule
        self.nrows = nrows
        self.ncols = ncols
        self.n_trees = len(trees)
        t_off, l_off = [0], [0]
        for tr in trees:
            t_off.append(t_off[-1] + len(tr.T))
            l_off.append(l_off[-1] + len(tr.L))
        self.T = concat([tr.T for tr in trees])
        self.L = concat([tr.L for tr in trees], rank_support=False)
        self.bits_per_tree = [tr.size_bits for tr in trees]
        self.arrays = _ForestArrays(
            self.T, self.L, schedule.ks, schedule.block_sides(), t_off[:-1], l_off[:-1],
            [tr.geometry.level_start for tr in trees], [tr.geometry.level_ones for tr in trees])

    @classmethod
    def build(cls, triples, nx: int, ny: int, nz: int,
              schedule: LevelSchedule | None = None) -> K2Forest:
        if schedule is None:
            schedule = LevelSchedule.uniform(max(nx, nz, 1))
        arr = np.asarray(triples if isinstance(triples, np.ndarray) else list(triples),
                         dtype=np.int64).reshape(-1, 3)
        if len(arr):
            lo, hi = arr.min(axis=0), arr.max(axis=0)
            if (lo < 0).any() or hi[0] >= nx or hi[1] >= ny or hi[2] >= nz:
                raise InputError("triple outside declared dimensions")
        order = np.argsort(arr[:, 1], kind="stable")
        arr = arr[order]
        bounds = np.searchsorted(arr[:, 1], np.arange(ny + 1))
        trees = [K2Tree.build(arr[bounds[t]:bounds[t + 1]][:, [0, 2]], nx, nz, schedule)
                 for t in range(ny)]
        return cls(trees, schedule, nx, nz)

    @property
    def size_bits(self) -> int:
        return len(self.T) + len(self.L)

    def query(self, y_lo: int, y_hi: int, rows=None, cols=None) -> tuple[np.ndarray, ...]:
        """Raw ``(x, y, z)`` arrays from trees ``y_lo..y_hi``; unsorted."""
        rlo, rhi = _as_range(rows, self.nrows, "row")
        clo, chi = _as_range(cols, self.ncols, "column")
        if not 0 <= y_lo <= y_hi < self.n_trees:
            raise InputError(f"tree range [{y_lo}, {y_hi}] outside [0, {self.n_trees})")
        xs, ts, zs = _backend.kernels.forest_query(self.arrays, y_lo, y_hi, rlo, rhi, clo, chi, True)
        return (np.asarray(xs, dtype=np.int64), np.asarray(ts, dtype=np.int64),
                np.asarray(zs, dtype=np.int64))


class MultiK2Tree:
    """Vertical partitioning with one independent k2-tree per y value."""

    def __init__(self, forest: K2Forest):
        self.forest = forest
        self.nx = forest.nrows
        self.nz = forest.ncols
        self.ysize = forest.n_trees

    @classmethod
    def build(cls, triples, nx: int, ysize: int, nz: int,
              schedule: LevelSchedule | None = None) -> MultiK2Tree:
        return cls(K2Forest.build(triples, nx, ysize, nz, schedule))

    @property
    def size_bits(self) -> int:
        return self.forest.size_bits

    def query(self, pattern) -> list[tuple[int, int, int]]:
        from .ik2tree import TriplePattern

        p = TriplePattern.coerce(pattern)
        (xlo, xhi), (ylo, yhi), (zlo, zhi) = p.bounds(self.nx, self.ysize, self.nz)
        if self.ysize == 0:
            return []
        xs, ys, zs = self.forest.query(ylo, yhi, (xlo, xhi), (zlo, zhi))
        order = np.lexsort((ys, zs, xs))
        return list(zip(xs[order].tolist(), ys[order].tolist(), zs[order].tolist()))
