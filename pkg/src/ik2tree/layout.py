"""Level schedules and the level geometry shared by k2-trees and Ik2-trees.

Both structures store their levels breadth-first: every level except the
last goes into ``T`` and the last level into ``L``.  A node at level ``l``
holding ``m`` ones spawns ``K[l+1]**2`` children, each of ``m`` bits (``m``
is 1 for a plain k2-tree).  The bit count of level ``l+1`` is therefore
``K[l+1]**2`` times the popcount of level ``l``, which lets the whole level
layout be recomputed from ``T`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .bitvector import BitVector
from .errors import FormatError, InputError


@dataclass(frozen=True)
class LevelSchedule:
    """Branching factor per level; ``ks[0]`` subdivides the whole matrix."""

    ks: tuple[int, ...]

    def __post_init__(self):
        ks = tuple(int(k) for k in self.ks)
        if not ks:
            raise InputError("a schedule needs at least one level")
        if any(k < 2 for k in ks):
            raise InputError(f"every K must be >= 2, got {ks}")
        object.__setattr__(self, "ks", ks)

    @property
    def side(self) -> int:
        return prod(self.ks)

    @property
    def height(self) -> int:
        return len(self.ks)

    def block_sides(self) -> tuple[int, ...]:
        """Side of the submatrix covered by one node of each level."""
        sides, s = [], self.side
        for k in self.ks:
            s //= k
            sides.append(s)
        return tuple(sides)

    def fits(self, n: int) -> bool:
        return self.side >= n

    @classmethod
    def uniform(cls, n: int, k: int = 2) -> LevelSchedule:
        ks = [k]
        while k ** len(ks) < n:
            ks.append(k)
        return cls(tuple(ks))

    @classmethod
    def from_prefix(cls, n: int, prefix) -> LevelSchedule:
        """Use ``prefix`` as the leading levels, repeating its last K until the side covers ``n``."""
        ks = [int(k) for k in prefix]
        if not ks:
            raise InputError("empty K schedule")
        while prod(ks) < n:
            ks.append(ks[-1])
        return cls(tuple(ks))

    @classmethod
    def hybrid(cls, n: int, top_k: int = 4, top_levels: int = 5, rest_k: int = 2) -> LevelSchedule:
        """``top_k`` on the first ``top_levels`` levels and ``rest_k`` below.

        Falls back to a uniform ``rest_k`` schedule when the matrix is too small
        to hold all the top levels.
        """
        if top_k ** top_levels > max(n, 1):
            return cls.uniform(n, rest_k)
        ks = [top_k] * top_levels
        while prod(ks) < n:
            ks.append(rest_k)
        return cls(tuple(ks))

    @classmethod
    def parse(cls, text: str, n: int) -> LevelSchedule:
        try:
            ks = [int(tok) for tok in text.split(",") if tok.strip()]
        except ValueError:
            raise InputError(f"bad K schedule {text!r}") from None
        if len(ks) == 1:
            return cls.uniform(n, ks[0])
        return cls.from_prefix(n, ks)


class Geometry:
    """Per-level offsets of a tree stored as ``T:L``.

    ``level_start[l]`` is the first bit of level ``l`` in the virtual
    concatenation ``T:L`` (``level_start[h]`` is its total length) and
    ``level_ones[l]`` is ``rank1(T, level_start[l])``.
    """

    __slots__ = ("ks", "sub", "h", "level_start", "level_ones", "n_t", "root_width")

    def __init__(self, T: BitVector, n_l: int, schedule: LevelSchedule, root_width: int):
        ks = schedule.ks
        h = len(ks)
        starts = [0]
        ones = []
        size = root_width * ks[0] * ks[0]
        for level in range(h):
            start = starts[-1]
            end = start + size
            if level < h - 1:
                if end > len(T):
                    raise FormatError(f"level {level} overruns T ({end} > {len(T)} bits)")
                before = T.rank1(start)
                ones.append(before)
                size = ks[level + 1] ** 2 * (T.rank1(end) - before)
            else:
                ones.append(T.rank1(min(start, len(T))))
            starts.append(end)
        n_t = starts[h - 1]
        if n_t != len(T) or starts[h] - n_t != n_l:
            raise FormatError(
                f"level structure expects |T|={n_t}, |L|={starts[h] - n_t}; "
                f"found |T|={len(T)}, |L|={n_l}")
        self.ks = ks
        self.sub = schedule.block_sides()
        self.h = h
        self.level_start = tuple(starts)
        self.level_ones = tuple(ones)
        self.n_t = n_t
        self.root_width = root_width

    def level_of(self, pos: int) -> int:
        for level in range(self.h):
            if pos < self.level_start[level + 1]:
                return level
        raise IndexError(f"position {pos} beyond T:L")

    def arrays(self):
        """int64 copies for the compiled kernels."""
        return (np.asarray(self.ks, dtype=np.int64), np.asarray(self.sub, dtype=np.int64),
                np.asarray(self.level_start, dtype=np.int64),
                np.asarray(self.level_ones, dtype=np.int64))


def path_prefixes(x: np.ndarray, z: np.ndarray, schedule: LevelSchedule) -> list[np.ndarray]:
    """Node ids per level: ``prefix[l]`` identifies the level-``l`` node holding each cell.

    Ids are mixed-radix numbers over the child indices along the path, so
    sorting by them reproduces breadth-first (level-order) node order.
    """
    prefixes = []
    p = np.zeros(len(x), dtype=np.int64)
    for k, s in zip(schedule.ks, schedule.block_sides()):
        digit = ((x // s) % k) * k + (z // s) % k
        p = p * (k * k) + digit
        prefixes.append(p)
    return prefixes
