"""The Interleaved k2-tree over a ternary relation ``X x Y x Z``.

``Y`` is the partitioning dimension.  Conceptually the relation is ``|Y|``
adjacency matrices over ``X x Z``; the Ik2-tree merges their k2-trees into
one tree whose nodes carry one bit per ``y`` still active on the path.  The
``K0**2`` top-level nodes hold ``|Y|`` bits each; a node with ``m`` ones has
``K**2`` children of ``m`` bits each, and a node with no ones has none.

Query evaluation lives in the kernel backends (see ``_backend``); this module
validates patterns, calls the kernels and puts results in ``(x, z, y)``
order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from . import _backend
from .bitvector import BitVector, concat
from .errors import FormatError, InputError, NavigationError, UnsupportedStrategyError
from .layout import Geometry, LevelSchedule, path_prefixes


class Triple(NamedTuple):
    x: int
    y: int
    z: int


@dataclass(frozen=True)
class Fixed:
    value: int


@dataclass(frozen=True)
class Range:
    """Closed interval ``[lo, hi]``."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise InputError(f"inverted range [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class Any_:
    def __repr__(self):
        return "Any"


Any = Any_()
Constraint = Union[Fixed, Range, Any_]


def constraint(value) -> Constraint:
    """Coerce ``None``/``'?'`` -> Any, an int -> Fixed, a pair or ``range`` -> Range."""
    if isinstance(value, (Fixed, Range, Any_)):
        return value
    if value is None or value == "?":
        return Any
    if isinstance(value, range):
        if value.step != 1 or len(value) == 0:
            raise InputError(f"unusable range {value!r}")
        return Range(value.start, value.stop - 1)
    if isinstance(value, tuple) and len(value) == 2:
        return Range(int(value[0]), int(value[1]))
    if isinstance(value, (int, np.integer)):
        return Fixed(int(value))
    raise InputError(f"cannot interpret {value!r} as a constraint")


def _bounds(c: Constraint, n: int, dim: str) -> tuple[int, int]:
    if isinstance(c, Any_):
        return 0, n - 1
    if isinstance(c, Fixed):
        lo = hi = c.value
    else:
        lo, hi = c.lo, c.hi
    if lo < 0 or hi >= n:
        raise InputError(f"{dim} constraint {c} outside [0, {n})")
    return lo, hi


@dataclass(frozen=True)
class TriplePattern:
    x: Constraint = Any
    y: Constraint = Any
    z: Constraint = Any

    @classmethod
    def coerce(cls, pattern) -> TriplePattern:
        if isinstance(pattern, TriplePattern):
            return pattern
        try:
            x, y, z = pattern
        except (TypeError, ValueError):
            raise InputError(f"malformed pattern {pattern!r}") from None
        return cls(constraint(x), constraint(y), constraint(z))

    def bounds(self, nx: int, ny: int, nz: int):
        return _bounds(self.x, nx, "x"), _bounds(self.y, ny, "y"), _bounds(self.z, nz, "z")

    def shape(self) -> str:
        """Like ``'FAR'``: one letter (Fixed/Any/Range) per dimension."""
        return "".join({Fixed: "F", Range: "R", Any_: "A"}[type(c)] for c in (self.x, self.y, self.z))


@dataclass(frozen=True)
class NodeCursor:
    """A node of the conceptual tree during navigation.

    ``active`` holds the y value of each node bit when the caller tracks
    active lists; it is ``None`` when only positions are tracked.
    """

    start: int
    width: int
    level: int
    row: int
    col: int
    active: tuple[int, ...] | None = None


MAGIC = b"IK2X"
VERSION = 1
MODE_PLAIN, MODE_RDF, MODE_TEMPORAL = 0, 1, 2
_U64 = struct.Struct("<Q")


def _unique_rows(*cols: np.ndarray) -> tuple[np.ndarray, ...]:
    """Lexicographically sorted distinct rows of the given columns."""
    if not len(cols[0]):
        return cols
    order = np.lexsort(cols[::-1])
    cols = [c[order] for c in cols]
    keep = np.ones(len(cols[0]), dtype=bool)
    change = np.zeros(len(cols[0]) - 1, dtype=bool)
    for c in cols:
        change |= c[1:] != c[:-1]
    keep[1:] = change
    return tuple(c[keep] for c in cols)


def _build_levels(x, y, z, ysize: int, schedule: LevelSchedule) -> list[np.ndarray]:
    """Level-order bits of every level of the Ik2-tree.

    Parents at level ``l-1`` are the distinct path prefixes; each parent's
    active list is the sorted set of y values under it, and the bit for
    ``(child c, y)`` lands at ``parent_offset + c * m + rank_of_y_in_parent``.
    """
    prefixes = path_prefixes(x, z, schedule)
    levels = []
    for level, k in enumerate(schedule.ks):
        kk = k * k
        node, yy = _unique_rows(prefixes[level], y)
        if level == 0:
            bits = np.zeros(kk * ysize, dtype=np.uint8)
            bits[node * ysize + yy] = 1
            levels.append(bits)
            continue
        # distinct (parent, y) pairs give each parent's active list
        pp, py = _unique_rows(prefixes[level - 1], y)
        if len(pp):
            starts = np.flatnonzero(np.r_[True, pp[1:] != pp[:-1]])
            parents = pp[starts]
            widths = np.diff(np.r_[starts, len(pp)])
        else:
            starts = parents = widths = np.zeros(0, dtype=np.int64)
        offsets = np.zeros(len(parents) + 1, dtype=np.int64)
        np.cumsum(widths * kk, out=offsets[1:])
        bits = np.zeros(int(offsets[-1]), dtype=np.uint8)
        if len(node):
            pidx = np.searchsorted(parents, node // kk)
            # rank of y inside its parent's active list: distinct pairs are
            # strictly increasing in (group, y), so one searchsorted finds them
            group = np.cumsum(np.r_[True, pp[1:] != pp[:-1]]) - 1
            pair_idx = np.searchsorted(group * ysize + py, pidx * ysize + yy)
            yrank = pair_idx - starts[pidx]
            pos = offsets[pidx] + (node % kk) * widths[pidx] + yrank
            bits[pos] = 1
        levels.append(bits)
    return levels


class IK2Tree:
    """Immutable Interleaved k2-tree."""

    def __init__(self, T: BitVector, L: BitVector, schedule: LevelSchedule,
                 nx: int, ysize: int, nz: int, l_rank_enabled: bool = False):
        if not schedule.fits(max(nx, nz)):
            raise InputError(f"schedule side {schedule.side} < {max(nx, nz)}")
        if l_rank_enabled and not L.rank_support:
            raise ValueError("l_rank_enabled needs L built with rank support")
        self.T = T
        self.L = L
        self.schedule = schedule
        self.nx = nx
        self.ysize = ysize
        self.nz = nz
        self.l_rank_enabled = l_rank_enabled
        self.geometry = Geometry(T, len(L), schedule, ysize)
        self.np_cache = None

    @classmethod
    def build(cls, triples, nx: int, ysize: int, nz: int,
              schedule: LevelSchedule | None = None, l_rank_enabled: bool = False) -> IK2Tree:
        if schedule is None:
            schedule = LevelSchedule.uniform(max(nx, nz, 1))
        if not schedule.fits(max(nx, nz)):
            raise InputError(f"schedule side {schedule.side} < {max(nx, nz)}")
        arr = np.asarray(triples if isinstance(triples, np.ndarray) else list(triples),
                         dtype=np.int64).reshape(-1, 3)
        if len(arr):
            lo, hi = arr.min(axis=0), arr.max(axis=0)
            if (lo < 0).any() or hi[0] >= nx or hi[1] >= ysize or hi[2] >= nz:
                raise InputError(f"triple outside [0,{nx}) x [0,{ysize}) x [0,{nz})")
        levels = _build_levels(arr[:, 0], arr[:, 1], arr[:, 2], ysize, schedule)
        T = concat(levels[:-1])
        L = BitVector.build(levels[-1], rank_support=l_rank_enabled)
        return cls(T, L, schedule, nx, ysize, nz, l_rank_enabled)

    # -- structure ----------------------------------------------------------

    @property
    def size_bits(self) -> int:
        return len(self.T) + len(self.L)

    @property
    def popcount(self) -> int:
        return self.T.ones + self.L.ones

    def __len__(self) -> int:
        """Number of stored triples (one leaf bit per triple)."""
        return self.L.ones

    def __eq__(self, other) -> bool:
        if not isinstance(other, IK2Tree):
            return NotImplemented
        return (self.T == other.T and self.L == other.L and self.schedule == other.schedule
                and (self.nx, self.ysize, self.nz, self.l_rank_enabled)
                == (other.nx, other.ysize, other.nz, other.l_rank_enabled))

    __hash__ = None

    def _bit(self, pos: int) -> int:
        n_t = len(self.T)
        return self.T.access(pos) if pos < n_t else self.L.access(pos - n_t)

    def node_bits(self, cur: NodeCursor) -> list[int]:
        return [self._bit(cur.start + i) for i in range(cur.width)]

    def ones(self, cur: NodeCursor) -> int:
        if cur.level < self.geometry.h - 1:
            return self.T.rank1(cur.start + cur.width) - self.T.rank1(cur.start)
        return sum(self.node_bits(cur))

    def root_cursors(self) -> list[NodeCursor]:
        k = self.schedule.ks[0]
        s = self.geometry.sub[0]
        active = tuple(range(self.ysize))
        return [NodeCursor(c * self.ysize, self.ysize, 0, (c // k) * s, (c % k) * s, active)
                for c in range(k * k)]

    def child_base(self, cur: NodeCursor) -> int:
        """Start in ``T:L`` of the first of the node's children."""
        g = self.geometry
        if cur.level >= g.h - 1:
            raise NavigationError("leaf nodes have no children")
        if self.ones(cur) == 0:
            raise NavigationError(f"node at {cur.start} has no ones")
        k = g.ks[cur.level + 1]
        return g.level_start[cur.level + 1] + (self.T.rank1(cur.start) - g.level_ones[cur.level]) * k * k

    def children(self, cur: NodeCursor) -> list[NodeCursor]:
        """The ``K**2`` children in row-major order; empty for leaves and all-zero nodes."""
        g = self.geometry
        if cur.level >= g.h - 1:
            return []
        m = self.ones(cur)
        if m == 0:
            return []
        base = self.child_base(cur)
        k = g.ks[cur.level + 1]
        s = g.sub[cur.level + 1]
        active = None
        if cur.active is not None:
            bits = self.node_bits(cur)
            active = tuple(a for a, b in zip(cur.active, bits) if b)
        return [NodeCursor(base + c * m, m, cur.level + 1,
                           cur.row + (c // k) * s, cur.col + (c % k) * s, active)
                for c in range(k * k)]

    def walk(self):
        """Yield every node of the conceptual tree, breadth-first."""
        frontier = self.root_cursors()
        while frontier:
            nxt = []
            for cur in frontier:
                yield cur
                nxt.extend(self.children(cur))
            frontier = nxt

    # -- queries ------------------------------------------------------------

    def _finish(self, xs, ys, zs) -> list[tuple[int, int, int]]:
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        zs = np.asarray(zs, dtype=np.int64)
        order = np.lexsort((ys, zs, xs))
        return list(zip(xs[order].tolist(), ys[order].tolist(), zs[order].tolist()))

    def query_eager(self, pattern) -> list[tuple[int, int, int]]:
        """Matching triples sorted by ``(x, z, y)``, maintaining active lists top-down."""
        p = TriplePattern.coerce(pattern)
        (xlo, xhi), (ylo, yhi), (zlo, zhi) = p.bounds(self.nx, self.ysize, self.nz)
        xs, ys, zs = _backend.kernels.eager_query(self, xlo, xhi, zlo, zhi, ylo, yhi)
        return self._finish(xs, ys, zs)

    def query_lazy(self, pattern) -> list[tuple[int, int, int]]:
        """Same results as ``query_eager``; y values are resolved bottom-up with select."""
        p = TriplePattern.coerce(pattern)
        if isinstance(p.y, Fixed):
            raise UnsupportedStrategyError("lazy evaluation needs an unbounded or ranged y")
        (xlo, xhi), (ylo, yhi), (zlo, zhi) = p.bounds(self.nx, self.ysize, self.nz)
        xs, ys, zs = _backend.kernels.lazy_query(self, xlo, xhi, zlo, zhi)
        if isinstance(p.y, Range):
            ys = np.asarray(ys, dtype=np.int64)
            keep = (ys >= ylo) & (ys <= yhi)
            xs, ys, zs = np.asarray(xs)[keep], ys[keep], np.asarray(zs)[keep]
        return self._finish(xs, ys, zs)

    def query(self, pattern, strategy: str = "eager") -> list[tuple[int, int, int]]:
        if strategy == "eager":
            return self.query_eager(pattern)
        if strategy == "lazy":
            return self.query_lazy(pattern)
        raise UnsupportedStrategyError(f"unknown strategy {strategy!r}")

    def contains(self, t) -> bool:
        x, y, z = t
        for v, n, dim in ((x, self.nx, "x"), (y, self.ysize, "y"), (z, self.nz, "z")):
            if not 0 <= v < n:
                raise InputError(f"{dim}={v} outside [0, {n})")
        xs, _, _ = _backend.kernels.eager_query(self, x, x, z, z, y, y)
        return len(xs) > 0

    def triples(self) -> list[tuple[int, int, int]]:
        if self.ysize == 0:
            return []
        return self.query_eager((None, None, None))

    # -- serialization ------------------------------------------------------

    def to_bytes(self, mode: int = MODE_PLAIN) -> bytes:
        ks = self.schedule.ks
        fields = [self.nx, self.ysize, self.nz, len(ks), *ks, int(self.l_rank_enabled),
                  len(self.T), len(self.L)]
        head = MAGIC + bytes([VERSION, mode]) + b"".join(_U64.pack(f) for f in fields)
        return head + self.T.to_bytes() + self.L.to_bytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> tuple[IK2Tree, int]:
        """Parse an IK2X payload; returns the tree and its mode byte."""
        data = memoryview(data)
        if len(data) < 6 or bytes(data[:4]) != MAGIC:
            raise FormatError("bad magic: not an IK2X index")
        if data[4] != VERSION:
            raise FormatError(f"unsupported IK2X version {data[4]}")
        mode = data[5]
        if mode not in (MODE_PLAIN, MODE_RDF, MODE_TEMPORAL):
            raise FormatError(f"unknown mode {mode}")
        off = 6

        def u64():
            nonlocal off
            if len(data) - off < 8:
                raise FormatError("truncated header")
            (v,) = _U64.unpack_from(data, off)
            off += 8
            return v

        nx, ysize, nz, h = u64(), u64(), u64(), u64()
        if not 1 <= h <= 64:
            raise FormatError(f"implausible level count {h}")
        ks = tuple(u64() for _ in range(h))
        l_rank = u64()
        if l_rank not in (0, 1):
            raise FormatError(f"bad l_rank flag {l_rank}")
        n_t, n_l = u64(), u64()
        T, off = BitVector.from_bytes(data, off)
        L, off = BitVector.from_bytes(data, off, rank_support=bool(l_rank))
        if len(T) != n_t or len(L) != n_l:
            raise FormatError("bitmap lengths disagree with the header")
        if off != len(data):
            raise FormatError(f"{len(data) - off} trailing bytes after payload")
        try:
            schedule = LevelSchedule(ks)
            tree = cls(T, L, schedule, nx, ysize, nz, bool(l_rank))
        except (InputError, ValueError) as exc:
            raise FormatError(f"invalid index: {exc}") from None
        return tree, mode
