"""Plain bit sequences with rank/select support.

Bits are packed least-significant-bit first into 64-bit words.  The rank
directory stores one absolute cumulative popcount per 512-bit block, so a
rank query costs one directory lookup plus at most eight word popcounts.
select1 binary-searches the directory and then scans words.

All positions are 0-based and ``rank1(i)`` counts the set bits in the
half-open prefix ``[0, i)``.
"""

from __future__ import annotations

import struct
from collections.abc import Iterable

import numpy as np

from .errors import FormatError, NotFoundError

BLOCK_BITS = 512
WORD_BITS = 64
_WORDS_PER_BLOCK = BLOCK_BITS // WORD_BITS
_LEN = struct.Struct("<Q")


def _pack(bits: np.ndarray) -> np.ndarray:
    packed = np.packbits(bits.astype(bool, copy=False), bitorder="little")
    pad = (-len(packed)) % 8
    if pad:
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
    return packed.view("<u8").astype(np.uint64, copy=False)


def _directory(words: np.ndarray, length: int) -> np.ndarray:
    nblocks = -(-length // BLOCK_BITS)
    counts = np.bitwise_count(words).astype(np.int64)
    padded = np.zeros(nblocks * _WORDS_PER_BLOCK, dtype=np.int64)
    padded[: len(counts)] = counts
    per_block = padded.reshape(nblocks, _WORDS_PER_BLOCK).sum(axis=1)
    blocks = np.zeros(nblocks + 1, dtype=np.int64)
    np.cumsum(per_block, out=blocks[1:])
    return blocks


class BitVector:
    """Immutable bit sequence.

    ``words`` is the packed payload (``numpy.uint64``).  ``blocks`` is the rank
    directory (``numpy.int64``, one entry per 512-bit block plus a sentinel
    holding the total), or ``None`` when built with ``rank_support=False``.
    """

    __slots__ = ("length", "words", "blocks", "_ones", "_pw", "_pb")

    def __init__(self, words: np.ndarray, length: int, rank_support: bool = True):
        words = np.ascontiguousarray(words, dtype=np.uint64)
        need = -(-length // WORD_BITS)
        if len(words) < need:
            raise ValueError(f"{len(words)} words cannot hold {length} bits")
        words = words[:need].copy()
        tail = length % WORD_BITS
        if tail and need:
            words[-1] &= np.uint64((1 << tail) - 1)
        self.length = int(length)
        self.words = words
        self.blocks = _directory(words, self.length) if rank_support else None
        self._ones = int(np.bitwise_count(words).sum()) if need else 0
        self._pw = None
        self._pb = None

    @classmethod
    def build(cls, bits: Iterable[int] | np.ndarray, rank_support: bool = True) -> BitVector:
        arr = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits))
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("bits must be 0 or 1")
        return cls(_pack(arr.reshape(-1)), arr.size, rank_support)

    @classmethod
    def zeros(cls, length: int, rank_support: bool = True) -> BitVector:
        return cls(np.zeros(-(-length // WORD_BITS), dtype=np.uint64), length, rank_support)

    # -- basic properties -------------------------------------------------

    def __len__(self) -> int:
        return self.length

    @property
    def ones(self) -> int:
        return self._ones

    @property
    def rank_support(self) -> bool:
        return self.blocks is not None

    @property
    def directory_bits(self) -> int:
        """Bits spent on the rank directory, excluding the total sentinel."""
        if self.blocks is None:
            return 0
        return (len(self.blocks) - 1) * 64

    def to_numpy(self) -> np.ndarray:
        raw = self.words.astype("<u8").view(np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.length]

    def tolist(self) -> list[int]:
        return self.to_numpy().tolist()

    def __iter__(self):
        return iter(self.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.words, other.words)

    def __hash__(self):
        return hash((self.length, self.words.tobytes()))

    def __repr__(self) -> str:
        if self.length <= 64:
            return f"BitVector({''.join(map(str, self.tolist()))!r})"
        return f"BitVector(length={self.length}, ones={self._ones})"

    # -- python-side caches used by the pure-Python kernels ---------------

    @property
    def pywords(self) -> list[int]:
        if self._pw is None:
            self._pw = self.words.tolist()
        return self._pw

    @property
    def pyblocks(self) -> list[int]:
        if self._pb is None:
            self._require_rank()
            self._pb = self.blocks.tolist()
        return self._pb

    def _require_rank(self):
        if self.blocks is None:
            raise RuntimeError("bitvector was built without rank support")

    # -- queries ----------------------------------------------------------

    def access(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(f"position {i} out of range for length {self.length}")
        return (self.pywords[i >> 6] >> (i & 63)) & 1

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.length
        return self.access(i)

    def rank1(self, i: int) -> int:
        """Number of set bits in ``[0, i)``."""
        if not 0 <= i <= self.length:
            raise IndexError(f"rank position {i} out of range for length {self.length}")
        blocks = self.pyblocks
        words = self.pywords
        b = i >> 9
        r = blocks[b]
        w = i >> 6
        for k in range(b << 3, w):
            r += words[k].bit_count()
        rem = i & 63
        if rem:
            r += (words[w] & ((1 << rem) - 1)).bit_count()
        return r

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def select1(self, j: int) -> int:
        """Position of the ``j``-th set bit (``j`` is 1-based)."""
        blocks = self.pyblocks
        if not 1 <= j <= self._ones:
            raise NotFoundError(f"select1({j}) with only {self._ones} ones")
        lo, hi = 0, len(blocks) - 1
        # last block whose cumulative count is < j
        while hi - lo > 1:
            mid = (lo + hi) >> 1
            if blocks[mid] < j:
                lo = mid
            else:
                hi = mid
        need = j - blocks[lo]
        words = self.pywords
        w = lo << 3
        while True:
            c = words[w].bit_count()
            if c >= need:
                break
            need -= c
            w += 1
        word = words[w]
        for _ in range(need - 1):
            word &= word - 1
        return (w << 6) + ((word & -word).bit_length() - 1)

    def count(self, start: int, stop: int) -> int:
        """Set bits in ``[start, stop)``."""
        return self.rank1(stop) - self.rank1(start)

    # -- serialization ----------------------------------------------------

    def to_bytes(self) -> bytes:
        nbytes = -(-self.length // 8)
        payload = self.words.astype("<u8").tobytes()[:nbytes]
        return _LEN.pack(self.length) + payload

    @classmethod
    def from_bytes(cls, data: bytes | memoryview, offset: int = 0,
                   rank_support: bool = True) -> tuple[BitVector, int]:
        """Parse one bitvector at ``offset``; returns it and the next offset."""
        if len(data) - offset < _LEN.size:
            raise FormatError("truncated bitvector header")
        (length,) = _LEN.unpack_from(data, offset)
        offset += _LEN.size
        nbytes = -(-length // 8)
        if len(data) - offset < nbytes:
            raise FormatError(f"bitvector declares {length} bits but payload is truncated")
        raw = np.frombuffer(bytes(data[offset:offset + nbytes]), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")
        if bits[length:].any():
            raise FormatError("nonzero padding bits in bitvector payload")
        return cls(_pack(bits[:length]), length, rank_support), offset + nbytes


def concat(parts: Iterable[BitVector | np.ndarray], rank_support: bool = True) -> BitVector:
    arrays = [p.to_numpy() if isinstance(p, BitVector) else np.asarray(p, dtype=np.uint8)
              for p in parts]
    bits = np.concatenate(arrays) if arrays else np.zeros(0, dtype=np.uint8)
    return BitVector(_pack(bits), len(bits), rank_support)
