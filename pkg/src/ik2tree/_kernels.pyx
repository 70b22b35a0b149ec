# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# distutils: language = c++
"""Compiled query kernels; a line-for-line port of ``_pykernels``.

Traversals run without the GIL over raw word pointers.  Results accumulate
in C++ vectors and come back as int64 numpy arrays, unsorted.
"""

from libc.stdint cimport int64_t, uint64_t
from libc.string cimport memcpy
from libcpp.vector cimport vector

import numpy as np

cdef extern from *:
    """
    #include <algorithm>
    #include <cstdint>
    #include <vector>
    struct Hit { int64_t ord; int64_t x; int64_t z; };
    static inline bool hit_less(const Hit& a, const Hit& b) {
        if (a.ord != b.ord) return a.ord < b.ord;
        if (a.x != b.x) return a.x < b.x;
        return a.z < b.z;
    }
    /* Merge the sorted runs delimited by b[from], b[from+1], ..., b.back()
       into one, using a caller-owned scratch buffer; pops the bounds. */
    static inline void merge_runs(std::vector<Hit>& v, std::vector<size_t>& b, size_t from,
                                  std::vector<Hit>& scratch) {
        size_t runs = b.size() - from - 1;
        if (runs >= 2) {
            size_t lo = b[from], hi = b.back();
            scratch.resize(hi - lo);
            if (runs == 2) {
                std::merge(v.begin() + lo, v.begin() + b[from + 1], v.begin() + b[from + 1],
                           v.begin() + hi, scratch.begin(), hit_less);
            } else if (runs <= 64) {
                size_t head[64], end[64];
                for (size_t r = 0; r < runs; ++r) { head[r] = b[from + r]; end[r] = b[from + r + 1]; }
                for (size_t o = 0; o < hi - lo; ++o) {
                    size_t best = runs;
                    for (size_t r = 0; r < runs; ++r)
                        if (head[r] < end[r] && (best == runs || hit_less(v[head[r]], v[head[best]])))
                            best = r;
                    scratch[o] = v[head[best]++];
                }
            } else {
                std::copy(v.begin() + lo, v.begin() + hi, scratch.begin());
                std::stable_sort(scratch.begin(), scratch.end(), hit_less);
            }
            std::copy(scratch.begin(), scratch.end(), v.begin() + lo);
        }
        b.resize(from);
    }
    static inline int popcount64(uint64_t w) { return __builtin_popcountll(w); }
    static inline int ctz64(uint64_t w) { return __builtin_ctzll(w); }
    """
    struct Hit:
        int64_t ord
        int64_t x
        int64_t z
    void merge_runs(vector[Hit]& v, vector[size_t]& b, size_t frm, vector[Hit]& scratch) nogil
    int popcount64(uint64_t w) nogil
    int ctz64(uint64_t w) nogil

NAME = "compiled"

DEF MAXH = 64

cdef enum:
    INSTANT = 0
    WEAK = 1
    STRONG = 2

cdef struct BV:
    const uint64_t* w
    const int64_t* blk
    int64_t nblk

cdef struct Geo:
    int h
    int64_t n_t
    int64_t ysize
    int64_t ks[MAXH]
    int64_t sub[MAXH]
    int64_t ls[MAXH + 1]
    int64_t lones[MAXH]

cdef uint64_t _DUMMY_W[1]
cdef int64_t _DUMMY_B[1]
_DUMMY_W[0] = 0
_DUMMY_B[0] = 0


cdef inline int64_t rank1(const BV* b, int64_t i) noexcept nogil:
    cdef int64_t blk = i >> 9
    cdef int64_t r = b.blk[blk]
    cdef int64_t k = blk << 3
    cdef int64_t e = i >> 6
    cdef int rem = i & 63
    while k < e:
        r += popcount64(b.w[k])
        k += 1
    if rem:
        r += popcount64(b.w[e] & ((<uint64_t>1 << rem) - 1))
    return r


cdef inline int bit(const BV* b, int64_t i) noexcept nogil:
    return (b.w[i >> 6] >> (i & 63)) & 1


cdef int64_t select1(const BV* b, int64_t j) noexcept nogil:
    """Position of the j-th one (1-based); caller guarantees it exists."""
    cdef int64_t lo = 0, hi = b.nblk, mid, need, w, c
    cdef uint64_t word
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if b.blk[mid] < j:
            lo = mid
        else:
            hi = mid
    need = j - b.blk[lo]
    w = lo << 3
    while True:
        c = popcount64(b.w[w])
        if c >= need:
            break
        need -= c
        w += 1
    word = b.w[w]
    while need > 1:
        word &= word - 1
        need -= 1
    return (w << 6) + ctz64(word)


cdef void load_bv(BV* out, object bv, list keep) except *:
    cdef const uint64_t[::1] words = bv.words
    cdef const int64_t[::1] blocks
    out.w = &words[0] if words.shape[0] else _DUMMY_W
    if bv.blocks is None:
        out.blk = _DUMMY_B
        out.nblk = 0
    else:
        blocks = bv.blocks
        out.blk = &blocks[0]
        out.nblk = blocks.shape[0] - 1
    keep.append(bv)


cdef void load_geo(Geo* g, tuple ks, tuple sub, tuple ls, tuple lones, int64_t ysize) except *:
    cdef int i, h = len(ks)
    if h > MAXH:
        raise ValueError(f"at most {MAXH} levels supported")
    g.h = h
    g.ysize = ysize
    for i in range(h):
        g.ks[i] = ks[i]
        g.sub[i] = sub[i]
        g.lones[i] = lones[i]
    for i in range(h + 1):
        g.ls[i] = ls[i]
    g.n_t = g.ls[h - 1]


cdef object as_array(vector[int64_t]& v):
    arr = np.empty(v.size(), dtype=np.int64)
    cdef int64_t[::1] mv = arr
    if v.size():
        memcpy(&mv[0], v.data(), v.size() * sizeof(int64_t))
    return arr


cdef inline bint outside(int64_t origin, int64_t side, int64_t lo, int64_t hi) noexcept nogil:
    return origin > hi or origin + side <= lo


# ---------------------------------------------------------------- eager
#
# Internal nodes receive ``rs = rank1(T, start)`` and their ones count ``m``
# from the parent.  Siblings are contiguous, so the parent gets both from
# one rank per child boundary through a one-slot cache.

cdef inline int64_t rank_cached(const BV* b, int64_t pos, int64_t* last_pos,
                                int64_t* last_rank) noexcept nogil:
    if pos != last_pos[0]:
        last_pos[0] = pos
        last_rank[0] = rank1(b, pos)
    return last_rank[0]


cdef struct EagerCtx:
    BV T
    BV L
    Geo g
    int64_t xlo, xhi, zlo, zhi
    vector[int64_t] arena
    vector[int64_t] out


cdef void eager_visit(EagerCtx* c, int level, int64_t start, int64_t width, int64_t rs,
                      int64_t m, int64_t r0, int64_t c0, int64_t lo, int64_t hi,
                      size_t aoff) noexcept nogil:
    cdef int64_t s, p, q, avail, a, b, k, sz, base, r, cc_, cr, cc, v, cs, r1, r2
    cdef int64_t lp = -1, lr = 0
    cdef uint64_t word
    cdef size_t new_off
    cdef bint inner
    if level == c.g.h - 1:
        s = start - c.g.n_t
        p = s + lo
        q = s + hi
        while p < q:
            word = c.L.w[p >> 6] >> (p & 63)
            avail = 64 - (p & 63)
            if q - p < avail:
                word &= (<uint64_t>1 << (q - p)) - 1
            while word:
                v = p + ctz64(word) - s
                c.out.push_back(r0)
                c.out.push_back(c.arena[aoff + v - lo])
                c.out.push_back(c0)
                word &= word - 1
            p += avail
        return
    a = 0 if lo == 0 else rank1(&c.T, start + lo) - rs
    b = m if hi == width else rank1(&c.T, start + hi) - rs
    if a == b:
        return
    # active list of the children: y of every 1 inside the window
    new_off = c.arena.size()
    p = start + lo
    q = start + hi
    while p < q:
        word = c.T.w[p >> 6] >> (p & 63)
        avail = 64 - (p & 63)
        if q - p < avail:
            word &= (<uint64_t>1 << (q - p)) - 1
        while word:
            v = c.arena[aoff + (p + ctz64(word) - start) - lo]
            c.arena.push_back(v)
            word &= word - 1
        p += avail
    k = c.g.ks[level + 1]
    sz = c.g.sub[level + 1]
    base = c.g.ls[level + 1] + (rs - c.g.lones[level]) * k * k
    inner = level + 1 < c.g.h - 1
    r1 = r2 = 0
    for cr in range(k):
        r = r0 + cr * sz
        if outside(r, sz, c.xlo, c.xhi):
            continue
        for cc in range(k):
            cc_ = c0 + cc * sz
            if outside(cc_, sz, c.zlo, c.zhi):
                continue
            cs = base + (cr * k + cc) * m
            if inner:
                r1 = rank_cached(&c.T, cs, &lp, &lr)
                r2 = rank_cached(&c.T, cs + m, &lp, &lr)
                if r1 == r2:
                    continue
            eager_visit(c, level + 1, cs, m, r1, r2 - r1, r, cc_, a, b, new_off)
    c.arena.resize(new_off)


def eager_query(tree, int64_t xlo, int64_t xhi, int64_t zlo, int64_t zhi, int64_t ylo, int64_t yhi):
    cdef EagerCtx c
    cdef list keep = []
    cdef int64_t k, sz, w, cr, cc, y, cs, r1, r2
    cdef int64_t lp = -1, lr = 0
    g = tree.geometry
    load_bv(&c.T, tree.T, keep)
    load_bv(&c.L, tree.L, keep)
    load_geo(&c.g, g.ks, g.sub, g.level_start, g.level_ones, tree.ysize)
    c.xlo, c.xhi, c.zlo, c.zhi = xlo, xhi, zlo, zhi
    for y in range(ylo, yhi + 1):
        c.arena.push_back(y)
    k = c.g.ks[0]
    sz = c.g.sub[0]
    w = c.g.ysize
    r1 = r2 = 0
    with nogil:
        for cr in range(k):
            if outside(cr * sz, sz, xlo, xhi):
                continue
            for cc in range(k):
                if outside(cc * sz, sz, zlo, zhi):
                    continue
                cs = (cr * k + cc) * w
                if c.g.h > 1:
                    r1 = rank_cached(&c.T, cs, &lp, &lr)
                    r2 = rank_cached(&c.T, cs + w, &lp, &lr)
                    if r1 == r2:
                        continue
                eager_visit(&c, 0, cs, w, r1, r2 - r1, cr * sz, cc * sz, ylo, yhi + 1, 0)
    flat = as_array(c.out).reshape(-1, 3)
    return flat[:, 0], flat[:, 1], flat[:, 2]


# ---------------------------------------------------------------- lazy

cdef struct LazyCtx:
    BV T
    BV L
    Geo g
    int64_t xlo, xhi, zlo, zhi
    vector[Hit] hits
    vector[size_t] bounds
    vector[Hit] scratch


cdef inline int64_t select_from(const BV* b, int64_t* p, int64_t need) noexcept nogil:
    """Position of the ``need``-th one at or after ``*p``; advances ``*p`` past it."""
    cdef uint64_t word
    cdef int64_t q = p[0], c
    while True:
        word = b.w[q >> 6] >> (q & 63)
        c = popcount64(word)
        if c >= need:
            break
        need -= c
        q = (q | 63) + 1
    while need > 1:
        word &= word - 1
        need -= 1
    q += ctz64(word)
    p[0] = q + 1
    return q


cdef void lazy_visit(LazyCtx* c, int level, int64_t start, int64_t width, int64_t rs,
                     int64_t m, int64_t r0, int64_t c0) noexcept nogil:
    cdef int64_t s, p, q, avail, k, sz, base, r, cc_, cr, cc, j, prev, pos, seen, cs, r1, r2
    cdef int64_t lp = -1, lr = 0
    cdef uint64_t word
    cdef size_t seg, mark, before, i
    cdef bint inner
    cdef Hit hit
    if level == c.g.h - 1:
        s = start - c.g.n_t
        p = s
        q = s + width
        hit.x = r0
        hit.z = c0
        while p < q:
            word = c.L.w[p >> 6] >> (p & 63)
            avail = 64 - (p & 63)
            if q - p < avail:
                word &= (<uint64_t>1 << (q - p)) - 1
            while word:
                hit.ord = p + ctz64(word) - s
                c.hits.push_back(hit)
                word &= word - 1
            p += avail
        return
    # top-down: only the ones count m is known here
    k = c.g.ks[level + 1]
    sz = c.g.sub[level + 1]
    base = c.g.ls[level + 1] + (rs - c.g.lones[level]) * k * k
    inner = level + 1 < c.g.h - 1
    r1 = r2 = 0
    seg = c.hits.size()
    mark = c.bounds.size()
    c.bounds.push_back(seg)
    for cr in range(k):
        r = r0 + cr * sz
        if outside(r, sz, c.xlo, c.xhi):
            continue
        for cc in range(k):
            cc_ = c0 + cc * sz
            if outside(cc_, sz, c.zlo, c.zhi):
                continue
            cs = base + (cr * k + cc) * m
            if inner:
                r1 = rank_cached(&c.T, cs, &lp, &lr)
                r2 = rank_cached(&c.T, cs + m, &lp, &lr)
                if r1 == r2:
                    continue
            before = c.hits.size()
            lazy_visit(c, level + 1, cs, m, r1, r2 - r1, r, cc_)
            if c.hits.size() > before:
                c.bounds.push_back(c.hits.size())
    if c.hits.size() == seg:
        c.bounds.resize(mark)
        return
    # bottom-up: merge the children's runs by ordinal, then map each
    # distinct ordinal j to the position of the (j+1)-th one of this node.
    # Ordinals ascend, so the node's ones are walked left to right and the
    # rank directory is only used to jump long gaps.
    merge_runs(c.hits, c.bounds, mark, c.scratch)
    prev = -1
    pos = 0
    seen = 0
    p = start
    for i in range(seg, c.hits.size()):
        j = c.hits[i].ord
        if j != prev:
            if j - seen >= 512:
                pos = select1(&c.T, rs + j + 1)
                p = pos + 1
            else:
                pos = select_from(&c.T, &p, j - seen + 1)
            seen = j + 1
            prev = j
        c.hits[i].ord = pos - start


def lazy_query(tree, int64_t xlo, int64_t xhi, int64_t zlo, int64_t zhi):
    cdef LazyCtx c
    cdef list keep = []
    cdef vector[int64_t] xs, ys, zs
    cdef int64_t k, sz, w, cr, cc, cs, r1, r2
    cdef int64_t lp = -1, lr = 0
    cdef size_t i
    g = tree.geometry
    load_bv(&c.T, tree.T, keep)
    load_bv(&c.L, tree.L, keep)
    load_geo(&c.g, g.ks, g.sub, g.level_start, g.level_ones, tree.ysize)
    c.xlo, c.xhi, c.zlo, c.zhi = xlo, xhi, zlo, zhi
    k = c.g.ks[0]
    sz = c.g.sub[0]
    w = c.g.ysize
    r1 = r2 = 0
    with nogil:
        for cr in range(k):
            if outside(cr * sz, sz, xlo, xhi):
                continue
            for cc in range(k):
                if outside(cc * sz, sz, zlo, zhi):
                    continue
                cs = (cr * k + cc) * w
                if c.g.h > 1:
                    r1 = rank_cached(&c.T, cs, &lp, &lr)
                    r2 = rank_cached(&c.T, cs + w, &lp, &lr)
                    if r1 == r2:
                        continue
                lazy_visit(&c, 0, cs, w, r1, r2 - r1, cr * sz, cc * sz)
        xs.reserve(c.hits.size())
        ys.reserve(c.hits.size())
        zs.reserve(c.hits.size())
        for i in range(c.hits.size()):
            xs.push_back(c.hits[i].x)
            ys.push_back(c.hits[i].ord)
            zs.push_back(c.hits[i].z)
    return as_array(xs), as_array(ys), as_array(zs)


# ---------------------------------------------------------------- temporal

cdef struct TempCtx:
    BV T
    BV L
    Geo g
    int64_t xlo, xhi, zlo, zhi
    int mode
    bint prune


cdef void temporal_visit(TempCtx* c, vector[int64_t]* out, int level, int64_t start,
                         int64_t width, int64_t r0, int64_t c0, int64_t ca, int64_t cb) noexcept nogil:
    cdef int64_t s, lb, before, changed, rs, pa, pb, m, k, sz, base, r, cc_, cr, cc
    cdef bint hit
    if level == c.g.h - 1:
        s = start - c.g.n_t
        lb = rank1(&c.L, s)
        before = rank1(&c.L, s + ca) - lb
        if c.mode == INSTANT:
            hit = before & 1
        else:
            changed = rank1(&c.L, s + cb) - lb - before
            if c.mode == WEAK:
                hit = (before & 1) or changed > 0
            else:
                hit = (before & 1) and changed == 0
        if hit:
            out.push_back(r0)
            out.push_back(c0)
        return
    rs = rank1(&c.T, start)
    pa = rank1(&c.T, start + ca) - rs
    pb = rank1(&c.T, start + cb) - rs
    if c.prune and (pb if c.mode == WEAK else pa) == 0:
        return
    m = rank1(&c.T, start + width) - rs
    if m == 0:
        return
    k = c.g.ks[level + 1]
    sz = c.g.sub[level + 1]
    base = c.g.ls[level + 1] + (rs - c.g.lones[level]) * k * k
    for cr in range(k):
        r = r0 + cr * sz
        if outside(r, sz, c.xlo, c.xhi):
            continue
        for cc in range(k):
            cc_ = c0 + cc * sz
            if outside(cc_, sz, c.zlo, c.zhi):
                continue
            temporal_visit(c, out, level + 1, base + (cr * k + cc) * m, m, r, cc_, pa, pb)


def temporal_query(tree, int64_t xlo, int64_t xhi, int64_t zlo, int64_t zhi,
                   int64_t tl, int64_t tr, int mode, bint prune=True):
    cdef TempCtx c
    cdef list keep = []
    cdef vector[int64_t] out
    cdef int64_t k, sz, w, cr, cc
    if tree.L.blocks is None:
        raise RuntimeError("temporal queries need rank support on L")
    g = tree.geometry
    load_bv(&c.T, tree.T, keep)
    load_bv(&c.L, tree.L, keep)
    load_geo(&c.g, g.ks, g.sub, g.level_start, g.level_ones, tree.ysize)
    c.xlo, c.xhi, c.zlo, c.zhi = xlo, xhi, zlo, zhi
    c.mode = mode
    c.prune = prune
    k = c.g.ks[0]
    sz = c.g.sub[0]
    w = c.g.ysize
    with nogil:
        for cr in range(k):
            if outside(cr * sz, sz, xlo, xhi):
                continue
            for cc in range(k):
                if outside(cc * sz, sz, zlo, zhi):
                    continue
                temporal_visit(&c, &out, 0, (cr * k + cc) * w, w, cr * sz, cc * sz, tl + 1, tr + 1)
    flat = as_array(out).reshape(-1, 2)
    return flat[:, 0], flat[:, 1]


# ---------------------------------------------------------------- k2 forest

cdef struct ForestCtx:
    BV T
    BV L
    int h
    int64_t ks[MAXH]
    int64_t sub[MAXH]
    const int64_t* ls
    const int64_t* lones
    int64_t toff, loff, n_t, rbase, t
    int64_t xlo, xhi, zlo, zhi
    bint prune


cdef inline int fbit(ForestCtx* c, int64_t p) noexcept nogil:
    if p < c.n_t:
        return bit(&c.T, c.toff + p)
    return bit(&c.L, c.loff + p - c.n_t)


cdef void forest_visit(ForestCtx* c, vector[int64_t]* out, int level, int64_t p,
                       int64_t r0, int64_t c0) noexcept nogil:
    cdef int64_t k, sz, base, r, cc_, cr, cc, q
    if level == c.h - 1:
        if c.prune or (c.xlo <= r0 <= c.xhi and c.zlo <= c0 <= c.zhi):
            out.push_back(r0)
            out.push_back(c.t)
            out.push_back(c0)
        return
    k = c.ks[level + 1]
    sz = c.sub[level + 1]
    base = c.ls[level + 1] + (rank1(&c.T, c.toff + p) - c.rbase - c.lones[level]) * k * k
    for cr in range(k):
        r = r0 + cr * sz
        if c.prune and outside(r, sz, c.xlo, c.xhi):
            continue
        for cc in range(k):
            cc_ = c0 + cc * sz
            if c.prune and outside(cc_, sz, c.zlo, c.zhi):
                continue
            q = base + cr * k + cc
            if fbit(c, q):
                forest_visit(c, out, level + 1, q, r, cc_)


def forest_query(forest, int64_t t_lo, int64_t t_hi, int64_t xlo, int64_t xhi,
                 int64_t zlo, int64_t zhi, bint prune=True):
    cdef ForestCtx c
    cdef list keep = []
    cdef vector[int64_t] out
    cdef int64_t k, sz, cr, cc, q, t
    cdef int i, h = len(forest.ks)
    cdef const int64_t[::1] toffs, loffs
    cdef const int64_t[:, ::1] ls, lones
    if h > MAXH:
        raise ValueError(f"at most {MAXH} levels supported")
    cache = forest.np_cache
    if cache is None:
        cache = (np.asarray(forest.t_off, dtype=np.int64), np.asarray(forest.l_off, dtype=np.int64),
                 np.asarray(forest.level_start, dtype=np.int64).reshape(-1, h + 1),
                 np.asarray(forest.level_ones, dtype=np.int64).reshape(-1, h))
        forest.np_cache = cache
    toffs, loffs, ls, lones = cache
    load_bv(&c.T, forest.T, keep)
    load_bv(&c.L, forest.L, keep)
    c.h = h
    for i in range(h):
        c.ks[i] = forest.ks[i]
        c.sub[i] = forest.sub[i]
    c.xlo, c.xhi, c.zlo, c.zhi = xlo, xhi, zlo, zhi
    c.prune = prune
    k = c.ks[0]
    sz = c.sub[0]
    with nogil:
        for t in range(t_lo, t_hi + 1):
            c.t = t
            c.toff = toffs[t]
            c.loff = loffs[t]
            c.ls = &ls[t, 0]
            c.lones = &lones[t, 0]
            c.n_t = c.ls[h - 1]
            c.rbase = rank1(&c.T, c.toff)
            for cr in range(k):
                if prune and outside(cr * sz, sz, xlo, xhi):
                    continue
                for cc in range(k):
                    if prune and outside(cc * sz, sz, zlo, zhi):
                        continue
                    q = cr * k + cc
                    if fbit(&c, q):
                        forest_visit(&c, &out, 0, q, cr * sz, cc * sz)
    flat = as_array(out).reshape(-1, 3)
    return flat[:, 0], flat[:, 1], flat[:, 2]
