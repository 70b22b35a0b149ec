"""Pure-Python query kernels.

Same signatures and results as the compiled ``_kernels`` module.  Used when
the extension is not built or when ``IK2TREE_PURE_PYTHON`` is set.

Every kernel returns unsorted parallel lists; callers sort.
"""

from __future__ import annotations

import heapq

INSTANT, WEAK, STRONG = 0, 1, 2

NAME = "python"


def _ranker(bv):
    words = bv.pywords
    blocks = bv.pyblocks

    def rank(i):
        b = i >> 9
        r = blocks[b]
        w = i >> 6
        for k in range(b << 3, w):
            r += words[k].bit_count()
        rem = i & 63
        if rem:
            r += (words[w] & ((1 << rem) - 1)).bit_count()
        return r

    return rank


def _bitter(bv):
    words = bv.pywords

    def bit(i):
        return (words[i >> 6] >> (i & 63)) & 1

    return bit


def eager_query(tree, xlo, xhi, zlo, zhi, ylo, yhi):
    """Top-down traversal carrying, per node, the window of bits whose y lies
    in ``[ylo, yhi]`` and the y value of each bit in that window."""
    g = tree.geometry
    ks, sub, ls, lones, n_t = g.ks, g.sub, g.level_start, g.level_ones, g.n_t
    last = g.h - 1
    rank = _ranker(tree.T)
    tbit = _bitter(tree.T)
    lbit = _bitter(tree.L)
    xs, ys, zs = [], [], []

    def visit(level, start, width, r0, c0, lo, hi, active):
        if level == last:
            s = start - n_t
            for i in range(lo, hi):
                if lbit(s + i):
                    xs.append(r0)
                    ys.append(active[i - lo])
                    zs.append(c0)
            return
        rs = rank(start)
        a = rank(start + lo) - rs
        b = rank(start + hi) - rs
        if a == b:
            return
        m = rank(start + width) - rs
        child_active = [active[i - lo] for i in range(lo, hi) if tbit(start + i)]
        k = ks[level + 1]
        s = sub[level + 1]
        base = ls[level + 1] + (rs - lones[level]) * k * k
        for cr in range(k):
            r = r0 + cr * s
            if r > xhi or r + s <= xlo:
                continue
            for cc in range(k):
                c = c0 + cc * s
                if c > zhi or c + s <= zlo:
                    continue
                visit(level + 1, base + (cr * k + cc) * m, m, r, c, a, b, child_active)

    k, s, w = ks[0], sub[0], tree.ysize
    root_active = list(range(ylo, yhi + 1))
    for cr in range(k):
        if cr * s > xhi or cr * s + s <= xlo:
            continue
        for cc in range(k):
            if cc * s > zhi or cc * s + s <= zlo:
                continue
            visit(0, (cr * k + cc) * w, w, cr * s, cc * s, ylo, yhi + 1, root_active)
    return xs, ys, zs


def lazy_query(tree, xlo, xhi, zlo, zhi):
    """Two-phase traversal.

    Going down, a node only computes its ones count.  Each leaf reports the
    positions of its ones (relative y ordinals); on the way back up, sibling
    lists are merged by ordinal and each distinct ordinal ``j`` is mapped
    through the parent with ``select1`` to the parent bit position.  At the
    top level the position is the y value itself.
    """
    g = tree.geometry
    ks, sub, ls, lones, n_t = g.ks, g.sub, g.level_start, g.level_ones, g.n_t
    last = g.h - 1
    T = tree.T
    rank = _ranker(T)
    select = T.select1 if len(T) else None
    lbit = _bitter(tree.L)

    def visit(level, start, width, r0, c0):
        if level == last:
            s = start - n_t
            return [(i, r0, c0) for i in range(width) if lbit(s + i)]
        rs = rank(start)
        m = rank(start + width) - rs
        if m == 0:
            return []
        k = ks[level + 1]
        s = sub[level + 1]
        base = ls[level + 1] + (rs - lones[level]) * k * k
        runs = []
        for cr in range(k):
            r = r0 + cr * s
            if r > xhi or r + s <= xlo:
                continue
            for cc in range(k):
                c = c0 + cc * s
                if c > zhi or c + s <= zlo:
                    continue
                run = visit(level + 1, base + (cr * k + cc) * m, m, r, c)
                if run:
                    runs.append(run)
        if not runs:
            return runs
        out = []
        prev, pos = -1, 0
        for j, x, z in heapq.merge(*runs):
            if j != prev:
                pos = select(rs + j + 1) - start
                prev = j
            out.append((pos, x, z))
        return out

    xs, ys, zs = [], [], []
    k, s, w = ks[0], sub[0], tree.ysize
    for cr in range(k):
        if cr * s > xhi or cr * s + s <= xlo:
            continue
        for cc in range(k):
            if cc * s > zhi or cc * s + s <= zlo:
                continue
            for y, x, z in visit(0, (cr * k + cc) * w, w, cr * s, cc * s):
                xs.append(x)
                ys.append(y)
                zs.append(z)
    return xs, ys, zs


def temporal_query(tree, xlo, xhi, zlo, zhi, tl, tr, mode, prune=True):
    """Differential-tree query; y is time and leaf bits are change events.

    Each node carries two offsets: ``ca`` (first bit with time > tl) and
    ``cb`` (first bit with time > tr).  At a leaf, ``ones[0, ca)`` is the
    number of changes up to ``tl`` (its parity is the state at ``tl``) and
    ``ones[ca, cb)`` the number of changes in ``(tl, tr]``.
    """
    g = tree.geometry
    ks, sub, ls, lones, n_t = g.ks, g.sub, g.level_start, g.level_ones, g.n_t
    last = g.h - 1
    rank = _ranker(tree.T)
    lrank = _ranker(tree.L)
    xs, zs = [], []

    def visit(level, start, width, r0, c0, ca, cb):
        if level == last:
            s = start - n_t
            base = lrank(s)
            before = lrank(s + ca) - base
            if mode == INSTANT:
                hit = before & 1
            else:
                changed = lrank(s + cb) - base - before
                if mode == WEAK:
                    hit = (before & 1) or changed
                else:
                    hit = (before & 1) and not changed
            if hit:
                xs.append(r0)
                zs.append(c0)
            return
        rs = rank(start)
        pa = rank(start + ca) - rs
        pb = rank(start + cb) - rs
        if prune and (pb if mode == WEAK else pa) == 0:
            return
        m = rank(start + width) - rs
        if m == 0:
            return
        k = ks[level + 1]
        s = sub[level + 1]
        base = ls[level + 1] + (rs - lones[level]) * k * k
        for cr in range(k):
            r = r0 + cr * s
            if r > xhi or r + s <= xlo:
                continue
            for cc in range(k):
                c = c0 + cc * s
                if c > zhi or c + s <= zlo:
                    continue
                visit(level + 1, base + (cr * k + cc) * m, m, r, c, pa, pb)

    k, s, w = ks[0], sub[0], tree.ysize
    for cr in range(k):
        if cr * s > xhi or cr * s + s <= xlo:
            continue
        for cc in range(k):
            if cc * s > zhi or cc * s + s <= zlo:
                continue
            visit(0, (cr * k + cc) * w, w, cr * s, cc * s, tl + 1, tr + 1)
    return xs, zs


def forest_query(forest, t_lo, t_hi, xlo, xhi, zlo, zhi, prune=True):
    """Range query on trees ``t_lo..t_hi`` of a packed k2-tree forest."""
    ks, sub = forest.ks, forest.sub
    last = len(ks) - 1
    rank = _ranker(forest.T)
    tbit = _bitter(forest.T)
    lbit = _bitter(forest.L)
    xs, ts, zs = [], [], []

    for t in range(t_lo, t_hi + 1):
        toff = forest.t_off[t]
        loff = forest.l_off[t]
        ls = forest.level_start[t]
        lones = forest.level_ones[t]
        n_t = ls[last]
        rbase = rank(toff)

        def bit(p):
            return tbit(toff + p) if p < n_t else lbit(loff + p - n_t)

        def visit(level, p, r0, c0):
            if level == last:
                if prune or (xlo <= r0 <= xhi and zlo <= c0 <= zhi):
                    xs.append(r0)
                    ts.append(t)
                    zs.append(c0)
                return
            k = ks[level + 1]
            s = sub[level + 1]
            base = ls[level + 1] + (rank(toff + p) - rbase - lones[level]) * k * k
            for cr in range(k):
                r = r0 + cr * s
                if prune and (r > xhi or r + s <= xlo):
                    continue
                for cc in range(k):
                    c = c0 + cc * s
                    if prune and (c > zhi or c + s <= zlo):
                        continue
                    q = base + cr * k + cc
                    if bit(q):
                        visit(level + 1, q, r, c)

        k, s = ks[0], sub[0]
        for cr in range(k):
            if prune and (cr * s > xhi or cr * s + s <= xlo):
                continue
            for cc in range(k):
                if prune and (cc * s > zhi or cc * s + s <= zlo):
                    continue
                q = cr * k + cc
                if bit(q):
                    visit(0, q, cr * s, cc * s)
    return xs, ts, zs
