# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled AUSO enumeration kernel (same contract as _enum_py.enumerate_masks)."""

from libc.stdint cimport uint64_t

from ._enum_py import _incidences

cdef enum:
    MAXV = 64
    MAXE = 96
    MAXS = 192
    MAXF = 34

cdef struct State:
    int m
    int eu[MAXE]
    int ev[MAXE]
    int nf[MAXE]
    int lo[MAXE][2]
    int hi[MAXE][2]
    int slot_facet[MAXS]
    int out_cnt[MAXS]
    int in_cnt[MAXS]
    int alive[MAXF]
    int sinks[MAXF]
    uint64_t outmask[MAXV]


cdef inline int _lowbit(uint64_t x) nogil:
    cdef int i = 0
    while not (x & 1):
        x >>= 1
        i += 1
    return i


cdef bint _reaches(State* s, int src, int dst) nogil:
    cdef uint64_t seen = (<uint64_t>1) << src
    cdef uint64_t frontier = seen
    cdef uint64_t target = (<uint64_t>1) << dst
    cdef uint64_t nxt, low
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & (~frontier + 1)
            nxt |= s.outmask[_lowbit(low)]
            frontier ^= low
        if nxt & target:
            return True
        frontier = nxt & ~seen
        seen |= nxt
    return False


cdef bint _apply(State* s, int e, int d) nogil:
    cdef bint ok = True
    cdef int k, t, h, f
    for k in range(s.nf[e]):
        if d:
            t = s.hi[e][k]
            h = s.lo[e][k]
        else:
            t = s.lo[e][k]
            h = s.hi[e][k]
        f = s.slot_facet[t]
        s.out_cnt[t] += 1
        if s.out_cnt[t] == 1:
            s.alive[f] -= 1
            if s.alive[f] == 0:
                ok = False
        s.in_cnt[h] += 1
        if s.in_cnt[h] == 2:
            s.sinks[f] += 1
            if s.sinks[f] > 1:
                ok = False
    return ok


cdef void _undo(State* s, int e, int d) nogil:
    cdef int k, t, h, f
    for k in range(s.nf[e]):
        if d:
            t = s.hi[e][k]
            h = s.lo[e][k]
        else:
            t = s.lo[e][k]
            h = s.hi[e][k]
        f = s.slot_facet[t]
        if s.out_cnt[t] == 1:
            s.alive[f] += 1
        s.out_cnt[t] -= 1
        if s.in_cnt[h] == 2:
            s.sinks[f] -= 1
        s.in_cnt[h] -= 1


cdef void _rec(State* s, int e, uint64_t mask, list out):
    cdef int d, a, b
    if e == s.m:
        out.append(mask)
        return
    for d in range(2):
        if d:
            a = s.ev[e]
            b = s.eu[e]
        else:
            a = s.eu[e]
            b = s.ev[e]
        if _reaches(s, b, a):
            continue
        if _apply(s, e, d):
            s.outmask[a] |= (<uint64_t>1) << b
            _rec(s, e + 1, mask | ((<uint64_t>d) << e), out)
            s.outmask[a] &= ~((<uint64_t>1) << b)
        _undo(s, e, d)


def enumerate_masks(int nv, edges, facets):
    """All acyclic unique-sink orientations as bitmasks, in lexicographic order."""
    cdef State s
    cdef int e, k, i
    if nv > MAXV or len(edges) > MAXE or len(facets) > MAXF:
        raise ValueError("graph too large for the compiled kernel")
    inc, slot_facet = _incidences(nv, edges, facets)
    s.m = len(edges)
    for e in range(s.m):
        s.eu[e] = edges[e][0]
        s.ev[e] = edges[e][1]
        s.nf[e] = len(inc[e])
        for k in range(s.nf[e]):
            s.lo[e][k] = inc[e][k][0]
            s.hi[e][k] = inc[e][k][1]
    for i in range(len(slot_facet)):
        s.slot_facet[i] = slot_facet[i]
        s.out_cnt[i] = 0
        s.in_cnt[i] = 0
    for i in range(len(facets)):
        s.alive[i] = len(facets[i])
        s.sinks[i] = 0
    for i in range(nv):
        s.outmask[i] = 0
    out = []
    _rec(&s, 0, 0, out)
    return out
