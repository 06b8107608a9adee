"""Pure-Python AUSO enumeration kernel; same algorithm and output as the compiled one."""

from __future__ import annotations

from typing import Sequence


def _incidences(nv: int, edges: Sequence[tuple[int, int]], facets: Sequence[Sequence[int]]):
    slot: dict[tuple[int, int], int] = {}
    slot_facet: list[int] = []
    for f, cyc in enumerate(facets):
        for x in cyc:
            slot[(f, x)] = len(slot_facet)
            slot_facet.append(f)
    index = {e: i for i, e in enumerate(edges)}
    edge_facets: list[list[int]] = [[] for _ in edges]
    for f, cyc in enumerate(facets):
        for i, x in enumerate(cyc):
            y = cyc[(i + 1) % len(cyc)]
            edge_facets[index[(min(x, y), max(x, y))]].append(f)
    inc = []   # per edge: ((slot of low end, slot of high end) for each of its two facets)
    for e, (u, v) in enumerate(edges):
        inc.append(tuple((slot[(f, u)], slot[(f, v)]) for f in edge_facets[e]))
    return inc, slot_facet


def enumerate_masks(nv: int, edges: Sequence[tuple[int, int]], facets: Sequence[Sequence[int]]) -> list[int]:
    """All acyclic unique-sink orientations as bitmasks, in lexicographic order.

    Bit e set means edge e = (u, v), u < v, is directed v -> u. Edge 0 is
    the most significant position of the lexicographic order.
    """
    m = len(edges)
    inc, slot_facet = _incidences(nv, edges, facets)
    out_cnt = [0] * len(slot_facet)
    in_cnt = [0] * len(slot_facet)
    alive = [len(c) for c in facets]
    sinks = [0] * len(facets)
    outmask = [0] * nv
    result: list[int] = []

    def reaches(src: int, dst: int) -> bool:
        seen = frontier = 1 << src
        target = 1 << dst
        while frontier:
            nxt = 0
            while frontier:
                low = frontier & -frontier
                nxt |= outmask[low.bit_length() - 1]
                frontier ^= low
            if nxt & target:
                return True
            frontier = nxt & ~seen
            seen |= nxt
        return False

    def apply(e: int, d: int) -> bool:
        ok = True
        for lo, hi in inc[e]:
            t, h = (hi, lo) if d else (lo, hi)
            f = slot_facet[t]
            out_cnt[t] += 1
            if out_cnt[t] == 1:
                alive[f] -= 1
                if alive[f] == 0:
                    ok = False
            in_cnt[h] += 1
            if in_cnt[h] == 2:
                sinks[f] += 1
                if sinks[f] > 1:
                    ok = False
        return ok

    def undo(e: int, d: int) -> None:
        for lo, hi in inc[e]:
            t, h = (hi, lo) if d else (lo, hi)
            f = slot_facet[t]
            if out_cnt[t] == 1:
                alive[f] += 1
            out_cnt[t] -= 1
            if in_cnt[h] == 2:
                sinks[f] -= 1
            in_cnt[h] -= 1

    def rec(e: int, mask: int) -> None:
        if e == m:
            result.append(mask)
            return
        u, v = edges[e]
        for d in (0, 1):
            a, b = (v, u) if d else (u, v)
            if reaches(b, a):
                continue
            if apply(e, d):
                outmask[a] |= 1 << b
                rec(e + 1, mask | (d << e))
                outmask[a] &= ~(1 << b)
            undo(e, d)

    rec(0, 0)
    return result
