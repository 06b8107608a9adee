"""Exact expected path lengths for the randomized rules."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .model import as_combinatorial, orientation_of
from .rules import facet_descents

ZERO = Fraction(0)


class SingularSystemError(ArithmeticError):
    pass


class StateBudgetExceeded(RuntimeError):
    """Exact state expansion too large; use Monte Carlo instead."""


@dataclass(frozen=True)
class ExpectationTable:
    E: tuple[Fraction, ...]

    def __getitem__(self, v: int) -> Fraction:
        return self.E[v]

    def __len__(self) -> int:
        return len(self.E)


@dataclass(frozen=True)
class FlowAssignment:
    edge_flow: dict[tuple[int, int], Fraction]
    vertex_flow: tuple[Fraction, ...]
    source: int


def expected_random_edge(inst, start: Optional[int] = None) -> ExpectationTable:
    """E(v) = 1 + mean of E over improving neighbors, by increasing rank.

    ``start`` is accepted for interface symmetry; the full table is returned.
    """
    outs = orientation_of(inst).out_neighbors
    E = [ZERO] * len(outs)
    for v in range(1, len(outs)):
        E[v] = 1 + sum((E[u] for u in outs[v]), ZERO) / len(outs[v])
    return ExpectationTable(tuple(E))


def random_edge_flow(inst, start: Optional[int] = None) -> FlowAssignment:
    inst = as_combinatorial(inst)
    start = inst.start if start is None else start
    outs = orientation_of(inst).out_neighbors
    p = [ZERO] * len(outs)
    p[start] = Fraction(1)
    flow: dict[tuple[int, int], Fraction] = {}
    for v in range(len(outs) - 1, 0, -1):
        for u in outs[v]:
            share = p[v] / len(outs[v])
            flow[(v, u)] = share
            p[u] += share
    return FlowAssignment(flow, tuple(p), start)


def flow_cost(flow: FlowAssignment) -> Fraction:
    return sum(flow.edge_flow.values(), ZERO)


def solve_linear_system(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals; pivots on the first nonzero entry."""
    n = len(A)
    M = [row[:] + [rhs] for row, rhs in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise SingularSystemError(f"no pivot in column {col}")
        M[col], M[piv] = M[piv], M[col]
        prow = M[col]
        inv = 1 / prow[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] * inv
                row = M[r]
                for c in range(col, n + 1):
                    if prow[c]:
                        row[c] -= f * prow[c]
    return [M[i][n] / M[i][i] for i in range(n)]


def expected_random_facet(inst, variant: str = "rf", start: Optional[int] = None) -> ExpectationTable:
    """Exact expectations of the random-facet variants (rf, rf1, rf2).

    Top-level states are vertices. Choosing a facet whose sink is the current
    vertex is a zero-progress self-loop for rf; rf2 then takes the vertex's
    out-edge instead. The resulting system is solved exactly.
    """
    if variant not in ("rf", "rf1", "rf2"):
        raise ValueError(f"unknown random facet variant {variant!r}")
    inst = as_combinatorial(inst)
    outs = orientation_of(inst).out_neighbors
    m = len(outs)
    A = [[ZERO] * m for _ in range(m)]
    b = [ZERO] * m
    third = Fraction(1, 3)
    for v in range(m):
        A[v][v] += 1
        if v == 0:
            continue
        if variant == "rf1" and len(outs[v]) == 1:
            A[v][outs[v][0]] -= 1
            b[v] += 1
            continue
        for fid in inst.vertex_facets[v]:
            walks = facet_descents(inst, fid, v)
            if not walks:
                if variant == "rf2":
                    A[v][outs[v][0]] -= third
                    b[v] += third
                else:
                    A[v][v] -= third
                continue
            w = third / len(walks)
            for walk in walks:
                end = walk[-1]
                b[v] += w * len(walk)
                if variant == "rf2" and end != 0:
                    b[v] += w
                    A[v][outs[end][0]] -= w
                else:
                    A[v][end] -= w
    return ExpectationTable(tuple(solve_linear_system(A, b)))


def exact_least_entered_re(inst, start: Optional[int] = None, max_states: int = 200_000) -> Fraction:
    """Expected steps of least-entered with random-edge tiebreak, by state expansion."""
    inst = as_combinatorial(inst)
    start = inst.start if start is None else start
    outs = orientation_of(inst).out_neighbors
    left = {(v, u): inst.left_facet(v, u) for v in range(len(outs)) for u in outs[v]}
    memo: dict[tuple[int, tuple[int, ...]], Fraction] = {}

    def expect(v: int, counts: tuple[int, ...]) -> Fraction:
        if v == 0:
            return ZERO
        key = (v, counts)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if len(memo) >= max_states:
            raise StateBudgetExceeded(f"more than {max_states} states; use Monte Carlo")
        low = min(counts[left[v, u]] for u in outs[v])
        cands = [u for u in outs[v] if counts[left[v, u]] == low]
        total = ZERO
        for u in cands:
            f = left[v, u]
            nxt = counts[:f] + (counts[f] + 1,) + counts[f + 1:]
            total += 1 + expect(u, nxt)
        memo[key] = res = total / len(cands)
        return res

    return expect(start, (0,) * inst.n)


def monotone_distance(inst) -> tuple[int, ...]:
    """Length of the shortest monotone path from each vertex to v_min."""
    outs = orientation_of(inst).out_neighbors
    d = [0] * len(outs)
    for v in range(1, len(outs)):
        d[v] = 1 + min(d[u] for u in outs[v])
    return tuple(d)
