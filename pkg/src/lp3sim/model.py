"""Core data types for LP-oriented simple 3-polytopes.

Vertices are identified by their objective rank: vertex ``0`` is the global
minimum and vertex ``2n-5`` the global maximum. Every edge is oriented from
its higher endpoint to its lower one, so the orientation is acyclic by
construction.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

Rational = Fraction
Vec3 = tuple[Fraction, Fraction, Fraction]


class ParseError(ValueError):
    """Malformed ``lp3 v1`` / ``lp3graph v1`` text."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class CombinatorialInstance:
    """Facet-cycle description of a simple 3-polytope with vertex ranks."""

    name: str
    facets: tuple[tuple[int, ...], ...]
    start: int
    ranked: bool = True

    @property
    def n(self) -> int:
        return len(self.facets)

    @property
    def num_vertices(self) -> int:
        return 2 * self.n - 4

    @property
    def v_max(self) -> int:
        return self.num_vertices - 1

    @cached_property
    def edges(self) -> frozenset[tuple[int, int]]:
        """Unordered edges as ``(low, high)`` pairs."""
        out = set()
        for cyc in self.facets:
            for i, u in enumerate(cyc):
                w = cyc[(i + 1) % len(cyc)]
                out.add((min(u, w), max(u, w)))
        return frozenset(out)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[set[int]] = [set() for _ in range(self.num_vertices)]
        for u, w in self.edges:
            if 0 <= u < self.num_vertices and 0 <= w < self.num_vertices:
                adj[u].add(w)
                adj[w].add(u)
        return tuple(tuple(sorted(a, reverse=True)) for a in adj)

    @cached_property
    def vertex_facets(self) -> tuple[tuple[int, ...], ...]:
        vf: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for fid, cyc in enumerate(self.facets):
            for v in cyc:
                if 0 <= v < self.num_vertices:
                    vf[v].append(fid)
        return tuple(tuple(x) for x in vf)

    @cached_property
    def edge_facets(self) -> dict[tuple[int, int], tuple[int, ...]]:
        ef: dict[tuple[int, int], list[int]] = {}
        for fid, cyc in enumerate(self.facets):
            for i, u in enumerate(cyc):
                w = cyc[(i + 1) % len(cyc)]
                ef.setdefault((min(u, w), max(u, w)), []).append(fid)
        return {e: tuple(fs) for e, fs in ef.items()}

    def left_facet(self, v: int, u: int) -> int:
        """The facet containing ``v`` but not ``u``: the one left by the step v->u."""
        on_edge = self.edge_facets[(min(u, v), max(u, v))]
        (fid,) = [f for f in self.vertex_facets[v] if f not in on_edge]
        return fid

    def with_start(self, start: int) -> "CombinatorialInstance":
        return CombinatorialInstance(self.name, self.facets, start, self.ranked)

    def relabel(self, new_id: Sequence[int], name: Optional[str] = None) -> "CombinatorialInstance":
        """Rename vertex ``v`` to ``new_id[v]`` (used to impose a rank order)."""
        facets = tuple(tuple(new_id[v] for v in cyc) for cyc in self.facets)
        return CombinatorialInstance(name or self.name, facets, new_id[self.start], True)


@dataclass(frozen=True)
class GeometricInstance:
    """Combinatorial instance plus exact vertex coordinates and objectives."""

    base: CombinatorialInstance
    coords: tuple[Vec3, ...]
    objective: Vec3
    aux_objective: Optional[Vec3] = None

    @property
    def name(self) -> str:
        return self.base.name

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def start(self) -> int:
        return self.base.start

    def value(self, v: int, vec: Optional[Vec3] = None) -> Fraction:
        vec = self.objective if vec is None else vec
        return dot(vec, self.coords[v])


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def as_combinatorial(inst) -> CombinatorialInstance:
    return inst.base if isinstance(inst, GeometricInstance) else inst


@dataclass(frozen=True)
class Orientation:
    out_neighbors: tuple[tuple[int, ...], ...]
    in_neighbors: tuple[tuple[int, ...], ...]

    def out_degree(self, v: int) -> int:
        return len(self.out_neighbors[v])


def orientation_of(inst) -> Orientation:
    """Direct every edge from higher id to lower id."""
    inst = as_combinatorial(inst)
    outs = tuple(tuple(u for u in nb if u < v) for v, nb in enumerate(inst.neighbors))
    ins = tuple(tuple(u for u in nb if u > v) for v, nb in enumerate(inst.neighbors))
    return Orientation(outs, ins)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    witness: tuple[int, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def validate(inst) -> ValidationReport:
    """Structural checks; never raises on bad data."""
    geo = inst if isinstance(inst, GeometricInstance) else None
    inst = as_combinatorial(inst)
    bad: list[Violation] = []
    n, m = inst.n, inst.num_vertices
    if n < 4:
        bad.append(Violation("facet-count", f"need at least 4 facets, got {n}"))
    for fid, cyc in enumerate(inst.facets):
        if len(cyc) < 3:
            bad.append(Violation("short-facet", f"facet {fid} has {len(cyc)} vertices", (fid,)))
        if len(set(cyc)) != len(cyc):
            bad.append(Violation("facet-repeat", f"facet {fid} repeats a vertex", (fid,)))
        for v in cyc:
            if not 0 <= v < m:
                bad.append(Violation("vertex-range", f"facet {fid} uses vertex {v} outside 0..{m - 1}", (fid, v)))
    if bad:
        return ValidationReport(tuple(bad))
    for v, fs in enumerate(inst.vertex_facets):
        if len(fs) != 3:
            bad.append(Violation("vertex-facets", f"vertex {v} in {len(fs)} != 3 facets", (v,)))
    for (u, w), fs in sorted(inst.edge_facets.items()):
        if len(fs) != 2:
            bad.append(Violation("edge-facets", f"edge {u}-{w} in {len(fs)} != 2 facets", (u, w)))
    if len(inst.edges) != 3 * n - 6:
        bad.append(Violation("edge-count", f"{len(inst.edges)} edges, expected {3 * n - 6}"))
    for v, nb in enumerate(inst.neighbors):
        if len(nb) != 3:
            bad.append(Violation("degree", f"vertex {v} has degree {len(nb)}", (v,)))
    if not 0 <= inst.start < m:
        bad.append(Violation("start-range", f"start {inst.start} outside 0..{m - 1}", (inst.start,)))
    if geo is not None and not bad:
        bad.extend(_geometric_violations(geo))
    return ValidationReport(tuple(bad))


def _geometric_violations(geo: GeometricInstance) -> list[Violation]:
    bad = []
    m = geo.base.num_vertices
    if len(geo.coords) != m:
        return [Violation("coords-count", f"{len(geo.coords)} coordinate rows for {m} vertices")]
    vals = [geo.value(v) for v in range(m)]
    if len(set(vals)) != m:
        bad.append(Violation("general-position", "two vertices share an objective value"))
    elif any(vals[v] >= vals[v + 1] for v in range(m - 1)):
        bad.append(Violation("rank-order", "objective order differs from vertex ids",
                             tuple(v for v in range(m - 1) if vals[v] >= vals[v + 1])))
    if geo.aux_objective is not None:
        aux = [geo.value(v, geo.aux_objective) for v in range(m)]
        best = max(aux)
        if aux.count(best) != 1 or aux[geo.start] != best:
            bad.append(Violation("aux-objective", "start is not the unique optimum of the auxiliary objective",
                                 (geo.start,)))
    return bad


@dataclass(frozen=True)
class MKReport:
    facet_sink_ok: bool
    bad_facets: tuple[int, ...]
    disjoint_paths_ok: bool
    paths: tuple[tuple[int, ...], ...]
    cut: tuple[int, ...] = ()

    @property
    def realizable(self) -> bool:
        return self.facet_sink_ok and self.disjoint_paths_ok


def facet_sinks(cyc: Sequence[int], arc) -> list[int]:
    """Vertices of a facet cycle with no out-edge inside the facet.

    ``arc(a, b)`` is true when the edge between ``a`` and ``b`` points to ``b``.
    """
    k = len(cyc)
    return [cyc[i] for i in range(k) if not arc(cyc[i], cyc[i - 1]) and not arc(cyc[i], cyc[(i + 1) % k])]


def vertex_disjoint_paths(outs: Sequence[Sequence[int]], source: int, sink: int, limit: int = 3):
    """Max set of internally vertex-disjoint directed paths (unit vertex capacities).

    Returns ``(paths, cut)``; ``cut`` is a separating vertex set when fewer than
    ``limit`` paths exist.
    """
    m = len(outs)
    # node v split into v_in = 2v, v_out = 2v+1
    cap: dict[tuple[int, int], int] = {}
    adj: list[list[int]] = [[] for _ in range(2 * m)]

    def arc(a: int, b: int, c: int) -> None:
        if (a, b) not in cap:
            adj[a].append(b)
            adj[b].append(a)
            cap.setdefault((b, a), 0)
        cap[(a, b)] = cap.get((a, b), 0) + c

    for v in range(m):
        arc(2 * v, 2 * v + 1, limit if v in (source, sink) else 1)
        for u in outs[v]:
            arc(2 * v + 1, 2 * u, 1)
    s, t = 2 * source + 1, 2 * sink
    orig = dict(cap)
    flow = 0
    while flow < limit:
        prev = {s: s}
        dq = deque([s])
        while dq and t not in prev:
            a = dq.popleft()
            for b in adj[a]:
                if b not in prev and cap[(a, b)] > 0:
                    prev[b] = a
                    dq.append(b)
        if t not in prev:
            side = set()
            for (a, b), c in cap.items():
                if a in prev and b not in prev and c == 0 and orig[(a, b)] > 0:
                    if a // 2 == b // 2:
                        side.add(a // 2)
                    elif b % 2 == 0:   # saturated edge a -> b: cut at whichever end is not a terminal
                        side.add(b // 2 if b // 2 != sink else a // 2)
            cut = tuple(sorted(side))
            break
        b = t
        while b != s:
            a = prev[b]
            cap[(a, b)] -= 1
            cap[(b, a)] += 1
            b = a
        flow += 1
    else:
        cut = ()
    paths = []
    used = {(a, b): cap[(b, a)] for (a, b) in cap if a % 2 == 1 and b % 2 == 0 and b // 2 in outs[a // 2]}
    for _ in range(flow):
        path = [source]
        v = source
        while v != sink:
            nxt = next(u for u in outs[v] if used.get((2 * v + 1, 2 * u), 0) > 0)
            used[(2 * v + 1, 2 * nxt)] -= 1
            path.append(nxt)
            v = nxt
        paths.append(tuple(path))
    return tuple(sorted(paths)), cut


def check_mk(inst) -> MKReport:
    """Mihalisin-Klee realizability test for the rank orientation."""
    inst = as_combinatorial(inst)
    bad = tuple(fid for fid, cyc in enumerate(inst.facets) if len(facet_sinks(cyc, int.__gt__)) != 1)
    orient = orientation_of(inst)
    paths, cut = vertex_disjoint_paths(orient.out_neighbors, inst.v_max, 0)
    return MKReport(not bad, bad, len(paths) >= 3, paths, cut)


@dataclass(frozen=True)
class VertexProfile:
    n1: tuple[int, ...]
    n2: tuple[int, ...]

    @property
    def n_total(self) -> tuple[int, ...]:
        return tuple(a + b for a, b in zip(self.n1, self.n2))


def vertex_profile(inst) -> VertexProfile:
    """Cumulative counts of 1- and 2-vertices at or below each vertex."""
    orient = orientation_of(inst)
    n1, n2 = [], []
    c1 = c2 = 0
    for v in range(len(orient.out_neighbors)):
        d = orient.out_degree(v)
        c1 += d == 1
        c2 += d == 2
        n1.append(c1)
        n2.append(c2)
    return VertexProfile(tuple(n1), tuple(n2))


# --- lp3 v1 text format -----------------------------------------------------

_RAT = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(tok: str, line: Optional[int] = None) -> Fraction:
    if not _RAT.match(tok):
        raise ParseError(f"bad rational {tok!r}", line)
    q = Fraction(tok)
    return q


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_instance(text: str):
    """Parse ``lp3 v1`` or ``lp3graph v1`` text."""
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((no, body))
    if not lines:
        raise ParseError("empty input")
    no, header = lines[0]
    if header.split() == ["lp3", "v1"]:
        ranked = True
    elif header.split() == ["lp3graph", "v1"]:
        ranked = False
    else:
        raise ParseError(f"unknown header {header!r}", no)
    name = "unnamed"
    n = m = start = None
    facets: dict[int, tuple[int, ...]] = {}
    coords: dict[int, Vec3] = {}
    objective = aux = None
    for no, body in lines[1:]:
        key, _, rest = body.partition(" ")
        rest = rest.strip()
        try:
            if key == "name":
                name = rest
            elif key == "facets":
                n = int(rest)
            elif key == "vertices":
                m = int(rest)
            elif key == "facet":
                fid_s, sep, vids = rest.partition(":")
                if not sep:
                    raise ParseError("facet line needs ':'", no)
                fid = int(fid_s)
                if fid in facets:
                    raise ParseError(f"duplicate facet id {fid}", no)
                cyc = tuple(int(t) for t in vids.split())
                if len(set(cyc)) != len(cyc):
                    raise ParseError(f"facet {fid} lists a vertex twice", no)
                facets[fid] = cyc
            elif key == "start":
                start = int(rest)
            elif key == "coords":
                toks = rest.split()
                if len(toks) != 4:
                    raise ParseError("coords needs a vertex id and 3 rationals", no)
                coords[int(toks[0])] = tuple(parse_rational(t, no) for t in toks[1:])
            elif key in ("objective", "aux-objective"):
                toks = rest.split()
                if len(toks) != 3:
                    raise ParseError(f"{key} needs 3 rationals", no)
                vec = tuple(parse_rational(t, no) for t in toks)
                if key == "objective":
                    objective = vec
                else:
                    aux = vec
            else:
                raise ParseError(f"unknown keyword {key!r}", no)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), no) from None
    if n is None:
        raise ParseError("missing 'facets' line")
    if sorted(facets) != list(range(n)):
        raise ParseError(f"facet ids must be exactly 0..{n - 1}")
    nv = 2 * n - 4
    if m is not None and m != nv:
        raise ParseError(f"vertices {m} != 2n-4 = {nv}")
    for fid, cyc in facets.items():
        for v in cyc:
            if not 0 <= v < nv:
                raise ParseError(f"facet {fid}: vertex id {v} out of range 0..{nv - 1}")
    if start is None:
        start = nv - 1
    elif not 0 <= start < nv:
        raise ParseError(f"start {start} out of range")
    base = CombinatorialInstance(name, tuple(facets[i] for i in range(n)), start, ranked)
    if coords or objective is not None or aux is not None:
        if sorted(coords) != list(range(nv)):
            raise ParseError("coords must be given for every vertex")
        if objective is None:
            raise ParseError("coords present but no objective")
        return GeometricInstance(base, tuple(coords[v] for v in range(nv)), objective, aux)
    return base


def serialize_instance(inst) -> str:
    geo = inst if isinstance(inst, GeometricInstance) else None
    base = as_combinatorial(inst)
    out = ["lp3 v1" if base.ranked else "lp3graph v1", f"name {base.name}",
           f"facets {base.n}", f"vertices {base.num_vertices}"]
    for fid, cyc in enumerate(base.facets):
        out.append(f"facet {fid}: " + " ".join(map(str, cyc)))
    out.append(f"start {base.start}")
    if geo is not None:
        for v, xyz in enumerate(geo.coords):
            out.append(f"coords {v} " + " ".join(format_rational(c) for c in xyz))
        out.append("objective " + " ".join(format_rational(c) for c in geo.objective))
        if geo.aux_objective is not None:
            out.append("aux-objective " + " ".join(format_rational(c) for c in geo.aux_objective))
    return "\n".join(out) + "\n"


def tetrahedron() -> CombinatorialInstance:
    return CombinatorialInstance("tetrahedron", ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)), 3)
