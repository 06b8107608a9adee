"""Acyclic unique-sink orientations (AUSOs) of simple 3-polytope graphs.

Orientations are bitmasks over the graph's edges in sorted ``(low, high)``
order; bit e set means edge e points to its smaller endpoint.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterator, Optional, Sequence

import networkx as nx

from .model import CombinatorialInstance, as_combinatorial, check_mk, parse_instance, serialize_instance

try:
    from ._enum_core import enumerate_masks as _compiled_masks
except ImportError:  # pragma: no cover - exercised only without a compiler
    _compiled_masks = None
from ._enum_py import enumerate_masks as _python_masks

KERNEL = "compiled" if _compiled_masks is not None else "python"
BRUTE_FORCE_MAX_EDGES = 21


class SearchError(ValueError):
    pass


def canonical_edges(graph) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(as_combinatorial(graph).edges))


def enumerate_masks(graph, kernel: Optional[str] = None) -> list[int]:
    g = as_combinatorial(graph)
    edges = canonical_edges(g)
    use = kernel or KERNEL
    if use == "compiled":
        if _compiled_masks is None:
            raise SearchError("compiled kernel not available")
        if g.num_vertices <= 64:
            return _compiled_masks(g.num_vertices, edges, g.facets)
    elif use != "python":
        raise SearchError(f"unknown kernel {use!r}")
    return _python_masks(g.num_vertices, edges, g.facets)


def mask_to_vector(mask: int, m: int) -> tuple[int, ...]:
    return tuple((mask >> e) & 1 for e in range(m))


def enumerate_ausos(graph, kernel: Optional[str] = None) -> Iterator[tuple[int, ...]]:
    """Every AUSO once, as a 0/1 direction vector, in lexicographic order of vectors."""
    m = len(canonical_edges(graph))
    for mask in enumerate_masks(graph, kernel):
        yield mask_to_vector(mask, m)


def is_auso(graph, vector: Sequence[int]) -> bool:
    g = as_combinatorial(graph)
    edges = canonical_edges(g)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(g.num_vertices))
    dg.add_edges_from((v, u) if d else (u, v) for (u, v), d in zip(edges, vector))
    if not nx.is_directed_acyclic_graph(dg):
        return False
    for cyc in g.facets:
        on = set(cyc)
        sinks = [x for x in cyc if not any(y in on for y in dg.successors(x))]
        if len(sinks) != 1:
            return False
    return True


def brute_force_ausos(graph) -> list[tuple[int, ...]]:
    """Filter all 2^m orientations; test oracle for small graphs."""
    m = len(canonical_edges(graph))
    if m > BRUTE_FORCE_MAX_EDGES:
        raise SearchError(f"{m} edges exceeds the brute-force cap of {BRUTE_FORCE_MAX_EDGES}")
    out = []
    for x in range(1 << m):
        vec = tuple((x >> (m - 1 - e)) & 1 for e in range(m))
        if is_auso(graph, vec):
            out.append(vec)
    return out


def orientation_ranks(graph, vector: Sequence[int]) -> tuple[int, ...]:
    """A rank for every vertex consistent with the orientation.

    Ranks are assigned bottom-up; among the current sinks the smallest
    vertex id is ranked first, so the result is deterministic.
    """
    g = as_combinatorial(graph)
    edges = canonical_edges(g)
    outs = [set() for _ in range(g.num_vertices)]
    ins = [set() for _ in range(g.num_vertices)]
    for (u, v), d in zip(edges, vector):
        a, b = (v, u) if d else (u, v)
        outs[a].add(b)
        ins[b].add(a)
    rank = [-1] * g.num_vertices
    left = [len(o) for o in outs]
    ready = sorted(v for v in range(g.num_vertices) if not left[v])
    r = 0
    while ready:
        v = ready.pop(0)
        rank[v] = r
        r += 1
        for a in ins[v]:
            left[a] -= 1
            if not left[a]:
                ready.append(a)
        ready.sort()
    if r != g.num_vertices:
        raise SearchError("orientation has a directed cycle")
    return tuple(rank)


def snapshot(graph, vector: Sequence[int], start: Optional[int] = None, name: Optional[str] = None) -> CombinatorialInstance:
    """Rank-labelled instance for an orientation; ``start`` is a graph vertex (default: the source)."""
    g = as_combinatorial(graph)
    rank = orientation_ranks(g, vector)
    inst = g.relabel(rank, name=name or g.name)
    top = inst.num_vertices - 1
    return inst.with_start(top if start is None else rank[start])


@dataclass(frozen=True)
class SearchResult:
    index: int                       # position in the canonical enumeration
    orientation: tuple[int, ...]
    start: int                       # vertex id in the snapshot (= rank)
    expectation: Fraction
    instance: CombinatorialInstance
    realizable: bool                 # condition (b) also holds


def _scan(args) -> list[tuple[Fraction, int, int]]:
    from .expectation import expected_random_edge

    graph, masks, offset, m = args
    out = []
    for i, mask in enumerate(masks):
        inst = snapshot(graph, mask_to_vector(mask, m))
        table = expected_random_edge(inst)
        out.extend((table[v], offset + i, v) for v in range(len(table)))
    return out


def worst_case_random_edge(graph, top: int = 1, jobs: int = 1) -> list[SearchResult]:
    """The ``top`` largest exact random-edge expectations over (AUSO, start) pairs.

    Ordered by expectation (descending), then enumeration index, then start.
    """
    g = as_combinatorial(graph)
    m = len(canonical_edges(g))
    masks = enumerate_masks(g)
    if jobs <= 1:
        scored = _scan((g, masks, 0, m))
    else:
        size = -(-len(masks) // jobs)
        chunks = [(g, masks[i:i + size], i, m) for i in range(0, len(masks), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scored = [row for part in pool.map(_scan, chunks) for row in part]
    scored.sort(key=lambda t: (-t[0], t[1], t[2]))
    results = []
    for value, idx, v in scored[:top]:
        vec = mask_to_vector(masks[idx], m)
        inst = snapshot(g, vec, name=f"{g.name}-auso{idx}").with_start(v)
        results.append(SearchResult(idx, vec, v, value, inst, check_mk(inst).realizable))
    return results


# --- graph catalogs ------------------------------------------------------------------

def _graph(inst: CombinatorialInstance) -> nx.Graph:
    return nx.Graph(list(inst.edges))


def split_face(inst: CombinatorialInstance, fid: int, i: int, j: int) -> CombinatorialInstance:
    """Join new vertices on edges i and j of facet ``fid`` (a planar cut through two edges)."""
    cyc = inst.facets[fid]
    k = len(cyc)
    a, b = (cyc[i], cyc[(i + 1) % k]), (cyc[j], cyc[(j + 1) % k])
    x, y = inst.num_vertices, inst.num_vertices + 1
    part1 = [x] + [cyc[(t) % k] for t in range(i + 1, j + 1)] + [y]
    part2 = [y] + [cyc[t % k] for t in range(j + 1, i + k + 1)] + [x]
    facets = []
    for f, c in enumerate(inst.facets):
        if f == fid:
            continue
        c = list(c)
        for (p, q), new in ((a, x), (b, y)):
            for t in range(len(c)):
                if {c[t], c[(t + 1) % len(c)]} == {p, q}:
                    c.insert(t + 1, new)
                    break
        facets.append(tuple(c))
    facets += [tuple(part1), tuple(part2)]
    return CombinatorialInstance(inst.name, tuple(facets), 0, ranked=False)


def grow_catalogs(max_n: int) -> dict[int, list[CombinatorialInstance]]:
    """All simple 3-polytope graphs with 4..max_n facets, up to isomorphism.

    Every simple 3-polytope arises from the tetrahedron by cutting through
    two edges of a facet, so closing under that operation is complete.
    """
    tet = CombinatorialInstance("p4-0", ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)), 0, ranked=False)
    levels = {4: [tet]}
    for n in range(5, max_n + 1):
        found: list[CombinatorialInstance] = []
        graphs: list[nx.Graph] = []
        for inst in levels[n - 1]:
            for fid, cyc in enumerate(inst.facets):
                for i in range(len(cyc)):
                    for j in range(i + 1, len(cyc)):
                        new = split_face(inst, fid, i, j)
                        g = _graph(new)
                        if any(nx.is_isomorphic(g, h) for h in graphs):
                            continue
                        graphs.append(g)
                        found.append(new)
        levels[n] = [CombinatorialInstance(f"p{n}-{c}", inst.facets, 0, ranked=False)
                     for c, inst in enumerate(found)]
    return levels


def load_catalog(n: int) -> list[CombinatorialInstance]:
    """Shipped graphs with n facets (n = 4..7)."""
    root = resources.files(__package__) / "catalogs"
    out = []
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if entry.name.startswith(f"p{n}-") and entry.name.endswith(".lp3graph"):
            out.append(parse_instance(entry.read_text()))
    if not out:
        raise SearchError(f"no shipped catalog for n = {n}")
    return out


def write_catalogs(directory, max_n: int = 7) -> dict[int, int]:
    from pathlib import Path

    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    counts = {}
    for n, insts in grow_catalogs(max_n).items():
        counts[n] = len(insts)
        for inst in insts:
            (path / f"{inst.name}.lp3graph").write_text(serialize_instance(inst))
    return counts
