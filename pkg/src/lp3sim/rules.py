"""Pivot rules executed as monotone walks on the rank orientation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .model import (
    CombinatorialInstance,
    GeometricInstance,
    as_combinatorial,
    dot,
    orientation_of,
)
from .rng import SplitMix64, trial_seed

KINDS = ("bland", "dantzig", "greatest-decrease", "steepest-decrease", "shadow-vertex",
         "least-entered", "random-edge", "rf", "rf1", "rf2")
RANDOMIZED = {"random-edge", "rf", "rf1", "rf2"}


class RuleError(ValueError):
    """A rule cannot be applied to the given input (bad spec or general-position failure)."""


@dataclass(frozen=True)
class RuleSpec:
    kind: str
    tiebreak: Optional["RuleSpec"] = None
    numbering: Optional[tuple[int, ...]] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RuleError(f"unknown rule {self.kind!r}")
        if (self.tiebreak is not None) != (self.kind == "least-entered"):
            raise RuleError("tiebreak is required for least-entered and only there")
        if self.tiebreak is not None and self.tiebreak.kind not in ("greatest-decrease", "random-edge"):
            raise RuleError("least-entered tiebreak must be greatest-decrease or random-edge")

    @property
    def randomized(self) -> bool:
        return self.kind in RANDOMIZED or (self.tiebreak is not None and self.tiebreak.randomized)

    @property
    def label(self) -> str:
        return f"{self.kind}:{self.tiebreak.kind}" if self.tiebreak else self.kind

    @classmethod
    def parse(cls, text: str, **kw) -> "RuleSpec":
        """``least-entered:greatest-decrease`` style names; ``gd``/``re`` abbreviations accepted."""
        short = {"gd": "greatest-decrease", "re": "random-edge", "sd": "steepest-decrease",
                 "le": "least-entered"}
        kind, _, tb = text.partition(":")
        kind = short.get(kind, kind)
        tiebreak = cls(short.get(tb, tb)) if tb else None
        return cls(kind, tiebreak=tiebreak, **kw)


@dataclass(frozen=True)
class PivotTrace:
    vertices: tuple[int, ...]
    leave_counts: tuple[int, ...]
    rule: str = ""
    alias_of: Optional[str] = None

    @property
    def steps(self) -> int:
        return len(self.vertices) - 1


def _trace(inst: CombinatorialInstance, path: Sequence[int], rule: str, alias_of=None) -> PivotTrace:
    counts = [0] * inst.n
    for v, u in zip(path, path[1:]):
        counts[inst.left_facet(v, u)] += 1
    return PivotTrace(tuple(path), tuple(counts), rule, alias_of)


def _start(inst, start: Optional[int]) -> int:
    return as_combinatorial(inst).start if start is None else start


def run_bland(inst, numbering: Optional[Sequence[int]] = None, start: Optional[int] = None) -> PivotTrace:
    """Least index: leave the facet with the smallest number."""
    inst = as_combinatorial(inst)
    number = list(range(inst.n)) if numbering is None else list(numbering)
    if sorted(number) != list(range(inst.n)):
        raise RuleError("numbering must be a permutation of the facet ids")
    outs = orientation_of(inst).out_neighbors
    v = _start(inst, start)
    path = [v]
    while outs[v]:
        v = min(outs[v], key=lambda u: number[inst.left_facet(path[-1], u)])
        path.append(v)
    return _trace(inst, path, "bland")


def run_dantzig(inst, numbering=None, start=None) -> PivotTrace:
    # Only realized through the scaling that makes it follow Bland's path.
    t = run_bland(inst, numbering, start)
    return PivotTrace(t.vertices, t.leave_counts, "dantzig", alias_of="bland")


def run_greatest_decrease(inst, start: Optional[int] = None) -> PivotTrace:
    inst = as_combinatorial(inst)
    outs = orientation_of(inst).out_neighbors
    v = _start(inst, start)
    path = [v]
    while outs[v]:
        v = min(outs[v])
        path.append(v)
    return _trace(inst, path, "greatest-decrease")


def steeper(ginst: GeometricInstance, v: int, w1: int, w2: int) -> int:
    """+1 if edge v->w1 is steeper than v->w2, -1 if less steep, 0 on a tie.

    Compares <c,w-v>/|w-v| through squares; both numerators are negative.
    """
    c, x = ginst.objective, ginst.coords
    d1 = [a - b for a, b in zip(x[w1], x[v])]
    d2 = [a - b for a, b in zip(x[w2], x[v])]
    lhs = dot(c, d1) ** 2 * dot(d2, d2)
    rhs = dot(c, d2) ** 2 * dot(d1, d1)
    return (lhs > rhs) - (lhs < rhs)


def run_steepest_decrease(ginst: GeometricInstance, start: Optional[int] = None) -> PivotTrace:
    if not isinstance(ginst, GeometricInstance):
        raise RuleError("steepest decrease needs coordinates")
    inst = ginst.base
    outs = orientation_of(inst).out_neighbors
    v = _start(ginst, start)
    path = [v]
    while outs[v]:
        best = outs[v][0]
        for w in outs[v][1:]:
            cmp = steeper(ginst, v, w, best)
            if cmp == 0:
                raise RuleError(f"steepness tie at vertex {v} between {w} and {best}")
            if cmp > 0:
                best = w
        v = best
        path.append(v)
    return _trace(inst, path, "steepest-decrease")


def orient2d(a, b, c) -> Fraction:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def convex_hull(points: Sequence[tuple[Fraction, Fraction]]) -> list[int]:
    """Indices of hull vertices in counter-clockwise order (collinear points dropped)."""
    order = sorted(range(len(points)), key=lambda i: points[i])
    if len(order) < 3:
        return order

    def half(idx):
        chain: list[int] = []
        for i in idx:
            while len(chain) >= 2 and orient2d(points[chain[-2]], points[chain[-1]], points[i]) <= 0:
                chain.pop()
            chain.append(i)
        return chain

    lower, upper = half(order), half(order[::-1])
    return lower[:-1] + upper[:-1]


def shadow_path(ginst: GeometricInstance, start: int) -> list[int]:
    """Hull chain of the (c, d) projection from the start image to the v_min image."""
    if ginst.aux_objective is None:
        raise RuleError("shadow vertex needs an auxiliary objective")
    m = ginst.base.num_vertices
    pts = [(ginst.value(v), ginst.value(v, ginst.aux_objective)) for v in range(m)]
    aux = [p[1] for p in pts]
    if aux.count(max(aux)) != 1 or aux[start] != max(aux):
        raise RuleError(f"start {start} is not the unique optimum of the auxiliary objective")
    if len(set(pts)) != m:
        raise RuleError("two vertices share a projected image")
    hull = convex_hull(pts)
    i = hull.index(start)
    chain = [start]
    while chain[-1] != 0:
        i = (i + 1) % len(hull)
        chain.append(hull[i])
        if len(chain) > len(hull):
            raise RuleError("v_min image not reached along the hull")
    # any other image on the chain's segments means three collinear points
    for a, b in zip(chain, chain[1:]):
        for v in range(m):
            if v in (a, b):
                continue
            p = pts[v]
            if orient2d(pts[a], pts[b], p) == 0 and min(pts[a], pts[b]) <= p <= max(pts[a], pts[b]):
                raise RuleError(f"vertex {v} is collinear with hull edge {a}-{b}")
    return chain


def run_shadow_vertex(ginst: GeometricInstance, start: Optional[int] = None) -> PivotTrace:
    if not isinstance(ginst, GeometricInstance):
        raise RuleError("shadow vertex needs coordinates")
    start = _start(ginst, start)
    path = shadow_path(ginst, start)
    nbrs = ginst.base.neighbors
    for a, b in zip(path, path[1:]):
        if b not in nbrs[a] or b >= a:
            raise RuleError(f"shadow path step {a}->{b} is not an improving polytope edge")
    return _trace(ginst.base, path, "shadow-vertex")


def run_least_entered(inst, tiebreak: RuleSpec, start: Optional[int] = None,
                      seed: Optional[int] = None) -> PivotTrace:
    """Leave the facet left least often so far; ties broken by ``tiebreak``."""
    inst = as_combinatorial(inst)
    tb = tiebreak.kind if isinstance(tiebreak, RuleSpec) else tiebreak
    if tb not in ("greatest-decrease", "random-edge"):
        raise RuleError(f"unsupported tiebreak {tb!r}")
    if (tb == "random-edge") != (seed is not None):
        raise RuleError("a seed is required exactly when the tiebreak is random-edge")
    rng = SplitMix64(seed) if seed is not None else None
    outs = orientation_of(inst).out_neighbors
    counts = [0] * inst.n
    v = _start(inst, start)
    path = [v]
    while outs[v]:
        left = {u: inst.left_facet(v, u) for u in outs[v]}
        low = min(counts[f] for f in left.values())
        cands = [u for u in outs[v] if counts[left[u]] == low]
        u = min(cands) if rng is None else rng.choice(cands)
        counts[left[u]] += 1
        v = u
        path.append(v)
    return PivotTrace(tuple(path), tuple(counts), f"least-entered:{tb}")


def run_random_edge(inst, start: Optional[int] = None, seed: int = 0) -> PivotTrace:
    inst = as_combinatorial(inst)
    rng = SplitMix64(seed)
    outs = orientation_of(inst).out_neighbors
    v = _start(inst, start)
    path = [v]
    while outs[v]:
        v = rng.choice(outs[v])
        path.append(v)
    return _trace(inst, path, "random-edge")


# --- random facet -------------------------------------------------------------

def facet_descents(inst: CombinatorialInstance, fid: int, v: int) -> list[list[int]]:
    """Downhill walks inside facet ``fid`` from ``v`` to the facet's sink.

    One walk per decreasing facet edge at ``v`` (two at the facet's top,
    none at its sink).
    """
    cyc = inst.facets[fid]
    k = len(cyc)
    i = cyc.index(v)
    walks = []
    for step in (-1, 1):
        walk = []
        j, cur = i, v
        while True:
            nxt = cyc[(j + step) % k]
            if nxt > cur:
                break
            walk.append(nxt)
            j, cur = j + step, nxt
        if walk:
            walks.append(walk)
    return walks


def run_random_facet(inst, variant: str = "rf", start: Optional[int] = None, seed: int = 0) -> PivotTrace:
    if variant not in ("rf", "rf1", "rf2"):
        raise RuleError(f"unknown random facet variant {variant!r}")
    inst = as_combinatorial(inst)
    rng = SplitMix64(seed)
    outs = orientation_of(inst).out_neighbors
    v = _start(inst, start)
    path = [v]
    while outs[v]:
        if variant == "rf1" and len(outs[v]) == 1:
            v = outs[v][0]
            path.append(v)
            continue
        fid = inst.vertex_facets[v][rng.below(3)]
        walks = facet_descents(inst, fid, v)
        if not walks:
            # v is this facet's sink
            if variant == "rf2":
                v = outs[v][0]
                path.append(v)
            continue
        walk = walks[0] if len(walks) == 1 else walks[rng.below(2)]
        path.extend(walk)
        v = walk[-1]
        if variant == "rf2" and outs[v]:
            v = outs[v][0]
            path.append(v)
    return _trace(inst, path, variant)


def run_rule(inst, spec: RuleSpec, start: Optional[int] = None, seed: Optional[int] = None) -> PivotTrace:
    seed = spec.seed if seed is None else seed
    if spec.randomized and seed is None:
        raise RuleError(f"rule {spec.label} is randomized and needs a seed")
    kind = spec.kind
    if kind == "bland":
        return run_bland(inst, spec.numbering, start)
    if kind == "dantzig":
        return run_dantzig(inst, spec.numbering, start)
    if kind == "greatest-decrease":
        return run_greatest_decrease(inst, start)
    if kind == "steepest-decrease":
        return run_steepest_decrease(inst, start)
    if kind == "shadow-vertex":
        return run_shadow_vertex(inst, start)
    if kind == "least-entered":
        return run_least_entered(inst, spec.tiebreak, start, seed if spec.randomized else None)
    if kind == "random-edge":
        return run_random_edge(inst, start, seed)
    return run_random_facet(inst, kind, start, seed)


@dataclass(frozen=True)
class TrialStats:
    trials: int
    mean: Fraction
    sample_variance: Fraction
    min_steps: int
    max_steps: int
    seed: int

    @property
    def std_error(self) -> float:
        return float(self.sample_variance / self.trials) ** 0.5


def simulate_randomized(inst, rule: RuleSpec, start: Optional[int] = None, trials: int = 1000,
                        master_seed: int = 0) -> TrialStats:
    """Independent runs seeded by ``trial_seed(master_seed, t)``."""
    if not rule.randomized:
        raise RuleError(f"rule {rule.label} is deterministic")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    steps = [run_rule(inst, rule, start, trial_seed(master_seed, t)).steps for t in range(trials)]
    total = sum(steps)
    mean = Fraction(total, trials)
    if trials > 1:
        var = Fraction(sum(s * s for s in steps) * trials - total * total, trials * (trials - 1))
    else:
        var = Fraction(0)
    return TrialStats(trials, mean, var, min(steps), max(steps), master_seed)
