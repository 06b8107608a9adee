"""Parametric worst-case instance families and their closed-form predictions.

Each combinatorial family is described by its graph (vertex id = rank); the
facet cycles are read off the unique planar embedding of the 3-connected
graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional

import networkx as nx

from .model import CombinatorialInstance, GeometricInstance

FAMILIES = ("klee", "re-lower", "gd", "sd", "rf-lower", "le-re", "le-gd")


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise FamilyError(f"unknown family {self.name!r}; choose from {', '.join(FAMILIES)}")
        need = _PARAMS[self.name]
        extra = set(self.params) - set(need)
        if extra:
            raise FamilyError(f"family {self.name} takes {'/'.join(need)}, got {', '.join(sorted(extra))}")
        missing = [p for p in need if p not in self.params]
        if missing:
            raise FamilyError(f"family {self.name} needs parameter {missing[0]}")
        _check_range(self.name, dict(self.params))

    @classmethod
    def parse(cls, name: str, text: str = "") -> "FamilySpec":
        """``k=4`` or ``a=4,b=2`` parameter strings."""
        params = {}
        for item in filter(None, (s.strip() for s in text.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                raise FamilyError(f"bad parameter {item!r}; expected key=value")
            try:
                params[key.strip()] = int(val)
            except ValueError:
                raise FamilyError(f"parameter {key.strip()} must be an integer") from None
        return cls(name, params)

    def __getitem__(self, key: str) -> int:
        return self.params[key]


_PARAMS = {
    "klee": ("n",), "gd": ("n",), "le-gd": ("n",), "sd": ("n",),
    "re-lower": ("k",), "rf-lower": ("a", "b"), "le-re": ("a", "b"),
}


def _check_range(name: str, p: dict) -> None:
    if name in ("klee", "le-gd") and p["n"] < 6:
        raise FamilyError(f"{name} needs n >= 6")
    if name == "gd" and (p["n"] < 7 or p["n"] % 2 == 0):
        raise FamilyError("gd needs odd n >= 7")
    if name == "sd" and p["n"] < 5:
        raise FamilyError("sd needs n >= 5")
    if name == "re-lower" and p["k"] < 4:
        raise FamilyError("re-lower needs k >= 4")
    if name in ("rf-lower", "le-re") and (p["a"] < 1 or p["b"] < 1):
        raise FamilyError(f"{name} needs a >= 1 and b >= 1")


@dataclass(frozen=True)
class FamilyPrediction:
    rule: str
    value: Fraction
    kind: str  # exact-steps | exact-expectation | lower-bound-visited

    def holds(self, observed) -> bool:
        if self.kind == "lower-bound-visited":
            return observed >= self.value
        return observed == self.value


# --- embedding ----------------------------------------------------------------

def facet_cycles(edges: Iterable[tuple[int, int]]) -> list[tuple[int, ...]]:
    """Face boundaries of the planar embedding, each rotated to start at its top vertex."""
    g = nx.Graph(edges)
    planar, emb = nx.check_planarity(g)
    if not planar:
        raise FamilyError("graph is not planar")
    seen: set = set()
    faces = []
    for u, v in emb.edges():
        if (u, v) not in seen:
            faces.append(emb.traverse_face(u, v, mark_half_edges=seen))
    out = []
    for f in faces:
        i = f.index(max(f))
        out.append(tuple(f[i:] + f[:i]))
    return sorted(out, key=lambda c: sorted(c, reverse=True))


def _build(name: str, edges, start: int, last: Optional[set] = None) -> CombinatorialInstance:
    """Instance from a rank-labelled edge list; the facet with vertex set ``last`` gets the top id."""
    faces = facet_cycles(edges)
    if last is not None:
        pick = [f for f in faces if set(f) == last]
        faces = [f for f in faces if set(f) != last] + pick
    return CombinatorialInstance(name, tuple(faces), start)


def _halin(spine: list[int], leaves: list[tuple[int, int]], name: str, start: int, last=None):
    """Halin graph: tree ``spine`` path plus (leaf, attachment) pairs, leaves listed in cyclic order."""
    edges = list(zip(spine, spine[1:]))
    edges += [(leaf, at) for leaf, at in leaves]
    ring = [leaf for leaf, _ in leaves]
    edges += list(zip(ring, ring[1:] + ring[:1]))
    return _build(name, edges, start, last=set(ring) if last == "ring" else last)


# --- generators -----------------------------------------------------------------

def klee(n: int) -> CombinatorialInstance:
    """Caterpillar tree below a leaf cycle that holds every vertex from v_{n-3} up.

    The leaf cycle gets the largest facet number, so Bland stays on it.
    """
    spine = list(range(n - 4, -1, -1))
    leaves = [(n - 3, n - 4), (n - 2, n - 4)]
    leaves += [(n - 1 + s, n - 5 - s) for s in range(n - 5)]
    leaves += [(2 * n - 6, 0), (2 * n - 5, 0)]
    return _halin(spine, leaves, f"klee-{n}", 2 * n - 6, last="ring")


def gd(n: int) -> CombinatorialInstance:
    """(n-3)/2 blocks of four ranks; greatest decrease lands on every block's second vertex."""
    k = (n - 3) // 2
    top = 4 * k + 1
    edges = [(top, top - 1), (top, top - 3), (top, 0)]
    for i in range(1, k + 1):
        a = top - 4 * (i - 1) - 1
        b, c, d = a - 1, a - 2, a - 3
        last = i == k
        edges += [(a, b), (a, c), (c, d), (b, d),
                  (d, 0 if last else a - 4), (b, 0 if last else c - 4)]
    return _build(f"gd-{n}", edges, 4 * k)


# n = 6 is too small for the chain below; this member was found by exhaustive
# search over rank orders of the two 6-facet graphs
_LE_GD6 = ((0, 3, 1), (2, 4, 3, 1), (6, 7, 2, 4), (4, 3, 0, 5, 6), (5, 6, 7), (7, 2, 1, 0, 5))


def le_gd(n: int) -> CombinatorialInstance:
    """Least entered with greatest-decrease ties leaves every facet once before settling."""
    if n == 6:
        return CombinatorialInstance("le-gd-6", _LE_GD6, 6)
    r = n - 6
    top = 2 * n - 5
    S, U, T, X, Y, Z = top - 1, top - 2, top - 3, top - 4, top - 5, top - 6
    lc = [Z - 1 - j for j in range(r - 1)]        # leaves of c_1 .. c_{r-1}
    L1, L2 = Z - r, Z - r - 1
    c = list(range(r))                             # c_1 = v_0 .. c_r = v_{r-1}
    spine = [X, Y, T] + c
    leaves = [(U, X), (Z, Y)] + [(lc[j], c[j]) for j in range(r - 1)]
    leaves += [(L1, c[-1]), (L2, c[-1]), (top, T), (S, X)]
    return _halin(spine, leaves, f"le-gd-{n}", S, last="ring")


def rf_lower(a: int, b: int) -> CombinatorialInstance:
    n = a + b + 3
    top = 2 * n - 5
    x = [top + 1 - 2 * j for j in range(1, b + 1)]
    o = [top - 2 * j for j in range(1, b + 1)]
    s = list(range(a))                             # s_1 = v_0 .. s_a = v_{a-1}
    spine = x + s
    leaves = [(o[j], x[j]) for j in range(b)]
    leaves += [(2 * a - j, s[j]) for j in range(a - 1)]
    leaves += [(a + 1, s[-1]), (a, s[-1]), (top, x[0])]
    return _halin(spine, leaves, f"rf-lower-{a}-{b}", o[0], last="ring")


def le_re(a: int, b: int) -> CombinatorialInstance:
    """rf-lower with every 1-vertex on the long facet cut off by a triangle."""
    n = a + 2 * b + 3
    top = 2 * n - 5
    x, p, q, r = [], [], [], []
    for j in range(b):
        hi = top - 1 - 4 * j
        x.append(hi)
        p.append(hi - 1)
        q.append(hi - 2)
        r.append(hi - 3)
    s = list(range(a))
    low = [2 * a - j for j in range(a + 1)]        # v_{2a} .. v_a along the long facet
    edges = list(zip(x, x[1:])) + [(x[-1], s[0])] + list(zip(s, s[1:]))
    edges += [(top, x[0])]
    for j in range(b):
        edges += [(p[j], q[j]), (q[j], r[j]), (p[j], r[j]), (q[j], x[j])]
        edges += [(r[j], p[j + 1] if j + 1 < b else low[0])]
    edges += [(top, p[0])]
    edges += list(zip(low, low[1:])) + [(low[-1], top)]
    edges += [(low[j], s[j]) for j in range(a - 1)] + [(low[a - 1], s[-1]), (low[a], s[-1])]
    ring = {top, *p, *r, *low}
    return _build(f"le-re-{a}-{b}", edges, p[0], last=ring)


# --- geometric family -------------------------------------------------------------

Plane = tuple[tuple[Fraction, Fraction, Fraction], Fraction]   # a.x <= b


def _det3(m) -> Fraction:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def halfspace_vertices(planes: list[Plane]) -> dict[tuple, frozenset]:
    """Vertices of {x : a.x <= b} with the set of tight planes; fails on degenerate vertices."""
    from itertools import combinations

    out = {}
    for tri in combinations(range(len(planes)), 3):
        rows = [list(planes[i][0]) for i in tri]
        det = _det3(rows)
        if det == 0:
            continue
        x = []
        for k in range(3):
            mk = [r[:] for r in rows]
            for r, i in zip(mk, tri):
                r[k] = planes[i][1]
            x.append(_det3(mk) / det)
        x = tuple(x)
        if x in out:
            continue
        tight = []
        for i, (a, b) in enumerate(planes):
            s = a[0] * x[0] + a[1] * x[1] + a[2] * x[2]
            if s > b:
                break
            if s == b:
                tight.append(i)
        else:
            if len(tight) != 3:
                raise FamilyError(f"vertex {x} lies on {len(tight)} planes")
            out[x] = frozenset(tight)
    return out


def _geometric(name: str, planes: list[Plane], c, d) -> GeometricInstance:
    verts = halfspace_vertices(planes)
    order = sorted(verts, key=lambda x: sum(p * q for p, q in zip(c, x)))
    vid = {x: i for i, x in enumerate(order)}
    faces = []
    for f in range(len(planes)):
        on = [x for x in order if f in verts[x]]
        if not on:
            continue
        adj = {x: [y for y in on if y != x and len(verts[x] & verts[y]) == 2] for x in on}
        cyc = [max(on, key=vid.get)]
        prev = None
        while True:
            nxt = next(y for y in adj[cyc[-1]] if y != prev)
            if nxt == cyc[0]:
                break
            prev = cyc[-1]
            cyc.append(nxt)
        faces.append(tuple(vid[x] for x in cyc))
    faces.sort(key=lambda cy: sorted(cy, reverse=True))
    base = CombinatorialInstance(name, tuple(faces), len(order) - 1)
    return GeometricInstance(base, tuple(order), tuple(map(Fraction, c)), tuple(map(Fraction, d)))


def _circle_point(t: Fraction) -> tuple[Fraction, Fraction]:
    # rational point (1 - sin phi, cos phi) with t = tan(phi/2)
    s, c = 2 * t / (1 + t * t), (1 - t * t) / (1 + t * t)
    return 1 - s, c


def _arc_prism(m: int) -> list[Plane]:
    """Flat prism over an m-gon (m even) whose sides alternately lean up and down.

    The polygon has m-1 short sides on a circular arc bulging to the upper
    left plus one long base chord. Every vertex of the prism then lies on
    the silhouette of the vertical projection, and each vertical edge is a
    short bevel that continues the arc.
    """
    ts = [Fraction(1, 10) + Fraction(8, 10) * Fraction(j, m - 1) for j in range(m)]
    q = [_circle_point(t) for t in ts]
    dphi = Fraction(8, 10) / (m - 1)
    delta = dphi * dphi / 100
    eps = delta / 1000
    tilt = delta / eps
    planes: list[Plane] = [((Fraction(0), Fraction(0), Fraction(1)), eps),
                           ((Fraction(0), Fraction(0), Fraction(-1)), eps)]
    for j in range(m):
        p1, p2 = q[j], q[(j + 1) % m]
        nx, ny = p2[1] - p1[1], p1[0] - p2[0]
        b = nx * p1[0] + ny * p1[1]
        r = q[(j + 2) % m]
        if nx * r[0] + ny * r[1] > b:
            nx, ny, b = -nx, -ny, -b
        lean = (1 if j % 2 == 0 else -1) * tilt * (abs(nx) + abs(ny))
        if j == m - 1:
            lean *= 10   # a steeper base keeps the corner bevels on the arc
        planes.append(((nx, ny, lean), b))
    return planes


def _cut_top(planes: list[Plane]) -> list[Plane]:
    """Truncate the x1-maximal vertex so the three new vertices stay on the silhouette."""
    verts = halfspace_vertices(planes)
    top = max(verts)
    at = verts[top]
    flat = next(i for i in at if planes[i][0][:2] == (0, 0))
    lean = {i: planes[i][0][2] > 0 for i in at}
    side = next(i for i in at if i != flat and lean[i] == lean[flat])
    odd = next(i for i in at if lean[i] != lean[flat])

    def slope_dir(x):
        dx, dy = x[0] - top[0], x[1] - top[1]
        return dx / abs(dx), dy / abs(dx)

    nbr = {frozenset(verts[x] & at): x for x in verts if len(verts[x] & at) == 2}
    dq = slope_dir(nbr[frozenset((flat, side))])
    dp = slope_dir(nbr[frozenset((side, odd))])
    # cut normal: the normal of the q-direction, turned three bevel-widths toward p
    w = tuple(rq + 3 * (rp - rq) for rq, rp in zip((-dq[1], dq[0]), (-dp[1], dp[0])))
    a = (-w[0], -w[1], Fraction(10) if not lean[flat] else Fraction(-10))
    gaps = [sum(ai * (ti - xi) for ai, ti, xi in zip(a, top, x)) for x in nbr.values()]
    if min(gaps) <= 0:
        raise FamilyError("cut plane does not separate the top vertex")
    b = sum(ai * ti for ai, ti in zip(a, top)) - min(gaps) / 10
    return planes + [(a, b)]


# a triangular prism found by random search; too small for the arc construction
_PRISM5 = (
    ((0, "7/4", 8), 4), ((3, "-2/3", 6), 8), ((-2, "1/3", -9), 2),
    ((-8, 4, "7/3"), 6), ((-8, 2, "-2/3"), 4),
)


def sd(n: int) -> GeometricInstance:
    """Flat polytope on which steepest decrease and shadow vertex visit every vertex.

    Objective x1, auxiliary objective x2. Even n is a prism over an
    (n-2)-gon; odd n truncates the top vertex of the (n-1) prism; n = 5 is
    a fixed triangular prism.
    """
    from .rules import run_shadow_vertex, run_steepest_decrease

    if n == 5:
        planes = [tuple((tuple(map(Fraction, a)), Fraction(b))) for a, b in _PRISM5]
    else:
        planes = _arc_prism(n - 2 if n % 2 == 0 else n - 3)
        if n % 2:
            planes = _cut_top(planes)
    inst = _geometric(f"sd-{n}", planes, (1, 0, 0), (0, 1, 0))
    want = 2 * n - 5
    if (run_steepest_decrease(inst).steps != want or run_shadow_vertex(inst).steps != want):
        raise FamilyError(f"sd({n}) coordinates do not force the full path")
    return inst


# --- random edge: backbone with configurations ----------------------------------------

CONFIG_COST = Fraction(1897, 128)

# 21-vertex configuration, ids = rank inside the block. Ports: the entry
# (previous block or backbone) attaches at 20, the extra in-edge from the
# top backbone row at 8, the exit at 0.
CONFIG_EDGES = (
    (20, 19), (20, 18), (19, 18), (19, 17), (18, 16), (17, 16), (17, 15), (16, 14),
    (15, 13), (15, 3), (14, 13), (14, 12), (13, 12), (12, 11), (11, 10), (11, 9),
    (10, 9), (10, 7), (9, 8), (8, 7), (7, 6), (6, 5), (6, 4), (5, 4), (5, 1),
    (4, 3), (3, 2), (2, 1), (2, 0), (1, 0),
)
CONFIG_PORTS = {"entry": 20, "extra": 8, "exit": 0}
CONFIG_SIZE = 21

# Random-edge flow through one block in units of 1/128 (128 enter at the entry);
# the key (0, None) is the leaving edge.
CONFIG_FLOW = {
    (20, 18): 64, (20, 19): 64, (19, 17): 32, (19, 18): 32, (18, 16): 96, (17, 15): 16,
    (17, 16): 16, (16, 14): 112, (15, 13): 8, (15, 3): 8, (14, 12): 56, (14, 13): 56,
    (13, 12): 64, (12, 11): 120, (11, 10): 60, (11, 9): 60, (10, 7): 30, (10, 9): 30,
    (9, 8): 90, (8, 7): 90, (7, 6): 120, (6, 4): 60, (6, 5): 60, (5, 1): 30, (5, 4): 30,
    (4, 3): 90, (3, 2): 98, (2, 0): 49, (2, 1): 49, (1, 0): 79, (0, None): 128,
}


def re_lower_blocks(k: int) -> list[range]:
    """Vertex id ranges of the k-2 configurations, first (containing the start) to last."""
    _check_range("re-lower", {"k": k})
    lower = {0} | {2 * i - 3 for i in range(2, k - 1)}
    out, nid = [], 0
    for r in range(2 * k - 4):
        if r in lower:
            out.append(range(nid, nid + CONFIG_SIZE))
            nid += CONFIG_SIZE
        else:
            nid += 1
    return out[::-1]


def re_lower(k: int) -> CombinatorialInstance:
    """Dual-cyclic backbone on k facets whose bottom path vertices are replaced by configurations.

    Backbone rows: upper U_2..U_{k-1}, lower L_1..L_{k-2} (L_1 = v_min),
    rungs U_i L_i plus U_2 L_1, U_{k-1} L_{k-2}, U_{k-1} L_1. Every lower
    vertex is a 1-vertex, so the walk passes through all k-2 blocks.
    """
    _check_range("re-lower", {"k": k})
    U = {i: 2 * i - 2 for i in range(2, k - 1)}
    U[k - 1] = 2 * k - 5
    L = {i: 2 * i - 3 for i in range(2, k - 1)}
    L[1] = 0
    backbone = [(U[i], U[i + 1]) for i in range(2, k - 1)]
    backbone += [(L[i], L[i + 1]) for i in range(1, k - 2)]
    backbone += [(U[i], L[i]) for i in range(2, k - 1)]
    backbone += [(U[2], L[1]), (U[k - 1], L[k - 2]), (U[k - 1], L[1])]
    index = {r: i for i, r in L.items()}
    base, nid = {}, 0
    for r in range(2 * k - 4):
        base[r] = nid
        nid += CONFIG_SIZE if r in index else 1

    def port(r: int, other: int) -> int:
        if r not in index:
            return base[r]
        i = index[r]
        if i == k - 2 and other == U[k - 1]:
            role = "entry"
        elif i == 1 and other == U[k - 1]:
            role = "exit"      # v_min has no leaving edge; this edge enters it
        elif other == U.get(i, U[2]):
            role = "extra"
        else:
            role = "entry" if other > r else "exit"
        return base[r] + CONFIG_PORTS[role]

    edges = [(port(a, b), port(b, a)) for a, b in backbone]
    for r in index:
        edges += [(base[r] + x, base[r] + y) for x, y in CONFIG_EDGES]
    start = base[L[k - 2]] + CONFIG_PORTS["entry"]
    return _build(f"re-lower-{k}", edges, start)


def re_lower_configuration() -> CombinatorialInstance:
    """One configuration closed off by a single apex joined to its three ports.

    The apex is v_max; the start is the configuration's own top vertex, from
    which random edge needs CONFIG_COST - 1 expected steps.
    """
    apex = CONFIG_SIZE
    edges = list(CONFIG_EDGES) + [(apex, p) for p in CONFIG_PORTS.values()]
    return _build("re-lower-configuration", edges, CONFIG_PORTS["entry"])


# --- dispatch and predictions -------------------------------------------------------

def generate_family(spec: FamilySpec):
    p = spec.params
    if spec.name == "klee":
        return klee(p["n"])
    if spec.name == "gd":
        return gd(p["n"])
    if spec.name == "le-gd":
        return le_gd(p["n"])
    if spec.name == "sd":
        return sd(p["n"])
    if spec.name == "rf-lower":
        return rf_lower(p["a"], p["b"])
    if spec.name == "le-re":
        return le_re(p["a"], p["b"])
    return re_lower(p["k"])


SMALLEST = {
    "klee": {"n": 6}, "re-lower": {"k": 4}, "gd": {"n": 7}, "sd": {"n": 5},
    "rf-lower": {"a": 1, "b": 1}, "le-re": {"a": 1, "b": 1}, "le-gd": {"n": 6},
}


def smallest_member(name: str) -> FamilySpec:
    if name not in SMALLEST:
        raise FamilyError(f"unknown family {name!r}")
    return FamilySpec(name, SMALLEST[name])


def load_fixture(name: str):
    """Pinned copy of the smallest member of a family (or ``re-lower-configuration``)."""
    from importlib import resources

    from .model import parse_instance

    path = resources.files(__package__) / "fixtures" / f"{name}.lp3"
    if not path.is_file():
        raise FamilyError(f"no fixture for {name!r}")
    return parse_instance(path.read_text())


def _visited_bound(a: int, b: int) -> Fraction:
    return (1 - Fraction(1, 2 ** b)) * (2 * a + b)


def family_prediction(spec: FamilySpec, rule: str) -> FamilyPrediction:
    """Closed form for ``rule`` on ``spec`` from the stored start.

    Exact kinds compare steps (or expected steps); ``lower-bound-visited``
    compares expected visited vertices, i.e. expected steps plus one.
    """
    from .rules import RuleSpec

    r = RuleSpec.parse(rule)
    key = r.label
    p = spec.params
    name = spec.name
    if name == "klee" and r.kind in ("bland", "dantzig"):
        return FamilyPrediction(key, Fraction(2 * p["n"] - 6), "exact-steps")
    if name == "gd" and r.kind == "greatest-decrease":
        return FamilyPrediction(key, Fraction(3 * (p["n"] - 3), 2), "exact-steps")
    if name == "le-gd" and key == "least-entered:greatest-decrease":
        return FamilyPrediction(key, Fraction(2 * p["n"] - 8), "exact-steps")
    if name == "sd" and r.kind in ("steepest-decrease", "shadow-vertex"):
        return FamilyPrediction(key, Fraction(2 * p["n"] - 5), "exact-steps")
    if name == "re-lower" and r.kind == "random-edge":
        return FamilyPrediction(key, (p["k"] - 2) * CONFIG_COST - 1, "exact-expectation")
    if name == "rf-lower" and r.kind == "rf":
        return FamilyPrediction(key, _visited_bound(p["a"], p["b"]), "lower-bound-visited")
    if name == "le-re" and (r.kind in ("rf", "rf1", "rf2") or key == "least-entered:random-edge"):
        return FamilyPrediction(key, _visited_bound(p["a"], p["b"]), "lower-bound-visited")
    raise FamilyError(f"no closed form for rule {rule} on family {name}")
