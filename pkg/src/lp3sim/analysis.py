"""Random-edge certificate LP, non-revisiting paths, and linearity estimates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .model import as_combinatorial, orientation_of, vertex_profile

F = Fraction


# --- certificate ---------------------------------------------------------------

@dataclass(frozen=True)
class CertificateRow:
    """Constraint ``a*alpha + b*beta >= rhs``; ``id`` is the 1-based position in the system."""

    id: int
    a: Fraction
    b: Fraction
    rhs: Fraction

    def slack(self, alpha: Fraction, beta: Fraction) -> Fraction:
        return self.a * alpha + self.b * beta - self.rhs

    def __str__(self) -> str:
        terms = [_term(c, var) for c, var in ((self.a, "alpha"), (self.b, "beta")) if c]
        return f"{' + '.join(terms)} >= {self.rhs}"


def _term(c: Fraction, var: str) -> str:
    return var if c == 1 else f"{c}*{var}"


@dataclass(frozen=True)
class CertPoint:
    alpha: Fraction
    beta: Fraction

    @classmethod
    def parse(cls, text: str) -> "CertPoint":
        a, _, b = text.partition(",")
        if not b:
            raise ValueError(f"expected 'alpha,beta', got {text!r}")
        return cls(F(a.strip()), F(b.strip()))


@dataclass(frozen=True)
class CertificateSystem:
    rows: tuple[CertificateRow, ...]
    objective: tuple[Fraction, Fraction] = (F(1), F(2))

    def value(self, p: CertPoint) -> Fraction:
        return self.objective[0] * p.alpha + self.objective[1] * p.beta

    def subsystem(self, ids: Iterable[int]) -> "CertificateSystem":
        keep = set(ids)
        return CertificateSystem(tuple(r for r in self.rows if r.id in keep), self.objective)

    def without(self, ids: Iterable[int]) -> "CertificateSystem":
        drop = set(ids)
        return CertificateSystem(tuple(r for r in self.rows if r.id not in drop), self.objective)


_ROWS = [
    (1, 1, 1), (0, 1, "2/5"), ("1/2", 2, 1), (0, 1, "14/29"),
    (1, "33/8", "19/8"), (1, "33/8", "5/2"), (2, 3, "5/2"), (1, "5/2", "3/2"),
    ("1/2", "11/4", "3/2"), (1, "17/4", "5/2"), (1, "9/2", "9/4"), (0, "19/4", "9/4"),
    (1, "43/8", "11/4"), (1, "15/4", "9/4"), (3, 5, 4), (2, "17/4", 3),
    (1, "15/4", "9/4"), (2, "43/8", "29/8"), (1, "41/8", 3), (3, 6, 4),
    (2, "99/16", 4), (2, "43/8", "27/8"), (1, "95/16", "27/8"), (2, "99/16", "61/16"),
]


def certificate_system() -> CertificateSystem:
    """The 24 inequalities in (alpha, beta); objective: minimize alpha + 2*beta."""
    return CertificateSystem(tuple(
        CertificateRow(i, F(a), F(b), F(r)) for i, (a, b, r) in enumerate(_ROWS, 1)))


@dataclass(frozen=True)
class CertificateCheck:
    point: CertPoint
    satisfied: tuple[int, ...]
    violated: tuple[int, ...]
    tight: tuple[int, ...]

    @property
    def feasible(self) -> bool:
        return not self.violated


def check_certificate_point(p: CertPoint, system: Optional[CertificateSystem] = None) -> CertificateCheck:
    system = system or certificate_system()
    sat, bad, tight = [], [], []
    for row in system.rows:
        s = row.slack(p.alpha, p.beta)
        (bad if s < 0 else sat).append(row.id)
        if s == 0:
            tight.append(row.id)
    return CertificateCheck(p, tuple(sat), tuple(bad), tuple(tight))


class LPError(ArithmeticError):
    pass


class LPInfeasible(LPError):
    pass


class LPUnbounded(LPError):
    pass


def _cross(u, v) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def _in_cone(c, normals) -> bool:
    """True if c is a nonnegative combination of the given 2-vectors."""
    for g in normals:
        if _cross(g, c) == 0 and g[0] * c[0] + g[1] * c[1] > 0:
            return True
    for g, h in combinations(normals, 2):
        d = _cross(g, h)
        if d == 0:
            continue
        y1, y2 = _cross(c, h) / d, _cross(g, c) / d
        if y1 >= 0 and y2 >= 0:
            return True
    return False


def solve_certificate_lp(system: Optional[CertificateSystem] = None) -> tuple[CertPoint, Fraction]:
    """Exact minimum of the objective over the half-planes; alpha and beta are free.

    Bounded iff the objective lies in the cone of the row normals. The
    optimum is then attained at an intersection of two rows, unless all
    rows are parallel.
    """
    system = system or certificate_system()
    rows = system.rows
    if not rows:
        raise LPUnbounded("no constraints")
    c = system.objective
    normals = [(r.a, r.b) for r in rows]
    if not _in_cone(c, normals):
        raise LPUnbounded("objective is unbounded below on this system")
    best: Optional[tuple[Fraction, CertPoint]] = None
    spanning = False
    for r, s in combinations(rows, 2):
        d = r.a * s.b - r.b * s.a
        if d == 0:
            continue
        spanning = True
        alpha = (r.rhs * s.b - r.b * s.rhs) / d
        beta = (r.a * s.rhs - r.rhs * s.a) / d
        p = CertPoint(alpha, beta)
        if all(q.slack(alpha, beta) >= 0 for q in rows):
            val = system.value(p)
            if best is None or val < best[0] or (val == best[0] and (alpha, beta) < (best[1].alpha, best[1].beta)):
                best = (val, p)
    if not spanning:
        return _parallel_optimum(system)
    if best is None:
        raise LPInfeasible("no point satisfies every row")
    return best[1], best[0]


def _parallel_optimum(system: CertificateSystem) -> tuple[CertPoint, Fraction]:
    # every row reads mu * (g . x) >= rhs; the optimum is a line, reported at its point on the g ray
    g = (system.rows[0].a, system.rows[0].b)
    gg = g[0] * g[0] + g[1] * g[1]
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    for r in system.rows:
        mu = (r.a * g[0] + r.b * g[1]) / gg
        t = r.rhs / mu
        if mu > 0:
            lo = t if lo is None else max(lo, t)
        else:
            hi = t if hi is None else min(hi, t)
    if lo is None:
        raise LPUnbounded("objective is unbounded below on this system")
    if hi is not None and hi < lo:
        raise LPInfeasible("no point satisfies every row")
    p = CertPoint(lo * g[0] / gg, lo * g[1] / gg)
    return p, system.value(p)


def re_upper_bound_at(p: CertPoint, inst, v: int) -> Fraction:
    """alpha * N1(v) + beta * N(v); undefined at the top vertex."""
    inst = as_combinatorial(inst)
    if v == inst.v_max:
        raise ValueError("the bound is not claimed at the top vertex")
    prof = vertex_profile(inst)
    return p.alpha * prof.n1[v] + p.beta * prof.n_total[v]


# --- non-revisiting paths --------------------------------------------------------

class HirschCounterexample(RuntimeError):
    """No facet-non-revisiting monotone path exists from the given start."""


def find_nonrevisiting_path(inst, start: Optional[int] = None) -> tuple[int, ...]:
    """Monotone path to v_min that never returns to a facet it has left.

    Depth-first over (vertex, abandoned facets), lowest-ranked successor
    first; dead states are memoized.
    """
    inst = as_combinatorial(inst)
    start = inst.start if start is None else start
    outs = orientation_of(inst).out_neighbors
    vf = [frozenset(fs) for fs in inst.vertex_facets]
    dead: set = set()

    def walk(v: int, gone: frozenset) -> Optional[list[int]]:
        if v == 0:
            return [0]
        key = (v, gone)
        if key in dead:
            return None
        for u in sorted(outs[v]):
            if vf[u] & gone:
                continue
            rest = walk(u, gone | (vf[v] - vf[u]))
            if rest is not None:
                return [v] + rest
        dead.add(key)
        return None

    path = walk(start, frozenset())
    if path is None:
        raise HirschCounterexample(f"no non-revisiting path from {start} in {inst.name}")
    return tuple(path)


# --- linearity ------------------------------------------------------------------

@dataclass(frozen=True)
class LinearityEstimate:
    rule: str
    family: str
    samples: tuple[tuple[int, Fraction], ...]   # (facets, steps or expected steps)
    max_ratio: Fraction
    slope: Fraction
    intercept: Fraction


def rule_value(inst, rule: str) -> Fraction:
    """Exact steps (deterministic rules) or exact expected steps (randomized rules) from the stored start."""
    from .expectation import exact_least_entered_re, expected_random_edge, expected_random_facet
    from .rules import RuleSpec, run_rule

    spec = RuleSpec.parse(rule)
    if spec.kind == "random-edge":
        return expected_random_edge(inst)[inst.start]
    if spec.kind in ("rf", "rf1", "rf2"):
        return expected_random_facet(inst, spec.kind)[inst.start]
    if spec.kind == "least-entered" and spec.tiebreak.kind == "random-edge":
        return exact_least_entered_re(inst)
    return Fraction(run_rule(inst, spec).steps)


def estimate_linearity(family: str, rule: str, params: Sequence[int]) -> LinearityEstimate:
    """Evaluate ``rule`` on family members and fit value = slope*n + intercept on the two largest.

    ``params`` runs over n (or k for re-lower; for rf-lower and le-re a=k^2, b=k).
    """
    from .families import FamilySpec, generate_family

    if len(params) < 2:
        raise ValueError("need at least two family members")
    samples = []
    for x in params:
        if family in ("rf-lower", "le-re"):
            spec = FamilySpec(family, {"a": x * x, "b": x})
        elif family == "re-lower":
            spec = FamilySpec(family, {"k": x})
        else:
            spec = FamilySpec(family, {"n": x})
        inst = generate_family(spec)
        samples.append((as_combinatorial(inst).n, rule_value(inst, rule)))
    samples.sort()
    (n1, v1), (n2, v2) = samples[-2], samples[-1]
    slope = (v2 - v1) / (n2 - n1)
    return LinearityEstimate(rule, family, tuple(samples), max(v / n for n, v in samples),
                             slope, v2 - slope * n2)
