from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import is_nonrevisiting
from lp3sim.analysis import (CertPoint, CertificateSystem, LPInfeasible, LPUnbounded, certificate_system,
                             check_certificate_point, estimate_linearity, find_nonrevisiting_path,
                             re_upper_bound_at, solve_certificate_lp)
from lp3sim.families import klee, gd, le_gd, rf_lower
from lp3sim.model import tetrahedron, vertex_profile
from lp3sim.search import enumerate_ausos, load_catalog, snapshot

F = Fraction
OPT = CertPoint(F(46, 87), F(42, 87))


def row_by_content(system, a, b, rhs):
    return next(r.id for r in system.rows if (r.a, r.b, r.rhs) == (F(a), F(b), F(rhs)))


def test_row_count():
    assert len(certificate_system().rows) == 24


def test_optimum_and_tight_rows():
    s = certificate_system()
    rep = check_certificate_point(OPT, s)
    assert rep.feasible and not rep.violated
    assert set(rep.tight) == {row_by_content(s, 0, 1, F(14, 29)), row_by_content(s, 3, 5, 4)}


def test_origin_violates_first_row():
    rep = check_certificate_point(CertPoint(F(0), F(0)))
    assert 1 in rep.violated and not rep.feasible


def test_one_one_strictly_feasible():
    rep = check_certificate_point(CertPoint(F(1), F(1)))
    assert rep.feasible and not rep.tight


def test_lp_optimum():
    p, value = solve_certificate_lp()
    assert (p.alpha, p.beta, value) == (OPT.alpha, OPT.beta, F(130, 87))


def test_lp_optimum_dual_certificate():
    # objective (1, 2) = 1/3 (0, 1) + 1/3 (3, 5): nonnegative multipliers on the tight rows
    assert (F(1, 3) * 0 + F(1, 3) * 3, F(1, 3) * 1 + F(1, 3) * 5) == (1, 2)
    assert F(1, 3) * F(14, 29) + F(1, 3) * 4 == F(130, 87)


def test_two_row_subsystem():
    s = certificate_system()
    p, value = solve_certificate_lp(s.subsystem([1, row_by_content(s, 0, 1, F(14, 29))]))
    assert (p.alpha, p.beta, value) == (F(15, 29), F(14, 29), F(43, 29))


def test_unbounded_subsystem():
    s = certificate_system()
    with pytest.raises(LPUnbounded):
        solve_certificate_lp(s.subsystem([2]))


def test_infeasible_system():
    from lp3sim.analysis import CertificateRow
    rows = (CertificateRow(1, F(1), F(0), F(1)), CertificateRow(2, F(-1), F(0), F(0)),
            CertificateRow(3, F(0), F(1), F(0)))
    with pytest.raises(LPInfeasible):
        solve_certificate_lp(CertificateSystem(rows))


@settings(max_examples=200, deadline=None)
@given(st.fractions(0, 2, max_denominator=60), st.fractions(0, 2, max_denominator=60))
def test_no_feasible_point_beats_optimum(a, b):
    p = CertPoint(a, b)
    if check_certificate_point(p).feasible:
        assert a + 2 * b >= F(130, 87)


def test_bound_examples():
    t = tetrahedron()
    assert re_upper_bound_at(OPT, t, 0) == 0
    assert re_upper_bound_at(OPT, t, 2) == F(130, 87)
    with pytest.raises(ValueError):
        re_upper_bound_at(OPT, t, t.v_max)


@pytest.mark.parametrize("inst", [klee(9), gd(11), rf_lower(3, 2)], ids=lambda i: i.name)
def test_bound_at_most_total(inst):
    for v in range(inst.v_max):
        assert re_upper_bound_at(OPT, inst, v) <= F(130, 87) * (inst.n - 3)


def test_hirsch_examples():
    assert find_nonrevisiting_path(tetrahedron()) == (3, 0)
    assert find_nonrevisiting_path(tetrahedron(), 0) == (0,)
    for n in (6, 9, 15):
        g = klee(n)
        assert len(find_nonrevisiting_path(g, n - 3)) - 1 == n - 3


_GRAPHS = [g for n in (5, 6, 7) for g in load_catalog(n)]


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(_GRAPHS), st.data())
def test_hirsch_paths_are_valid(g, data):
    vecs = list(enumerate_ausos(g))
    inst = snapshot(g, data.draw(st.sampled_from(vecs)))
    from lp3sim.model import check_mk
    if not check_mk(inst).realizable:
        return
    v = data.draw(st.integers(0, inst.v_max))
    path = find_nonrevisiting_path(inst, v)
    assert path[0] == v and path[-1] == 0
    assert is_nonrevisiting(inst, path) and len(path) - 1 <= inst.n - 3


def test_linearity_slopes():
    assert estimate_linearity("klee", "bland", range(6, 12)).slope == 2
    assert estimate_linearity("gd", "gd", [7, 9, 11]).slope == F(3, 2)
    est = estimate_linearity("re-lower", "random-edge", [4, 5])
    assert est.slope == F(1897, 1408)
    assert estimate_linearity("le-gd", "le:gd", range(8, 12)).slope == 2
    with pytest.raises(ValueError):
        estimate_linearity("klee", "bland", [6])


def test_bound_excess_is_small_and_local():
    """At the LP optimum the per-vertex bound fails only at a few low vertices, by at most 1/87."""
    from lp3sim.expectation import expected_random_edge
    patterns, worst = set(), F(0)
    for n in range(4, 8):
        for g in load_catalog(n):
            for vec in enumerate_ausos(g):
                inst = snapshot(g, vec)
                E = expected_random_edge(inst)
                prof = vertex_profile(inst)
                for v in range(inst.v_max):
                    excess = E[v] - re_upper_bound_at(OPT, inst, v)
                    if excess > 0:
                        patterns.add((v, prof.n1[v], E[v]))
                        worst = max(worst, excess)
    assert worst == F(1, 87)
    assert patterns == {(2, 1, F(3, 2)), (4, 2, F(3)), (7, 4, F(11, 2))}


def test_tetrahedron_second_vertex_exceeds_bound():
    from lp3sim.expectation import expected_random_edge
    t = tetrahedron()
    assert expected_random_edge(t)[2] - re_upper_bound_at(OPT, t, 2) == F(1, 174)
