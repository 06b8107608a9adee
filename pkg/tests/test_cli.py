import io
import subprocess
import sys
from decimal import Decimal, ROUND_HALF_EVEN
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lp3sim.cli import decimal, run_cli
from lp3sim.families import klee
from lp3sim.model import parse_instance, serialize_instance

TET = "lp3 v1\nfacets 4\nfacet 0: 0 1 2\nfacet 1: 0 1 3\nfacet 2: 0 2 3\nfacet 3: 1 2 3\nstart 3\n"


def cli(*argv, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out, err, io.StringIO(stdin))
    return code, out.getvalue(), err.getvalue()


def test_certificate():
    code, out, _ = cli("certificate")
    lines = out.splitlines()
    assert code == 0 and sum(l.startswith("row") for l in lines) == 24
    assert "optimum 46/87 42/87" in lines
    assert "value 130/87 (≈1.494252873563218)" in lines


def test_certificate_at_point():
    code, out, _ = cli("certificate", "--at", "0,0")
    assert code == 0 and "feasible no" in out


def test_family_pipe_expect():
    code, text, _ = cli("family", "--name", "re-lower", "--param", "k=4")
    assert code == 0
    code, out, _ = cli("expect", "--rule", "random-edge", "-", stdin=text)
    assert code == 0 and out.strip() == "1833/64 (≈28.640625)"


def test_family_round_trip():
    code, text, _ = cli("family", "--name", "klee", "--param", "n=6")
    assert parse_instance(text) == klee(6)


def test_run_and_seeds():
    code, out, _ = cli("run", "--rule", "bland", "-", stdin=TET)
    assert code == 0 and out.splitlines() == ["3 2 1 0", "steps=3"]
    assert cli("run", "--rule", "random-edge", "-", stdin=TET)[0] == 2
    a = cli("run", "--rule", "random-edge", "--seed", "7", "--trials", "50", "-", stdin=TET)
    b = cli("run", "--rule", "random-edge", "--seed", "7", "--trials", "50", "-", stdin=TET)
    assert a == b and a[0] == 0 and "trials=50" in a[1]


def test_least_entered_tiebreak_flag():
    code, out, _ = cli("run", "--rule", "least-entered", "--tiebreak", "gd", "-", stdin=TET)
    assert code == 0 and out.startswith("3 0")


def test_validate_and_hirsch():
    assert cli("validate", "-", stdin=TET)[1].startswith("ok n=4")
    code, out, _ = cli("hirsch", "-", stdin=TET)
    assert code == 0 and out.splitlines() == ["3 0", "length=1 bound=1"]


def test_enumerate_oracle():
    graph = "lp3graph v1\nfacets 4\nfacet 0: 0 1 2\nfacet 1: 0 1 3\nfacet 2: 0 2 3\nfacet 3: 1 2 3\n"
    code, out, _ = cli("enumerate", "--oracle", "--top", "1", "-", stdin=graph)
    assert code == 0 and "ausos=24" in out and "oracle=match" in out and "11/6" in out


def test_linearity():
    code, out, _ = cli("linearity", "--family", "gd", "--rule", "gd", "--range", "7..11")
    assert code == 0 and "slope=3/2" in out


@pytest.mark.parametrize("argv, code", [
    (("run", "--rule", "bland", "/no/such/file"), 1),
    (("run", "--rule", "bland", "--bogus", "x"), 2),
    (("expect", "--rule", "nope", "x"), 2),
    (("family", "--name", "klee", "--param", "n=3"), 1),
    (("linearity", "--family", "klee", "--rule", "bland", "--range", "9..6"), 2),
    (("run", "--rule", "bland", "--start", "9", "-"), 1),
])
def test_exit_codes(argv, code):
    assert cli(*argv, stdin=TET)[0] == code


def test_unknown_flag_is_named():
    code, _, err = cli("run", "--rule", "bland", "--frobnicate", "-", stdin=TET)
    assert code == 2 and "--frobnicate" in err


def test_parse_error_exit_one():
    code, _, err = cli("run", "--rule", "bland", "-", stdin="lp3 v1\nfacets 4\n")
    assert code == 1 and "ParseError" in err


@given(st.fractions(-10 ** 6, 10 ** 6, max_denominator=10 ** 9))
def test_decimal_is_exact_rounding(q):
    want = Decimal(q.numerator) / Decimal(q.denominator)
    import decimal as dm
    with dm.localcontext() as ctx:
        ctx.prec = 60
        want = (Decimal(q.numerator) / Decimal(q.denominator)).quantize(Decimal(10) ** -15, ROUND_HALF_EVEN)
    got = Decimal(decimal(q))
    assert got == want


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "lp3sim.cli", "certificate"], capture_output=True, text=True)
    assert r.returncode == 0 and "130/87" in r.stdout
