"""``lp3sim`` command line: exact p/q output, exit 0 ok, 1 domain error, 2 usage error."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import analysis, expectation, families, model, rules, search

EXPECT_RULES = ("random-edge", "rf", "rf1", "rf2", "least-entered-re")


class DomainError(Exception):
    pass


def decimal(q: Fraction, places: int = 15) -> str:
    """Exact rounding to ``places`` fractional digits, trailing zeros dropped."""
    q = Fraction(q)
    scaled = round(abs(q) * 10 ** places)
    whole, frac = divmod(scaled, 10 ** places)
    text = str(whole) + ("." + str(frac).rjust(places, "0")).rstrip("0").rstrip(".")
    return ("-" if q < 0 and scaled else "") + text


def fmt(q: Fraction) -> str:
    return f"{model.format_rational(Fraction(q))} (≈{decimal(q)})"


def _common(a: Fraction, b: Fraction) -> str:
    from math import lcm

    d = lcm(a.denominator, b.denominator)
    if d == 1:
        return f"{a} {b}"
    return f"{a.numerator * (d // a.denominator)}/{d} {b.numerator * (d // b.denominator)}/{d}"


def _read(path: str, stdin: TextIO):
    text = stdin.read() if path == "-" else Path(path).read_text()
    return model.parse_instance(text)


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("must be a 64-bit unsigned integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("expected lo..hi") from None
    if not sep or a > b:
        raise argparse.ArgumentTypeError("expected lo..hi with lo <= hi")
    return a, b


def _numbering(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated facet ids") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lp3sim", description="Pivot rules on simple 3-polytopes.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check structure and realizability conditions")
    s.add_argument("file")

    s = sub.add_parser("run", help="run a pivot rule")
    s.add_argument("--rule", required=True)
    s.add_argument("--tiebreak", choices=("greatest-decrease", "gd", "random-edge", "re"))
    s.add_argument("--numbering", type=_numbering)
    s.add_argument("--seed", type=_u64)
    s.add_argument("--trials", type=_positive)
    s.add_argument("--start", type=int)
    s.add_argument("file")

    s = sub.add_parser("expect", help="exact expected number of steps")
    s.add_argument("--rule", required=True, choices=EXPECT_RULES)
    s.add_argument("--start", type=int)
    s.add_argument("file")

    s = sub.add_parser("family", help="generate a family member")
    s.add_argument("--name", required=True, choices=families.FAMILIES)
    s.add_argument("--param", default="")
    s.add_argument("--out")

    s = sub.add_parser("certificate", help="the random-edge certificate LP")
    s.add_argument("--at", type=analysis.CertPoint.parse, metavar="A,B")

    s = sub.add_parser("hirsch", help="monotone path that never revisits a facet")
    s.add_argument("--start", type=int)
    s.add_argument("file")

    s = sub.add_parser("enumerate", help="AUSOs of a graph and worst random-edge starts")
    s.add_argument("--top", type=_positive)
    s.add_argument("--oracle", action="store_true")
    s.add_argument("--jobs", type=_positive, default=1)
    s.add_argument("--out")
    s.add_argument("file")

    s = sub.add_parser("linearity", help="steps per facet across a family")
    s.add_argument("--family", required=True, choices=families.FAMILIES)
    s.add_argument("--rule", required=True)
    s.add_argument("--range", required=True, type=_range, dest="span")
    return p


def _check_start(inst, start: Optional[int]) -> Optional[int]:
    if start is not None and not 0 <= start < model.as_combinatorial(inst).num_vertices:
        raise DomainError(f"start {start} is not a vertex")
    return start


def cmd_validate(a, out, stdin) -> int:
    inst = _read(a.file, stdin)
    rep = model.validate(inst)
    for v in rep.violations:
        print(f"violation {v.code}: {v.message}", file=out)
    if not rep.ok:
        return 1
    mk = model.check_mk(inst)
    base = model.as_combinatorial(inst)
    print(f"ok n={base.n} vertices={base.num_vertices} realizable={'yes' if mk.realizable else 'no'}", file=out)
    for f in mk.bad_facets:
        print(f"facet {f} has more than one sink", file=out)
    return 0 if mk.realizable else 1


def _rule_spec(a) -> rules.RuleSpec:
    text = a.rule
    if a.tiebreak:
        if ":" in text:
            raise DomainError("give the tiebreak either in --rule or --tiebreak, not both")
        text = f"{text}:{a.tiebreak}"
    return rules.RuleSpec.parse(text, numbering=a.numbering)


def cmd_run(a, out, stdin) -> int:
    spec = _rule_spec(a)
    inst = _read(a.file, stdin)
    start = _check_start(inst, a.start)
    if spec.randomized and a.seed is None:
        raise UsageError("--seed is required for randomized rules")
    if a.trials is not None:
        if not spec.randomized:
            raise UsageError("--trials applies to randomized rules only")
        st = rules.simulate_randomized(inst, spec, start, a.trials, a.seed)
        print(f"mean={model.format_rational(st.mean)} var={model.format_rational(st.sample_variance)} "
              f"min={st.min_steps} max={st.max_steps} trials={st.trials} seed={st.seed}", file=out)
        return 0
    tr = rules.run_rule(inst, spec, start, a.seed)
    print(" ".join(map(str, tr.vertices)), file=out)
    print(f"steps={tr.steps}", file=out)
    return 0


def cmd_expect(a, out, stdin) -> int:
    inst = _read(a.file, stdin)
    base = model.as_combinatorial(inst)
    start = base.start if a.start is None else _check_start(inst, a.start)
    if a.rule == "random-edge":
        value = expectation.expected_random_edge(inst)[start]
    elif a.rule == "least-entered-re":
        value = expectation.exact_least_entered_re(inst, start)
    else:
        value = expectation.expected_random_facet(inst, a.rule)[start]
    print(fmt(value), file=out)
    return 0


def cmd_family(a, out, stdin) -> int:
    spec = families.FamilySpec.parse(a.name, a.param)
    text = model.serialize_instance(families.generate_family(spec))
    if a.out:
        Path(a.out).write_text(text)
    else:
        out.write(text)
    return 0


def cmd_certificate(a, out, stdin) -> int:
    system = analysis.certificate_system()
    if a.at is not None:
        rep = analysis.check_certificate_point(a.at, system)
        bad, tight = set(rep.violated), set(rep.tight)
        for row in system.rows:
            state = "violated" if row.id in bad else "tight" if row.id in tight else "ok"
            print(f"row {row.id:2d}: {row}  {state}", file=out)
        print(f"point {model.format_rational(a.at.alpha)} {model.format_rational(a.at.beta)}", file=out)
        print(f"value {fmt(system.value(a.at))}", file=out)
        print(f"feasible {'yes' if rep.feasible else 'no'}", file=out)
        return 0
    p, value = analysis.solve_certificate_lp(system)
    tight = set(analysis.check_certificate_point(p, system).tight)
    for row in system.rows:
        print(f"row {row.id:2d}: {row}" + ("  tight" if row.id in tight else ""), file=out)
    print(f"optimum {_common(p.alpha, p.beta)}", file=out)
    print(f"value {fmt(value)}", file=out)
    return 0


def cmd_hirsch(a, out, stdin) -> int:
    inst = _read(a.file, stdin)
    path = analysis.find_nonrevisiting_path(inst, _check_start(inst, a.start))
    n = model.as_combinatorial(inst).n
    print(" ".join(map(str, path)), file=out)
    print(f"length={len(path) - 1} bound={n - 3}", file=out)
    return 0


def cmd_enumerate(a, out, stdin) -> int:
    graph = _read(a.file, stdin)
    vecs = list(search.enumerate_ausos(graph))
    print(f"ausos={len(vecs)} kernel={search.KERNEL}", file=out)
    if a.oracle:
        same = set(vecs) == set(search.brute_force_ausos(graph))
        print(f"oracle={'match' if same else 'MISMATCH'}", file=out)
        if not same:
            return 1
    if a.top:
        results = search.worst_case_random_edge(graph, a.top, a.jobs)
        name = model.as_combinatorial(graph).name
        for r in results:
            print(f"{name}\t{r.index}\t{r.start}\t{model.format_rational(r.expectation)}\t"
                  f"{decimal(r.expectation)}", file=out)
        if a.out:
            d = Path(a.out)
            d.mkdir(parents=True, exist_ok=True)
            for rank, r in enumerate(results):
                (d / f"{name}-top{rank}.lp3").write_text(model.serialize_instance(r.instance))
    return 0


def cmd_linearity(a, out, stdin) -> int:
    lo, hi = a.span
    params = list(range(lo, hi + 1))
    if a.family == "gd":
        params = [x for x in params if x % 2]
    est = analysis.estimate_linearity(a.family, a.rule, params)
    for n, v in est.samples:
        print(f"n={n} value={fmt(v)} ratio={fmt(v / n)}", file=out)
    print(f"max_ratio={fmt(est.max_ratio)}", file=out)
    print(f"slope={fmt(est.slope)} intercept={fmt(est.intercept)}", file=out)
    return 0


class UsageError(Exception):
    pass


COMMANDS = {
    "validate": cmd_validate, "run": cmd_run, "expect": cmd_expect, "family": cmd_family,
    "certificate": cmd_certificate, "hirsch": cmd_hirsch, "enumerate": cmd_enumerate,
    "linearity": cmd_linearity,
}

DOMAIN_ERRORS = (
    DomainError, model.ParseError, families.FamilyError, rules.RuleError, analysis.LPError,
    analysis.HirschCounterexample, search.SearchError, expectation.StateBudgetExceeded,
    expectation.SingularSystemError, OSError, ValueError,
)


def _unknown_flag(parser: argparse.ArgumentParser, argv: list[str]) -> Optional[str]:
    """First flag not known to the chosen subcommand, so it is named before other usage errors."""
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    cmd = next((t for t in argv if not t.startswith("-")), None)
    if cmd not in sub.choices:
        return None
    known = set(sub.choices[cmd]._option_string_actions)
    after = argv[argv.index(cmd) + 1:]
    for tok in after:
        if tok == "--":
            break
        if tok.startswith("-") and tok != "-" and not _is_number(tok) and tok.split("=", 1)[0] not in known:
            return tok
    return None


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def run_cli(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None,
            stdin: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    stdin = stdin or sys.stdin
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    bad = _unknown_flag(parser, argv)
    if bad:
        print(f"lp3sim: error: unrecognized flag {bad}", file=err)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out, stdin)
    except UsageError as exc:
        print(f"lp3sim {args.command}: error: {exc}", file=err)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"lp3sim {args.command}: {type(exc).__name__}: {exc}", file=err)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
