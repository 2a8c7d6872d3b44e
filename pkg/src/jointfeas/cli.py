"""Command-line front end.

Exit codes: 0 when the command completed (whatever the verdict), 1 for
usage or input errors, 2 for internal errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Any

from . import formats, ghz, joint, quantum, upper
from .lp import StructuralError
from .numbers import DEFAULT_DIGITS, NumberFormatError, decimal_string, format_rational, parse_number
from .outcomes import DomainError, MomentTerm, atoms_of, eval_term

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTERNAL = 2

USER_ERRORS = (
    formats.FormatError,
    joint.ScenarioError,
    NumberFormatError,
    DomainError,
    StructuralError,
    ghz.OutOfRange,
    upper.UntrackedEvent,
    OSError,
    json.JSONDecodeError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fraction(text: str) -> Fraction:
    try:
        return parse_number(text).value
    except NumberFormatError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_json(path: str) -> Any:
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _write_json(path: str, obj: dict) -> None:
    Path(path).write_text(formats.dumps(obj), encoding="utf-8")


def _load_scenario(args) -> joint.Scenario:
    return formats.load_scenario(_read_json(args.scenario), args.precision)


def _values(text: str, count: int, digits: int):
    parts = [s for s in re.split(r"[,\s]+", text.strip()) if s]
    if len(parts) != count:
        raise UsageError(f"expected {count} comma-separated values, got {len(parts)}")
    parsed = [parse_number(s, digits) for s in parts]
    bound = max(p.error_bound for p in parsed)
    return [p.value for p in parsed], bound


def _moment(scenario: joint.Scenario, names) -> Fraction:
    key = frozenset(names)
    for t, v in scenario.moments:
        if t.variables == key:
            return v
    raise joint.ScenarioError(f"scenario has no moment for {'*'.join(names)}")


# verbs ------------------------------------------------------------------


def cmd_check_joint(args) -> dict:
    scenario = _load_scenario(args)
    verdict = joint.check_joint(scenario)
    report = formats.verdict_report(verdict)
    if verdict.feasible:
        payload = formats.dump_witness(verdict.witness)
        if args.witness_out:
            _write_json(args.witness_out, payload)
            report["witness_file"] = args.witness_out
        else:
            report["witness"] = payload
    else:
        payload = formats.dump_certificate(scenario.linear_system(), verdict.certificate)
        if args.certificate_out:
            _write_json(args.certificate_out, payload)
            report["certificate_file"] = args.certificate_out
        else:
            report["certificate"] = payload
    return report


def cmd_inequality(args) -> dict:
    notes = []
    bound = Fraction(0)
    if args.kind == "suppes-zanotti":
        if args.values:
            (exy, eyz, exz), bound = _values(args.values, 3, args.precision)
        elif args.scenario:
            sc = _load_scenario(args)
            if sc.system.n != 3:
                raise UsageError("suppes-zanotti needs a three-variable scenario")
            x, y, z = sc.system.names
            exy, eyz, exz = _moment(sc, (x, y)), _moment(sc, (y, z)), _moment(sc, (x, z))
            if any(v != 0 for _, v in sc.means) or len(sc.means) != 3:
                notes.append("means are not all declared zero; the bounds are then necessary only")
            bound, notes = sc.approximation, notes + list(sc.notes)
        else:
            raise UsageError("give a scenario file or --values E(XY),E(YZ),E(XZ)")
        res = joint.suppes_zanotti_check(exy, eyz, exz)
        report = {
            "kind": "suppes-zanotti",
            "status": "SATISFIED" if res.satisfied else "VIOLATED",
            "sum": format_rational(res.total),
            "lower_bound": format_rational(res.lower_bound),
            "upper_bound": format_rational(res.upper_bound),
            "lower_slack": format_rational(res.lower_slack),
            "upper_slack": format_rational(res.upper_slack),
        }
    else:
        if args.epsilon is not None:
            e = args.epsilon
            vals = [1 - e, 1 - e, 1 - e, -1 + e]
        elif args.values:
            vals, bound = _values(args.values, 4, args.precision)
        elif args.scenario:
            sc = _load_scenario(args)
            vals = [_moment(sc, t.ordered(sc.system)) for t in joint.GHZ_TERMS]
            bound, notes = sc.approximation, list(sc.notes)
        else:
            raise UsageError("give a scenario file, --epsilon, or --values A,B,C,D")
        res = joint.ghz_inequalities(*vals)
        report = {
            "kind": "ghz",
            "status": "SATISFIED" if res.satisfied else "VIOLATED",
            "sums": [
                {"expression": expr, "value": format_rational(v), "within": bool(-2 <= v <= 2)}
                for expr, v in zip(GHZ_EXPRESSIONS, res.values)
            ],
        }
    report["approximation_bound"] = format_rational(bound)
    if notes:
        report["notes"] = notes
    return report


GHZ_EXPRESSIONS = (
    "E(X1Y2Y3) + E(Y1X2Y3) + E(Y1Y2X3) - E(X1X2X3)",
    "-E(X1Y2Y3) + E(Y1X2Y3) + E(Y1Y2X3) + E(X1X2X3)",
    "E(X1Y2Y3) - E(Y1X2Y3) + E(Y1Y2X3) + E(X1X2X3)",
    "E(X1Y2Y3) + E(Y1X2Y3) - E(Y1Y2X3) + E(X1X2X3)",
)


def cmd_construct_symmetric(args) -> dict:
    sol = ghz.solve_symmetric(args.p)
    report: dict[str, Any] = {"status": "FEASIBLE", "p": format_rational(sol.p), "branch": sol.branch.value}
    if sol.classes is not None:
        report["classes"] = {f"a{k}": format_rational(sol.classes[k]) for k in range(1, 17) if sol.classes[k]}
    payload = formats.dump_witness(sol.distribution)
    if args.witness_out:
        _write_json(args.witness_out, payload)
        report["witness_file"] = args.witness_out
    else:
        report["witness"] = payload
    return report


def _upper_report(assign: upper.UpperAssignment, complete: bool) -> dict:
    rep = upper.verify_axioms(assign)
    report: dict[str, Any] = {
        "status": "OK" if rep.ok else "VIOLATED",
        "violations": [{"axiom": v.axiom, "events": list(v.events), "detail": v.detail} for v in rep.violations],
        "expectations": {
            f"E*({t.label(assign.system)})": format_rational(upper.upper_expectation(assign, t))
            for t in assign.family.terms
        },
        "nonmonotone_pairs": [list(p) for p in upper.nonmonotone_pairs(assign)],
    }
    if complete:
        full = upper.verify_full_algebra(upper.complete(assign), assign.system)
        report["completion"] = {
            "rule": formats.COMPLETION_RULE,
            "status": "OK" if full.ok else "VIOLATED",
            "violations": len(full.violations),
        }
        if not full.ok:
            report["status"] = "VIOLATED"
    return report


def _emit_assignment(args, assign, report) -> None:
    payload = formats.dump_upper(assign, with_completion=getattr(args, "complete", False))
    if args.assignment_out:
        _write_json(args.assignment_out, payload)
        report["assignment_file"] = args.assignment_out
    else:
        report["assignment"] = payload


def cmd_upper_check(args) -> dict:
    assign = formats.load_upper(_read_json(args.assignment))
    return _upper_report(assign, args.complete)


def cmd_upper_solve(args) -> dict:
    sc = upper.UpperScenario.from_scenario(_load_scenario(args))
    res = upper.solve_upper(sc)
    if not res.feasible:
        return {"status": "INFEASIBLE", "certificate": formats.dump_certificate(res.system, res.certificate)}
    report = {"status": "FEASIBLE"}
    report.update({k: v for k, v in _upper_report(res.assignment, False).items() if k != "status"})
    _emit_assignment(args, res.assignment, report)
    return report


def cmd_upper_ghz(args) -> dict:
    assign = upper.construct_ghz_upper()
    report: dict[str, Any] = {"status": "CONSTRUCTED"}
    if args.verify:
        report = _upper_report(assign, args.complete)
        same = upper.ghz_upper_scenario()
        report["upper_solve"] = "FEASIBLE" if upper.solve_upper(same).feasible else "INFEASIBLE"
        report["joint_distribution"] = joint.check_joint(same.as_scenario()).status
    _emit_assignment(args, assign, report)
    return report


def cmd_enumerate(args) -> dict:
    if args.scenario:
        sc = _load_scenario(args)
    elif args.preset == "ghz":
        sc = joint.ghz_epsilon_scenario(args.epsilon or 0, zero_means=False)
    else:
        raise UsageError("give a scenario file or --preset ghz")
    res = joint.enumerate_deterministic(sc)
    report: dict[str, Any] = {
        "status": "SATISFIABLE" if res.count else "UNSATISFIABLE",
        "atoms_checked": sc.system.atom_count,
        "count": res.count,
        "assignments": [str(a) for a in res.assignments],
    }
    if sc.system.names == joint.GHZ_VARIABLES:
        best = max(
            joint.ghz_inequalities(*(eval_term(t, a) for t in joint.GHZ_TERMS)).values[0]
            for a in atoms_of(sc.system)
        )
        report["max_first_ghz_sum"] = format_rational(best)
    return report


def cmd_quantum(args) -> dict:
    sc = quantum.emit_scenario(args.preset, args.epsilon, args.precision, zero_means=not args.no_means)
    report: dict[str, Any] = {"preset": args.preset}
    if args.preset == "ghz":
        report["operator_expectations"] = {
            k: round(v, 12) + 0.0 for k, v in quantum.ghz_expectations().items()
        }
    else:
        report["correlations"] = {
            f"{a}{b}": {"angle_deg": ang, "value": round(quantum.bell_correlation(ang), 12) + 0.0}
            for (a, b), ang in quantum.BELL_ANGLES.items()
        }
    report["approximation_bound"] = format_rational(sc.approximation)
    if sc.notes:
        report["notes"] = list(sc.notes)
    payload = formats.dump_scenario(sc)
    if args.scenario_out:
        _write_json(args.scenario_out, payload)
        report["scenario_file"] = args.scenario_out
    else:
        report["scenario"] = payload
    return report


def _default_terms(witness: joint.JointDistribution) -> list[MomentTerm]:
    names = witness.system.names
    if names == joint.GHZ_VARIABLES:
        return list(joint.GHZ_TERMS)
    return [MomentTerm(c) for k in (1, 2, 3) for c in combinations(names, k)]


def cmd_sample(args) -> dict:
    witness = formats.load_witness(_read_json(args.witness))
    if args.terms:
        terms = [MomentTerm(t.split("*")) for t in args.terms.split(",")]
    else:
        terms = _default_terms(witness)
    emp = joint.sample(witness, args.n, args.seed, terms)
    moments = {}
    for t in terms:
        label = t.label(witness.system)
        exact = witness.expectation(t)
        moments[label] = {
            "exact": format_rational(exact),
            "empirical": format_rational(emp[label]),
            "deviation": decimal_string(abs(emp[label] - exact)),
        }
    return {"samples": args.n, "seed": args.seed, "moments": moments}


def cmd_audit_branches(args) -> dict:
    if args.step <= 0 or args.start > args.stop:
        raise UsageError("need --step > 0 and --start <= --stop")
    rows = []
    fails = []
    p = args.start
    while p <= args.stop:
        audit = ghz.paper_branch_high(p)
        sol = ghz.solve_symmetric(p)
        ok = sol.distribution.reproduces(ghz.symmetric_scenario(p))
        rows.append({
            "p": format_rational(p),
            "a5": format_rational(audit.classes[5]),
            "printed_nonnegative": audit.nonnegative,
            "negative_classes": [f"a{k}" for k in audit.violating_classes],
            "printed_solves_equations": audit.satisfies_equations,
            "construct_branch": sol.branch.value,
            "construct_ok": ok,
        })
        if not audit.nonnegative:
            fails.append(p)
        p += args.step
    report: dict[str, Any] = {
        "grid": {"start": format_rational(args.start), "stop": format_rational(args.stop),
                 "step": format_rational(args.step)},
        "printed_branch_fails": len(fails),
        "rows": rows,
    }
    if fails:
        report["fail_range"] = [format_rational(fails[0]), format_rational(fails[-1])]
    return report


# plumbing ---------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--precision", type=int, default=DEFAULT_DIGITS, metavar="DIGITS",
                   help="decimal digits of accuracy when rationalizing sqrt inputs")
    p.add_argument("--timing", action="store_true", help="report wall time on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jointfeas", description="Exact joint-distribution and upper-probability checks.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("check-joint", help="decide whether a joint distribution exists")
    p.add_argument("scenario")
    p.add_argument("--witness-out")
    p.add_argument("--certificate-out")
    p.set_defaults(func=cmd_check_joint)

    p = sub.add_parser("inequality", help="closed-form Suppes-Zanotti or GHZ checks")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--kind", choices=("suppes-zanotti", "ghz"), required=True)
    p.add_argument("--values", help="inline values, comma separated; write --values=-1/2,... when the first is negative")
    p.add_argument("--epsilon", type=_fraction)
    p.set_defaults(func=cmd_inequality)

    p = sub.add_parser("construct-symmetric", help="symmetric GHZ witness at parameter p")
    p.add_argument("--p", type=_fraction, required=True)
    p.add_argument("--witness-out")
    p.set_defaults(func=cmd_construct_symmetric)

    p = sub.add_parser("upper-check", help="check upper-probability axioms of an assignment file")
    p.add_argument("assignment")
    p.add_argument("--complete", action="store_true", help="also check the completed full algebra")
    p.set_defaults(func=cmd_upper_check)

    p = sub.add_parser("upper-solve", help="search for an upper-probability assignment")
    p.add_argument("scenario")
    p.add_argument("--assignment-out")
    p.set_defaults(func=cmd_upper_solve)

    p = sub.add_parser("upper-ghz", help="the explicit GHZ upper probability")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--complete", action="store_true")
    p.add_argument("--assignment-out")
    p.set_defaults(func=cmd_upper_ghz)

    p = sub.add_parser("enumerate-deterministic", help="brute-force +/-1 assignments")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--preset", choices=("ghz",))
    p.add_argument("--epsilon", type=_fraction)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("quantum", help="emit a scenario from a quantum preset")
    p.add_argument("--preset", choices=("bell", "ghz"), required=True)
    p.add_argument("--epsilon", type=_fraction)
    p.add_argument("--no-means", action="store_true", help="omit zero single means (ghz)")
    p.add_argument("--scenario-out")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("sample", help="empirical moments from a witness")
    p.add_argument("witness")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--terms", help="comma separated products like X1*Y2*Y3")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("audit-branches", help="sweep the printed high branch over p")
    p.add_argument("--start", type=_fraction, default=Fraction(1, 2))
    p.add_argument("--stop", type=_fraction, default=Fraction(3, 4))
    p.add_argument("--step", type=_fraction, default=Fraction(1, 100))
    p.set_defaults(func=cmd_audit_branches)

    for p in sub.choices.values():
        _common(p)
    return parser


_RATIO = re.compile(r"^-?\d+/\d+$")


def _text_lines(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                yield f"{pad}{k}:"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}{k}: {_scalar(v)}"
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                yield f"{pad}-"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}- {_scalar(v)}"
    else:
        yield f"{pad}{_scalar(obj)}"


def _scalar(v) -> str:
    if isinstance(v, str) and _RATIO.match(v):
        q = Fraction(v)
        approx = decimal_string(q) if abs(q) >= Fraction(1, 10**6) else f"{float(q):.3e}"
        return f"{v} (~{approx})"
    if isinstance(v, (dict, list)):
        return json.dumps(v)
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return formats.dumps(report)
    return "\n".join(_text_lines(report)) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        start = time.perf_counter()
        report = args.func(args)
        elapsed = time.perf_counter() - start
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except USER_ERRORS as exc:
        print(f"jointfeas: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"jointfeas: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(render(report, args.format))
    if args.timing:
        print(f"elapsed: {elapsed:.3f} s", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
