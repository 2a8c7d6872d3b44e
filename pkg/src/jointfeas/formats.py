"""JSON encodings of scenarios, witnesses, certificates and upper assignments.

Rationals are always written as ``"p/q"`` strings; atoms as sign strings in
declared variable order.  Key order is fixed so output is byte-stable.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .joint import JointDistribution, Scenario, Verdict, render_certificate
from .lp import FarkasCertificate, LinearSystem, StructuralError, verify_certificate
from .numbers import DEFAULT_DIGITS, decimal_string, format_rational, parse_number
from .outcomes import Event, MomentTerm, VariableSystem
from .upper import TrackedFamily, UpperAssignment, complete


class FormatError(ValueError):
    pass


def _num(text: Any, digits: int):
    if isinstance(text, bool):
        raise FormatError(f"boolean is not a number: {text!r}")
    if isinstance(text, float):
        text = repr(text)
    return parse_number(text if isinstance(text, str) else str(text), digits)


def load_scenario(data: dict, digits: int = DEFAULT_DIGITS) -> Scenario:
    try:
        variables = data["variables"]
    except (KeyError, TypeError):
        raise FormatError("scenario needs a 'variables' list") from None
    system = VariableSystem(variables)
    bound = Fraction(0)
    notes = []
    if "approximation_bound" in data:
        bound = parse_number(str(data["approximation_bound"])).value
    notes.extend(data.get("notes") or [])
    means = []
    for name, raw in (data.get("means") or {}).items():
        parsed = _num(raw, digits)
        means.append((name, parsed.value))
        bound = max(bound, parsed.error_bound)
        if parsed.note:
            notes.append(f"E({name}): {parsed.note}")
    moments = []
    for entry in data.get("moments") or []:
        term = MomentTerm(entry["term"])
        parsed = _num(entry["value"], digits)
        moments.append((term, parsed.value))
        bound = max(bound, parsed.error_bound)
        if parsed.note:
            notes.append(f"E({term.label(system)}): {parsed.note}")
    return Scenario(system, tuple(moments), tuple(means), bound, tuple(notes))


def dump_scenario(scenario: Scenario) -> dict:
    out: dict[str, Any] = {"variables": list(scenario.system.names)}
    if scenario.means:
        out["means"] = {name: format_rational(v) for name, v in scenario.means}
    out["moments"] = [
        {"term": list(t.ordered(scenario.system)), "value": format_rational(v)} for t, v in scenario.moments
    ]
    if scenario.approximation:
        out["approximation_bound"] = format_rational(scenario.approximation)
    if scenario.notes:
        out["notes"] = list(scenario.notes)
    return out


def dump_witness(witness: JointDistribution) -> dict:
    return {
        "variables": list(witness.system.names),
        "atoms": {atom: format_rational(w) for atom, w in witness.support().items()},
    }


def load_witness(data: dict, system: VariableSystem | None = None) -> JointDistribution:
    if system is None:
        if "variables" not in data:
            raise FormatError("witness has no 'variables'; pass the scenario's system")
        system = VariableSystem(data["variables"])
    weights = {atom: parse_number(str(v)).value for atom, v in data["atoms"].items()}
    return JointDistribution.from_atoms(system, weights)


def contradiction_text(system: LinearSystem, cert: FarkasCertificate) -> str:
    coeffs = cert.combined_coefficients(system)
    rhs = cert.combined_rhs(system)
    floor = cert.bound_floor(system)
    if not any(coeffs):
        return f"0 = {format_rational(rhs)}"
    terms = " + ".join(
        f"{format_rational(c)}*P({label})" for c, label in zip(coeffs, system.var_labels) if c
    )
    return f"{terms} = {format_rational(rhs)}, but every coefficient is >= 0 so the sum is >= {format_rational(floor)}"


def dump_certificate(system: LinearSystem, cert: FarkasCertificate) -> dict:
    ineq = render_certificate(system, cert)
    return {
        "multipliers": [
            {"constraint": label, "lambda": format_rational(y)}
            for label, y in zip(system.row_labels, cert.multipliers)
            if y
        ],
        "bound_multipliers": [
            {"atom": label, "mu": format_rational(mu)}
            for label, mu in zip(system.var_labels, cert.lower_multipliers)
            if mu
        ],
        "contradiction": contradiction_text(system, cert),
        "inequality": {
            "coefficients": [{"constraint": label, "coefficient": c} for label, c in ineq.coefficients],
            "bound": ineq.bound,
            "value": format_rational(ineq.value),
            "violated_by": format_rational(ineq.margin),
            "text": str(ineq),
        },
    }


def load_certificate(data: dict, system: LinearSystem) -> FarkasCertificate:
    rows = {label: i for i, label in enumerate(system.row_labels)}
    cols = {label: j for j, label in enumerate(system.var_labels)}
    y = [Fraction(0)] * system.num_rows
    for entry in data["multipliers"]:
        if entry["constraint"] not in rows:
            raise FormatError(f"unknown constraint {entry['constraint']!r}")
        y[rows[entry["constraint"]]] = parse_number(entry["lambda"]).value
    mu = [Fraction(0)] * system.num_vars
    for entry in data.get("bound_multipliers", []):
        if entry["atom"] not in cols:
            raise FormatError(f"unknown atom {entry['atom']!r}")
        mu[cols[entry["atom"]]] = parse_number(entry["mu"]).value
    return FarkasCertificate(tuple(y), tuple(mu), (Fraction(0),) * system.num_vars)


def replay_certificate(data: dict, scenario: Scenario) -> bool:
    """Rebuild the scenario's LP and check the stored multipliers against it."""
    system = scenario.linear_system()
    try:
        return verify_certificate(system, load_certificate(data, system))
    except StructuralError:
        return False


def verdict_report(verdict: Verdict) -> dict:
    out: dict[str, Any] = {"status": verdict.status}
    if verdict.inequality is not None:
        out["violated_inequality"] = str(verdict.inequality)
        out["margin"] = format_rational(verdict.margin)
        out["margin_decimal"] = decimal_string(verdict.margin)
    out["approximation_bound"] = format_rational(verdict.approximation)
    if verdict.approximation:
        out["approximation_bound_decimal"] = f"{float(verdict.approximation):.3e}"
    if verdict.notes:
        out["notes"] = list(verdict.notes)
    return out


COMPLETION_RULE = "min(1, cheapest partition of the event into tracked events)"


def dump_upper(assign: UpperAssignment, with_completion: bool = False) -> dict:
    system = assign.system
    out: dict[str, Any] = {
        "variables": list(system.names),
        "terms": [list(t.ordered(system)) for t in assign.family.terms],
        "events": [
            {"atoms": e.atom_strings(), "label": label, "value": format_rational(v)}
            for e, label, v in assign.items()
        ],
        "completion": {"rule": COMPLETION_RULE, "applied": with_completion},
    }
    if with_completion:
        values = complete(assign)
        out["completed_events"] = [
            {"atoms": Event(system, m).atom_strings(), "value": format_rational(v)}
            for m, v in sorted(values.items())
            if Event(system, m) not in assign.family
        ]
    return out


def load_upper(data: dict) -> UpperAssignment:
    system = VariableSystem(data["variables"])
    terms = [MomentTerm(t) for t in data.get("terms", [])]
    family = TrackedFamily.build(system, terms)
    values = {}
    for entry in data["events"]:
        e = Event.of(system, entry["atoms"])
        if e not in family:
            raise FormatError(f"event {e} is not in the tracked family")
        values[e.mask] = parse_number(str(entry["value"])).value
    return UpperAssignment.from_events(family, values)


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
