"""Existence of joint distributions for +/-1 random variables.

A :class:`Scenario` fixes some moments ``E(product of variables)``.  A joint
distribution is a nonnegative weight per atom summing to one; each moment
constraint is a linear row over the atom weights, so existence is an exact
LP feasibility question.  Infeasible scenarios come back with a Farkas
certificate, rendered as a violated Bell-type inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .lp import FarkasCertificate, LinearSystem, solve_feasibility, verify_certificate
from .numbers import decimal_string, format_rational
from .outcomes import (
    MAX_VARIABLES,
    Atom,
    DomainError,
    MomentTerm,
    VariableSystem,
    atoms_of,
    eval_term,
    term_signs,
)

ONE = Fraction(1)
HALF = Fraction(1, 2)

GHZ_VARIABLES = ("X1", "X2", "X3", "Y1", "Y2", "Y3")
GHZ_TERMS = (
    MomentTerm(["X1", "Y2", "Y3"]),
    MomentTerm(["Y1", "X2", "Y3"]),
    MomentTerm(["Y1", "Y2", "X3"]),
    MomentTerm(["X1", "X2", "X3"]),
)
BELL_VARIABLES = ("X", "Y", "Z")


class ScenarioError(ValueError):
    pass


class UnsupportedScenario(ScenarioError):
    """The requested operation does not apply to this kind of scenario."""


def _check_unit(value: Fraction, what: str) -> None:
    if not -1 <= value <= 1:
        raise ScenarioError(f"{what} = {value} lies outside [-1, 1]")


@dataclass(frozen=True)
class Scenario:
    """A variable system with prescribed moments and (optionally) means.

    ``approximation`` is the largest rationalization error among the inputs;
    it is zero when every value was given exactly.
    """

    system: VariableSystem
    moments: tuple[tuple[MomentTerm, Fraction], ...] = ()
    means: tuple[tuple[str, Fraction], ...] = ()
    approximation: Fraction = Fraction(0)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        seen = set()
        for term, value in self.moments:
            term.bits(self.system)
            _check_unit(value, f"E({term.label(self.system)})")
            if term.variables in seen:
                raise ScenarioError(f"duplicate moment term {term.label(self.system)}")
            seen.add(term.variables)
        for name, value in self.means:
            self.system.index(name)
            _check_unit(value, f"E({name})")
            key = frozenset([name])
            if key in seen:
                raise ScenarioError(f"mean of {name} given twice")
            seen.add(key)

    @classmethod
    def build(
        cls,
        variables: Iterable[str],
        moments: Mapping | Iterable = (),
        means: Mapping[str, object] | None = None,
        approximation: Fraction = Fraction(0),
        notes: Iterable[str] = (),
    ) -> "Scenario":
        """Convenience constructor: ``moments`` maps name tuples to values."""
        system = VariableSystem(variables)
        items = moments.items() if isinstance(moments, Mapping) else moments
        mom = []
        for names, value in items:
            term = names if isinstance(names, MomentTerm) else MomentTerm(names)
            mom.append((term, Fraction(value)))
        mns = tuple((k, Fraction(v)) for k, v in (means or {}).items())
        return cls(system, tuple(mom), mns, Fraction(approximation), tuple(notes))

    def constraints(self) -> list[tuple[str, MomentTerm, Fraction]]:
        """All moment constraints, means first, as ``(label, term, value)``."""
        out = []
        for name, value in self.means:
            out.append((f"E({name})", MomentTerm([name]), value))
        for term, value in self.moments:
            out.append((f"E({term.label(self.system)})", term, value))
        return out

    def linear_system(self) -> LinearSystem:
        """Atom-probability LP: a normalization row then one row per constraint."""
        n_atoms = self.system.atom_count
        rows = [[1] * n_atoms]
        rhs = [ONE]
        labels = ["sum"]
        for label, term, value in self.constraints():
            rows.append(term_signs(term, self.system))
            rhs.append(value)
            labels.append(label)
        atoms = [str(a) for a in atoms_of(self.system)]
        return LinearSystem.create(rows, rhs, num_vars=n_atoms, lower=0, row_labels=labels, var_labels=atoms)


@dataclass(frozen=True)
class JointDistribution:
    system: VariableSystem
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.weights) != self.system.atom_count:
            raise ScenarioError(f"expected {self.system.atom_count} weights, got {len(self.weights)}")
        if any(w < 0 for w in self.weights):
            raise ScenarioError("negative atom weight")
        if sum(self.weights) != 1:
            raise ScenarioError(f"weights sum to {sum(self.weights)}, not 1")

    @classmethod
    def from_atoms(cls, system: VariableSystem, weights: Mapping[str | int, object]) -> "JointDistribution":
        w = [Fraction(0)] * system.atom_count
        for key, value in weights.items():
            index = system.atom_from_string(key).index if isinstance(key, str) else key
            w[index] += Fraction(value)
        return cls(system, tuple(w))

    def expectation(self, term: MomentTerm) -> Fraction:
        signs = term_signs(term, self.system)
        return sum((s * w for s, w in zip(signs, self.weights) if w), Fraction(0))

    def probability(self, atoms: Iterable[Atom | int]) -> Fraction:
        idx = {a.index if isinstance(a, Atom) else a for a in atoms}
        return sum((self.weights[i] for i in idx), Fraction(0))

    def support(self) -> dict[str, Fraction]:
        return {str(self.system.atom(i)): w for i, w in enumerate(self.weights) if w}

    def mismatches(self, scenario: Scenario) -> list[str]:
        """Constraint labels whose exact moment differs from the prescribed value."""
        if scenario.system != self.system:
            raise DomainError("witness and scenario use different variable systems")
        return [label for label, term, value in scenario.constraints() if self.expectation(term) != value]

    def reproduces(self, scenario: Scenario) -> bool:
        return not self.mismatches(scenario)


@dataclass(frozen=True)
class RenderedInequality:
    """``sum coefficient_i * E(term_i) <= bound``, violated by ``value``."""

    coefficients: tuple[tuple[str, int], ...]
    bound: int
    value: Fraction

    @property
    def margin(self) -> Fraction:
        return self.value - self.bound

    def lhs_text(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for k, (label, c) in enumerate(self.coefficients):
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            if k == 0:
                parts.append(f"{'-' if c < 0 else ''}{mag}{label}")
            else:
                parts.append(f"{'-' if c < 0 else '+'} {mag}{label}")
        return " ".join(parts)

    def __str__(self) -> str:
        return (
            f"{self.lhs_text()} <= {self.bound}, violated by value "
            f"{format_rational(self.value)} (~{decimal_string(self.value)})"
        )


def render_certificate(system: LinearSystem, cert: FarkasCertificate) -> RenderedInequality:
    """Read a certificate on an atom LP as a violated moment inequality.

    Row 0 of ``system`` must be the normalization row.  Since every atom
    gets a nonnegative combined coefficient, every distribution satisfies
    ``sum_r (-y_r) E_r <= y_0``; the prescribed values exceed it.
    """
    y = cert.multipliers
    lam = [-v for v in y[1:]]
    bound = y[0]
    scale = math.lcm(*(q.denominator for q in (*lam, bound)))
    ints = [int(v * scale) for v in lam] + [int(bound * scale)]
    g = math.gcd(*ints) or 1
    ints = [v // g for v in ints]
    factor = Fraction(scale, g)
    coeffs = tuple((label, c) for label, c in zip(system.row_labels[1:], ints[:-1]) if c)
    value = sum((l * b for l, b in zip(lam, system.rhs[1:])), Fraction(0)) * factor
    return RenderedInequality(coeffs, ints[-1], value)


@dataclass(frozen=True)
class Verdict:
    feasible: bool
    scenario: Scenario
    witness: JointDistribution | None = None
    certificate: FarkasCertificate | None = None
    inequality: RenderedInequality | None = None
    margin: Fraction | None = None
    approximation: Fraction = Fraction(0)
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.feasible != (self.witness is not None) or self.feasible == (self.certificate is not None):
            raise ValueError("a verdict carries exactly one of witness/certificate, matching its status")

    @property
    def status(self) -> str:
        return "FEASIBLE" if self.feasible else "INFEASIBLE"


def check_joint(scenario: Scenario) -> Verdict:
    """Decide whether a joint distribution reproduces every constraint."""
    if scenario.system.n > MAX_VARIABLES:
        raise ScenarioError("scenario too large")
    system = scenario.linear_system()
    result = solve_feasibility(system)
    if result.feasible:
        witness = JointDistribution(scenario.system, result.point)
        assert witness.reproduces(scenario)
        return Verdict(True, scenario, witness=witness, approximation=scenario.approximation, notes=scenario.notes)
    cert = result.certificate
    assert verify_certificate(system, cert)
    ineq = render_certificate(system, cert)
    return Verdict(
        False,
        scenario,
        certificate=cert,
        inequality=ineq,
        margin=ineq.margin,
        approximation=scenario.approximation,
        notes=scenario.notes,
    )


@dataclass(frozen=True)
class SuppesZanottiResult:
    satisfied: bool
    total: Fraction
    lower_bound: Fraction
    upper_bound: Fraction

    @property
    def lower_slack(self) -> Fraction:
        return self.total - self.lower_bound

    @property
    def upper_slack(self) -> Fraction:
        return self.upper_bound - self.total


def suppes_zanotti_check(exy, eyz, exz) -> SuppesZanottiResult:
    """Three zero-mean +/-1 variables with pairwise moments: joint exists iff
    ``-1 <= exy + eyz + exz <= 1 + 2 * min(exy, eyz, exz)``."""
    vals = [Fraction(v) for v in (exy, eyz, exz)]
    for name, v in zip(("E(XY)", "E(YZ)", "E(XZ)"), vals):
        _check_unit(v, name)
    total = sum(vals)
    lo, hi = Fraction(-1), 1 + 2 * min(vals)
    return SuppesZanottiResult(lo <= total <= hi, total, lo, hi)


@dataclass(frozen=True)
class GHZInequalities:
    values: tuple[Fraction, Fraction, Fraction, Fraction]
    satisfied: bool


def ghz_inequalities(e_xyy, e_yxy, e_yyx, e_xxx) -> GHZInequalities:
    """The four signed sums of GHZ triple moments; a joint distribution of the
    six variables exists iff each lies in ``[-2, 2]``."""
    a, b, c, d = (Fraction(v) for v in (e_xyy, e_yxy, e_yyx, e_xxx))
    for name, v in zip(("E(X1Y2Y3)", "E(Y1X2Y3)", "E(Y1Y2X3)", "E(X1X2X3)"), (a, b, c, d)):
        _check_unit(v, name)
    values = (a + b + c - d, -a + b + c + d, a - b + c + d, a + b - c + d)
    return GHZInequalities(values, all(-2 <= v <= 2 for v in values))


def ghz_scenario(e_xyy, e_yxy, e_yyx, e_xxx, zero_means: bool = True, notes: Iterable[str] = ()) -> Scenario:
    values = [Fraction(v) for v in (e_xyy, e_yxy, e_yyx, e_xxx)]
    means = {name: 0 for name in GHZ_VARIABLES} if zero_means else None
    return Scenario.build(GHZ_VARIABLES, list(zip(GHZ_TERMS, values)), means, notes=notes)


def ghz_epsilon_scenario(eps, zero_means: bool = True) -> Scenario:
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise ScenarioError(f"epsilon = {eps} outside [0, 1]")
    return ghz_scenario(1 - eps, 1 - eps, 1 - eps, -1 + eps, zero_means=zero_means)


@dataclass(frozen=True)
class EpsilonVerdict:
    epsilon: Fraction
    joint_exists: bool
    first_sum: Fraction


def ghz_epsilon_verdict(eps) -> EpsilonVerdict:
    """Triples ``1 - eps`` (and ``-1 + eps`` for X1X2X3): joint exists iff ``eps >= 1/2``."""
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise ScenarioError(f"epsilon = {eps} outside [0, 1]")
    res = ghz_inequalities(1 - eps, 1 - eps, 1 - eps, -1 + eps)
    return EpsilonVerdict(eps, res.satisfied, res.values[0])


def bell_scenario(exy: Fraction, exz: Fraction, eyz: Fraction, approximation=Fraction(0), notes=()) -> Scenario:
    """Three zero-mean variables X, Y, Z with the given pairwise moments."""
    return Scenario.build(
        BELL_VARIABLES,
        [(("X", "Y"), exy), (("X", "Z"), exz), (("Y", "Z"), eyz)],
        {"X": 0, "Y": 0, "Z": 0},
        approximation=approximation,
        notes=notes,
    )


@dataclass(frozen=True)
class DeterministicAssignments:
    count: int
    assignments: tuple[Atom, ...]


def enumerate_deterministic(scenario: Scenario) -> DeterministicAssignments:
    """All sign assignments satisfying every (necessarily +/-1) constraint."""
    cons = scenario.constraints()
    for label, _, value in cons:
        if value not in (1, -1):
            raise UnsupportedScenario(
                f"{label} = {value}: deterministic enumeration needs +/-1 constraint values"
            )
    hits = tuple(
        atom for atom in atoms_of(scenario.system) if all(eval_term(t, atom) == v for _, t, v in cons)
    )
    return DeterministicAssignments(len(hits), hits)


def sample(
    witness: JointDistribution,
    n_samples: int,
    seed: int,
    terms: Sequence[MomentTerm],
) -> dict[str, Fraction]:
    """Empirical moments of ``terms`` from ``n_samples`` seeded draws.

    Atoms are drawn exactly: with ``D`` the common denominator of the
    weights, a uniform integer in ``[0, D)`` is mapped through the
    cumulative numerators.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    denom = math.lcm(*(w.denominator for w in witness.weights))
    if denom < 2**62:
        cum = np.cumsum([int(w * denom) for w in witness.weights], dtype=np.int64)
        draws = rng.integers(0, denom, size=n_samples, dtype=np.int64)
        idx = np.searchsorted(cum, draws, side="right")
    else:
        p = np.array([float(w) for w in witness.weights])
        idx = rng.choice(len(p), size=n_samples, p=p / p.sum())
    counts = np.bincount(idx, minlength=witness.system.atom_count)
    out = {}
    for term in terms:
        signs = term_signs(term, witness.system)
        total = sum(int(c) * s for c, s in zip(counts, signs) if c)
        out[term.label(witness.system)] = Fraction(total, n_samples)
    return out
