"""Subadditive (possibly nonmonotone) upper probabilities.

An upper probability ``P*`` satisfies ``0 <= P* <= 1``, ``P*(empty) = 0``,
``P*(Omega) = 1`` and ``P*(E1 | E2) <= P*(E1) + P*(E2)`` for disjoint
events.  Monotonicity is not required.

Values live on a finite :class:`TrackedFamily` rather than the full event
algebra: the empty set, the whole space, every atom, both sign events of
every variable and of every constrained product.  Subadditivity is enforced
for every disjoint tracked pair whose union is tracked and for the cover of
each tracked event by its atoms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .joint import JointDistribution, Scenario, ScenarioError
from .lp import FarkasCertificate, LinearSystem, solve_feasibility
from .outcomes import DomainError, Event, MomentTerm, VariableSystem, term_event

MAX_UPPER_VARIABLES = 8
# full-algebra completion checks enumerate 2**(2**n) events
MAX_COMPLETION_VARIABLES = 3


class UntrackedEvent(KeyError):
    pass


@dataclass(frozen=True)
class TrackedFamily:
    system: VariableSystem
    events: tuple[Event, ...]
    labels: tuple[str, ...]
    terms: tuple[MomentTerm, ...] = ()

    @classmethod
    def build(cls, system: VariableSystem, terms: Iterable[MomentTerm] = ()) -> "TrackedFamily":
        terms = tuple(terms)
        candidates: list[tuple[Event, str]] = [(system.empty(), "empty"), (system.full(), "Omega")]
        for atom in range(system.atom_count):
            e = Event(system, 1 << atom)
            candidates.append((e, f"{{{system.atom(atom)}}}"))
        for name in system.names:
            t = MomentTerm([name])
            candidates.append((term_event(t, system, 1), f"{name}=+1"))
            candidates.append((term_event(t, system, -1), f"{name}=-1"))
        for t in terms:
            label = t.label(system)
            candidates.append((term_event(t, system, 1), f"{label}=+1"))
            candidates.append((term_event(t, system, -1), f"{label}=-1"))
        seen: dict[int, int] = {}
        events, labels = [], []
        for e, label in candidates:
            if e.mask in seen:
                continue
            seen[e.mask] = len(events)
            events.append(e)
            labels.append(label)
        return cls(system, tuple(events), tuple(labels), terms)

    @property
    def _index(self) -> dict[int, int]:
        return _mask_index(self.events)

    def position(self, event: Event) -> int:
        try:
            return self._index[event.mask]
        except KeyError:
            raise UntrackedEvent(f"event {event} is not tracked") from None

    def __contains__(self, event: Event) -> bool:
        return event.mask in self._index

    def __len__(self) -> int:
        return len(self.events)

    def disjoint_pairs(self) -> list[tuple[int, int, int]]:
        """``(i, j, k)`` with events i, j disjoint, both nonempty, union = event k."""
        idx = self._index
        out = []
        n = len(self.events)
        for i in range(n):
            ei = self.events[i].mask
            if not ei:
                continue
            for j in range(i + 1, n):
                ej = self.events[j].mask
                if ej and not ei & ej:
                    k = idx.get(ei | ej)
                    if k is not None:
                        out.append((i, j, k))
        return out

    def atom_covers(self) -> list[tuple[int, list[int]]]:
        """Each tracked event with two or more atoms, with its atoms' positions."""
        idx = self._index
        out = []
        for i, e in enumerate(self.events):
            if len(e) >= 2:
                out.append((i, [idx[1 << a] for a in e.indices()]))
        return out


@lru_cache(maxsize=64)
def _mask_index(events: tuple[Event, ...]) -> dict[int, int]:
    return {e.mask: i for i, e in enumerate(events)}


@dataclass(frozen=True)
class Violation:
    axiom: str
    events: tuple[str, ...]
    detail: str


@dataclass(frozen=True)
class AxiomReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class UpperAssignment:
    family: TrackedFamily
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != len(self.family):
            raise ValueError(f"{len(self.values)} values for {len(self.family)} tracked events")

    @classmethod
    def from_events(cls, family: TrackedFamily, values: Mapping[int, object]) -> "UpperAssignment":
        """Assign by event mask; every tracked event must be covered."""
        out = []
        for e, label in zip(family.events, family.labels):
            if e.mask not in values:
                raise ValueError(f"no value given for tracked event {label}")
            out.append(Fraction(values[e.mask]))
        return cls(family, tuple(out))

    @property
    def system(self) -> VariableSystem:
        return self.family.system

    def value(self, event: Event) -> Fraction:
        return self.values[self.family.position(event)]

    def items(self):
        return zip(self.family.events, self.family.labels, self.values)

    def with_value(self, event: Event, value) -> "UpperAssignment":
        vals = list(self.values)
        vals[self.family.position(event)] = Fraction(value)
        return UpperAssignment(self.family, tuple(vals))


def upper_expectation(assign: UpperAssignment, term: MomentTerm) -> Fraction:
    """``P*(term = +1) - P*(term = -1)``; both events must be tracked."""
    system = assign.system
    return assign.value(term_event(term, system, 1)) - assign.value(term_event(term, system, -1))


def verify_axioms(assign: UpperAssignment) -> AxiomReport:
    fam = assign.family
    v = assign.values
    lab = fam.labels
    out: list[Violation] = []
    for value, label in zip(v, lab):
        if not 0 <= value <= 1:
            out.append(Violation("i", (label,), f"value {value} outside [0, 1]"))
    empty = assign.value(assign.system.empty())
    if empty != 0:
        out.append(Violation("ii", ("empty",), f"P*(empty) = {empty}"))
    full = assign.value(assign.system.full())
    if full != 1:
        out.append(Violation("iii", ("Omega",), f"P*(Omega) = {full}"))
    for i, j, k in fam.disjoint_pairs():
        if v[k] > v[i] + v[j]:
            out.append(Violation(
                "iv", (lab[k], lab[i], lab[j]),
                f"P*(union) = {v[k]} > {v[i]} + {v[j]}",
            ))
    for i, parts in fam.atom_covers():
        total = sum((v[p] for p in parts), Fraction(0))
        if v[i] > total:
            out.append(Violation(
                "iv-cover", (lab[i],),
                f"P*(event) = {v[i]} > {total} = sum over its atoms",
            ))
    return AxiomReport(tuple(out))


def restrict(dist: JointDistribution, family: TrackedFamily) -> UpperAssignment:
    """The ordinary probability of each tracked event."""
    vals = tuple(dist.probability(e.indices()) for e in family.events)
    return UpperAssignment(family, vals)


def nonmonotone_pairs(assign: UpperAssignment) -> list[tuple[str, str]]:
    """Tracked pairs ``E1`` strictly inside ``E2`` with ``P*(E1) > P*(E2)``."""
    out = []
    items = list(assign.items())
    for e1, l1, v1 in items:
        for e2, l2, v2 in items:
            if e1.mask != e2.mask and e1.issubset(e2) and v1 > v2:
                out.append((l1, l2))
    return out


@dataclass(frozen=True)
class UpperScenario:
    system: VariableSystem
    moments: tuple[tuple[MomentTerm, Fraction], ...]

    def __post_init__(self):
        seen = set()
        for term, value in self.moments:
            term.bits(self.system)
            if not -1 <= value <= 1:
                raise ScenarioError(f"E*({term.label(self.system)}) = {value} outside [-1, 1]")
            if term.variables in seen:
                raise ScenarioError(f"duplicate term {term.label(self.system)}")
            seen.add(term.variables)

    @classmethod
    def build(cls, variables: Iterable[str], moments: Mapping | Iterable) -> "UpperScenario":
        system = VariableSystem(variables)
        items = moments.items() if isinstance(moments, Mapping) else moments
        mom = tuple(
            (t if isinstance(t, MomentTerm) else MomentTerm(t), Fraction(v)) for t, v in items
        )
        return cls(system, mom)

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "UpperScenario":
        return cls(scenario.system, tuple((t, v) for _, t, v in scenario.constraints()))

    def as_scenario(self) -> Scenario:
        return Scenario(self.system, self.moments)


@dataclass(frozen=True)
class UpperResult:
    feasible: bool
    assignment: UpperAssignment | None = None
    certificate: FarkasCertificate | None = None
    system: LinearSystem | None = field(default=None, repr=False)


def upper_linear_system(scenario: UpperScenario) -> tuple[TrackedFamily, LinearSystem]:
    """LP over tracked-event values plus one slack per subadditivity row."""
    family = TrackedFamily.build(scenario.system, [t for t, _ in scenario.moments])
    F = len(family)
    pairs = family.disjoint_pairs()
    covers = family.atom_covers()
    n_vars = F + len(pairs) + len(covers)
    rows, rhs, labels = [], [], []

    def row():
        return [0] * n_vars

    r = row()
    r[family.position(scenario.system.empty())] = 1
    rows.append(r), rhs.append(0), labels.append("P*(empty)=0")
    r = row()
    r[family.position(scenario.system.full())] = 1
    rows.append(r), rhs.append(1), labels.append("P*(Omega)=1")
    slack = F
    for i, j, k in pairs:
        r = row()
        r[k] += 1
        r[i] -= 1
        r[j] -= 1
        r[slack] = 1
        slack += 1
        rows.append(r), rhs.append(0)
        labels.append(f"subadd[{family.labels[k]} <= {family.labels[i]} + {family.labels[j]}]")
    for i, parts in covers:
        r = row()
        r[i] += 1
        for p in parts:
            r[p] -= 1
        r[slack] = 1
        slack += 1
        rows.append(r), rhs.append(0)
        labels.append(f"cover[{family.labels[i]}]")
    for term, value in scenario.moments:
        r = row()
        r[family.position(term_event(term, scenario.system, 1))] += 1
        r[family.position(term_event(term, scenario.system, -1))] -= 1
        rows.append(r), rhs.append(value), labels.append(f"E*({term.label(scenario.system)})")
    upper = [1] * F + [None] * (n_vars - F)
    var_labels = list(family.labels) + [f"s{k}" for k in range(n_vars - F)]
    system = LinearSystem.create(rows, rhs, num_vars=n_vars, lower=0, upper=upper,
                                 row_labels=labels, var_labels=var_labels)
    return family, system


def solve_upper(scenario: UpperScenario) -> UpperResult:
    if scenario.system.n > MAX_UPPER_VARIABLES:
        raise ScenarioError(
            f"{scenario.system.n} variables; upper-probability solving supports at most {MAX_UPPER_VARIABLES}"
        )
    family, system = upper_linear_system(scenario)
    result = solve_feasibility(system)
    if not result.feasible:
        return UpperResult(False, certificate=result.certificate, system=system)
    assign = UpperAssignment(family, tuple(result.point[: len(family)]))
    report = verify_axioms(assign)
    if not report.ok:
        raise AssertionError(f"LP assignment violates the axioms: {report.violations}")
    return UpperResult(True, assignment=assign, system=system)


GHZ_UPPER_SYSTEM = VariableSystem(["A", "B", "C"])
GHZ_UPPER_TERMS = (MomentTerm(["A"]), MomentTerm(["B"]), MomentTerm(["C"]), MomentTerm(["A", "B", "C"]))


def ghz_upper_scenario() -> UpperScenario:
    """``E*(A) = E*(B) = E*(C) = 1`` and ``E*(ABC) = -1``."""
    return UpperScenario(GHZ_UPPER_SYSTEM, tuple(zip(GHZ_UPPER_TERMS, (1, 1, 1, -1))))


def construct_ghz_upper() -> UpperAssignment:
    """Explicit nonmonotone upper probability for the perfect GHZ correlations.

    Atoms abc and (not a)(not b)(not c) get 1, the other six atoms 0; the
    events a, b, c get 1 and their complements 0; the event ABC = +1 gets 0
    and ABC = -1 gets 1.
    """
    system = GHZ_UPPER_SYSTEM
    family = TrackedFamily.build(system, GHZ_UPPER_TERMS)
    values: dict[int, Fraction] = {system.empty().mask: Fraction(0), system.full().mask: Fraction(1)}
    ones = {system.atom_from_string("+++").index, system.atom_from_string("---").index}
    for atom in range(system.atom_count):
        values[1 << atom] = Fraction(1 if atom in ones else 0)
    for t in GHZ_UPPER_TERMS[:3]:
        values[term_event(t, system, 1).mask] = Fraction(1)
        values[term_event(t, system, -1).mask] = Fraction(0)
    abc = GHZ_UPPER_TERMS[3]
    values[term_event(abc, system, 1).mask] = Fraction(0)
    values[term_event(abc, system, -1).mask] = Fraction(1)
    return UpperAssignment.from_events(family, values)


def completed_value(assign: UpperAssignment, event: Event) -> Fraction:
    """Value of any event: tracked events keep theirs; others get
    ``min(1, cheapest partition into tracked events)``.

    The partition minimum is subadditive by construction (partitions of two
    disjoint events combine into one of their union), so the extension
    satisfies the axioms whenever the tracked values are themselves no
    larger than any tracked partition of their event.
    """
    if event in assign.family:
        return assign.value(event)
    if not event:
        return Fraction(0)
    return min(Fraction(1), _partition_min(assign)(event.mask))


def _partition_min(assign: UpperAssignment):
    tracked = [(e.mask, v) for e, v in zip(assign.family.events, assign.values) if e.mask]

    @lru_cache(maxsize=None)
    def best(mask: int) -> Fraction:
        if not mask:
            return Fraction(0)
        low = mask & -mask
        out = None
        for m, v in tracked:
            if m & low and not m & ~mask:
                cand = v + best(mask & ~m)
                if out is None or cand < out:
                    out = cand
        return out

    return best


def all_events(system: VariableSystem) -> list[Event]:
    if system.n > MAX_COMPLETION_VARIABLES:
        raise ScenarioError(
            f"full event algebra has 2**{system.atom_count} members; limited to n <= {MAX_COMPLETION_VARIABLES}"
        )
    return [Event(system, m) for m in range(1 << system.atom_count)]


def complete(assign: UpperAssignment) -> dict[int, Fraction]:
    """Completed values for every event of the full algebra (small n only)."""
    best = _partition_min(assign)
    out = {}
    for e in all_events(assign.system):
        if e in assign.family:
            out[e.mask] = assign.value(e)
        elif not e:
            out[e.mask] = Fraction(0)
        else:
            out[e.mask] = min(Fraction(1), best(e.mask))
    return out


def verify_full_algebra(values: Mapping[int, Fraction], system: VariableSystem) -> AxiomReport:
    """Check the axioms on every event and every disjoint pair of the algebra."""
    full = (1 << system.atom_count) - 1
    out = []
    if values[0] != 0:
        out.append(Violation("ii", ("empty",), f"P*(empty) = {values[0]}"))
    if values[full] != 1:
        out.append(Violation("iii", ("Omega",), f"P*(Omega) = {values[full]}"))
    for m, v in values.items():
        if not 0 <= v <= 1:
            out.append(Violation("i", (str(Event(system, m)),), f"value {v}"))
    for m1 in range(1, full + 1):
        rest = full & ~m1
        # enumerate nonempty subsets of the complement, each unordered pair once
        m2 = rest
        while m2:
            if m2 > m1 and values[m1 | m2] > values[m1] + values[m2]:
                out.append(Violation(
                    "iv", (str(Event(system, m1 | m2)), str(Event(system, m1)), str(Event(system, m2))),
                    f"{values[m1 | m2]} > {values[m1]} + {values[m2]}",
                ))
            m2 = (m2 - 1) & rest
    return AxiomReport(tuple(out))


def naive_completion(assign: UpperAssignment) -> dict[int, Fraction]:
    """``min(1, sum of atom values)`` for untracked events.  Kept for the
    audit that shows it can break subadditivity."""
    atom_vals = [assign.value(Event(assign.system, 1 << a)) for a in range(assign.system.atom_count)]
    out = {}
    for e in all_events(assign.system):
        if e in assign.family:
            out[e.mask] = assign.value(e)
        else:
            out[e.mask] = min(Fraction(1), sum((atom_vals[a] for a in e.indices()), Fraction(0)))
    return out
