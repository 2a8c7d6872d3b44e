"""Symmetric reduction of the six-variable GHZ problem.

Atoms of ``X1 X2 X3 Y1 Y2 Y3`` are grouped into 16 classes by how many of the
X's and how many of the Y's are -1; every atom in a class gets the same
weight.  The triple moments are then linear in the 16 class weights.  The
symmetric target is ``E(X1Y2Y3) = E(Y1X2Y3) = E(Y1Y2X3) = 2p - 1`` and
``E(X1X2X3) = -(2p - 1)`` with all single means zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .joint import GHZ_VARIABLES, JointDistribution, ScenarioError, check_joint, ghz_scenario
from .lp import LinearSystem, solve_feasibility
from .outcomes import MomentTerm, VariableSystem

# (number of barred x's, number of barred y's) for a1 .. a16
CLASS_BARS = (
    (0, 0), (0, 3), (0, 1), (0, 2),
    (1, 0), (1, 3), (1, 1), (1, 2),
    (2, 1), (2, 2), (2, 0), (2, 3),
    (3, 1), (3, 2), (3, 0), (3, 3),
)
MULTIPLICITIES = (1, 1, 3, 3, 3, 3, 9, 9, 9, 9, 3, 3, 3, 3, 1, 1)

SYSTEM = VariableSystem(GHZ_VARIABLES)

LOW_RANGE = (Fraction(1, 4), Fraction(1, 2))
HIGH_RANGE = (Fraction(1, 2), Fraction(3, 4))
HALF = Fraction(1, 2)

# rows of build_equations, with the moment each row constrains
EQUATION_TERMS = (
    ("E(X1)", MomentTerm(["X1"])),
    ("E(X2)", MomentTerm(["X2"])),
    ("E(Y1)", MomentTerm(["Y1"])),
    ("E(Y2)", MomentTerm(["Y2"])),
    ("E(X1*X2*X3)", MomentTerm(["X1", "X2", "X3"])),
    ("E(X1*Y2*Y3)", MomentTerm(["X1", "Y2", "Y3"])),
    ("E(Y1*X2*Y3)", MomentTerm(["Y1", "X2", "Y3"])),
)


class OutOfRange(ValueError):
    pass


class Branch(enum.Enum):
    LOW = "low"
    HIGH = "high"
    LP = "lp"


def _bar_patterns(bars: int) -> list[tuple[int, int, int]]:
    """All sign triples with exactly ``bars`` entries equal to -1."""
    out = []
    for pos in combinations(range(3), bars):
        out.append(tuple(-1 if i in pos else 1 for i in range(3)))
    return out


@lru_cache(maxsize=None)
def class_orbits() -> tuple[tuple[int, ...], ...]:
    """Atom indices of each class, generated from the bar-position rules."""
    orbits = []
    for kx, ky in CLASS_BARS:
        members = []
        for xs in _bar_patterns(kx):
            for ys in _bar_patterns(ky):
                members.append(SYSTEM.atom_from_signs(xs + ys).index)
        orbits.append(tuple(sorted(members)))
    sizes = tuple(len(o) for o in orbits)
    if sizes != MULTIPLICITIES or sum(sizes) != 64:
        raise AssertionError(f"class orbit sizes {sizes} do not match {MULTIPLICITIES}")
    if len({i for o in orbits for i in o}) != 64:
        raise AssertionError("class orbits overlap")
    return tuple(orbits)


def class_coefficients(term: MomentTerm) -> tuple[int, ...]:
    """Coefficient of each class weight in ``E(term)``: the sum of the term's
    sign over the class's atoms."""
    out = []
    for orbit in class_orbits():
        total = 0
        for index in orbit:
            atom = SYSTEM.atom(index)
            s = 1
            for name in term.variables:
                s *= atom.sign_of(name)
            total += s
        out.append(total)
    return tuple(out)


@dataclass(frozen=True)
class SymmetricClasses:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != 16:
            raise ValueError(f"need 16 class values, got {len(self.values)}")

    @classmethod
    def from_mapping(cls, nonzero: dict[int, Fraction]) -> "SymmetricClasses":
        """Build from ``{class number (1-based): value}``; others are zero."""
        vals = [Fraction(0)] * 16
        for k, v in nonzero.items():
            vals[k - 1] = Fraction(v)
        return cls(tuple(vals))

    def __getitem__(self, k: int) -> Fraction:
        """1-based access: ``classes[5]`` is a5."""
        return self.values[k - 1]

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return MULTIPLICITIES

    def total_mass(self) -> Fraction:
        return sum((m * v for m, v in zip(MULTIPLICITIES, self.values)), Fraction(0))

    def negative_classes(self) -> list[int]:
        return [k + 1 for k, v in enumerate(self.values) if v < 0]


def _check_p(p, lo=Fraction(0), hi=Fraction(1), what="p") -> Fraction:
    p = Fraction(p)
    if not lo <= p <= hi:
        raise OutOfRange(f"{what} = {p} outside [{lo}, {hi}]")
    return p


def targets(p) -> dict[str, Fraction]:
    """Prescribed value of each equation's moment at ``p``."""
    p = Fraction(p)
    t = 2 * p - 1
    return {
        "E(X1)": Fraction(0),
        "E(X2)": Fraction(0),
        "E(Y1)": Fraction(0),
        "E(Y2)": Fraction(0),
        "E(X1*X2*X3)": -t,
        "E(X1*Y2*Y3)": t,
        "E(Y1*X2*Y3)": t,
        "sum": Fraction(1),
    }


def build_equations(p) -> LinearSystem:
    """Class-weight system: four zero-mean rows, three triple rows and
    normalization, with bounds ``0 <= a_i <= 1``."""
    p = _check_p(p)
    goal = targets(p)
    rows, rhs, labels = [], [], []
    for label, term in EQUATION_TERMS:
        rows.append(class_coefficients(term))
        rhs.append(goal[label])
        labels.append(label)
    rows.append(MULTIPLICITIES)
    rhs.append(Fraction(1))
    labels.append("sum")
    return LinearSystem.create(
        rows, rhs, num_vars=16, lower=0, upper=1,
        row_labels=labels, var_labels=[f"a{k}" for k in range(1, 17)],
    )


def paper_branch_low(p) -> SymmetricClasses:
    """Explicit solution for ``1/4 <= p <= 1/2``."""
    p = _check_p(p, *LOW_RANGE)
    q = Fraction(1, 4) - p / 2
    return SymmetricClasses.from_mapping({2: 2 * p - HALF, 3: q, 12: q, 15: p})



@dataclass(frozen=True)
class HighBranchAudit:
    p: Fraction
    classes: SymmetricClasses
    nonnegative: bool
    violating_classes: tuple[int, ...]
    satisfies_equations: bool


def paper_branch_high(p) -> HighBranchAudit:
    """Printed solution for ``1/2 <= p <= 3/4``, audited for nonnegativity.

    The formula for a5 is negative below ``p = 5/8``; the audit reports it
    rather than raising.
    """
    p = _check_p(p, *HIGH_RANGE)
    classes = SymmetricClasses.from_mapping({
        1: Fraction(-1, 8) + p / 2,
        3: Fraction(3, 8) - p / 2,
        5: Fraction(-5, 24) + p / 3,
        6: Fraction(-1, 24) + p / 6,
        14: Fraction(1, 8),
        15: Fraction(3, 8) - p / 2,
    })
    bad = tuple(classes.negative_classes())
    system = build_equations(p)
    ok = all(r == 0 for r in system.residuals(classes.values))
    return HighBranchAudit(p, classes, not bad, bad, ok)


def expand(classes: SymmetricClasses) -> JointDistribution:
    """Replicate each class value over its orbit of 64-atom weights."""
    bad = classes.negative_classes()
    if bad:
        raise ValueError(f"negative class weights: {', '.join(f'a{k}' for k in bad)}")
    weights = [Fraction(0)] * 64
    for value, orbit in zip(classes.values, class_orbits()):
        for index in orbit:
            weights[index] = value
    return JointDistribution(SYSTEM, tuple(weights))


@dataclass(frozen=True)
class SymmetricSolution:
    p: Fraction
    classes: SymmetricClasses | None
    branch: Branch
    distribution: JointDistribution


def solve_symmetric(p) -> SymmetricSolution:
    """Explicit branch where it is a valid distribution, else the LP.

    The class-weight LP is tried first; if the class restriction is too
    narrow the full 64-atom LP decides.
    """
    p = Fraction(p)
    if not Fraction(1, 4) <= p <= Fraction(3, 4):
        raise OutOfRange(
            f"p = {p}: the first GHZ inequality forces 1/4 <= p <= 3/4, no distribution exists"
        )
    if p <= HALF:
        classes = paper_branch_low(p)
        return SymmetricSolution(p, classes, Branch.LOW, expand(classes))
    audit = paper_branch_high(p)
    if audit.nonnegative:
        return SymmetricSolution(p, audit.classes, Branch.HIGH, expand(audit.classes))
    result = solve_feasibility(build_equations(p))
    if result.feasible:
        classes = SymmetricClasses(result.point)
        return SymmetricSolution(p, classes, Branch.LP, expand(classes))
    verdict = check_joint(symmetric_scenario(p))
    if not verdict.feasible:
        raise AssertionError(f"no distribution at p = {p}, contradicting the GHZ inequalities")
    return SymmetricSolution(p, None, Branch.LP, verdict.witness)


def construct(p) -> JointDistribution:
    return solve_symmetric(p).distribution


def symmetric_scenario(p, zero_means: bool = True):
    t = 2 * Fraction(p) - 1
    return ghz_scenario(t, t, t, -t, zero_means=zero_means)
