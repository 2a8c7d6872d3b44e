from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jointfeas.ghz import (
    MULTIPLICITIES,
    SYSTEM,
    Branch,
    OutOfRange,
    SymmetricClasses,
    build_equations,
    class_coefficients,
    class_orbits,
    construct,
    expand,
    paper_branch_high,
    paper_branch_low,
    solve_symmetric,
    symmetric_scenario,
)
from jointfeas.joint import check_joint
from jointfeas.outcomes import MomentTerm

GRID = [Fraction(k, 100) for k in range(25, 76)]

# class-coefficient rows as typeset alongside the symmetric construction
TYPESET = {
    "x1_mean": (1, 1, 3, 3, 1, 1, 3, 3, -3, -3, -1, -1, -3, -3, -1, -1),
    "second_mean": (1, -1, 1, -1, 3, -3, 3, -3, 3, -3, 3, -3, 1, -1, 1, -1),
    "third_mean": (1, -1, 1, -1, 3, -3, 3, -3, 3, -3, 3, -3, -1, 1, 1, -1),
    "fourth_mean": (1, 1, 3, 3, -1, -1, -3, -3, 3, 3, 1, 1, -3, -3, -1, -1),
    "xxx": (1, 1, 3, 3, -3, -3, -9, -9, 9, 9, 3, 3, -3, -3, -1, -1),
    "xyy": (1, 1, 0, -2, 1, 1, -1, -1, 1, 1, -1, -1, 1, 1, -1, -1),
    "yxy": (1, -1, -3, 3, 3, -3, -9, 9, -9, 9, 3, -3, -3, 3, 1, -1),
    "sum": (1, 1, 3, 3, 3, 3, 9, 9, 9, 9, 3, 3, 3, 3, 1, 1),
}


class TestOrbits:
    def test_multiplicities(self):
        assert tuple(len(o) for o in class_orbits()) == MULTIPLICITIES
        assert sorted(i for o in class_orbits() for i in o) == list(range(64))

    def test_class_five_members(self):
        members = {str(SYSTEM.atom(i)) for i in class_orbits()[4]}
        assert members == {"-+++++", "+-++++", "++-+++"}

    @pytest.mark.parametrize("k", range(16))
    def test_classes_are_symmetric(self, k):
        # every atom in a class gives the same value to each permutation-invariant statistic
        orbit = class_orbits()[k]
        stats = {(sum(SYSTEM.atom(i).signs[:3]), sum(SYSTEM.atom(i).signs[3:])) for i in orbit}
        assert len(stats) == 1


class TestTypesetRows:
    def test_matching_rows(self):
        assert class_coefficients(MomentTerm(["X1"])) == TYPESET["x1_mean"]
        assert class_coefficients(MomentTerm(["Y1"])) == TYPESET["second_mean"]
        assert class_coefficients(MomentTerm(["X1", "X2", "X3"])) == TYPESET["xxx"]
        assert MULTIPLICITIES == TYPESET["sum"]

    def test_x_means_coincide_as_class_sums(self):
        assert class_coefficients(MomentTerm(["X1"])) == class_coefficients(MomentTerm(["X2"]))
        assert class_coefficients(MomentTerm(["Y1"])) == class_coefficients(MomentTerm(["Y2"]))

    def test_rows_that_differ(self):
        generated = {class_coefficients(MomentTerm([v])) for v in ("X1", "X2", "X3", "Y1", "Y2", "Y3")}
        assert TYPESET["third_mean"] not in generated
        assert TYPESET["fourth_mean"] not in generated
        xyy = class_coefficients(MomentTerm(["X1", "Y2", "Y3"]))
        assert xyy != TYPESET["xyy"]
        # a repeated a4 where -a3 belongs
        fixed = list(TYPESET["xyy"])
        fixed[2], fixed[3] = -1, -1
        assert tuple(fixed) == xyy

    def test_last_triple_row_is_yyy(self):
        assert class_coefficients(MomentTerm(["Y1", "Y2", "Y3"])) == TYPESET["yxy"]
        assert class_coefficients(MomentTerm(["Y1", "X2", "Y3"])) != TYPESET["yxy"]

    def test_xyy_type_rows_agree(self):
        assert class_coefficients(MomentTerm(["X1", "Y2", "Y3"])) == class_coefficients(
            MomentTerm(["Y1", "X2", "Y3"])
        )


class TestLowBranch:
    @pytest.mark.parametrize("p", [Fraction(1, 4), Fraction(3, 8), Fraction(1, 2)])
    def test_symbolic_points(self, p):
        classes = paper_branch_low(p)
        assert all(r == 0 for r in build_equations(p).residuals(classes.values))
        assert not classes.negative_classes()
        assert classes.total_mass() == 1

    def test_half_has_two_atoms(self):
        support = construct(Fraction(1, 2)).support()
        assert support == {"+++---": Fraction(1, 2), "---+++": Fraction(1, 2)}

    def test_outside_range(self):
        with pytest.raises(OutOfRange):
            paper_branch_low(Fraction(3, 5))


class TestHighBranch:
    @pytest.mark.parametrize("p", [p for p in GRID if p >= Fraction(1, 2)])
    def test_audit(self, p):
        audit = paper_branch_high(p)
        assert audit.satisfies_equations
        if p < Fraction(5, 8):
            assert audit.classes[5] < 0 and audit.violating_classes == (5,)
        else:
            assert audit.nonnegative

    def test_fallback_used_below_five_eighths(self):
        assert solve_symmetric(Fraction(9, 16)).branch is Branch.LP
        assert solve_symmetric(Fraction(5, 8)).branch is Branch.HIGH
        assert solve_symmetric(Fraction(1, 2)).branch is Branch.LOW


class TestConstruct:
    @pytest.mark.parametrize("p", GRID, ids=str)
    def test_grid(self, p):
        w = construct(p)
        sc = symmetric_scenario(p)
        assert w.reproduces(sc)
        assert all(w.expectation(MomentTerm([v])) == 0 for v in SYSTEM.names)

    @pytest.mark.parametrize("p", [Fraction(0), Fraction(1, 5), Fraction(249, 1000), Fraction(751, 1000), Fraction(1)])
    def test_outside_infeasible(self, p):
        assert not check_joint(symmetric_scenario(p)).feasible
        with pytest.raises(OutOfRange):
            construct(p)

    @given(st.integers(0, 400))
    def test_fine_grid(self, k):
        p = Fraction(1, 4) + Fraction(k, 800)
        assert construct(p).reproduces(symmetric_scenario(p))


class TestExpand:
    @given(st.lists(st.integers(0, 20), min_size=16, max_size=16).filter(any))
    def test_mass_preserved(self, raw):
        total = sum(m * r for m, r in zip(MULTIPLICITIES, raw))
        classes = SymmetricClasses(tuple(Fraction(r, total) for r in raw))
        dist = expand(classes)
        assert sum(dist.weights) == classes.total_mass() == 1

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            expand(paper_branch_high(Fraction(1, 2)).classes)
