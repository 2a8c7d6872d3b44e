import math
from fractions import Fraction

import numpy as np
import pytest

from jointfeas.joint import check_joint
from jointfeas.quantum import (
    BELL_ANGLES,
    GHZ_OPERATORS,
    GHZ_STATE,
    PRINTED_GHZ_STATE,
    SINGLET,
    DimensionError,
    SpinObservable,
    StateVector,
    bell_correlation,
    emit_scenario,
    exact_correlation,
    expectation,
    ghz_expectations,
)

TOL = 1e-12


class TestStates:
    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            StateVector(np.array([1, 1], dtype=complex))

    def test_dimension_limits(self):
        with pytest.raises(DimensionError):
            StateVector(np.ones(16) / 4)
        with pytest.raises(DimensionError):
            StateVector(np.ones(3) / math.sqrt(3))

    def test_observable_arity(self):
        with pytest.raises(DimensionError):
            expectation(SINGLET, SpinObservable("XYZ"))
        with pytest.raises(ValueError):
            SpinObservable("XQ")

    def test_single_qubit_paulis(self):
        up = StateVector.superposition({"+": 1})
        plus_x = StateVector.superposition({"+": 1, "-": 1})
        assert expectation(up, SpinObservable("Z")) == pytest.approx(1, abs=TOL)
        assert expectation(plus_x, SpinObservable("X")) == pytest.approx(1, abs=TOL)
        assert expectation(plus_x, SpinObservable("Y")) == pytest.approx(0, abs=TOL)


class TestGHZ:
    def test_eigenvalues(self):
        vals = ghz_expectations()
        assert [vals[k] for k in "ABCD"] == pytest.approx([1, 1, 1, -1], abs=TOL)

    def test_product_identity(self):
        abc = GHZ_OPERATORS["A"].matrix() @ GHZ_OPERATORS["B"].matrix() @ GHZ_OPERATORS["C"].matrix()
        psi = GHZ_STATE.amplitudes
        assert np.vdot(psi, abc @ psi).real == pytest.approx(1, abs=TOL)
        # the operator product is -XXX, so its value is the negative of <D>
        assert np.allclose(abc, -GHZ_OPERATORS["D"].matrix())

    def test_typeset_phase_gives_other_signs(self):
        vals = ghz_expectations(PRINTED_GHZ_STATE)
        assert [vals[k] for k in "ABCD"] == pytest.approx([1, 1, -1, 1], abs=TOL)

    def test_emitted_scenarios(self):
        sc = emit_scenario("ghz", Fraction(0))
        assert [v for _, v in sc.moments] == [1, 1, 1, -1]
        sc = emit_scenario("ghz", Fraction(1, 2))
        assert [v for _, v in sc.moments] == [Fraction(1, 2)] * 3 + [Fraction(-1, 2)]
        with pytest.raises(ValueError):
            emit_scenario("ghz", Fraction(2))
        with pytest.raises(ValueError):
            emit_scenario("chsh")


class TestBell:
    def test_thirty_degrees(self):
        assert bell_correlation(30) == pytest.approx(-math.sqrt(3) / 2, abs=TOL)

    def test_one_degree_grid(self):
        worst = max(abs(bell_correlation(t) + math.cos(math.radians(t))) for t in range(0, 361))
        assert worst < TOL

    @pytest.mark.parametrize("angle", [0, 30, 45, 60, 90, 120, 135, 150, 180])
    def test_closed_forms(self, angle):
        parsed = exact_correlation(angle)
        assert float(parsed.value) == pytest.approx(-math.cos(math.radians(angle)), abs=TOL)

    def test_angles_give_printed_values(self):
        assert {k: round(bell_correlation(a), 6) for k, a in BELL_ANGLES.items()} == {
            ("X", "Y"): -0.866025,
            ("X", "Z"): -0.866025,
            ("Y", "Z"): -0.5,
        }

    def test_emitted_scenario_is_infeasible(self):
        sc = emit_scenario("bell")
        assert 0 < sc.approximation < Fraction(1, 10**30)
        assert len(sc.notes) == 2
        v = check_joint(sc)
        assert not v.feasible
        assert v.margin > 1000 * sc.approximation

    def test_precision(self):
        coarse = emit_scenario("bell", digits=6)
        assert 0 < coarse.approximation <= Fraction(1, 10**6)
        assert not check_joint(coarse).feasible
