import json
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointfeas import formats
from jointfeas.joint import JointDistribution, ScenarioError, check_joint
from jointfeas.outcomes import Event, MomentTerm, VariableSystem, term_event
from jointfeas.upper import (
    GHZ_UPPER_SYSTEM,
    GHZ_UPPER_TERMS,
    TrackedFamily,
    UntrackedEvent,
    UpperScenario,
    complete,
    completed_value,
    construct_ghz_upper,
    ghz_upper_scenario,
    naive_completion,
    nonmonotone_pairs,
    restrict,
    solve_upper,
    upper_expectation,
    verify_axioms,
    verify_full_algebra,
)


@st.composite
def distributions_with_family(draw):
    n = draw(st.integers(1, 3))
    system = VariableSystem([f"V{i}" for i in range(n)])
    raw = [draw(st.integers(0, 4)) for _ in range(system.atom_count)]
    if not any(raw):
        raw[-1] = 1
    dist = JointDistribution(system, tuple(Fraction(r, sum(raw)) for r in raw))
    subsets = [c for k in range(2, n + 1) for c in combinations(system.names, k)]
    terms = draw(st.lists(st.sampled_from(subsets), unique=True)) if subsets else []
    return dist, TrackedFamily.build(system, [MomentTerm(t) for t in terms])


class TestFamily:
    def test_ghz_family_size(self):
        fam = TrackedFamily.build(GHZ_UPPER_SYSTEM, GHZ_UPPER_TERMS)
        # empty, Omega, 8 atoms, 6 variable events, 2 product events
        assert len(fam) == 18
        assert fam.labels[:3] == ("empty", "Omega", "{---}")

    def test_untracked_lookup(self):
        assign = construct_ghz_upper()
        e = Event.of(GHZ_UPPER_SYSTEM, ["+++", "---"])
        assert e not in assign.family
        with pytest.raises(UntrackedEvent):
            assign.value(e)

    def test_duplicate_events_merged(self):
        s = VariableSystem(["A"])
        fam = TrackedFamily.build(s, [MomentTerm(["A"])])
        # the A-events coincide with the two atoms
        assert len(fam) == 4


class TestGHZConstruction:
    def test_axioms_hold(self):
        report = verify_axioms(construct_ghz_upper())
        assert report.ok, report.violations

    def test_expectations(self):
        assign = construct_ghz_upper()
        assert [upper_expectation(assign, t) for t in GHZ_UPPER_TERMS] == [1, 1, 1, -1]

    def test_nonmonotone(self):
        assign = construct_ghz_upper()
        pairs = nonmonotone_pairs(assign)
        assert ("{+++}", "A*B*C=+1") in pairs
        s = GHZ_UPPER_SYSTEM
        abc = Event.of(s, ["+++"])
        superset = term_event(MomentTerm(["A", "B", "C"]), s, 1)
        assert abc.issubset(superset)
        assert assign.value(abc) == 1 > assign.value(superset) == 0

    def test_separation(self):
        sc = ghz_upper_scenario()
        res = solve_upper(sc)
        assert res.feasible
        assert verify_axioms(res.assignment).ok
        assert [upper_expectation(res.assignment, t) for t in GHZ_UPPER_TERMS] == [1, 1, 1, -1]
        assert not check_joint(sc.as_scenario()).feasible

    def test_serialization_fixed_point(self):
        assign = construct_ghz_upper()
        text = formats.dumps(formats.dump_upper(assign))
        again = formats.load_upper(json.loads(text))
        assert again == assign
        assert verify_axioms(again).ok
        assert formats.dumps(formats.dump_upper(again)) == text

    def test_violation_detected(self):
        assign = construct_ghz_upper()
        s = GHZ_UPPER_SYSTEM
        broken = assign.with_value(term_event(MomentTerm(["A"]), s, 1), 0)
        axioms = {v.axiom for v in verify_axioms(broken).violations}
        assert "iv" in axioms
        assert not verify_axioms(assign.with_value(s.empty(), Fraction(1, 2))).ok
        assert not verify_axioms(assign.with_value(s.full(), Fraction(1, 2))).ok
        assert not verify_axioms(assign.with_value(s.full(), 2)).ok


class TestCompletion:
    def test_partition_completion_is_subadditive(self):
        for assign in (construct_ghz_upper(), solve_upper(ghz_upper_scenario()).assignment):
            values = complete(assign)
            assert len(values) == 256
            assert verify_full_algebra(values, assign.system).ok

    def test_atom_sum_completion_breaks_subadditivity(self):
        values = naive_completion(construct_ghz_upper())
        assert not verify_full_algebra(values, GHZ_UPPER_SYSTEM).ok

    def test_completed_value(self):
        assign = construct_ghz_upper()
        s = GHZ_UPPER_SYSTEM
        assert completed_value(assign, Event.of(s, ["+++", "---"])) == 1
        assert completed_value(assign, Event.of(s, ["++-", "+-+"])) == 0
        assert completed_value(assign, s.empty()) == 0

    def test_size_limit(self):
        s = VariableSystem(["A", "B", "C", "D"])
        dist = JointDistribution.from_atoms(s, {"++++": 1})
        with pytest.raises(ScenarioError):
            complete(restrict(dist, TrackedFamily.build(s)))


class TestProperties:
    @given(distributions_with_family())
    def test_weakening(self, df):
        dist, fam = df
        assign = restrict(dist, fam)
        assert verify_axioms(assign).ok
        assert not nonmonotone_pairs(assign)
        for t in fam.terms:
            assert upper_expectation(assign, t) == dist.expectation(t)

    @settings(max_examples=30)
    @given(distributions_with_family())
    def test_weakening_completes(self, df):
        dist, fam = df
        values = complete(restrict(dist, fam))
        assert verify_full_algebra(values, fam.system).ok

    @settings(max_examples=40)
    @given(st.lists(st.integers(-4, 4), min_size=4, max_size=4))
    def test_solver_meets_targets(self, ks):
        targets = [Fraction(k, 4) for k in ks]
        sc = UpperScenario(GHZ_UPPER_SYSTEM, tuple(zip(GHZ_UPPER_TERMS, targets)))
        res = solve_upper(sc)
        assert res.feasible
        assert verify_axioms(res.assignment).ok
        assert [upper_expectation(res.assignment, t) for t in GHZ_UPPER_TERMS] == targets


class TestScenario:
    def test_out_of_range(self):
        with pytest.raises(ScenarioError):
            UpperScenario.build(["A"], {("A",): 2})

    def test_too_many_variables(self):
        sc = UpperScenario.build([f"V{i}" for i in range(9)], {("V0",): 0})
        with pytest.raises(ScenarioError):
            solve_upper(sc)
