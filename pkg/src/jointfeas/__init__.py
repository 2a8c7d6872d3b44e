"""Exact feasibility checks for correlations of +/-1 random variables."""

from .ghz import construct, paper_branch_high, paper_branch_low, solve_symmetric
from .joint import (
    JointDistribution,
    Scenario,
    Verdict,
    check_joint,
    enumerate_deterministic,
    ghz_inequalities,
    sample,
    suppes_zanotti_check,
)
from .lp import FarkasCertificate, LinearSystem, solve_feasibility, verify_certificate
from .numbers import parse_number
from .outcomes import Event, MomentTerm, VariableSystem
from .quantum import bell_correlation, emit_scenario, ghz_expectations
from .upper import construct_ghz_upper, solve_upper, upper_expectation, verify_axioms

__version__ = "0.1.0"

__all__ = [
    "Event",
    "FarkasCertificate",
    "JointDistribution",
    "LinearSystem",
    "MomentTerm",
    "Scenario",
    "VariableSystem",
    "Verdict",
    "bell_correlation",
    "check_joint",
    "construct",
    "construct_ghz_upper",
    "emit_scenario",
    "enumerate_deterministic",
    "ghz_expectations",
    "ghz_inequalities",
    "paper_branch_high",
    "paper_branch_low",
    "parse_number",
    "sample",
    "solve_feasibility",
    "solve_symmetric",
    "solve_upper",
    "suppes_zanotti_check",
    "upper_expectation",
    "verify_axioms",
    "verify_certificate",
]
