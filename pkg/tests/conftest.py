from fractions import Fraction

import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def unit_rationals(denominator: int = 12):
    """Rationals k/denominator in [-1, 1]."""
    return st.integers(-denominator, denominator).map(lambda k: Fraction(k, denominator))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
