from decimal import Decimal, localcontext
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from jointfeas.numbers import (
    NumberFormatError,
    decimal_string,
    format_rational,
    parse_number,
    sqrt_convergent,
)


def high_precision_sqrt_over(k: int, m: int) -> Decimal:
    # m may be negative; all arithmetic stays inside the wide context
    with localcontext() as ctx:
        ctx.prec = 150
        return Decimal(k).sqrt() / m


def distance(q: Fraction, d: Decimal) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = 150
        return abs(Decimal(q.numerator) / Decimal(q.denominator) - d)


class TestGrammar:
    @pytest.mark.parametrize(
        "text,value",
        [("1/2", Fraction(1, 2)), ("-3", Fraction(-3)), ("0.49", Fraction(49, 100)),
         ("-.5", Fraction(-1, 2)), ("1e-2", Fraction(1, 100)), (" 4 / 6 ", Fraction(2, 3))],
    )
    def test_exact_forms(self, text, value):
        parsed = parse_number(text)
        assert parsed.value == value
        assert parsed.exact and parsed.note is None

    @pytest.mark.parametrize("text", ["2/0", "", "abc", "1/2/3", "sqrt(3)/0", "sqrt(-3)", "1.2.3"])
    def test_malformed(self, text):
        with pytest.raises(NumberFormatError):
            parse_number(text)

    def test_minus_root_three_over_two(self):
        parsed = parse_number("-sqrt(3)/2")
        assert not parsed.exact
        assert parsed.error_bound < Fraction(1, 10**30)
        assert distance(parsed.value, high_precision_sqrt_over(3, -2)) < Decimal(10) ** -30
        assert "rationalized" in parsed.note

    def test_perfect_square_is_exact(self):
        parsed = parse_number("sqrt(16)/8")
        assert parsed.value == Fraction(1, 2) and parsed.exact

    def test_precision_flag(self):
        coarse = parse_number("sqrt(2)", digits=5)
        assert coarse.error_bound <= Fraction(1, 10**5)
        assert coarse.value.denominator < parse_number("sqrt(2)").value.denominator

    def test_int_passthrough_and_bool_rejected(self):
        assert parse_number(3).value == 3
        with pytest.raises(NumberFormatError):
            parse_number(True)


class TestRationalization:
    @given(st.integers(2, 500), st.integers(1, 50), st.integers(3, 60))
    def test_bound_holds(self, k, m, digits):
        parsed = parse_number(f"sqrt({k})/{m}", digits)
        err = distance(parsed.value, high_precision_sqrt_over(k, m))
        if parsed.exact:
            assert err == 0
        else:
            assert Decimal(0) < err
            assert err < Decimal(parsed.error_bound.numerator) / parsed.error_bound.denominator
            assert parsed.error_bound <= Fraction(1, 10**digits)

    @given(st.integers(0, 10**6))
    def test_squares_exact(self, r):
        approx, bound = sqrt_convergent(r * r, Fraction(1, 10**9))
        assert approx == r and bound == 0


class TestFormatting:
    def test_format_rational(self):
        assert format_rational(Fraction(-3, 4)) == "-3/4"
        assert format_rational(Fraction(2)) == "2"

    def test_decimal_string(self):
        assert decimal_string(Fraction(1, 3)) == "0.333333333333"
        assert decimal_string(Fraction(-2, 3)) == "-0.666666666667"
        assert decimal_string(Fraction(-1, 10**15)) == "0.000000000000"

    @given(st.fractions(max_denominator=10**6))
    def test_format_round_trip(self, q):
        assert parse_number(format_rational(q)).value == q
