"""Number grammar for scenario values and rationalization of square roots.

Accepted forms::

    [-]INT[/INT]          exact rational, e.g. "1/2", "-3"
    decimal               exact decimal, e.g. "0.49", "-.5"
    [-]sqrt(INT)[/INT]    quadratic surd, e.g. "-sqrt(3)/2"

Surds are replaced by a continued-fraction convergent whose distance to the
true value is below ``10**-digits`` and the bound is carried along.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

DEFAULT_DIGITS = 30

_RATIONAL = re.compile(r"^\s*([+-]?)\s*(\d+)\s*(?:/\s*(\d+))?\s*$")
_DECIMAL = re.compile(r"^\s*[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?\s*$")
_SURD = re.compile(r"^\s*([+-]?)\s*sqrt\(\s*(\d+)\s*\)\s*(?:/\s*(\d+))?\s*$")


class NumberFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ParsedNumber:
    value: Fraction
    text: str
    error_bound: Fraction = Fraction(0)

    @property
    def exact(self) -> bool:
        return self.error_bound == 0

    @property
    def note(self) -> str | None:
        if self.exact:
            return None
        return f"{self.text.strip()} rationalized with |error| < {float(self.error_bound):.3e}"


def tolerance(digits: int) -> Fraction:
    if digits < 1:
        raise ValueError("precision must be at least one digit")
    return Fraction(1, 10**digits)


def sqrt_convergent(k: int, tol: Fraction) -> tuple[Fraction, Fraction]:
    """Continued-fraction approximation of ``sqrt(k)``.

    Returns ``(approx, bound)`` with ``|sqrt(k) - approx| < bound <= tol``.
    Perfect squares are returned exactly with ``bound == 0``.
    """
    if k < 0:
        raise NumberFormatError("square root of a negative number")
    a0 = math.isqrt(k)
    if a0 * a0 == k:
        return Fraction(a0), Fraction(0)
    # periodic expansion of a quadratic irrational: (m + sqrt k) / d
    m, d, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while True:
        m = d * a - m
        d = (k - m * m) // d
        a = (a0 + m) // d
        p_next = a * p + p_prev
        q_next = a * q + q_prev
        bound = Fraction(1, q * q_next)
        if bound <= tol:
            return Fraction(p, q), bound
        p_prev, p = p, p_next
        q_prev, q = q, q_next


def rational_sqrt_over(k: int, denom: int, negative: bool, tol: Fraction) -> tuple[Fraction, Fraction]:
    # error scales down by denom, so the root itself only needs tol * denom
    approx, bound = sqrt_convergent(k, tol * denom)
    value = approx / denom
    return (-value if negative else value), bound / denom


def parse_number(text: str, digits: int = DEFAULT_DIGITS) -> ParsedNumber:
    """Parse ``text`` into an exact rational (or a bounded surd approximation)."""
    if not isinstance(text, str):
        if isinstance(text, int) and not isinstance(text, bool):
            return ParsedNumber(Fraction(text), str(text))
        raise NumberFormatError(f"expected a string number, got {type(text).__name__}")
    match = _RATIONAL.match(text)
    if match:
        sign, num, den = match.groups()
        den = int(den) if den is not None else 1
        if den == 0:
            raise NumberFormatError(f"zero denominator in {text!r}")
        value = Fraction(int(num), den)
        return ParsedNumber(-value if sign == "-" else value, text)
    match = _SURD.match(text)
    if match:
        sign, radicand, den = match.groups()
        den = int(den) if den is not None else 1
        if den == 0:
            raise NumberFormatError(f"zero denominator in {text!r}")
        value, bound = rational_sqrt_over(int(radicand), den, sign == "-", tolerance(digits))
        return ParsedNumber(value, text, bound)
    if _DECIMAL.match(text):
        return ParsedNumber(Fraction(text.strip()), text)
    raise NumberFormatError(f"cannot parse number {text!r}")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def decimal_string(q: Fraction, digits: int = 12) -> str:
    """Round-half-even decimal rendering computed from the exact value."""
    scaled = round(q * 10**digits)
    sign = "-" if scaled < 0 else ""
    scaled = abs(scaled)
    whole, frac = divmod(scaled, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"
