"""Exact linear feasibility over the rationals.

``solve_feasibility`` runs a phase-1 simplex with Bland's smallest-index rule
on a dense tableau whose rows are integers over a per-row denominator.  The outcome is either a point satisfying
every row and bound exactly, or a Farkas certificate: multipliers ``y`` on
the equality rows and nonnegative multipliers on the variable bounds such
that ``A^T y = mu - nu`` and ``y.b < mu.l - nu.u``.  Any feasible ``x`` would
give ``y.b = y.Ax = mu.x - nu.x >= mu.l - nu.u``, a contradiction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


class StructuralError(ValueError):
    """The linear system or certificate is malformed (shape, bound layout)."""


def _q(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted in exact systems; pass a Fraction or str")
    return Fraction(value)


@dataclass(frozen=True)
class LinearSystem:
    """Equality rows ``A x = b`` plus per-variable bounds ``lower <= x <= upper``.

    ``upper[j] is None`` means no upper bound.  Lower bounds are always finite.
    """

    num_vars: int
    rows: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    lower: tuple[Fraction, ...]
    upper: tuple[Fraction | None, ...]
    row_labels: tuple[str, ...] = field(default=())
    var_labels: tuple[str, ...] = field(default=())

    @classmethod
    def create(
        cls,
        rows: Iterable[Sequence],
        rhs: Iterable,
        num_vars: int | None = None,
        lower=0,
        upper=None,
        row_labels: Sequence[str] | None = None,
        var_labels: Sequence[str] | None = None,
    ) -> "LinearSystem":
        rows = [tuple(_q(a) for a in r) for r in rows]
        rhs = [_q(b) for b in rhs]
        if num_vars is None:
            if not rows:
                raise StructuralError("num_vars is required for a system without rows")
            num_vars = len(rows[0])
        if num_vars < 0:
            raise StructuralError("num_vars must be nonnegative")
        for i, r in enumerate(rows):
            if len(r) != num_vars:
                raise StructuralError(f"row {i} has length {len(r)}, expected {num_vars}")
        if len(rhs) != len(rows):
            raise StructuralError(f"{len(rows)} rows but {len(rhs)} right-hand sides")

        if isinstance(lower, (list, tuple)):
            lo = [_q(v) for v in lower]
        else:
            lo = [_q(lower)] * num_vars
        if isinstance(upper, (list, tuple)):
            up = [None if v is None else _q(v) for v in upper]
        else:
            up = [None if upper is None else _q(upper)] * num_vars
        if len(lo) != num_vars or len(up) != num_vars:
            raise StructuralError("bounds must have one entry per variable")

        row_labels = tuple(row_labels) if row_labels is not None else tuple(f"r{i}" for i in range(len(rows)))
        var_labels = tuple(var_labels) if var_labels is not None else tuple(f"x{j}" for j in range(num_vars))
        if len(row_labels) != len(rows) or len(var_labels) != num_vars:
            raise StructuralError("label counts do not match the system shape")
        return cls(num_vars, tuple(rows), tuple(rhs), tuple(lo), tuple(up), row_labels, var_labels)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def residuals(self, x: Sequence[Fraction]) -> list[Fraction]:
        return [sum((a * v for a, v in zip(row, x) if a), Fraction(0)) - b for row, b in zip(self.rows, self.rhs)]

    def is_satisfied_by(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars:
            raise StructuralError(f"point has {len(x)} entries, expected {self.num_vars}")
        for v, lo, up in zip(x, self.lower, self.upper):
            if v < lo or (up is not None and v > up):
                return False
        return all(r == 0 for r in self.residuals(x))


@dataclass(frozen=True)
class FarkasCertificate:
    """Dual multipliers proving that a :class:`LinearSystem` has no solution.

    ``multipliers`` has one (free) entry per equality row; ``lower_multipliers``
    and ``upper_multipliers`` are nonnegative, one per variable.
    """

    multipliers: tuple[Fraction, ...]
    lower_multipliers: tuple[Fraction, ...]
    upper_multipliers: tuple[Fraction, ...]

    def combined_coefficients(self, system: LinearSystem) -> list[Fraction]:
        """``A^T y``: coefficient of each variable in the combined row."""
        coeffs = [Fraction(0)] * system.num_vars
        for y, row in zip(self.multipliers, system.rows):
            if y:
                for j, a in enumerate(row):
                    if a:
                        coeffs[j] += y * a
        return coeffs

    def combined_rhs(self, system: LinearSystem) -> Fraction:
        return sum((y * b for y, b in zip(self.multipliers, system.rhs)), Fraction(0))

    def bound_floor(self, system: LinearSystem) -> Fraction:
        """Smallest value the combined row can take under the bounds used."""
        total = Fraction(0)
        for mu, lo in zip(self.lower_multipliers, system.lower):
            total += mu * lo
        for nu, up in zip(self.upper_multipliers, system.upper):
            if nu:
                total -= nu * up
        return total


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    point: tuple[Fraction, ...] | None = None
    certificate: FarkasCertificate | None = None
    pivots: int = 0


def verify_certificate(system: LinearSystem, cert: FarkasCertificate) -> bool:
    """True iff ``cert`` replays to an exact contradiction on ``system``."""
    n = system.num_vars
    if (
        len(cert.multipliers) != system.num_rows
        or len(cert.lower_multipliers) != n
        or len(cert.upper_multipliers) != n
    ):
        raise StructuralError("certificate dimensions do not match the system")
    for mu in cert.lower_multipliers:
        if mu < 0:
            return False
    for nu, up in zip(cert.upper_multipliers, system.upper):
        if nu < 0 or (nu and up is None):
            return False
    coeffs = cert.combined_coefficients(system)
    for c, mu, nu in zip(coeffs, cert.lower_multipliers, cert.upper_multipliers):
        if c != mu - nu:
            return False
    return cert.combined_rhs(system) < cert.bound_floor(system)


def solve_feasibility(system: LinearSystem) -> FeasibilityResult:
    """Decide ``A x = b, lower <= x <= upper`` exactly.

    Shifted variables ``x' = x - lower`` are used so every structural
    column is nonnegative; each finite upper bound contributes a row
    ``x'_j + s_j = upper_j - lower_j``.  Every row then gets an artificial
    column and the sum of artificials is minimised with Bland's rule.
    """
    n = system.num_vars
    m_eq = system.num_rows
    upper_vars = [j for j, u in enumerate(system.upper) if u is not None]
    n_struct = n + len(upper_vars)
    m = m_eq + len(upper_vars)
    n_cols = n_struct + m

    tableau: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    flipped: list[bool] = []

    def add_row(coeffs: list[Fraction], b: Fraction, art_index: int) -> None:
        if b < 0:
            coeffs = [-a for a in coeffs]
            b = -b
            flipped.append(True)
        else:
            flipped.append(False)
        coeffs.extend([Fraction(0)] * m)
        coeffs[n_struct + art_index] = Fraction(1)
        tableau.append(coeffs)
        rhs.append(b)

    for i, (row, b) in enumerate(zip(system.rows, system.rhs)):
        shift = sum((a * lo for a, lo in zip(row, system.lower) if a and lo), Fraction(0))
        add_row(list(row) + [Fraction(0)] * len(upper_vars), b - shift, i)
    for k, j in enumerate(upper_vars):
        coeffs = [Fraction(0)] * n_struct
        coeffs[j] = Fraction(1)
        coeffs[n + k] = Fraction(1)
        add_row(coeffs, system.upper[j] - system.lower[j], m_eq + k)

    basis = [n_struct + i for i in range(m)]
    # phase-1 reduced costs (cost 1 on artificials); last entry tracks -objective
    cost = [Fraction(0)] * (n_cols + 1)
    for j in range(n_struct):
        cost[j] = -sum((tableau[i][j] for i in range(m)), Fraction(0))
    cost[n_cols] = -sum(rhs, Fraction(0))

    rows = [_IntRow.of(t + [b]) for t, b in zip(tableau, rhs)]
    red = _IntRow.of(cost)

    pivots = 0
    while red.ints[n_cols] < 0:
        entering = next((j for j in range(n_cols) if red.ints[j] < 0), None)
        if entering is None:
            break
        leave = None
        for i in range(m):
            t = rows[i].ints[entering]
            if t > 0:
                if leave is None:
                    leave = i
                    continue
                # compare rhs_i / t with the incumbent ratio by cross-multiplication
                lt = rows[leave].ints[entering]
                diff = rows[i].ints[n_cols] * lt - rows[leave].ints[n_cols] * t
                if diff < 0 or (diff == 0 and basis[i] < basis[leave]):
                    leave = i
        if leave is None:
            # phase 1 is bounded below by zero, so some row must block
            raise RuntimeError("phase-1 simplex reported an unbounded ray")
        _pivot(rows, red, leave, entering)
        basis[leave] = entering
        pivots += 1

    rhs = [r.value(n_cols) for r in rows]
    reduced = [red.value(j) for j in range(n_cols)]
    objective = -red.value(n_cols)

    if objective == 0:
        x = [Fraction(0)] * n
        for i, col in enumerate(basis):
            if col < n:
                x[col] = rhs[i]
        point = tuple(lo + v for lo, v in zip(system.lower, x))
        if not system.is_satisfied_by(point):
            raise RuntimeError("internal error: simplex point fails exact re-check")
        return FeasibilityResult(True, point=point, pivots=pivots)

    # y_i = c_art - r_art; the certificate is z = -y on the (possibly flipped) rows
    z = []
    for i in range(m):
        y = 1 - reduced[n_struct + i]
        zi = -y
        z.append(-zi if flipped[i] else zi)
    y_eq = tuple(z[:m_eq])
    nu = [Fraction(0)] * n
    for k, j in enumerate(upper_vars):
        nu[j] = z[m_eq + k]
    cert_partial = FarkasCertificate(y_eq, (Fraction(0),) * n, tuple(nu))
    coeffs = cert_partial.combined_coefficients(system)
    mu = tuple(c + v for c, v in zip(coeffs, nu))
    cert = FarkasCertificate(y_eq, mu, tuple(nu))
    if not verify_certificate(system, cert):
        raise RuntimeError("internal error: emitted certificate fails verification")
    return FeasibilityResult(False, certificate=cert, pivots=pivots)


@dataclass
class _IntRow:
    """Tableau row stored as integers over one positive denominator."""

    ints: list[int]
    den: int

    @classmethod
    def of(cls, values: Sequence[Fraction]) -> "_IntRow":
        den = math.lcm(*(v.denominator for v in values))
        return cls([int(v * den) for v in values], den)

    def value(self, j: int) -> Fraction:
        return Fraction(self.ints[j], self.den)

    def reduce(self) -> None:
        g = math.gcd(self.den, *self.ints)
        if g > 1:
            self.ints = [a // g for a in self.ints]
            self.den //= g


def _pivot(rows: list[_IntRow], red: _IntRow, r: int, c: int) -> None:
    prow = rows[r]
    p = prow.ints[c]
    if p < 0:
        prow.ints = [-a for a in prow.ints]
        p = -p
    # pivot row becomes ints / p so its entry in column c is 1
    prow.den = p
    prow.reduce()
    p = prow.ints[c]
    pints = prow.ints
    nonzero = [j for j, a in enumerate(pints) if a]
    for i, other in enumerate(rows + [red]):
        if i == r:
            continue
        f = other.ints[c]
        if not f:
            continue
        # other/d - (f/d) * (pivot/p) = (p*other - f*pivot) / (p*d)
        ints = [a * p for a in other.ints] if p != 1 else list(other.ints)
        for j in nonzero:
            ints[j] -= f * pints[j]
        other.ints = ints
        other.den *= p
        other.reduce()


