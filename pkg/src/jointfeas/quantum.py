"""Small statevector engine for up to three spin-1/2 systems.

Floating point stays inside this module.  Values handed to the exact
engines are matched to a closed form, rationalized, and carry the
rationalization error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .joint import BELL_VARIABLES, Scenario, ScenarioError, bell_scenario, ghz_scenario
from .numbers import DEFAULT_DIGITS, parse_number

MAX_QUBITS = 3
NORM_TOL = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

Factor = Union[str, float]


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class StateVector:
    """Amplitudes over ``2**k`` basis states; qubit 0 is the most significant bit.

    Basis label ``0`` is the +1 eigenstate of Z (``|+>``), ``1`` is ``|->``.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        k = int(round(math.log2(amps.size))) if amps.size else -1
        if k < 1 or 1 << k != amps.size or k > MAX_QUBITS:
            raise DimensionError(f"need 2**k amplitudes with 1 <= k <= {MAX_QUBITS}, got {amps.size}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state norm {norm} differs from 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def superposition(cls, terms: dict[str, complex]) -> "StateVector":
        """Normalized sum of basis kets written as sign strings, e.g. ``{"++-": 1}``."""
        k = len(next(iter(terms)))
        amps = np.zeros(1 << k, dtype=complex)
        for label, coeff in terms.items():
            if len(label) != k:
                raise DimensionError("basis labels of different lengths")
            index = int("".join("0" if ch == "+" else "1" for ch in label), 2)
            amps[index] += coeff
        return cls(amps / np.linalg.norm(amps))

    @property
    def num_qubits(self) -> int:
        return int(math.log2(self.amplitudes.size))


def axis_operator(theta_deg: float) -> np.ndarray:
    """Spin component along an axis in the x-z plane, ``theta`` from z."""
    t = math.radians(theta_deg)
    return math.cos(t) * PAULI["Z"] + math.sin(t) * PAULI["X"]


@dataclass(frozen=True)
class SpinObservable:
    """Tensor product of per-qubit factors: ``"X"``, ``"Y"``, ``"Z"``, ``"I"``
    or an angle in degrees for an x-z plane axis."""

    factors: tuple[Factor, ...]

    def __init__(self, factors: Sequence[Factor] | str):
        factors = tuple(factors)
        for f in factors:
            if isinstance(f, str) and f not in PAULI:
                raise ValueError(f"unknown spin factor {f!r}")
        object.__setattr__(self, "factors", factors)

    def matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for f in self.factors:
            out = np.kron(out, PAULI[f] if isinstance(f, str) else axis_operator(float(f)))
        return out


def expectation(state: StateVector, obs: SpinObservable) -> float:
    if len(obs.factors) != state.num_qubits:
        raise DimensionError(
            f"observable acts on {len(obs.factors)} qubits, state has {state.num_qubits}"
        )
    psi = state.amplitudes
    value = np.vdot(psi, obs.matrix() @ psi)
    if abs(value.imag) >= NORM_TOL:
        raise ValueError(f"non-Hermitian residue {value.imag}")
    return float(value.real)


# The joint +1 eigenstate of X Y Y, Y X Y, Y Y X with X X X = -1.
GHZ_STATE = StateVector.superposition({"+++": 1, "---": -1})
# As typeset in the source this state gives (1, 1, -1, 1) instead.
PRINTED_GHZ_STATE = StateVector.superposition({"++-": 1, "--+": 1})
SINGLET = StateVector.superposition({"+-": 1, "-+": -1})

GHZ_OPERATORS = {
    "A": SpinObservable("XYY"),
    "B": SpinObservable("YXY"),
    "C": SpinObservable("YYX"),
    "D": SpinObservable("XXX"),
}


def ghz_expectations(state: StateVector = GHZ_STATE) -> dict[str, float]:
    return {name: expectation(state, op) for name, op in GHZ_OPERATORS.items()}


def bell_correlation(theta_deg: float) -> float:
    """Correlation of the two +/-1 outcomes on the singlet, analyzers ``theta`` apart."""
    return expectation(SINGLET, SpinObservable((0.0, float(theta_deg))))


# closed forms of -cos(theta) for the angles the presets use
_MINUS_COS = {0: "-1", 30: "-sqrt(3)/2", 45: "-sqrt(2)/2", 60: "-1/2", 90: "0",
              120: "1/2", 135: "sqrt(2)/2", 150: "sqrt(3)/2", 180: "1"}

# pair -> analyzer separation reproducing E(XY) = E(XZ) = -sqrt(3)/2, E(YZ) = -1/2
BELL_ANGLES = {("X", "Y"): 30, ("X", "Z"): 30, ("Y", "Z"): 60}


def exact_correlation(theta_deg: int, digits: int = DEFAULT_DIGITS):
    """Statevector correlation matched to its closed form and rationalized."""
    if theta_deg not in _MINUS_COS:
        raise ValueError(f"no closed form registered for {theta_deg} degrees")
    parsed = parse_number(_MINUS_COS[theta_deg], digits)
    numeric = bell_correlation(theta_deg)
    if abs(numeric - float(parsed.value)) > NORM_TOL + float(parsed.error_bound):
        raise AssertionError(f"statevector gives {numeric}, closed form {parsed.text}")
    return parsed


def emit_scenario(preset: str, epsilon=None, digits: int = DEFAULT_DIGITS, zero_means: bool = True) -> Scenario:
    """``"bell"``: three zero-mean variables at 30/30/60 degrees.
    ``"ghz"``: six variables with triples ``(1-eps) * <A>, ..., (1-eps) * <D>``."""
    if preset == "bell":
        vals = {}
        bound = Fraction(0)
        notes = []
        for pair, angle in BELL_ANGLES.items():
            parsed = exact_correlation(angle, digits)
            vals[pair] = parsed.value
            bound = max(bound, parsed.error_bound)
            if parsed.note:
                notes.append(f"E({pair[0]}*{pair[1]}): {parsed.note}")
        return bell_scenario(vals[("X", "Y")], vals[("X", "Z")], vals[("Y", "Z")],
                             approximation=bound, notes=notes)
    if preset == "ghz":
        eps = Fraction(0 if epsilon is None else epsilon)
        if not 0 <= eps <= 1:
            raise ScenarioError(f"epsilon = {eps} outside [0, 1]")
        signs = []
        for name, value in ghz_expectations().items():
            s = round(value)
            if abs(value - s) > NORM_TOL or abs(s) != 1:
                raise AssertionError(f"GHZ state is not an eigenstate of {name}: {value}")
            signs.append(s)
        return ghz_scenario(*((1 - eps) * s for s in signs), zero_means=zero_means)
    raise ValueError(f"unknown preset {preset!r}; expected 'bell' or 'ghz'")
