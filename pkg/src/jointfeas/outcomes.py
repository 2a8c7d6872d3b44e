"""Finite outcome spaces of +/-1 valued random variables.

Atoms are complete sign assignments, encoded as integers: bit ``i`` is set
exactly when variable ``i`` takes the value +1.  Events are dense bitsets
over the ``2**n`` atoms, stored in a Python ``int``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

MAX_VARIABLES = 16

PLUS = "+"
MINUS = "-"
# accepted on input only; output always uses ASCII signs
_MINUS_ALIASES = {"-", "−"}


class DomainError(ValueError):
    """A variable, atom or event does not belong to the system in use."""


@dataclass(frozen=True)
class VariableSystem:
    """Ordered, named collection of +/-1 random variables."""

    names: tuple[str, ...]

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise DomainError("a variable system needs at least one variable")
        if len(names) > MAX_VARIABLES:
            raise DomainError(
                f"{len(names)} variables requested; at most {MAX_VARIABLES} supported"
            )
        for name in names:
            if not isinstance(name, str) or not name:
                raise DomainError(f"invalid variable name {name!r}")
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate variable names in {names}")
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def atom_count(self) -> int:
        return 1 << len(self.names)

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def index(self, name: str) -> int:
        try:
            return self._positions[name]
        except KeyError:
            raise DomainError(f"variable {name!r} not in system {self.names}") from None

    def atom(self, index: int) -> "Atom":
        return Atom(self, index)

    def atom_from_string(self, text: str) -> "Atom":
        """Parse a sign string such as ``"+-+"`` (one sign per variable)."""
        if len(text) != self.n:
            raise DomainError(f"atom {text!r} has {len(text)} signs, expected {self.n}")
        index = 0
        for i, ch in enumerate(text):
            if ch == PLUS:
                index |= 1 << i
            elif ch not in _MINUS_ALIASES:
                raise DomainError(f"bad sign {ch!r} in atom {text!r}")
        return Atom(self, index)

    def atom_from_signs(self, signs: Sequence[int]) -> "Atom":
        if len(signs) != self.n:
            raise DomainError(f"expected {self.n} signs, got {len(signs)}")
        index = 0
        for i, s in enumerate(signs):
            if s == 1:
                index |= 1 << i
            elif s != -1:
                raise DomainError(f"sign must be +1 or -1, got {s!r}")
        return Atom(self, index)

    def term(self, *names: str) -> "MomentTerm":
        term = MomentTerm(names)
        term.bits(self)
        return term

    def empty(self) -> "Event":
        return Event(self, 0)

    def full(self) -> "Event":
        return Event(self, (1 << self.atom_count) - 1)


@dataclass(frozen=True)
class Atom:
    """A complete assignment of signs to every variable of a system."""

    system: VariableSystem
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.system.atom_count:
            raise DomainError(f"atom index {self.index} out of range")

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(1 if self.index >> i & 1 else -1 for i in range(self.system.n))

    def sign_of(self, name: str) -> int:
        return 1 if self.index >> self.system.index(name) & 1 else -1

    def __str__(self) -> str:
        return "".join(PLUS if self.index >> i & 1 else MINUS for i in range(self.system.n))


def atoms_of(system: VariableSystem) -> list[Atom]:
    """All ``2**n`` atoms of ``system`` in encoding order."""
    if system.n > MAX_VARIABLES:
        raise DomainError(f"system too large: {system.n} variables")
    return [Atom(system, i) for i in range(system.atom_count)]


@dataclass(frozen=True)
class MomentTerm:
    """Product of a non-empty set of variables, e.g. ``X1*Y2*Y3``."""

    variables: frozenset[str]

    def __init__(self, variables: Iterable[str]):
        if isinstance(variables, str):
            variables = [variables]
        vs = frozenset(variables)
        if not vs:
            raise DomainError("a moment term needs at least one variable")
        object.__setattr__(self, "variables", vs)

    def bits(self, system: VariableSystem) -> int:
        """Bitmask of the term's variable positions within ``system``."""
        mask = 0
        for name in self.variables:
            mask |= 1 << system.index(name)
        return mask

    def ordered(self, system: VariableSystem) -> tuple[str, ...]:
        return tuple(n for n in system.names if n in self.variables)

    def label(self, system: VariableSystem | None = None) -> str:
        names = self.ordered(system) if system else sorted(self.variables)
        return "*".join(names)


def eval_term(term: MomentTerm, atom: Atom) -> int:
    """Product of the atom's signs over the term's variables."""
    minus = term.bits(atom.system) & ~atom.index
    return -1 if bin(minus).count("1") & 1 else 1


def term_signs(term: MomentTerm, system: VariableSystem) -> list[int]:
    """``eval_term`` on every atom, in encoding order."""
    mask = term.bits(system)
    full = system.atom_count - 1
    return [-1 if bin(mask & (full ^ i)).count("1") & 1 else 1 for i in range(system.atom_count)]


def term_event(term: MomentTerm, system: VariableSystem, sign: int) -> "Event":
    """Event of all atoms on which ``term`` evaluates to ``sign``."""
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")
    mask = 0
    for i, s in enumerate(term_signs(term, system)):
        if s == sign:
            mask |= 1 << i
    return Event(system, mask)


def variable_event(system: VariableSystem, name: str, sign: int) -> "Event":
    return term_event(MomentTerm([name]), system, sign)


@dataclass(frozen=True)
class Event:
    """A set of atoms, stored as a bitset over atom indices."""

    system: VariableSystem
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.system.atom_count:
            raise DomainError("event mask has bits outside the atom space")

    @classmethod
    def of(cls, system: VariableSystem, atoms: Iterable[Atom | int | str]) -> "Event":
        mask = 0
        for a in atoms:
            if isinstance(a, str):
                a = system.atom_from_string(a)
            if isinstance(a, Atom):
                if a.system != system:
                    raise DomainError("atom belongs to a different system")
                a = a.index
            if not 0 <= a < system.atom_count:
                raise DomainError(f"atom index {a} out of range")
            mask |= 1 << a
        return cls(system, mask)

    def _check(self, other: "Event") -> None:
        if other.system != self.system:
            raise DomainError("events belong to different systems")

    def __or__(self, other: "Event") -> "Event":
        self._check(other)
        return Event(self.system, self.mask | other.mask)

    def __and__(self, other: "Event") -> "Event":
        self._check(other)
        return Event(self.system, self.mask & other.mask)

    def __sub__(self, other: "Event") -> "Event":
        self._check(other)
        return Event(self.system, self.mask & ~other.mask)

    def __invert__(self) -> "Event":
        return Event(self.system, self.system.full().mask ^ self.mask)

    def complement(self) -> "Event":
        return ~self

    def isdisjoint(self, other: "Event") -> bool:
        self._check(other)
        return self.mask & other.mask == 0

    def issubset(self, other: "Event") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __contains__(self, atom: Atom | int) -> bool:
        index = atom.index if isinstance(atom, Atom) else atom
        return bool(self.mask >> index & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __bool__(self) -> bool:
        return self.mask != 0

    def indices(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def atoms(self) -> list[Atom]:
        return [Atom(self.system, i) for i in self.indices()]

    def atom_strings(self) -> list[str]:
        return [str(a) for a in self.atoms()]

    def __str__(self) -> str:
        return "{" + ", ".join(self.atom_strings()) + "}"
