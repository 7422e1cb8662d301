"""Continued fractions of rationals and the Gauss map ``T(x) = 1/x - floor(1/x)``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from orbitlab.exceptions import DomainError, InvariantViolation

RationalLike = Union[Fraction, int, str]


@dataclass(frozen=True)
class CFEWord:
    """The word ``[a0; a1, ..., ak]``."""

    a0: int
    quotients: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "quotients", tuple(int(a) for a in self.quotients))
        if any(a < 1 for a in self.quotients):
            raise DomainError(f"Partial quotients must be positive, got {self.quotients}")

    def __len__(self) -> int:
        return len(self.quotients)

    def __str__(self) -> str:
        if not self.quotients:
            return f"[{self.a0}]"
        return f"[{self.a0};{','.join(str(a) for a in self.quotients)}]"

    def value(self) -> Fraction:
        return convergents(self)[-1]

    def shift(self) -> "CFEWord":
        """Drop the first partial quotient, the symbolic form of the Gauss map."""
        return CFEWord(0, self.quotients[1:])


def as_rational(x: RationalLike) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _require_unit_interval(x: Fraction) -> None:
    if not 0 < x < 1:
        raise DomainError(f"Expected a rational in (0, 1), got {x}")


def gauss_map(x: RationalLike) -> Fraction:
    x = as_rational(x)
    if x == 0:
        raise DomainError("T is not defined on zero")
    if not 0 < x <= 1:
        raise DomainError(f"The Gauss map acts on (0, 1], got {x}")
    n, m = x.numerator, x.denominator
    return Fraction(m % n, n)


def cfe_of_rational(x: RationalLike) -> CFEWord:
    """Run the Euclidean algorithm on ``x = n/m`` and return ``[0; a1, ..., ak]``."""
    x = as_rational(x)
    _require_unit_interval(x)
    a, b = x.denominator, x.numerator
    quotients = []
    while b:
        q, r = divmod(a, b)
        quotients.append(q)
        a, b = b, r
    return CFEWord(0, tuple(quotients))


def orbit(x: RationalLike) -> list[Fraction]:
    """``[x, T(x), ..., T^(len-1)(x)]``; the terminal 0 is not included."""
    x = as_rational(x)
    _require_unit_interval(x)
    points = []
    while x != 0:
        points.append(x)
        x = gauss_map(x)
    return points


def cfe_len(x: RationalLike) -> int:
    euclid = len(cfe_of_rational(x))
    iterated = len(orbit(x))
    if euclid != iterated:
        raise InvariantViolation(
            f"Euclid step count {euclid} differs from Gauss orbit length {iterated} for {x}"
        )
    return euclid


def convergents(word: CFEWord) -> list[Fraction]:
    """Convergents ``p_j/q_j`` for ``j = 1..k``; a bare ``[a0]`` gives ``[a0/1]``."""
    if not word.quotients:
        return [Fraction(word.a0)]
    p_prev, p = 1, word.a0
    q_prev, q = 0, 1
    result = []
    for a in word.quotients:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        result.append(Fraction(p, q))
    return result
