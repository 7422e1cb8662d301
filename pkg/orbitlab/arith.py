"""Elementary number theory: factorization, totient, Möbius, coprime counting and CRT.

Everything here is exact. Intervals are half-open ``[lo, hi)`` with rational
endpoints, so the number of integers they contain is unambiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterator, Sequence

from orbitlab.exceptions import DomainError


@dataclass(frozen=True)
class Factorization:
    modulus: int
    """The factored positive integer."""
    prime_powers: tuple[tuple[int, int], ...]
    """Pairs ``(p, k)`` with primes strictly increasing and ``k >= 1``."""

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.prime_powers)

    @property
    def omega(self) -> int:
        return len(self.prime_powers)

    def prime_power_moduli(self) -> tuple[int, ...]:
        """The pairwise coprime factors ``p**k`` whose product is the modulus."""
        return tuple(p**k for p, k in self.prime_powers)


@dataclass(frozen=True)
class IntInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"Interval endpoints out of order: [{self.lo}, {self.hi})")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def multiples(self, d: int) -> int:
        """Number of multiples of ``d`` in ``[lo, hi)``."""
        return math.ceil(self.hi / d) - math.ceil(self.lo / d)

    def integers(self) -> range:
        return range(math.ceil(self.lo), math.ceil(self.hi))


@dataclass(frozen=True)
class CoprimeBound:
    """Both sides of ``| |Λ*_m ∩ I| - φ(m)/m·|I| | <= 2^ω(m)``, evaluated exactly."""

    count: int
    expected: Fraction
    slack: Fraction
    bound: int

    @property
    def holds(self) -> bool:
        return self.slack <= self.bound


def _require_positive(m: int, name: str = "m") -> None:
    if m < 1:
        raise DomainError(f"{name} must be a positive integer, got {m}")


@lru_cache(maxsize=65536)
def factorize(m: int) -> Factorization:
    """Factor ``m`` by trial division up to ``isqrt(m)``."""
    _require_positive(m)
    remaining = m
    prime_powers: list[tuple[int, int]] = []
    p = 2
    while p * p <= remaining:
        if remaining % p == 0:
            k = 0
            while remaining % p == 0:
                remaining //= p
                k += 1
            prime_powers.append((p, k))
        p += 1 if p == 2 else 2
    if remaining > 1:
        prime_powers.append((remaining, 1))
    return Factorization(modulus=m, prime_powers=tuple(prime_powers))


def euler_phi(m: int) -> int:
    phi = m
    for p, _ in factorize(m).prime_powers:
        phi = phi // p * (p - 1)
    return phi


def omega(m: int) -> int:
    return factorize(m).omega


def moebius(n: int) -> int:
    fac = factorize(n)
    if any(k > 1 for _, k in fac.prime_powers):
        return 0
    return -1 if fac.omega % 2 else 1


def squarefree_divisors(m: int) -> Iterator[tuple[int, int]]:
    """Yield ``(d, moebius(d))`` for every squarefree divisor ``d`` of ``m``."""
    divisors = [(1, 1)]
    for p in factorize(m).primes:
        divisors += [(d * p, -mu) for d, mu in divisors]
    yield from divisors


def coprime_residues(m: int) -> list[int]:
    """Λ_m: the residues ``1 <= n <= m`` with ``gcd(n, m) == 1``."""
    _require_positive(m)
    return [n for n in range(1, m + 1) if math.gcd(n, m) == 1]


def coprime_count(m: int, interval: IntInterval) -> int:
    """Count integers in ``interval`` coprime to ``m`` by inclusion-exclusion."""
    _require_positive(m)
    return sum(mu * interval.multiples(d) for d, mu in squarefree_divisors(m))


def brute_force_coprime_count(m: int, interval: IntInterval) -> int:
    _require_positive(m)
    return sum(1 for n in interval.integers() if math.gcd(n, m) == 1)


def coprime_bound_holds(m: int, interval: IntInterval) -> CoprimeBound:
    count = coprime_count(m, interval)
    expected = Fraction(euler_phi(m), m) * interval.length
    return CoprimeBound(
        count=count,
        expected=expected,
        slack=abs(count - expected),
        bound=2 ** omega(m),
    )


def crt_combine(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Return the residue modulo ``prod(moduli)`` matching every congruence."""
    if len(residues) != len(moduli):
        raise DomainError(
            f"Got {len(residues)} residues for {len(moduli)} moduli"
        )
    for i, a in enumerate(moduli):
        _require_positive(a, "modulus")
        for b in moduli[i + 1:]:
            if math.gcd(a, b) != 1:
                raise DomainError(
                    f"Moduli {a} and {b} share the factor {math.gcd(a, b)}; "
                    "the Chinese remainder theorem needs pairwise coprime moduli"
                )

    def _step(acc: tuple[int, int], item: tuple[int, int]) -> tuple[int, int]:
        r, n = acc
        s, q = item
        t = ((s - r) * pow(n, -1, q)) % q if q > 1 else 0
        return r + n * t, n * q

    r, n = reduce(_step, zip(residues, moduli), (0, 1))
    return r % n


def totient_growth_threshold(eps: Fraction, m_max: int) -> int:
    """Smallest ``M`` with ``φ(m) >= m^(1 - eps)`` for every ``M <= m <= m_max``.

    The comparison is made exactly as ``φ(m)^q >= m^(q - p)`` for ``eps = p/q``.
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    p, q = eps.numerator, eps.denominator
    threshold = 1
    for m in range(1, m_max + 1):
        if euler_phi(m) ** q < m ** (q - p):
            threshold = m + 1
    return threshold
