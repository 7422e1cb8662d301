"""Finitely supported probability measures on [0, 1] and their distance to the Gauss measure.

Atom positions and weights are exact rationals. Only the comparison with the
Gauss CDF ``F(x) = log2(1 + x)`` goes through floating point.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from orbitlab.arith import coprime_residues
from orbitlab.cfe import RationalLike, cfe_of_rational, orbit
from orbitlab.exceptions import DomainError, InvariantViolation

KUZMIN_KMAX = 30
TV_BINS = 64


class FamilyMode(str, Enum):
    ORBIT_UNIFORM = "orbit_uniform"
    """Each orbit n/m carries mass 1/φ(m), spread uniformly along the orbit."""
    POINT_UNIFORM = "point_uniform"
    """Every orbit point of every n/m carries the same mass."""


@dataclass(frozen=True)
class EmpiricalMeasure:
    atoms: tuple[tuple[Fraction, Fraction], ...]
    """``(position, weight)`` pairs, positions strictly increasing."""

    def __post_init__(self) -> None:
        positions = [x for x, _ in self.atoms]
        if any(a >= b for a, b in zip(positions, positions[1:])):
            raise InvariantViolation("Atom positions must be strictly increasing")
        if any(not 0 <= x <= 1 for x in positions):
            raise DomainError("Atom positions must lie in [0, 1]")
        if any(w < 0 for _, w in self.atoms):
            raise DomainError("Atom weights must be nonnegative")
        total = sum((w for _, w in self.atoms), Fraction(0))
        if total != 1:
            raise InvariantViolation(f"Atom weights sum to {total}, not 1")

    @classmethod
    def from_weighted_points(
        cls, points: Iterable[tuple[Fraction, Fraction]]
    ) -> "EmpiricalMeasure":
        """Merge duplicate positions, summing their weights."""
        merged: dict[Fraction, Fraction] = defaultdict(Fraction)
        for x, w in points:
            merged[Fraction(x)] += Fraction(w)
        return cls(atoms=tuple(sorted(merged.items())))

    @classmethod
    def uniform(cls, points: Sequence[Fraction]) -> "EmpiricalMeasure":
        if not points:
            raise DomainError("Cannot build a uniform measure on no points")
        w = Fraction(1, len(points))
        return cls.from_weighted_points((x, w) for x in points)

    @property
    def positions(self) -> list[Fraction]:
        return [x for x, _ in self.atoms]

    @property
    def weights(self) -> list[Fraction]:
        return [w for _, w in self.atoms]

    def weight_of(self, x: RationalLike) -> Fraction:
        return dict(self.atoms).get(Fraction(x), Fraction(0))

    def cdf(self, x: RationalLike) -> Fraction:
        """``mu([0, x])``."""
        x = Fraction(x)
        return sum((w for p, w in self.atoms if p <= x), Fraction(0))


@dataclass
class DigitHistogram:
    kmax: int = KUZMIN_KMAX
    counts: Counter[int] = field(default_factory=Counter)
    """Count of each partial quotient ``1 <= k <= kmax``."""
    tail: int = 0
    """Count of partial quotients above ``kmax``."""

    @property
    def total(self) -> int:
        return sum(self.counts.values()) + self.tail

    def add(self, digit: int) -> None:
        if digit > self.kmax:
            self.tail += 1
        else:
            self.counts[digit] += 1

    def merge(self, other: "DigitHistogram") -> None:
        if other.kmax != self.kmax:
            raise DomainError("Cannot merge histograms with different tail buckets")
        self.counts.update(other.counts)
        self.tail += other.tail

    def frequency(self, digit: int) -> float:
        if self.total == 0:
            return 0.0
        count = self.tail if digit > self.kmax else self.counts[digit]
        return count / self.total


@dataclass
class KuzminReport:
    histogram: DigitHistogram
    reference: dict[int, float]
    """Reference frequency per digit ``1..kmax``."""
    reference_tail: float


def orbit_measure(x: RationalLike) -> EmpiricalMeasure:
    """ν_x: the uniform probability measure on the Gauss orbit of ``x``."""
    return EmpiricalMeasure.uniform(orbit(x))


def _family_points(
    m: int, ns: Iterable[int], mode: FamilyMode
) -> list[tuple[Fraction, Fraction]]:
    orbits = [orbit(Fraction(n, m)) for n in ns]
    if not orbits:
        raise DomainError(f"Empty family of numerators for m={m}")
    if mode == FamilyMode.ORBIT_UNIFORM:
        return [
            (x, Fraction(1, len(orb) * len(orbits))) for orb in orbits for x in orb
        ]
    total = sum(len(orb) for orb in orbits)
    return [(x, Fraction(1, total)) for orb in orbits for x in orb]


def family_average(m: int, mode: FamilyMode | str = FamilyMode.ORBIT_UNIFORM) -> EmpiricalMeasure:
    """ν_m (``orbit_uniform``) or ν̃_m (``point_uniform``) over n ∈ Λ_m."""
    if m < 2:
        raise DomainError(f"family_average needs m >= 2, got {m}")
    mode = FamilyMode(mode)
    return EmpiricalMeasure.from_weighted_points(
        _family_points(m, coprime_residues(m), mode)
    )


def subfamily_average(
    m: int, ns: Sequence[int], mode: FamilyMode | str = FamilyMode.ORBIT_UNIFORM
) -> EmpiricalMeasure:
    """The same average restricted to a subset of Λ_m."""
    allowed = set(coprime_residues(m))
    stray = [n for n in ns if n not in allowed or n == m]
    if stray:
        raise DomainError(f"Numerators {stray} are not units in (0, 1) for m={m}")
    return EmpiricalMeasure.from_weighted_points(
        _family_points(m, ns, FamilyMode(mode))
    )


def gauss_cdf(x: ArrayLike) -> NDArray[np.float64] | float:
    """``log2(1 + x)`` on [0, 1]."""
    values = np.log2(1.0 + np.asarray(x, dtype=np.float64))
    return float(values) if values.ndim == 0 else values


def gauss_quantile(u: ArrayLike) -> NDArray[np.float64] | float:
    values = np.exp2(np.asarray(u, dtype=np.float64)) - 1.0
    return float(values) if values.ndim == 0 else values


def kolmogorov_distance(mu: EmpiricalMeasure) -> float:
    """``sup_x |F_mu(x) - log2(1 + x)|``.

    Between atoms ``F_mu`` is constant while the Gauss CDF increases, so the
    supremum is attained at an atom, from one side or the other.
    """
    positions = np.array([float(x) for x in mu.positions])
    right = np.array([float(c) for c in accumulate(mu.weights)])
    left = np.concatenate(([0.0], right[:-1]))
    target = np.log2(1.0 + positions)
    return float(max(np.max(np.abs(right - target)), np.max(np.abs(left - target))))


def binned_tv_distance(mu: EmpiricalMeasure, bins: int = TV_BINS) -> float:
    edges = np.linspace(0.0, 1.0, bins + 1)
    observed, _ = np.histogram(
        [float(x) for x in mu.positions],
        bins=edges,
        weights=[float(w) for w in mu.weights],
    )
    expected = np.diff(np.log2(1.0 + edges))
    return 0.5 * float(np.sum(np.abs(observed - expected)))


def near_gauss_fraction(m: int, threshold: float) -> float:
    """Fraction of n ∈ Λ_m whose own ν_{n/m} is within ``threshold`` of Gauss."""
    ns = [n for n in coprime_residues(m) if n < m]
    if not ns:
        raise DomainError(f"No numerators in (0, 1) for m={m}")
    close = sum(
        1 for n in ns if kolmogorov_distance(orbit_measure(Fraction(n, m))) <= threshold
    )
    return close / len(ns)


def gauss_kuzmin_frequency(k: int) -> float:
    """``log2(1 + 1/(k(k+2)))``, the literature value of the digit law."""
    if k < 1:
        raise DomainError(f"Digits are positive, got {k}")
    return math.log2(1.0 + 1.0 / (k * (k + 2)))


def gauss_kuzmin_tail(kmax: int) -> float:
    """Reference mass of all digits above ``kmax``."""
    return math.log2((kmax + 2) / (kmax + 1))


def kuzmin_histogram(m_range: Sequence[int], kmax: int = KUZMIN_KMAX) -> KuzminReport:
    if not m_range:
        raise DomainError("kuzmin_histogram needs a nonempty range of m")
    histogram = DigitHistogram(kmax=kmax)
    for m in m_range:
        histogram.merge(digit_histogram(m, kmax))
    return KuzminReport(
        histogram=histogram,
        reference={k: gauss_kuzmin_frequency(k) for k in range(1, kmax + 1)},
        reference_tail=gauss_kuzmin_tail(kmax),
    )


def digit_histogram(m: int, kmax: int = KUZMIN_KMAX) -> DigitHistogram:
    """Partial quotients of every n/m with n ∈ Λ_m, 0 < n/m < 1."""
    histogram = DigitHistogram(kmax=kmax)
    for n in coprime_residues(m):
        if n == m:
            continue
        for digit in cfe_of_rational(Fraction(n, m)).quotients:
            histogram.add(digit)
    return histogram


def mixture(
    components: Sequence[tuple[Fraction, EmpiricalMeasure]],
) -> EmpiricalMeasure:
    """Convex combination over ``(c, mu)`` pairs; the coefficients must sum to 1."""
    return EmpiricalMeasure.from_weighted_points(
        (x, c * w) for c, mu in components for x, w in mu.atoms
    )
