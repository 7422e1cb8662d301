"""Exact rank-2 lattices ``√scale_sq · Z²·B`` in the row-vector convention.

A lattice is kept in canonical form: the basis is divided by its content and
brought to Hermite normal form, and the content is absorbed into
``scale_sq``. Equal lattices therefore compare (and hash) equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors
from sympy.polys.domains import ZZ

from orbitlab.arith import coprime_residues
from orbitlab.exceptions import DomainError, InvariantViolation
from orbitlab.logger import logger

IntBasis = tuple[tuple[int, int], tuple[int, int]]
FracMat = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


def _det(b: Sequence[Sequence[int | Fraction]]) -> int | Fraction:
    return b[0][0] * b[1][1] - b[0][1] * b[1][0]


def _row_hnf(basis: IntBasis) -> IntBasis:
    # Column-style HNF of the transpose spans the same row lattice.
    h = hermite_normal_form(Matrix(basis).T).T
    return (
        (int(h[0, 0]), int(h[0, 1])),
        (int(h[1, 0]), int(h[1, 1])),
    )


def _rational_sqrt(q: Fraction) -> Fraction | None:
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


@dataclass(frozen=True)
class ScaledLattice2:
    basis: IntBasis
    """Rows generate the integer part of the lattice."""
    scale_sq: Fraction

    def __post_init__(self) -> None:
        basis = tuple(tuple(int(v) for v in row) for row in self.basis)
        if len(basis) != 2 or any(len(row) != 2 for row in basis):
            raise DomainError(f"Expected a 2x2 basis, got {self.basis}")
        if _det(basis) == 0:
            raise DomainError(f"Basis {basis} is degenerate")
        scale_sq = Fraction(self.scale_sq)
        if scale_sq <= 0:
            raise DomainError(f"scale_sq must be positive, got {scale_sq}")
        content = math.gcd(*(v for row in basis for v in row))
        basis = tuple(tuple(v // content for v in row) for row in basis)
        object.__setattr__(self, "basis", _row_hnf(basis))
        object.__setattr__(self, "scale_sq", scale_sq * content * content)

    @property
    def covolume(self) -> Fraction:
        return self.scale_sq * abs(_det(self.basis))

    def scale(self) -> float:
        return math.sqrt(self.scale_sq)

    def times(self, g: Sequence[Sequence[int]], scale_sq_factor: Fraction = Fraction(1)) -> "ScaledLattice2":
        """``L·(√scale_sq_factor · g)`` for an integer matrix ``g``."""
        (a, b), (c, d) = g
        rows = tuple((x * a + y * c, x * b + y * d) for x, y in self.basis)
        return ScaledLattice2(rows, self.scale_sq * scale_sq_factor)

    def coordinates(self, vector: Sequence[Fraction | int]) -> tuple[Fraction, Fraction] | None:
        """Integer-basis coefficients of ``vector``, or None when the scale is irrational."""
        root = _rational_sqrt(self.scale_sq)
        if root is None:
            return None
        (a, b), (c, d) = self.basis
        det = Fraction(_det(self.basis))
        x, y = (Fraction(v) / root for v in vector)
        return (x * d - y * c) / det, (-x * b + y * a) / det

    def contains(self, vector: Sequence[Fraction | int]) -> bool:
        coords = self.coordinates(vector)
        if coords is None:
            raise DomainError(
                f"Membership of rational vectors needs a rational scale, scale_sq={self.scale_sq}"
            )
        return all(c.denominator == 1 for c in coords)


def _require_unit(n: int, m: int) -> None:
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if not 1 <= n <= m:
        raise DomainError(f"Need 1 <= n <= m, got n={n}, m={m}")
    if math.gcd(n, m) != 1:
        raise DomainError(f"gcd({n}, {m}) = {math.gcd(n, m)}; n must be a unit mod m")


def make_Lnm(n: int, m: int) -> ScaledLattice2:
    """L_{n/m} = span{(0, 1), (1, n/m)} = (1/m)·span{(0, m), (m, n)}."""
    _require_unit(n, m)
    return ScaledLattice2(((0, m), (m, n)), Fraction(1, m * m))


def make_Lm(m: int) -> ScaledLattice2:
    """L_m = span{(0, 1), (m, 0)}."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    return ScaledLattice2(((0, 1), (m, 0)), Fraction(1))


def standard_lattice(scale_sq: Fraction | int = 1) -> ScaledLattice2:
    return ScaledLattice2(((1, 0), (0, 1)), Fraction(scale_sq))


def _inclusion_matrix(sub: ScaledLattice2, sup: ScaledLattice2) -> FracMat:
    ratio = _rational_sqrt(sub.scale_sq / sup.scale_sq)
    if ratio is None:
        raise DomainError(
            f"Scales {sub.scale_sq} and {sup.scale_sq} differ by an irrational factor"
        )
    (a, b), (c, d) = sup.basis
    det = Fraction(_det(sup.basis))
    inverse = ((d / det, -b / det), (-c / det, a / det))
    return tuple(
        tuple(
            ratio * (row[0] * inverse[0][j] + row[1] * inverse[1][j]) for j in range(2)
        )
        for row in sub.basis
    )


def is_sublattice(sub: ScaledLattice2, sup: ScaledLattice2) -> bool:
    return all(
        v.denominator == 1 for row in _inclusion_matrix(sub, sup) for v in row
    )


def _integral_inclusion(sub: ScaledLattice2, sup: ScaledLattice2) -> tuple[tuple[int, int], ...]:
    x = _inclusion_matrix(sub, sup)
    if any(v.denominator != 1 for row in x for v in row):
        raise DomainError("The first lattice is not contained in the second")
    return tuple(tuple(int(v) for v in row) for row in x)


def index(sub: ScaledLattice2, sup: ScaledLattice2) -> int:
    """``[sup : sub]`` as the absolute determinant of the inclusion matrix."""
    return abs(_det(_integral_inclusion(sub, sup)))


def quotient_invariants(sub: ScaledLattice2, sup: ScaledLattice2) -> tuple[int, ...]:
    """Invariant factors ``d1 | d2`` with ``sup/sub ≅ Z/d1 × Z/d2``."""
    factors = invariant_factors(Matrix(_integral_inclusion(sub, sup)), domain=ZZ)
    return tuple(abs(int(f)) for f in factors)


def quotient_is_cyclic(sub: ScaledLattice2, sup: ScaledLattice2) -> bool:
    return quotient_invariants(sub, sup)[0] == 1


def apply_a_power(lattice: ScaledLattice2, m: int, j: int = 1) -> ScaledLattice2:
    """Right multiplication by ``a(j·ln m)``.

    ``a(ln m) = m^{-1/2}·diag(1, m)`` and ``a(-ln m) = m^{-1/2}·diag(m, 1)``.
    """
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    power = m ** abs(j)
    g = ((1, 0), (0, power)) if j >= 0 else ((power, 0), (0, 1))
    return lattice.times(g, Fraction(1, power))


def apply_a_ln_m(lattice: ScaledLattice2, m: int) -> ScaledLattice2:
    return apply_a_power(lattice, m, 1)


def tau_mirror(lattice: ScaledLattice2) -> ScaledLattice2:
    return lattice.times(((0, 1), (1, 0)))


@lru_cache(maxsize=256)
def _stretched_family(m: int) -> dict[ScaledLattice2, int]:
    return {apply_a_ln_m(make_Lnm(n, m), m): n for n in coprime_residues(m)}


def find_mirror_index(n: int, m: int) -> int:
    """The n′ ∈ Λ_m with ``τ(L_{n/m}·a(ln m)) = L_{n′/m}·a(ln m)``."""
    _require_unit(n, m)
    mirrored = tau_mirror(apply_a_ln_m(make_Lnm(n, m), m))
    try:
        return _stretched_family(m)[mirrored]
    except KeyError:
        raise InvariantViolation(
            f"No lattice in the family m={m} mirrors L_{{{n}/{m}}}·a(ln m)"
        ) from None


def mirror_table(m: int) -> dict[int, int]:
    table = {n: find_mirror_index(n, m) for n in coprime_residues(m)}
    for n, n_prime in table.items():
        if table[n_prime] != n:
            raise InvariantViolation(
                f"Mirror map is not an involution for m={m}: {n} -> {n_prime} -> {table[n_prime]}"
            )
    return table


def mirror_residue(m: int) -> int:
    """The common value of ``n·n′ mod m`` over Λ_m."""
    residues = {n * n_prime % m for n, n_prime in mirror_table(m).items()}
    if len(residues) != 1:
        raise InvariantViolation(
            f"n·n′ mod {m} takes several values {sorted(residues)}"
        )
    residue = residues.pop()
    logger.debug(f"Mirror residue for m={m}: {residue}")
    return residue


def congruence_lattice(m: int) -> ScaledLattice2:
    """``{(k1, k2) ∈ Z² : k1 + k2 ≡ 0 mod m}``.

    The rows ``(m, 0)`` and ``(-1, 1)`` are the transpose of the generator
    ``diag(m, 1)·u_{-1/m}``, which describes the set in the column convention.
    """
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    return ScaledLattice2(((m, 0), (-1, 1)), Fraction(1))


def time_reflection_check(n: int, m: int, j: int = 0) -> bool:
    """``τ(L_{n/m}·a((1+j)·ln m)) = L_{n′/m}·a((1-j)·ln m)``."""
    n_prime = find_mirror_index(n, m)
    lhs = tau_mirror(apply_a_power(make_Lnm(n, m), m, 1 + j))
    return lhs == apply_a_power(make_Lnm(n_prime, m), m, 1 - j)


def cusp_return_check(m: int) -> bool:
    """``L_m·a(2 ln m) = τ(L_m)`` and ``L_m·a(ln m) = √m·Z²``."""
    lattice = make_Lm(m)
    return (
        apply_a_power(lattice, m, 2) == tau_mirror(lattice)
        and apply_a_ln_m(lattice, m) == standard_lattice(m)
    )
