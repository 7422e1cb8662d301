"""Truncated m-adic numbers, 2x2 matrices over Q_p and the finite-place reductions.

A :class:`PadicNum` stores ``base**val_offset * residue`` where ``residue`` is
known modulo ``base**(precision - lost)``. Normalization strips factors of the
base from the residue; every stripped factor moves one digit out of the known
window and is counted in ``lost``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

from orbitlab.arith import coprime_residues, crt_combine, euler_phi, factorize
from orbitlab.cfe import RationalLike, as_rational
from orbitlab.exceptions import DomainError, InvariantViolation, PrecisionError
from orbitlab.hyperbolic import RealMat2, iwasawa_real, unipotent
from orbitlab.logger import logger

DEFAULT_PRECISION = 64
DET_TOLERANCE = 1e-9


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    fac = factorize(n)
    return fac.prime_powers == ((n, 1),)


def valuation(q: RationalLike, p: int) -> int | float:
    """``v_p(q)`` of a rational; ``math.inf`` for zero."""
    q = as_rational(q)
    if q == 0:
        return math.inf
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def rational_norm(q: RationalLike, p: int) -> Fraction:
    """``|q|_p = p^{-v_p(q)}``, exactly."""
    v = valuation(q, p)
    if v == math.inf:
        return Fraction(0)
    return Fraction(p) ** -int(v)


Coercible = Union["PadicNum", int, Fraction]


@dataclass(frozen=True)
class PadicNum:
    base: int
    val_offset: int
    residue: int
    """Unit-or-nonzero-leading-digit part, reduced modulo ``base**(precision - lost)``."""
    precision: int
    lost: int = 0
    """Digits at the top of the window that are no longer known."""

    @classmethod
    def make(
        cls, base: int, val_offset: int, residue: int, precision: int, lost: int = 0
    ) -> "PadicNum":
        """Normalize and build."""
        if base < 2:
            raise DomainError(f"base must be at least 2, got {base}")
        if precision < 1:
            raise DomainError(f"precision must be positive, got {precision}")
        lost = min(max(lost, 0), precision)
        residue %= base ** (precision - lost)
        while residue and residue % base == 0 and lost < precision:
            residue //= base
            val_offset += 1
            lost += 1
        if lost >= precision:
            residue = 0
        return cls(base, val_offset, residue, precision, lost)

    @classmethod
    def zero(cls, base: int, precision: int = DEFAULT_PRECISION) -> "PadicNum":
        """Exact zero, stored with offset ``precision`` so sums keep the other operand's digits."""
        return cls.make(base, precision, 0, precision)

    @classmethod
    def one(cls, base: int, precision: int = DEFAULT_PRECISION) -> "PadicNum":
        return cls.make(base, 0, 1, precision)

    @property
    def digits(self) -> list[int]:
        """``precision`` digits, least significant first; unknown digits read as 0."""
        out, r = [], self.residue
        for _ in range(self.precision):
            r, d = divmod(r, self.base)
            out.append(d)
        return out

    @property
    def absolute_precision(self) -> int:
        """The value is known modulo ``base**absolute_precision``."""
        return self.val_offset + self.precision - self.lost

    def is_zero(self) -> bool:
        return self.residue == 0

    def val(self) -> int | float:
        """``val_m``; ``math.inf`` when every known digit is zero."""
        return math.inf if self.is_zero() else self.val_offset

    def val_lower_bound(self) -> int:
        """For a zero residue the valuation is only known to be at least this."""
        return self.val_offset if not self.is_zero() else self.absolute_precision

    def norm(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.base) ** -self.val_offset

    def is_unit(self) -> bool:
        return (
            not self.is_zero()
            and self.val_offset == 0
            and math.gcd(self.residue % self.base, self.base) == 1
        )

    def _coerce(self, other: Coercible) -> "PadicNum":
        if isinstance(other, PadicNum):
            if other.base != self.base or other.precision != self.precision:
                raise DomainError(
                    f"Mixed arithmetic between base {self.base}/N={self.precision} "
                    f"and base {other.base}/N={other.precision}"
                )
            return other
        return from_rational(other, self.base, self.precision)

    def __add__(self, other: Coercible) -> "PadicNum":
        other = self._coerce(other)
        low = min(self.val_offset, other.val_offset)
        known = min(self.absolute_precision, other.absolute_precision) - low
        if known <= 0:
            return PadicNum.make(self.base, low, 0, self.precision, self.precision)
        residue = (
            self.residue * self.base ** (self.val_offset - low)
            + other.residue * self.base ** (other.val_offset - low)
        )
        return PadicNum.make(
            self.base, low, residue, self.precision, self.precision - min(known, self.precision)
        )

    __radd__ = __add__

    def __neg__(self) -> "PadicNum":
        return PadicNum.make(self.base, self.val_offset, -self.residue, self.precision, self.lost)

    def __sub__(self, other: Coercible) -> "PadicNum":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Coercible) -> "PadicNum":
        return self._coerce(other) - self

    def __mul__(self, other: Coercible) -> "PadicNum":
        other = self._coerce(other)
        return PadicNum.make(
            self.base,
            self.val_offset + other.val_offset,
            self.residue * other.residue,
            self.precision,
            max(self.lost, other.lost),
        )

    __rmul__ = __mul__

    def inv(self) -> "PadicNum":
        """Digit-by-digit inverse of the unit part.

        A number ``a0 + a1·m + ...`` is invertible in Z_m if and only if
        ``gcd(a0, m) = 1``.
        """
        if self.is_zero():
            raise DomainError("Zero has no inverse")
        a0 = self.residue % self.base
        if math.gcd(a0, self.base) != 1:
            raise DomainError(
                f"Leading digit {a0} shares a factor with base {self.base}; "
                "an m-adic number is invertible iff (a0, m) = 1"
            )
        inv0 = pow(a0, -1, self.base)
        known = self.precision - self.lost
        b, modulus = 0, 1
        for _ in range(known):
            carry = ((1 - self.residue * b) // modulus) % self.base
            b += (carry * inv0 % self.base) * modulus
            modulus *= self.base
        return PadicNum.make(self.base, -self.val_offset, b, self.precision, self.lost)

    def __truediv__(self, other: Coercible) -> "PadicNum":
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other: Coercible) -> "PadicNum":
        return self._coerce(other) * self.inv()

    def agrees_with(self, other: Coercible) -> bool:
        """Equality modulo the common absolute precision."""
        return (self - self._coerce(other)).is_zero()

    def residue_mod(self, k: int) -> int:
        """The integer congruent to this number modulo ``base**k``."""
        if self.is_zero():
            if self.absolute_precision < k:
                raise PrecisionError(
                    f"Value known only mod {self.base}^{self.absolute_precision}, asked mod {self.base}^{k}"
                )
            return 0
        if self.val_offset < 0:
            raise DomainError(f"{self} is not integral; no residue mod {self.base}^{k}")
        if self.absolute_precision < k:
            raise PrecisionError(
                f"Value known only mod {self.base}^{self.absolute_precision}, asked mod {self.base}^{k}"
            )
        return self.residue * self.base**self.val_offset % self.base**k

    def __str__(self) -> str:
        if self.is_zero():
            return f"O({self.base}^{self.absolute_precision})"
        shown = " ".join(str(d) for d in self.digits[:10])
        return f"({shown} ...)_{self.base} * {self.base}^{self.val_offset}"


def from_rational(q: RationalLike, base: int, precision: int = DEFAULT_PRECISION) -> PadicNum:
    """Expand a rational in base ``base`` to ``precision`` digits.

    A prime base accepts any rational; a composite base needs a denominator
    coprime to it.
    """
    q = as_rational(q)
    if q == 0:
        return PadicNum.zero(base, precision)
    num, den = q.numerator, q.denominator
    offset = 0
    if is_prime(base):
        while den % base == 0:
            den //= base
            offset -= 1
    elif math.gcd(den, base) != 1:
        raise DomainError(
            f"{q} is not in Z_{base}: its denominator shares the factor "
            f"{math.gcd(den, base)} with the base"
        )
    while num % base == 0:
        num //= base
        offset += 1
    modulus = base**precision
    return PadicNum.make(base, offset, num * pow(den, -1, modulus), precision)


def crt_split(a: PadicNum) -> dict[int, PadicNum]:
    """Components of ``a ∈ Q_m`` in ``Q_p`` for each ``p^k ‖ m``; component precision ``k·N``."""
    components: dict[int, PadicNum] = {}
    for p, k in factorize(a.base).prime_powers:
        digits = k * a.precision
        unit = a.base // p**k
        residue = a.residue * pow(unit, a.val_offset, p**digits)
        components[p] = PadicNum.make(p, k * a.val_offset, residue, digits, k * a.lost)
    return components


def crt_merge(components: Mapping[int, PadicNum], base: int, precision: int) -> PadicNum:
    fac = factorize(base)
    if set(components) != set(fac.primes):
        raise DomainError(
            f"Components for primes {sorted(components)} do not match base {base}"
        )
    nonzero = [
        math.floor(components[p].val_offset / k)
        for p, k in fac.prime_powers
        if not components[p].is_zero()
    ]
    if not nonzero:
        return PadicNum.zero(base, precision)
    v = min(nonzero)
    scaled = {
        p: components[p] * from_rational(Fraction(base) ** -v, p, components[p].precision)
        for p in fac.primes
    }
    known = min(
        precision,
        *(scaled[p].absolute_precision // k for p, k in fac.prime_powers),
    )
    if known <= 0:
        return PadicNum.make(base, v, 0, precision, precision)
    residues = [scaled[p].residue_mod(k * known) for p, k in fac.prime_powers]
    moduli = [p ** (k * known) for p, k in fac.prime_powers]
    return PadicNum.make(base, v, crt_combine(residues, moduli), precision, precision - known)


def product_formula_check(q: RationalLike) -> Fraction:
    """``|q|_∞ · ∏_p |q|_p`` over the primes dividing numerator and denominator."""
    q = as_rational(q)
    if q == 0:
        raise DomainError("The product formula is stated for nonzero rationals")
    primes = set(factorize(abs(q.numerator)).primes) | set(factorize(q.denominator).primes)
    product = abs(q)
    for p in sorted(primes):
        product *= rational_norm(q, p)
    return product


# ============================================================================
# Matrices over Q_p
# ============================================================================


@dataclass(frozen=True)
class PadicMat2:
    a: PadicNum
    b: PadicNum
    c: PadicNum
    d: PadicNum

    def __post_init__(self) -> None:
        shapes = {(e.base, e.precision) for e in self.entries}
        if len(shapes) != 1:
            raise DomainError(f"Matrix entries mix bases or precisions: {sorted(shapes)}")

    @property
    def entries(self) -> tuple[PadicNum, PadicNum, PadicNum, PadicNum]:
        return self.a, self.b, self.c, self.d

    @property
    def base(self) -> int:
        return self.a.base

    @property
    def precision(self) -> int:
        return self.a.precision

    def __matmul__(self, other: "PadicMat2") -> "PadicMat2":
        return PadicMat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self) -> PadicNum:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "PadicMat2":
        det = self.det()
        if det.is_zero():
            raise DomainError("Singular matrix has no inverse")
        inv = det.inv()
        return PadicMat2(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def agrees_with(self, other: "PadicMat2") -> bool:
        return all(x.agrees_with(y) for x, y in zip(self.entries, other.entries))

    @classmethod
    def from_rationals(
        cls, rows: tuple[tuple[RationalLike, RationalLike], tuple[RationalLike, RationalLike]],
        p: int,
        precision: int = DEFAULT_PRECISION,
    ) -> "PadicMat2":
        (a, b), (c, d) = rows
        return cls(*(from_rational(v, p, precision) for v in (a, b, c, d)))

    @classmethod
    def identity(cls, p: int, precision: int = DEFAULT_PRECISION) -> "PadicMat2":
        return cls.from_rationals(((1, 0), (0, 1)), p, precision)

    @classmethod
    def diag(cls, alpha: PadicNum, beta: PadicNum) -> "PadicMat2":
        zero = PadicNum.zero(alpha.base, alpha.precision)
        return cls(alpha, zero, zero, beta)

    @classmethod
    def unipotent(cls, x: PadicNum) -> "PadicMat2":
        one = PadicNum.one(x.base, x.precision)
        return cls(one, x, PadicNum.zero(x.base, x.precision), one)


def _require_prime_base(g: PadicMat2) -> None:
    if not is_prime(g.base):
        raise DomainError(f"Expected a matrix over Q_p, got base {g.base}")


def is_GL2_Zp(g: PadicMat2) -> bool:
    """Integral entries and a unit determinant, decided at working precision."""
    _require_prime_base(g)
    for entry in g.entries:
        if entry.is_zero():
            if entry.absolute_precision < 0:
                raise PrecisionError(
                    f"Cannot decide integrality: entry known only mod {g.base}^{entry.absolute_precision}"
                )
        elif entry.val_offset < 0:
            return False
    det = g.det()
    if det.is_zero():
        raise PrecisionError(
            f"Determinant vanishes mod {g.base}^{det.absolute_precision}; increase the precision"
        )
    return det.val_offset == 0


@dataclass(frozen=True)
class IwasawaP:
    """``g = diag·unip·k`` with ``k ∈ GL2(Z_p)``."""

    diag: PadicMat2
    unip: PadicMat2
    k: PadicMat2

    def reconstruct(self) -> PadicMat2:
        return self.diag @ self.unip @ self.k


def iwasawa_p(g: PadicMat2) -> IwasawaP:
    _require_prime_base(g)
    if g.det().is_zero():
        raise DomainError("Iwasawa decomposition of a singular matrix")
    identity = PadicMat2.identity(g.base, g.precision)
    if is_GL2_Zp(g):
        return IwasawaP(identity, identity, g)
    one = PadicNum.one(g.base, g.precision)
    zero = PadicNum.zero(g.base, g.precision)
    if g.c.val() >= g.d.val():
        k = PadicMat2(one, zero, g.c / g.d, one)
    else:
        k = PadicMat2(zero, -one, one, g.d / g.c)
    upper = g @ k.inverse()
    alpha, beta = upper.a, upper.d
    return IwasawaP(
        diag=PadicMat2.diag(alpha, beta),
        unip=PadicMat2.unipotent(upper.b / alpha),
        k=k,
    )


# ============================================================================
# Finitely supported adelic data
# ============================================================================


@dataclass(frozen=True)
class FinitePlaceData:
    """A real component and finitely many p-adic components; identity elsewhere."""

    real: RealMat2 | None = None
    finite: Mapping[int, PadicMat2] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for p, g in self.finite.items():
            if not is_prime(p):
                raise DomainError(f"Finite places are primes, got {p}")
            if g.base != p:
                raise DomainError(f"Component at {p} is a matrix over Q_{g.base}")

    def det_norm(self) -> float:
        """``|det g_∞|_∞ · ∏_p |det g_p|_p``."""
        total = abs(self.real.det) if self.real is not None else 1.0
        for g in self.finite.values():
            total *= float(g.det().norm())
        return total


@dataclass(frozen=True)
class TranslationCertificate:
    """Elements of A and K with ``a·g·k = (u_n, u_{1/m})`` place by place."""

    real_a: RealMat2 | None
    real_k: RealMat2 | None
    """Rotation (possibly times diag(-1, 1)) followed by ``u_{-shift}``."""
    shift: float
    finite_a: Mapping[int, PadicMat2]
    finite_k: Mapping[int, PadicMat2]


@dataclass(frozen=True)
class TranslationReduction:
    n: int
    m: int
    certificate: TranslationCertificate


def _real_reduction(g: RealMat2) -> tuple[int, RealMat2, RealMat2, float]:
    iw = iwasawa_real(g)
    a = RealMat2(1.0 / iw.alpha, 0.0, 0.0, 1.0 / iw.beta)
    k = iw.k.inverse()
    x = iw.x
    if x < 0:
        flip = RealMat2(-1.0, 0.0, 0.0, 1.0)
        a, k, x = flip @ a, k @ flip, -x
    n = math.floor(x)
    shift = x - n
    return n, a, k @ unipotent(-shift), shift


def reduce_translation(g: FinitePlaceData) -> TranslationReduction:
    """Find ``n >= 0`` and ``m >= 1`` with ``(u_n, u_{1/m}) ∈ A·g·K``."""
    total = g.det_norm()
    if abs(total - 1.0) > DET_TOLERANCE:
        raise DomainError(f"Total |det| must be 1, got {total}")

    decompositions = {p: iwasawa_p(h) for p, h in g.finite.items()}
    shifts = {p: iw.unip.b for p, iw in decompositions.items()}
    m = 1
    for p, x in shifts.items():
        if not x.is_zero() and x.val_offset < 0:
            m *= p**-x.val_offset

    finite_a: dict[int, PadicMat2] = {}
    finite_k: dict[int, PadicMat2] = {}
    for p, iw in decompositions.items():
        h = g.finite[p]
        d_inv = iw.diag.inverse()
        k_inv = iw.k.inverse()
        x = shifts[p]
        target = PadicMat2.unipotent(from_rational(Fraction(1, m), p, h.precision))
        if x.is_zero() or x.val_offset >= 0:
            finite_a[p] = d_inv
            finite_k[p] = k_inv @ PadicMat2.unipotent(-x) @ target
        else:
            one = PadicNum.one(p, h.precision)
            stretch = PadicMat2.diag(one, x * m)
            finite_a[p] = stretch @ d_inv
            finite_k[p] = k_inv @ stretch.inverse()

    n, real_a, real_k, shift = 0, None, None, 0.0
    if g.real is not None:
        n, real_a, real_k, shift = _real_reduction(g.real)

    certificate = TranslationCertificate(real_a, real_k, shift, finite_a, finite_k)
    reduction = TranslationReduction(n=n, m=m, certificate=certificate)
    verify_translation(g, reduction)
    return reduction


def verify_translation(g: FinitePlaceData, reduction: TranslationReduction) -> None:
    """Re-multiply the certificate and check K membership of every k."""
    cert = reduction.certificate
    for p, h in g.finite.items():
        if not is_GL2_Zp(cert.finite_k[p]):
            raise InvariantViolation(f"Certificate k at {p} is not in GL2(Z_{p})")
        product = cert.finite_a[p] @ h @ cert.finite_k[p]
        target = PadicMat2.unipotent(from_rational(Fraction(1, reduction.m), p, h.precision))
        if not product.agrees_with(target):
            raise InvariantViolation(f"Certificate does not reduce the component at {p}")
    if g.real is not None:
        if abs(cert.shift) > 1:
            raise InvariantViolation(f"Residual shift {cert.shift} exceeds 1")
        product = cert.real_a @ g.real @ cert.real_k
        if max(abs(u - v) for u, v in zip(
            (product.a, product.b, product.c, product.d),
            (1.0, float(reduction.n), 0.0, 1.0),
        )) > 1e-9 * max(1.0, reduction.n):
            raise InvariantViolation("Certificate does not reduce the real component")


# ============================================================================
# ψ_m and the gamma-fix verification
# ============================================================================

DiagonalUnits = Mapping[int, tuple[PadicNum, PadicNum]]
"""Prime ``p`` -> ``(alpha, beta)``, the diagonal of ``a^{(p)}``."""


def _diagonal_at(a: DiagonalUnits, p: int, precision: int) -> tuple[PadicNum, PadicNum]:
    if p in a:
        return a[p]
    one = PadicNum.one(p, precision)
    return one, one


def psi_m(a: DiagonalUnits, m: int, precision: int = DEFAULT_PRECISION) -> int:
    """The residue ℓ in ``[0, m)`` with ``ℓ ≡ alpha/beta (mod p^k)`` for every ``p^k ‖ m``.

    Primes missing from ``a`` carry the identity. For ``m = 1`` there is a single
    class, returned as 0 (which is also ≡ 1).
    """
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if m == 1:
        return 0
    residues, moduli = [], []
    for p, k in factorize(m).prime_powers:
        alpha, beta = _diagonal_at(a, p, precision)
        if not (alpha.is_unit() and beta.is_unit()):
            raise DomainError(f"Diagonal entries at {p} must be p-adic units")
        residues.append((alpha / beta).residue_mod(k))
        moduli.append(p**k)
    return crt_combine(residues, moduli)


def _conjugated(alpha: PadicNum, beta: PadicNum, ell: int, m: int) -> PadicMat2:
    """``u_{-ℓ/m}·diag(alpha, beta)·u_{1/m}``."""
    p, n = alpha.base, alpha.precision
    left = PadicMat2.unipotent(from_rational(Fraction(-ell, m), p, n))
    right = PadicMat2.unipotent(from_rational(Fraction(1, m), p, n))
    return left @ PadicMat2.diag(alpha, beta) @ right


def gamma_fix_check(
    a: DiagonalUnits, m: int, ell: int | None = None, precision: int = DEFAULT_PRECISION
) -> bool:
    """``u_{-ℓ/m}·a^{(p)}·u_{1/m} ∈ GL2(Z_p)`` for every ``p | m``, with ``ℓ = psi_m(a, m)`` by default."""
    if m == 1:
        return True
    ell = psi_m(a, m, precision) if ell is None else ell
    for p in factorize(m).primes:
        alpha, beta = _diagonal_at(a, p, precision)
        if not is_GL2_Zp(_conjugated(alpha, beta, ell, m)):
            logger.debug(f"gamma-fix fails at p={p} for ell={ell}, m={m}")
            return False
    return True


def unipotent_determinant_check(alpha: PadicNum, beta: PadicNum, ell: int, m: int) -> bool:
    """``det(u_{-ℓ/m}·diag(alpha, beta)·u_{1/m}) = alpha·beta``."""
    return _conjugated(alpha, beta, ell, m).det().agrees_with(alpha * beta)


def determinant_histogram(p: int, k: int) -> dict[int, int]:
    """How often each unit class mod ``p^k`` arises as ``alpha·beta`` over unit pairs."""
    if not is_prime(p) or k < 1:
        raise DomainError(f"Need a prime p and k >= 1, got p={p}, k={k}")
    modulus = p**k
    units = np.array(coprime_residues(modulus), dtype=np.int64) % modulus
    products = np.outer(units, units) % modulus
    classes, counts = np.unique(products, return_counts=True)
    histogram = {int(c): int(n) for c, n in zip(classes, counts)}
    if set(counts.tolist()) != {euler_phi(modulus)}:
        raise InvariantViolation(f"Determinant classes mod {modulus} are not uniform")
    return histogram
