"""m-adic arithmetic, Iwasawa decompositions and the gamma-fix property on random inputs."""

from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from orbit_sdk import ExperimentTable, experiment
from orbit_sdk.config import get_settings
from orbitlab.arith import factorize
from orbitlab.exceptions import DomainError
from orbitlab.padic import (
    PadicMat2,
    PadicNum,
    crt_merge,
    crt_split,
    determinant_histogram,
    from_rational,
    gamma_fix_check,
    is_GL2_Zp,
    iwasawa_p,
    product_formula_check,
    psi_m,
    unipotent_determinant_check,
)

from experiments.models import PadicCheckRow

Rng = np.random.Generator
CRT_BASES = (6, 10, 12, 30)


def random_padic(rng: Rng, base: int, precision: int, unit: bool = False) -> PadicNum:
    digits = [int(d) for d in rng.integers(0, base, size=precision)]
    digits[0] = int(rng.integers(1, base))
    if unit:
        while digits[0] % base == 0 or any(digits[0] % p == 0 for p in factorize(base).primes):
            digits[0] = int(rng.integers(1, base))
    residue = sum(d * base**i for i, d in enumerate(digits))
    offset = 0 if unit else int(rng.integers(-3, 4))
    return PadicNum.make(base, offset, residue, precision)


def random_rational(rng: Rng) -> Fraction:
    num = int(rng.integers(1, 10**6)) * (1 if rng.random() < 0.5 else -1)
    return Fraction(num, int(rng.integers(1, 10**6)))


def _count(cases: int, check: Callable[[], bool]) -> int:
    return sum(1 for _ in range(cases) if check())


def _ring_axioms(rng: Rng, p: int, precision: int) -> bool:
    a, b, c = (random_padic(rng, p, precision) for _ in range(3))
    return (
        ((a + b) + c).agrees_with(a + (b + c))
        and ((a * b) * c).agrees_with(a * (b * c))
        and (a * (b + c)).agrees_with(a * b + a * c)
        and (a + b).agrees_with(b + a)
    )


def _unit_inverse(rng: Rng, p: int, precision: int) -> bool:
    a = random_padic(rng, p, precision, unit=True)
    return (a * a.inv()).agrees_with(1)


def _strong_triangle(rng: Rng, p: int, precision: int) -> bool:
    a, b = random_padic(rng, p, precision), random_padic(rng, p, precision)
    total = a + b
    if a.val() != b.val():
        return total.val() == min(a.val(), b.val())
    return total.val_lower_bound() >= min(a.val(), b.val())


def _iwasawa(rng: Rng, p: int, precision: int) -> bool:
    entries = [random_rational(rng) for _ in range(4)]
    g = PadicMat2.from_rationals(((entries[0], entries[1]), (entries[2], entries[3])), p, precision)
    if g.det().is_zero():
        return True
    decomposition = iwasawa_p(g)
    return decomposition.reconstruct().agrees_with(g) and is_GL2_Zp(decomposition.k)


def _crt_round_trip(rng: Rng, base: int, precision: int) -> bool:
    a = random_padic(rng, base, precision, unit=True)
    return crt_merge(crt_split(a), base, precision).agrees_with(a)


def _crt_homomorphism(rng: Rng, base: int, precision: int) -> bool:
    a = random_padic(rng, base, precision, unit=True)
    b = random_padic(rng, base, precision, unit=True)
    split_a, split_b, split_ab = crt_split(a), crt_split(b), crt_split(a * b)
    return all(split_ab[p].agrees_with(split_a[p] * split_b[p]) for p in split_ab)


def _random_diagonal(rng: Rng, m: int, precision: int) -> dict[int, tuple[PadicNum, PadicNum]]:
    return {
        p: (random_padic(rng, p, precision, unit=True), random_padic(rng, p, precision, unit=True))
        for p in factorize(m).primes
    }


def _random_modulus(rng: Rng, primes: list[int]) -> int:
    m = 1
    for p in primes:
        m *= p ** int(rng.integers(0, 3))
    return max(m, primes[0])


def _gamma_fix(rng: Rng, primes: list[int], precision: int) -> bool:
    m = _random_modulus(rng, primes)
    return gamma_fix_check(_random_diagonal(rng, m, precision), m, precision=precision)


def _gamma_fix_shifted(rng: Rng, primes: list[int], precision: int) -> bool:
    """ℓ = psi_m(a) + 1 never fixes the lattice, so this counts rejections."""
    m = _random_modulus(rng, primes)
    a = _random_diagonal(rng, m, precision)
    ell = psi_m(a, m, precision) + 1
    return not gamma_fix_check(a, m, ell=ell, precision=precision)


def _unipotent_det(rng: Rng, p: int, precision: int) -> bool:
    alpha = random_padic(rng, p, precision, unit=True)
    beta = random_padic(rng, p, precision, unit=True)
    m = p ** int(rng.integers(1, 4))
    return unipotent_determinant_check(alpha, beta, int(rng.integers(0, m)), m)


@experiment(name="padic", stochastic=True)
def padic(
    primes: list[int] = [2, 3, 5, 7, 13],
    cases: int = 1000,
    precision: Optional[int] = None,
    seed: int = 0,
) -> ExperimentTable:
    """Pass counts of the m-adic checks: ring axioms, inversion, CRT, Iwasawa, gamma-fix."""
    precision = precision or get_settings().padic_precision
    if precision < 4:
        raise DomainError(f"precision must be at least 4 digits, got {precision}")
    streams = np.random.SeedSequence(seed).spawn(len(primes) + 3)
    rows: list[PadicCheckRow] = []

    def add(check: str, parameter: str, passed: int, total: int = cases) -> None:
        rows.append(PadicCheckRow(check=check, parameter=parameter, cases=total, passed=passed))

    for p, stream in zip(primes, streams):
        rng = np.random.Generator(np.random.Philox(stream))
        add("ring_axioms", f"p={p}", _count(cases, lambda: _ring_axioms(rng, p, precision)))
        add("unit_inverse", f"p={p}", _count(cases, lambda: _unit_inverse(rng, p, precision)))
        add("strong_triangle", f"p={p}", _count(cases, lambda: _strong_triangle(rng, p, precision)))
        add("iwasawa", f"p={p}", _count(cases, lambda: _iwasawa(rng, p, precision)))
        add(
            "unipotent_determinant",
            f"p={p}",
            _count(cases, lambda: _unipotent_det(rng, p, precision)),
        )
        histogram = determinant_histogram(p, 2)
        add("determinant_uniformity", f"p={p},k=2", len(histogram), len(histogram))

    rng = np.random.Generator(np.random.Philox(streams[len(primes)]))
    for base in CRT_BASES:
        add("crt_round_trip", f"m={base}", _count(cases, lambda: _crt_round_trip(rng, base, precision)))
        add("crt_homomorphism", f"m={base}", _count(cases, lambda: _crt_homomorphism(rng, base, precision)))

    rng = np.random.Generator(np.random.Philox(streams[len(primes) + 1]))
    add(
        "product_formula",
        "Q",
        _count(cases, lambda: product_formula_check(random_rational(rng)) == 1),
    )

    rng = np.random.Generator(np.random.Philox(streams[len(primes) + 2]))
    label = ",".join(str(p) for p in primes)
    add("gamma_fix", f"primes={label}", _count(cases, lambda: _gamma_fix(rng, primes, precision)))
    add(
        "gamma_fix_shifted_rejected",
        f"primes={label}",
        _count(cases, lambda: _gamma_fix_shifted(rng, primes, precision)),
    )

    return ExperimentTable.from_models(
        PadicCheckRow,
        rows,
        summary={"all_passed": all(row.passed == row.cases for row in rows)},
    )
