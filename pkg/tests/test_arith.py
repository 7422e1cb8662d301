import math
from fractions import Fraction

import pytest

from orbitlab.arith import (
    IntInterval,
    brute_force_coprime_count,
    coprime_bound_holds,
    coprime_count,
    coprime_residues,
    crt_combine,
    euler_phi,
    factorize,
    moebius,
    omega,
    squarefree_divisors,
    totient_growth_threshold,
)
from orbitlab.exceptions import DomainError


@pytest.mark.parametrize("m, expected", [(1, 1), (5, 4), (12, 4)])
def test_euler_phi(m, expected):
    assert euler_phi(m) == expected


@pytest.mark.parametrize("m, expected", [(1, 0), (12, 2), (30, 3)])
def test_omega(m, expected):
    assert omega(m) == expected


@pytest.mark.parametrize("n, expected", [(1, 1), (6, 1), (4, 0), (30, -1)])
def test_moebius(n, expected):
    assert moebius(n) == expected


def test_factorize():
    fac = factorize(360)
    assert fac.prime_powers == ((2, 3), (3, 2), (5, 1))
    assert fac.primes == (2, 3, 5)
    assert fac.prime_power_moduli() == (8, 9, 5)
    assert factorize(1).prime_powers == ()


def test_factorize_rejects_nonpositive():
    with pytest.raises(DomainError):
        factorize(0)


def test_euler_phi_matches_gcd_scan():
    for m in range(1, 501):
        assert euler_phi(m) == sum(1 for n in range(1, m + 1) if math.gcd(n, m) == 1)


def test_moebius_sums_over_divisors():
    for n in range(1, 501):
        total = sum(moebius(d) for d in range(1, n + 1) if n % d == 0)
        assert total == (1 if n == 1 else 0)


def test_squarefree_divisors_of_12():
    assert sorted(squarefree_divisors(12)) == [(1, 1), (2, -1), (3, -1), (6, 1)]


def test_coprime_residues():
    assert coprime_residues(1) == [1]
    assert coprime_residues(10) == [1, 3, 7, 9]


@pytest.mark.parametrize(
    "m, lo, hi, expected",
    [(5, 0, 5, 4), (15, 0, 15, 8), (7, 3, 3, 0), (6, Fraction(-7, 2), Fraction(13, 3), 2)],
)
def test_coprime_count(m, lo, hi, expected):
    interval = IntInterval(lo, hi)
    assert coprime_count(m, interval) == expected
    assert brute_force_coprime_count(m, interval) == expected


def test_interval_out_of_order():
    with pytest.raises(DomainError):
        IntInterval(2, 1)


def test_interval_is_half_open():
    assert list(IntInterval(Fraction(1, 2), 3).integers()) == [1, 2]
    assert IntInterval(0, 10).multiples(5) == 2


def test_coprime_bound_exact_slack():
    result = coprime_bound_holds(5, IntInterval(0, 5))
    assert result.count == 4
    assert result.expected == 4
    assert result.slack == 0
    assert result.bound == 2
    assert result.holds


def test_coprime_bound_for_30():
    result = coprime_bound_holds(30, IntInterval(Fraction(1, 2), Fraction(35, 2)))
    assert result.bound == 8
    assert result.holds


def test_coprime_bound_for_1():
    result = coprime_bound_holds(1, IntInterval(Fraction(1, 3), Fraction(9, 2)))
    assert result.slack <= 1
    assert result.holds


def test_coprime_count_agrees_with_scan_on_small_moduli():
    intervals = [
        IntInterval(Fraction(a, 3), Fraction(a, 3) + Fraction(b, 2))
        for a in range(-9, 10)
        for b in range(0, 30, 7)
    ]
    for m in range(1, 121):
        for interval in intervals:
            assert coprime_count(m, interval) == brute_force_coprime_count(m, interval)
            assert coprime_bound_holds(m, interval).holds


@pytest.mark.parametrize(
    "residues, moduli, expected",
    [([1], [7], 1), ([2, 3], [3, 5], 8), ([0, 0], [4, 9], 0)],
)
def test_crt_combine(residues, moduli, expected):
    assert crt_combine(residues, moduli) == expected


def test_crt_combine_rejects_shared_factor():
    with pytest.raises(DomainError, match="share the factor 2"):
        crt_combine([1, 1], [4, 6])


def test_crt_combine_length_mismatch():
    with pytest.raises(DomainError):
        crt_combine([1, 2], [3])


@pytest.mark.parametrize("eps", [Fraction(1, 5), Fraction(1, 10)])
def test_totient_growth_threshold(eps):
    m_max = 3000
    threshold = totient_growth_threshold(eps, m_max)
    p, q = eps.numerator, eps.denominator
    assert 1 <= threshold <= m_max + 1
    for m in range(threshold, m_max + 1):
        assert euler_phi(m) ** q >= m ** (q - p)
    if threshold > 1:
        m = threshold - 1
        assert euler_phi(m) ** q < m ** (q - p)


def test_totient_growth_threshold_rejects_bad_eps():
    with pytest.raises(DomainError):
        totient_growth_threshold(Fraction(3, 2), 10)
