import math
from fractions import Fraction

import pytest

from orbitlab.exceptions import DomainError, PrecisionError
from orbitlab.hyperbolic import RealMat2, unipotent
from orbitlab.padic import (
    FinitePlaceData,
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
    reduce_translation,
    unipotent_determinant_check,
    valuation,
)


def test_minus_one_is_all_top_digits():
    assert from_rational(-1, 5, 8).digits == [4] * 8
    assert from_rational(-1, 5, 8).residue_mod(2) == 24


def test_one_third_in_Z2():
    assert from_rational(Fraction(1, 3), 2, 8).digits == [1, 1, 0, 1, 0, 1, 0, 1]


@pytest.mark.parametrize(
    "q, p, expected",
    [(Fraction(50, 3), 5, 2), (Fraction(3, 25), 5, -2), (Fraction(7, 1), 2, 0)],
)
def test_valuation(q, p, expected):
    assert valuation(q, p) == expected
    assert from_rational(q, p, 16).val() == expected


def test_valuation_of_zero():
    assert valuation(0, 3) == math.inf
    assert PadicNum.zero(3, 8).val() == math.inf


def test_norm():
    assert from_rational(Fraction(1, 10), 5, 8).norm() == 5
    assert from_rational(25, 5, 8).norm() == Fraction(1, 25)


def test_composite_base_rejects_shared_denominator():
    with pytest.raises(DomainError):
        from_rational(Fraction(1, 2), 10, 8)


def test_inverse():
    a = from_rational(7, 10, 12)
    assert (a * a.inv()).agrees_with(1)
    assert from_rational(5, 5, 8).inv().agrees_with(from_rational(Fraction(1, 5), 5, 8))
    with pytest.raises(DomainError):
        from_rational(2, 10, 8).inv()
    with pytest.raises(DomainError):
        PadicNum.zero(7, 8).inv()


def test_zero_is_additive_identity():
    a = from_rational(Fraction(3, 7), 5, 8)
    assert (a + PadicNum.zero(5, 8)).agrees_with(a)
    assert (a + PadicNum.zero(5, 8)).absolute_precision == a.absolute_precision


def test_strong_triangle_and_cancellation():
    a, b = from_rational(5, 5, 8), from_rational(1, 5, 8)
    assert (a + b).val() == 0
    total = from_rational(1, 5, 8) + from_rational(-1, 5, 8)
    assert total.is_zero()
    assert total.val_lower_bound() == 8


def test_residue_beyond_precision():
    with pytest.raises(PrecisionError):
        from_rational(-1, 5, 8).residue_mod(9)


def test_mixed_arithmetic_is_rejected():
    with pytest.raises(DomainError):
        from_rational(1, 5, 8) + from_rational(1, 7, 8)


def test_crt_split_and_merge():
    a = from_rational(Fraction(7, 3), 10, 8)
    parts = crt_split(a)
    assert set(parts) == {2, 5}
    assert parts[2].agrees_with(from_rational(Fraction(7, 3), 2, 8))
    assert parts[5].agrees_with(from_rational(Fraction(7, 3), 5, 8))
    assert crt_merge(parts, 10, 8).agrees_with(a)


def test_crt_split_prime_power_part():
    a = from_rational(Fraction(7, 5), 12, 8)
    parts = crt_split(a)
    assert parts[2].precision == 16
    assert parts[2].agrees_with(from_rational(Fraction(7, 5), 2, 16))
    assert crt_merge(parts, 12, 8).agrees_with(a)


def test_crt_merge_needs_every_prime():
    with pytest.raises(DomainError):
        crt_merge({2: from_rational(1, 2, 8)}, 10, 8)


@pytest.mark.parametrize("q", [Fraction(-12, 35), Fraction(1), Fraction(1024, 243), Fraction(-7, 9)])
def test_product_formula(q):
    assert product_formula_check(q) == 1


def test_product_formula_rejects_zero():
    with pytest.raises(DomainError):
        product_formula_check(0)


def test_GL2_Zp_membership():
    assert is_GL2_Zp(PadicMat2.identity(5, 8))
    assert not is_GL2_Zp(PadicMat2.from_rationals(((5, 0), (0, 1)), 5, 8))
    assert not is_GL2_Zp(PadicMat2.from_rationals(((1, Fraction(1, 5)), (0, 1)), 5, 8))
    assert is_GL2_Zp(PadicMat2.from_rationals(((2, 3), (1, 2)), 5, 8))


def test_GL2_Zp_needs_prime_base():
    with pytest.raises(DomainError):
        is_GL2_Zp(PadicMat2.identity(10, 8))


def test_iwasawa_p():
    g = PadicMat2.from_rationals(((1, 2), (3, Fraction(1, 7))), 7, 16)
    decomposition = iwasawa_p(g)
    assert decomposition.reconstruct().agrees_with(g)
    assert is_GL2_Zp(decomposition.k)


def test_iwasawa_p_of_integral_matrix_is_trivial():
    g = PadicMat2.from_rationals(((2, 3), (1, 2)), 5, 8)
    decomposition = iwasawa_p(g)
    assert decomposition.k == g


def test_determinant_histogram_is_uniform():
    histogram = determinant_histogram(5, 2)
    assert len(histogram) == 20
    assert set(histogram.values()) == {20}
    with pytest.raises(DomainError):
        determinant_histogram(4, 1)


def _units(p, alpha, beta, precision=16):
    return {p: (from_rational(alpha, p, precision), from_rational(beta, p, precision))}


def test_psi_m():
    a = _units(5, 3, 2)
    assert psi_m(a, 25, 16) == 14
    assert psi_m(a, 10, 16) == 9
    assert psi_m(a, 1, 16) == 0


@pytest.mark.parametrize(
    "a, m, expected",
    [
        ({}, 7, 1),
        ({}, 12, 1),
        (_units(5, 3, 1), 5, 3),
        ({**_units(2, 1, 1), **_units(3, 2, 1)}, 6, 5),
        ({}, 1, 0),
    ],
)
def test_psi_m_examples(a, m, expected):
    assert psi_m(a, m, 16) == expected


def test_psi_m_needs_units():
    with pytest.raises(DomainError):
        psi_m(_units(5, 5, 1), 5, 16)


def test_gamma_fix():
    a = _units(5, 3, 2)
    assert gamma_fix_check(a, 25, precision=16)
    assert not gamma_fix_check(a, 25, ell=15, precision=16)
    assert gamma_fix_check(a, 1, precision=16)


def test_unipotent_determinant():
    alpha, beta = from_rational(3, 5, 16), from_rational(Fraction(2, 7), 5, 16)
    assert unipotent_determinant_check(alpha, beta, 7, 25)


def test_reduce_real_translation():
    reduction = reduce_translation(FinitePlaceData(real=unipotent(3.25)))
    assert reduction.n == 3
    assert reduction.m == 1
    assert reduction.certificate.shift == pytest.approx(0.25)


def test_reduce_finite_translations():
    data = FinitePlaceData(
        real=RealMat2(1.0, 0.0, 0.0, 1.0),
        finite={
            2: PadicMat2.unipotent(from_rational(Fraction(1, 4), 2, 16)),
            5: PadicMat2.unipotent(from_rational(Fraction(3, 25), 5, 16)),
        },
    )
    assert reduce_translation(data).m == 100


def test_reduce_translation_needs_unit_total_determinant():
    with pytest.raises(DomainError):
        reduce_translation(FinitePlaceData(real=RealMat2(2.0, 0.0, 0.0, 1.0)))
    with pytest.raises(DomainError):
        FinitePlaceData(finite={4: PadicMat2.identity(2, 8)})
