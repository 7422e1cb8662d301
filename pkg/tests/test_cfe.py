import math
from fractions import Fraction

import pytest

from orbitlab.cfe import CFEWord, cfe_len, cfe_of_rational, convergents, gauss_map, orbit
from orbitlab.exceptions import DomainError


@pytest.mark.parametrize(
    "x, expected",
    [("1/2", Fraction(0)), ("3/5", Fraction(2, 3)), ("2/5", Fraction(1, 2))],
)
def test_gauss_map(x, expected):
    assert gauss_map(x) == expected


def test_gauss_map_rejects_zero():
    with pytest.raises(DomainError, match="not defined on zero"):
        gauss_map(0)


@pytest.mark.parametrize(
    "x, quotients",
    [("3/7", (2, 3)), ("1/2", (2,)), ("3/5", (1, 1, 2))],
)
def test_cfe_of_rational(x, quotients):
    word = cfe_of_rational(x)
    assert word.a0 == 0
    assert word.quotients == quotients


def test_word_formatting():
    assert str(cfe_of_rational("3/7")) == "[0;2,3]"
    assert str(CFEWord(5)) == "[5]"


@pytest.mark.parametrize("x, length", [("1/5", 1), ("3/5", 3), ("4/5", 2)])
def test_cfe_len(x, length):
    assert cfe_len(x) == length


@pytest.mark.parametrize(
    "x, points",
    [
        ("1/5", [Fraction(1, 5)]),
        ("3/5", [Fraction(3, 5), Fraction(2, 3), Fraction(1, 2)]),
        ("4/5", [Fraction(4, 5), Fraction(1, 4)]),
    ],
)
def test_orbit(x, points):
    assert orbit(x) == points


@pytest.mark.parametrize(
    "word, expected",
    [
        (CFEWord(0, (2, 3)), [Fraction(1, 2), Fraction(3, 7)]),
        (CFEWord(5), [Fraction(5)]),
        (CFEWord(0, (1, 1, 2)), [Fraction(1), Fraction(1, 2), Fraction(3, 5)]),
    ],
)
def test_convergents(word, expected):
    assert convergents(word) == expected


def test_word_rejects_nonpositive_quotients():
    with pytest.raises(DomainError):
        CFEWord(0, (2, 0))


@pytest.mark.parametrize("x", ["0", "1", "7/5", "-1/3"])
def test_expansion_outside_unit_interval(x):
    with pytest.raises(DomainError):
        cfe_of_rational(x)


def test_round_trip_and_shift_law():
    for q in range(2, 200):
        for p in range(1, q):
            if math.gcd(p, q) != 1:
                continue
            x = Fraction(p, q)
            word = cfe_of_rational(x)
            assert word.value() == x
            assert len(word) == cfe_len(x)
            if len(word) > 1:
                assert word.quotients[-1] >= 2
            tx = gauss_map(x)
            if tx != 0:
                assert cfe_of_rational(tx) == word.shift()


def test_dirichlet_quality_of_convergents():
    for x in (Fraction(355, 113 * 4), Fraction(987, 1597), Fraction(1234, 5678)):
        for c in convergents(cfe_of_rational(x))[:-1]:
            assert abs(x - c) < Fraction(1, c.denominator**2)


def test_lengths_of_extreme_numerators():
    for m in range(3, 300):
        assert cfe_len(Fraction(1, m)) == 1
        assert cfe_len(Fraction(m - 1, m)) == 2
