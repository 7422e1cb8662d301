import math
from fractions import Fraction

import numpy as np
import pytest

from orbitlab.exceptions import DomainError, InvariantViolation
from orbitlab.measures import (
    DigitHistogram,
    EmpiricalMeasure,
    FamilyMode,
    binned_tv_distance,
    family_average,
    gauss_cdf,
    gauss_kuzmin_frequency,
    gauss_kuzmin_tail,
    gauss_quantile,
    kolmogorov_distance,
    kuzmin_histogram,
    mixture,
    near_gauss_fraction,
    orbit_measure,
    subfamily_average,
)

F = Fraction


def test_orbit_measure_examples():
    assert orbit_measure("1/5").atoms == ((F(1, 5), F(1)),)
    assert orbit_measure("3/5").atoms == ((F(1, 2), F(1, 3)), (F(3, 5), F(1, 3)), (F(2, 3), F(1, 3)))
    assert orbit_measure("1/2").atoms == ((F(1, 2), F(1)),)


def test_family_average_for_5():
    nu = family_average(5)
    assert nu.weight_of(F(1, 5)) == F(1, 4)
    # 1/2 lies on the orbits of 2/5 and 3/5
    assert nu.weight_of(F(1, 2)) == F(1, 2) * F(1, 4) + F(1, 3) * F(1, 4)
    assert nu.weight_of(F(3, 5)) == F(1, 12)
    assert sum(nu.weights) == 1


def test_point_uniform_for_5():
    nu = family_average(5, FamilyMode.POINT_UNIFORM)
    assert nu.weight_of(F(1, 5)) == F(1, 8)
    assert nu.weight_of(F(1, 2)) == F(2, 8)
    assert family_average(5, "point_uniform") == nu


def test_family_average_for_2():
    assert family_average(2).atoms == ((F(1, 2), F(1)),)


def test_family_average_rejects_m_1():
    with pytest.raises(DomainError):
        family_average(1)


def test_family_average_is_the_convex_combination():
    for m in (7, 12, 30):
        ns = [n for n in range(1, m) if math.gcd(n, m) == 1]
        expected = mixture([(F(1, len(ns)), orbit_measure(F(n, m))) for n in ns])
        assert family_average(m) == expected


def test_subfamily_average():
    nu = subfamily_average(5, [1, 2])
    assert nu.weight_of(F(1, 5)) == F(1, 2)
    assert nu.weight_of(F(2, 5)) == F(1, 4)
    assert nu.weight_of(F(1, 2)) == F(1, 4)


def test_subfamily_average_rejects_non_units():
    with pytest.raises(DomainError):
        subfamily_average(6, [1, 2])


def test_measure_invariants():
    with pytest.raises(InvariantViolation):
        EmpiricalMeasure(((F(1, 2), F(1, 2)),))
    with pytest.raises(InvariantViolation):
        EmpiricalMeasure(((F(1, 2), F(1, 2)), (F(1, 3), F(1, 2))))
    with pytest.raises(DomainError):
        EmpiricalMeasure(((F(3, 2), F(1)),))


def test_cdf_of_measure():
    nu = orbit_measure("3/5")
    assert nu.cdf(0) == 0
    assert nu.cdf(F(3, 5)) == F(2, 3)
    assert nu.cdf(1) == 1


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (1.0, 1.0), (0.5, 0.5849625007211562)])
def test_gauss_cdf(x, expected):
    assert gauss_cdf(x) == pytest.approx(expected, abs=1e-15)


def test_gauss_quantile_inverts_cdf():
    u = np.linspace(0, 1, 11)
    np.testing.assert_allclose(gauss_cdf(gauss_quantile(u)), u, atol=1e-14)


def test_kolmogorov_distance_of_point_mass():
    expected = max(math.log2(1.5), 1 - math.log2(1.5))
    assert kolmogorov_distance(orbit_measure("1/2")) == pytest.approx(expected, abs=1e-15)


def test_kolmogorov_distance_of_quantile_comb():
    n = 200
    points = [F(float(gauss_quantile((i - 0.5) / n))) for i in range(1, n + 1)]
    assert kolmogorov_distance(EmpiricalMeasure.uniform(points)) <= 1 / n


def test_kolmogorov_distance_against_grid():
    nu = family_average(5)
    grid = np.linspace(0.0, 1.0, 1_000_001)
    positions = np.array([float(x) for x in nu.positions])
    cumulative = np.cumsum([float(w) for w in nu.weights])
    index = np.searchsorted(positions, grid, side="right")
    empirical = np.concatenate(([0.0], cumulative))[index]
    brute = float(np.max(np.abs(empirical - np.log2(1.0 + grid))))
    assert kolmogorov_distance(nu) == pytest.approx(brute, abs=1e-5)
    assert kolmogorov_distance(nu) >= brute - 1e-12


def test_distance_decreases_along_m():
    distances = [kolmogorov_distance(family_average(m)) for m in (101, 1009)]
    assert distances[1] < distances[0]
    point = [kolmogorov_distance(family_average(m, "point_uniform")) for m in (101, 1009)]
    assert point[1] < point[0]


def test_binned_tv_distance():
    assert binned_tv_distance(orbit_measure("1/2")) > 0.9
    assert 0 <= binned_tv_distance(family_average(101), bins=16) < 1


def test_near_gauss_fraction_bounds():
    fraction = near_gauss_fraction(101, 0.3)
    assert 0.0 <= fraction <= 1.0
    assert near_gauss_fraction(101, 1.0) == 1.0


def test_kuzmin_histogram_for_5():
    report = kuzmin_histogram([5])
    histogram = report.histogram
    assert histogram.total == 8
    assert histogram.counts[1] == 3
    assert histogram.counts[2] == 3
    assert histogram.counts[4] == 1
    assert histogram.counts[5] == 1
    assert histogram.frequency(1) == 3 / 8


def test_kuzmin_histogram_for_2():
    histogram = kuzmin_histogram([2]).histogram
    assert histogram.total == 1
    assert histogram.frequency(2) == 1.0


def test_kuzmin_reference():
    report = kuzmin_histogram([7], kmax=10)
    assert report.reference[1] == pytest.approx(math.log2(4 / 3))
    assert sum(report.reference.values()) + report.reference_tail == pytest.approx(1.0)
    assert gauss_kuzmin_tail(10) == pytest.approx(math.log2(12 / 11))


def test_kuzmin_rejects_empty_range():
    with pytest.raises(DomainError):
        kuzmin_histogram([])


def test_digit_histogram_tail_bucket():
    histogram = DigitHistogram(kmax=3)
    for digit in (1, 3, 4, 40):
        histogram.add(digit)
    assert histogram.tail == 2
    assert histogram.frequency(99) == 0.5
    with pytest.raises(DomainError):
        histogram.merge(DigitHistogram(kmax=4))


def test_gauss_kuzmin_frequency_rejects_zero():
    with pytest.raises(DomainError):
        gauss_kuzmin_frequency(0)
