import math

import numpy as np
import pytest

from orbitlab.exceptions import DomainError
from orbitlab.hyperbolic import (
    S_MATRIX,
    FCellGrid,
    HPoint,
    RealMat2,
    approx_horocycle_check,
    diagonal,
    expanding_horocycle_sample,
    geodesic_code,
    geodesic_endpoints,
    get_observable,
    h_decomposition,
    h_matrix,
    horocycle_spacing_check,
    in_fundamental_domain,
    iwasawa_real,
    mobius,
    orbit_time_average,
    orthogonality_residual,
    reduce_to_F,
    residual,
    shear_conjugation_check,
    tau_commutation_check,
    translated_orbit_sample,
    unipotent,
    windowed_shear_average,
)


def test_mobius_examples():
    i = HPoint(0.0, 1.0)
    fixed = mobius(S_MATRIX, i)
    assert (fixed.x, fixed.y) == pytest.approx((0.0, 1.0))
    assert mobius(unipotent(1.0), i) == HPoint(1.0, 1.0)
    image = mobius(diagonal(2.0), i)
    assert image.x == 0.0
    assert image.y == pytest.approx(math.exp(-2.0))


def test_mobius_rejects_orientation_reversing():
    with pytest.raises(DomainError):
        mobius(RealMat2(1.0, 0.0, 0.0, -1.0), HPoint(0.0, 1.0))


def test_points_live_in_upper_half_plane():
    with pytest.raises(DomainError):
        HPoint(0.5, 0.0)


def test_geodesic_endpoints():
    assert geodesic_endpoints(unipotent(0.3)) == (math.inf, 0.3)
    assert geodesic_endpoints(S_MATRIX) == (0.0, math.inf)


def test_reduce_i_is_empty():
    z, word = reduce_to_F(HPoint(0.0, 1.0))
    assert z == HPoint(0.0, 1.0)
    assert len(word) == 0


def test_reduce_translates_back():
    z, word = reduce_to_F(HPoint(5.0, 1.0))
    assert z == HPoint(0.0, 1.0)
    assert str(word) == "T^-5"


def test_reduce_point_near_real_axis():
    start = HPoint(0.25, 0.1)
    z, word = reduce_to_F(start)
    assert in_fundamental_domain(z)
    assert str(word) == "S T^3"
    back = word.apply_inverse(z)
    assert back.x == pytest.approx(start.x, abs=1e-12)
    assert back.y == pytest.approx(start.y, abs=1e-12)


def test_reduce_moves_right_edge_to_left_edge():
    z, _ = reduce_to_F(HPoint(0.5, 2.0))
    assert z.x == -0.5


def test_reduced_points_land_in_F():
    rng = np.random.default_rng(7)
    for x, y in zip(rng.uniform(-20, 20, 200), rng.uniform(1e-4, 3, 200)):
        start = HPoint(float(x), float(y))
        z, word = reduce_to_F(start)
        assert in_fundamental_domain(z)
        image = word.apply(start)
        assert (image.x, image.y) == pytest.approx((z.x, z.y), abs=1e-6)


@pytest.mark.parametrize("x, expected", [("3/7", [2, 3]), ("2/5", [2, 2]), ("1/2", [2])])
def test_geodesic_side_runs_match_continued_fraction(x, expected):
    code = geodesic_code(x, 2.0, 1e-3)
    assert code.side_runs_after_bottom() == expected


@pytest.mark.parametrize("step", [1e-2, 1e-3])
def test_geodesic_along_tiling_edges_takes_canonical_coding(step):
    code = geodesic_code("1/2", 2.0, 1e-3, step)
    assert code.runs == [("bottom", 1), ("side", 2), ("bottom", 1)]


def test_geodesic_code_validates_range():
    with pytest.raises(DomainError):
        geodesic_code("3/7", 1e-3, 2.0)


def test_shearing_identities():
    for x in (0.0, 0.3, -1.7):
        for t in (0.5, 2.0, 10.0):
            assert shear_conjugation_check(x, t) < 1e-12
            assert tau_commutation_check(abs(x), t) < 1e-12
    assert horocycle_spacing_check(3, 7, 5.0) < 1e-12


def test_horocycle_spacing_caps_t():
    with pytest.raises(DomainError):
        horocycle_spacing_check(1, 7, 41.0)


def test_h_decomposition():
    decomposition = h_decomposition(0.7)
    assert residual(decomposition.reconstruct(), h_matrix(0.7)) < 1e-12
    assert orthogonality_residual(decomposition.k) < 1e-12
    assert h_decomposition(0.0).t == 0.0


def test_h_decomposition_rejects_negative():
    with pytest.raises(DomainError):
        h_decomposition(-1.0)


def test_iwasawa_real():
    g = RealMat2(2.0, 1.0, -3.0, 0.5)
    decomposition = iwasawa_real(g)
    assert residual(decomposition.reconstruct(), g) < 1e-12
    assert orthogonality_residual(decomposition.k) < 1e-12


@pytest.mark.parametrize("m", [7, 30, 210])
def test_approx_horocycle_within_bound(m):
    deviation, bound = approx_horocycle_check(m, 0.05)
    assert deviation <= bound


def test_reference_masses_sum_to_one():
    grid = FCellGrid()
    masses = grid.reference_masses()
    assert masses.shape == (grid.n_cells,)
    assert masses.sum() == pytest.approx(1.0, abs=1e-6)
    assert masses[grid.cusp_index] == pytest.approx(1.0 / math.pi)
    assert grid.labels()[-1] == ("cusp", "cusp")


def test_horocycle_sample_at_time_zero():
    cloud = expanding_horocycle_sample(0.0, 2000, seed=3, chunk_size=500)
    assert len(cloud) == 2000
    assert np.all(cloud.ys == 1.0)
    assert np.all(np.abs(cloud.xs) <= 0.5)


def test_horocycle_sample_is_reproducible():
    first = expanding_horocycle_sample(3.0, 5000, seed=11, chunk_size=1000)
    def backwards_map(fn, chunks):
        return [fn(chunk) for chunk in reversed(chunks)][::-1]

    second = expanding_horocycle_sample(3.0, 5000, seed=11, chunk_size=1000, map_fn=backwards_map)
    np.testing.assert_array_equal(first.xs, second.xs)
    np.testing.assert_array_equal(first.ys, second.ys)


def test_translated_orbit_sample():
    cloud = translated_orbit_sample(1, 7, 50, seed=0)
    assert len(cloud) == math.ceil(50 * math.log(7))
    assert cloud.times is not None
    assert np.all((cloud.times >= 0) & (cloud.times <= math.log(7)))


def test_windowed_average_of_constant():
    result = windowed_shear_average(1, 101, 1.0, 0.5, "one")
    assert result.value == pytest.approx(1.0)
    assert result.horocycle_value == pytest.approx(1.0)
    assert result.within_budget


def test_windowed_average_validates_window():
    with pytest.raises(DomainError):
        windowed_shear_average(1, 101, 10.0, 0.5, "bump")
    with pytest.raises(DomainError):
        windowed_shear_average(1, 101, 1.0, 0.5, "bump", eps=0.5)


def test_orbit_time_average_is_mean_of_windows():
    full, per_window = orbit_time_average(2, 31, "bump", 0.4, nodes=16)
    assert full == pytest.approx(float(np.mean(per_window)), abs=1e-12)
    assert len(per_window) == math.ceil(math.log(62) / 0.4)


def test_unknown_observable():
    with pytest.raises(DomainError):
        get_observable("spike")


def test_mobius_is_a_group_action():
    g = RealMat2(2.0, 1.0, 3.0, 2.0)
    h = RealMat2(1.0, -0.5, 0.25, 0.875)
    z = HPoint(0.3, 0.7)
    composed = mobius(g @ h, z)
    stepwise = mobius(g, mobius(h, z))
    assert abs(composed.as_complex() - stepwise.as_complex()) < 1e-10


def test_unipotent_geodesics_end_at_alpha():
    rng = np.random.default_rng(2)
    for alpha in rng.uniform(-10, 10, 100):
        assert geodesic_endpoints(unipotent(float(alpha))) == (math.inf, float(alpha))
