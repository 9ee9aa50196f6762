import math

import numpy as np
import pytest

from core.errors import DimensionCap, InvalidParameters, NonPositiveVariance, SingularMatrix
from core.lattice import (
    ConstructionA,
    Lattice,
    babai_round,
    compute_vnr,
    construction_a_basis,
    construction_a_contains,
    cvp_batch,
    cvp_exact,
    estimate_nsm,
    point_at,
)

HEXAGONAL_NSM = 5 / (36 * math.sqrt(3))


def test_point_at():
    assert np.array_equal(point_at(Lattice.integer(2), [2, -1]), [2.0, -1.0])
    sheared = Lattice.from_vectors([[1.0, 0.0], [0.5, 1.0]])
    assert np.allclose(point_at(sheared, [1, 1]), [1.5, 1.0])
    assert not point_at(Lattice.hexagonal(), [0, 0]).any()


def test_lattice_rejects_singular_basis():
    with pytest.raises(SingularMatrix):
        Lattice(np.array([[1.0, 2.0], [2.0, 4.0]]))


def test_hexagonal_volume():
    assert Lattice.hexagonal().volume == pytest.approx(math.sqrt(3) / 2)


def test_cvp_exact_on_integer_lattice():
    result = cvp_exact(Lattice.integer(2), [0.3, 0.6])
    assert np.array_equal(result.point, [0.0, 1.0])
    assert result.dist == pytest.approx(0.5)


def test_cvp_exact_on_lattice_point(rng):
    lat = Lattice(np.eye(3) + 0.2 * rng.standard_normal((3, 3)))
    target = point_at(lat, [1, -2, 3])
    result = cvp_exact(lat, target)
    assert result.dist == pytest.approx(0.0, abs=1e-12)
    assert np.array_equal(result.coords, [1, -2, 3])


def test_cvp_exact_never_worse_than_babai_on_hexagonal(rng):
    lat = Lattice.hexagonal()
    targets = 5 * rng.standard_normal((1000, 2))
    _, _, exact = cvp_batch(lat, targets)
    babai = np.array([babai_round(lat, t).dist for t in targets])
    assert np.all(exact <= babai + 1e-12)
    assert np.any(exact < babai - 1e-9)


def test_cvp_exact_commutes_with_lattice_translations(rng):
    skewed = Lattice(np.eye(3) + 0.2 * rng.standard_normal((3, 3)))
    for lat in (Lattice.hexagonal(), skewed):
        for _ in range(50):
            target = 3 * rng.standard_normal(lat.dim)
            shift = rng.integers(-5, 6, size=lat.dim)
            base = cvp_exact(lat, target)
            moved = cvp_exact(lat, target + point_at(lat, shift))
            assert np.array_equal(moved.coords, base.coords + shift)
            assert moved.dist == pytest.approx(base.dist, abs=1e-9)


def test_cvp_batch_matches_single_queries(rng):
    lat = Lattice.hexagonal()
    targets = rng.standard_normal((20, 2))
    _, coords, dists = cvp_batch(lat, targets)
    for t, c, d in zip(targets, coords, dists):
        single = cvp_exact(lat, t)
        assert np.array_equal(single.coords, c)
        assert single.dist == pytest.approx(d)


def test_cvp_ties_break_lexicographically():
    result = cvp_exact(Lattice.integer(2), [0.5, 0.5])
    assert np.array_equal(result.coords, [0, 0])


def test_cvp_refuses_high_dimension():
    with pytest.raises(DimensionCap):
        cvp_exact(Lattice.integer(11), np.zeros(11))


def test_cvp_refuses_oversized_search():
    with pytest.raises(DimensionCap):
        cvp_exact(Lattice.integer(6), np.zeros(6), search_radius=20)


def test_babai_exact_on_integer_lattice(rng):
    lat = Lattice.integer(4)
    for target in 3 * rng.standard_normal((50, 4)):
        assert babai_round(lat, target).dist == pytest.approx(cvp_exact(lat, target).dist)


def test_babai_within_rounding_cell():
    lat = Lattice(np.diag([1.0, 2.0, 3.0]))
    point = point_at(lat, [2, -1, 1])
    result = babai_round(lat, point + 0.49 * np.array([1.0, 0.0, 0.0]))
    assert np.array_equal(result.coords, [2, -1, 1])


def test_construction_a_contains():
    ca = ConstructionA(gen=[[1], [1]], p=2)
    assert construction_a_contains(ca, [3.0, -2.0])
    assert construction_a_contains(ca, [0.5, 0.5])
    assert not construction_a_contains(ca, [0.5, 0.0])
    assert not construction_a_contains(ca, [1 / 3, 0.0])


def test_construction_a_rejects_out_of_range_generator():
    with pytest.raises(InvalidParameters):
        ConstructionA(gen=[[2], [1]], p=2)
    with pytest.raises(InvalidParameters):
        ConstructionA(gen=[[1], [1]], p=4)


def test_construction_a_basis_empty_code():
    lat = construction_a_basis(ConstructionA(gen=np.zeros((3, 0), dtype=np.int64), p=3))
    assert np.array_equal(lat.basis, np.eye(3))


def test_construction_a_basis_covolume():
    lat = construction_a_basis(ConstructionA(gen=[[1], [1]], p=2))
    assert lat.volume == pytest.approx(0.5)


def test_construction_a_basis_points_are_members(rng):
    ca = ConstructionA(gen=rng.integers(1, 3, size=(3, 1)), p=3)
    lat = construction_a_basis(ca)
    assert lat.volume == pytest.approx(1 / 3)
    for coords in rng.integers(-3, 4, size=(50, 3)):
        assert construction_a_contains(ca, point_at(lat, coords))


def test_compute_vnr():
    lat = Lattice.integer(3)
    unit = 1 / (2 * math.pi * math.e)
    assert compute_vnr(lat, unit) == pytest.approx(1.0)
    assert compute_vnr(lat.scaled(2.0), unit) == pytest.approx(4.0)
    assert compute_vnr(lat, 2 * unit) == pytest.approx(0.5)
    with pytest.raises(NonPositiveVariance):
        compute_vnr(lat, 0.0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_nsm_of_integer_lattice(n):
    merit = estimate_nsm(Lattice.integer(n), 20_000, seed=n)
    assert abs(merit.nsm_estimate - 1 / 12) <= 3 * merit.nsm_stderr


def test_nsm_of_hexagonal_lattice():
    merit = estimate_nsm(Lattice.hexagonal(), 50_000, seed=11)
    assert abs(merit.nsm_estimate - HEXAGONAL_NSM) <= 3 * merit.nsm_stderr


def test_nsm_is_scale_invariant():
    a = estimate_nsm(Lattice.hexagonal(), 5_000, seed=3)
    b = estimate_nsm(Lattice.hexagonal().scaled(4.0), 5_000, seed=3)
    assert a.nsm_estimate == pytest.approx(b.nsm_estimate, rel=1e-9)
