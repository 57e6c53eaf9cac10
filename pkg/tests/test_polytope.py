import pytest
from gmpy2 import mpq

from hitchin_coords import fixtures
from hitchin_coords.coords import CoordinateVector
from hitchin_coords.errors import IndexOutOfRange
from hitchin_coords.invariants import full_coordinates
from hitchin_coords.polytope import (affine_dimension, check_membership, free_variable_count,
                                     global_relation_residual, sample_interior,
                                     side_length_product, variables)
from hitchin_coords.scalars import is_exact, to_float


@pytest.mark.parametrize("n,expected", [(2, 6), (3, 16), (4, 30)])
def test_dimension(fixture_name, n, expected):
    lam = fixtures.lamination(fixture_name)
    assert affine_dimension(lam, n) == expected == 2 * (lam.genus - 1) * (n * n - 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_variable_count(fixture_name, n):
    lam = fixtures.lamination(fixture_name)
    assert len(variables(lam, n)) == free_variable_count(lam, n)


def test_sample_pants_n3_seed1():
    lam = fixtures.lamination("pants")
    coords = sample_interior(lam, 3, 1)
    assert check_membership(coords, lam).passed
    assert all(is_exact(x) for x in coords.all_values())


def test_sample_deterministic(fixture_name):
    lam = fixtures.lamination(fixture_name)
    a = sample_interior(lam, 3, 42)
    b = sample_interior(lam, 3, 42)
    assert a.to_json() == b.to_json()
    assert sample_interior(lam, 3, 43).to_json() != a.to_json()


def test_sample_n2_is_shear_vector(fixture_name):
    lam = fixtures.lamination(fixture_name)
    coords = sample_interior(lam, 2, 7)
    assert coords.triangle_exp == {}
    report = check_membership(coords, lam)
    assert report.passed
    for c in lam.closed_ids:
        right = side_length_product(coords, lam, c, "right", 1)
        assert right == side_length_product(coords, lam, c, "left", 1) and right > 1


@pytest.mark.parametrize("n", [3, 4, 5])
def test_sample_relation_residual(fixture_name, n):
    lam = fixtures.lamination(fixture_name)
    for seed in range(3):
        coords = sample_interior(lam, n, seed)
        assert set(global_relation_residual(coords).values()) == {1}


def test_fuchsian_membership_and_sides(fixture_name):
    lam, atlas = fixtures.load(fixture_name)
    for n in (2, 3):
        coords = full_coordinates(fixtures.fuchsian(fixture_name, n), lam, atlas)
        assert check_membership(coords, lam).passed
        for (c, a), length in coords.length_exp.items():
            for side in ("left", "right"):
                assert side_length_product(coords, lam, c, side, a) == length


def test_equality_violation_reported():
    lam = fixtures.lamination("pants")
    coords = sample_interior(lam, 3, 1)
    coords.shear_exp[("g4", 1)] *= 7
    report = check_membership(coords, lam)
    assert not report.passed
    assert any(v.startswith("equality") for v in report.violations)
    out = report.to_json(dimension=16)
    assert out["pass"] is False and out["dimension"] == 16


def test_closed_shears_unconstrained():
    lam = fixtures.lamination("pants")
    coords = sample_interior(lam, 3, 1)
    coords.shear_exp[("c1", 1)] *= 1000
    assert check_membership(coords, lam).passed


def test_inequality_violation_reported():
    lam = fixtures.lamination("single_leaf")
    coords = sample_interior(lam, 2, 0)
    # scale every shear to drive exp L below one while keeping the equality
    for key in list(coords.shear_exp):
        coords.shear_exp[key] = mpq(1, 2)
    assert check_membership(coords, lam).violations == ["inequality c1/1: exp L = 1/64 <= 1"]
    for key in list(coords.shear_exp):
        coords.shear_exp[key] = mpq(2)
    assert check_membership(coords, lam).passed


def test_rotation_violation_and_incomplete():
    lam = fixtures.lamination("pants")
    coords = sample_interior(lam, 3, 1)
    key = next(iter(coords.triangle_exp))
    coords.triangle_exp[key] *= 2
    assert any("rotation" in v for v in check_membership(coords, lam).violations)
    empty = CoordinateVector(3, lam.id)
    assert not check_membership(empty, lam).passed


def test_float_membership_uses_tolerance():
    lam = fixtures.lamination("pants")
    coords = sample_interior(lam, 3, 4)
    floats = CoordinateVector(3, lam.id)
    floats.triangle_exp = {k: to_float(v) for k, v in coords.triangle_exp.items()}
    floats.shear_exp = {k: to_float(v) for k, v in coords.shear_exp.items()}
    assert check_membership(floats, lam).passed


def test_index_out_of_range():
    lam = fixtures.lamination("pants")
    coords = sample_interior(lam, 3, 1)
    with pytest.raises(IndexOutOfRange):
        side_length_product(coords, lam, "c1", "left", 3)


def test_json_round_trip():
    lam = fixtures.lamination("single_leaf")
    coords = sample_interior(lam, 4, 8)
    again = CoordinateVector.from_json(coords.to_json(), exact_mode=True)
    assert again.comparable_items() == coords.comparable_items()
