import pytest
from gmpy2 import mpq

from hitchin_coords import fixtures
from hitchin_coords.atlas import LiftAtlas
from hitchin_coords.errors import MixedSigns, NotPositive, UnknownLeaf
from hitchin_coords.flags import double_ratio
from hitchin_coords.invariants import (FlagResolver, full_coordinates, lengths, shear_closed,
                                       shear_infinite, site_errors, triangle_invariants)
from hitchin_coords.representation import Representation, sl2_symmetric_lift
from hitchin_coords.scalars import Matrix

from conftest import mat

# n = 2 shears of the Fuchsian fixtures, computed once from the fixture
# representations and frozen as regression values
FROZEN_N2_SHEARS = {
    "pants": {"c1": "9772081/9844100", "c2": "9772081/9844100",
              "c3": "65223391210000/63580226585841",
              "g1": "16/25", "g2": "2025/2401", "g3": "60025/20736",
              "g4": "16/25", "g5": "60025/20736", "g6": "2025/2401"},
    "single_leaf": {"c1": "18100566552645497/18385616289663378",
                    "d1": "1", "d2": "43046721/24010000", "d3": "1",
                    "e01": "2401/1296", "e12": "1", "e23": "625/1296"},
}


@pytest.fixture(scope="module")
def fuchsian_coords():
    out = {}
    for name in fixtures.NAMES:
        lam, atlas = fixtures.load(name)
        for n in (2, 3, 4):
            out[(name, n)] = full_coordinates(fixtures.fuchsian(name, n), lam, atlas)
    return out


def test_n2_shears_frozen(fuchsian_coords, fixture_name):
    coords = fuchsian_coords[(fixture_name, 2)]
    got = {g: str(coords.sigma(g, 1)) for g, _ in coords.shear_exp}
    assert got == FROZEN_N2_SHEARS[fixture_name]


def test_n2_matches_recorded_coordinates(fuchsian_coords, fixture_name):
    recorded = fixtures.fuchsian_coordinates(fixture_name)
    assert fuchsian_coords[(fixture_name, 2)].comparable_items() == recorded.comparable_items()


def test_n2_has_no_triangle_invariants(fuchsian_coords, fixture_name):
    assert fuchsian_coords[(fixture_name, 2)].triangle_exp == {}


@pytest.mark.parametrize("n", [3, 4])
def test_fuchsian_triangles_are_one(fuchsian_coords, fixture_name, n):
    coords = fuchsian_coords[(fixture_name, n)]
    assert set(coords.triangle_exp.values()) == {1}


@pytest.mark.parametrize("n", [3, 4])
def test_fuchsian_shears_independent_of_index(fuchsian_coords, fixture_name, n):
    coords = fuchsian_coords[(fixture_name, n)]
    base = fuchsian_coords[(fixture_name, 2)]
    for g, _ in base.shear_exp:
        assert set(coords.sigmas(g)) == {base.sigma(g, 1)}


def test_rotation_condition(fuchsian_coords):
    lam, atlas = fixtures.load("pants")
    coords = full_coordinates(fixtures.fuchsian("pants", 4), lam, atlas)
    assert coords.rotation_ok()
    values = triangle_invariants(fixtures.fuchsian("pants", 4), lam, atlas, "T2")
    for (v, (a, b, c)), x in values.items():
        assert values[((v + 1) % 3, (b, c, a))] == x


def _sampled_rep(name, n, seed=3):
    from hitchin_coords.polytope import sample_interior
    from hitchin_coords.synthesis import reconstruct
    lam, atlas = fixtures.load(name)
    coords = sample_interior(lam, n, seed)
    return coords, reconstruct(coords, lam, atlas).projective


def test_second_lift_gives_same_values(fixture_name):
    lam, atlas = fixtures.load(fixture_name)
    _, rep = _sampled_rep(fixture_name, 3)
    for t in lam.triangle_ids:
        assert (triangle_invariants(rep, lam, atlas, t, lift=0)
                == triangle_invariants(rep, lam, atlas, t, lift=1))
    for g in lam.leaf_ids:
        assert shear_infinite(rep, lam, atlas, g, 0) == shear_infinite(rep, lam, atlas, g, 1)
    for c in lam.closed_ids:
        assert shear_closed(rep, lam, atlas, c, 0) == shear_closed(rep, lam, atlas, c, 1)


def test_conjugation_invariance():
    lam, atlas = fixtures.load("pants")
    coords, rep = _sampled_rep("pants", 3, seed=5)
    a = mat([[2, 1, 0], [1, 1, 0], [0, 1, 1]])
    conj = rep.conjugate(a)
    again = full_coordinates(conj, lam, atlas)
    assert again.comparable_items() == coords.comparable_items()


def test_translated_atlas_invariance():
    lam, atlas = fixtures.load("single_leaf")
    _, rep = _sampled_rep("single_leaf", 3, seed=2)
    data = atlas.to_json()
    shift = "e12 d3^-1"

    def move(ann):
        ann["prefix"] = (shift + " " + ann["prefix"]).strip()

    for lifts in data["triangles"].values():
        for lift in lifts:
            for ann in lift:
                move(ann)
    for kind in ("infinite_leaves", "closed_leaves"):
        for lifts in data[kind].values():
            for site in lifts:
                for ann in site.values():
                    move(ann)
    moved = LiftAtlas.from_json(data)
    assert (full_coordinates(rep, lam, moved).comparable_items()
            == full_coordinates(rep, lam, atlas).comparable_items())


def test_orientation_reversal_swaps_indices():
    lam, atlas = fixtures.load("pants")
    _, rep = _sampled_rep("pants", 4, seed=1)
    resolver = FlagResolver(rep, atlas)
    n = 4
    for sites in (atlas.infinite_leaves, atlas.closed_leaves):
        for lifts in sites.values():
            x, y, z, zp = (resolver.flag(lifts[0][k]) for k in ("x", "y", "z", "zp"))
            for a in range(1, n):
                assert double_ratio(y, x, zp, z, a) == double_ratio(x, y, z, zp, n - a)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_lengths_of_lifted_diagonal(n):
    rep = Representation(n, {"a": sl2_symmetric_lift(Matrix.diagonal([mpq(2), mpq(1, 2)]), n)})
    assert lengths(rep, "a") == [4] * (n - 1)


def test_lengths_reversal_and_diagonal():
    rep = Representation(3, {"a": Matrix.diagonal([mpq(6), mpq(1, 2), mpq(1, 3)])})
    assert lengths(rep, "a") == [12, mpq(3, 2)]
    assert lengths(rep, "a^-1") == [mpq(3, 2), 12]
    rep = Representation(3, {"b": Matrix.diagonal([mpq(9), mpq(3), mpq(1)]) * mpq(1, 3)})
    assert lengths(rep, "b") == [3, 3]


def test_not_positive_quadruple():
    lam, atlas = fixtures.load("pants")
    data = atlas.to_json()
    site = data["infinite_leaves"]["g1"][0]
    site["x"], site["z"] = site["z"], site["x"]
    with pytest.raises(NotPositive):
        shear_infinite(fixtures.fuchsian("pants", 3), lam, LiftAtlas.from_json(data), "g1")


def test_unknown_sites():
    lam, atlas = fixtures.load("pants")
    rep = fixtures.fuchsian("pants")
    with pytest.raises(UnknownLeaf):
        shear_infinite(rep, lam, atlas, "zz")
    with pytest.raises(UnknownLeaf):
        shear_closed(rep, lam, atlas, "g1")


def test_site_errors_report_mixed_signs():
    lam, atlas = fixtures.load("single_leaf")
    ident = Matrix.identity(3)
    rep = Representation(3, {"d2": ident, "d3": ident, "e12": ident,
                             "e23": mat([[2, 0, 0], [0, 3, 0], [0, 0, "-1/6"]])})
    errors = site_errors(rep, lam, atlas)
    assert errors and all(isinstance(e, MixedSigns) for e in errors.values())
    with pytest.raises(MixedSigns):
        full_coordinates(rep, lam, atlas)
