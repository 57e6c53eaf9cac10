import copy

import pytest

from hitchin_coords import fixtures
from hitchin_coords.atlas import LiftAtlas, build_atlas, tietze_reduce
from hitchin_coords.errors import InputError, UnknownGenerator
from hitchin_coords.representation import eval_word
from hitchin_coords.scalars import Matrix
from hitchin_coords.words import exponent_sums, parse_word


def test_bundled_atlas_is_rederived(fixture_name):
    lam, atlas = fixtures.load(fixture_name)
    assert build_atlas(lam).to_json() == atlas.to_json()


def test_four_generators_one_relator(fixture_name):
    _, atlas = fixtures.load(fixture_name)
    assert len(atlas.generators) == 4
    assert len(atlas.relator) == 8
    assert all(v == 0 for v in exponent_sums(atlas.relator).values())


def test_relator_trivial_on_fuchsian(fixture_name):
    _, atlas = fixtures.load(fixture_name)
    rep = fixtures.fuchsian(fixture_name)
    m = eval_word(rep, atlas.relator)
    assert m == Matrix.identity(2) or m == Matrix.identity(2) * -1


def test_closed_leaf_sites_start_at_the_leaf(fixture_name):
    _, atlas = fixtures.load(fixture_name)
    for c, lifts in atlas.closed_leaves.items():
        site = lifts[0]
        assert (site["x"].prefix, site["x"].closed_leaf, site["x"].end) == ((), c, 1)
        assert (site["y"].prefix, site["y"].closed_leaf, site["y"].end) == ((), c, -1)


def test_json_round_trip(fixture_name):
    _, atlas = fixtures.load(fixture_name)
    assert LiftAtlas.from_json(atlas.to_json()).to_json() == atlas.to_json()


def test_undeclared_generator_rejected():
    data = copy.deepcopy(fixtures.atlas("pants").to_json())
    data["closed_leaf_words"]["c1"] = "zz g4"
    with pytest.raises(UnknownGenerator):
        LiftAtlas.from_json(data)


def test_bad_end_marker_rejected():
    data = copy.deepcopy(fixtures.atlas("pants").to_json())
    data["triangles"]["T1"][0][0]["end"] = "up"
    with pytest.raises(InputError):
        LiftAtlas.from_json(data)


def test_missing_key_rejected():
    data = fixtures.atlas("pants").to_json()
    del data["edge_paths"]
    with pytest.raises(InputError):
        LiftAtlas.from_json(data)


def test_tietze_single_elimination():
    gens, rel, subs = tietze_reduce(["a", "b", "c"],
                                    [parse_word("a b a^-1 b^-1"), parse_word("c b")])
    # b occurs once in the second relator and is eliminated as c^-1
    assert gens == ["a", "c"]
    assert rel == parse_word("a c^-1 a^-1 c")
    assert subs == {"b": parse_word("c^-1")}
