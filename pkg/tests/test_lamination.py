import json
from importlib import resources

import pytest

from hitchin_coords import fixtures
from hitchin_coords.errors import InputError, LaminationInvalid, UnknownLeaf
from hitchin_coords.lamination import (LaminationComplex, require_valid, spiral_sequence, validate)


def raw(name):
    text = resources.files("hitchin_coords").joinpath("data", f"{name}_lamination.json").read_text()
    return json.loads(text)


def test_pants_valid():
    report = validate(fixtures.lamination("pants"))
    assert report.valid
    assert (report.s, report.t, report.u) == (3, 6, 4)


def test_single_leaf_valid():
    report = validate(fixtures.lamination("single_leaf"))
    assert report.valid
    assert (report.s, report.t, report.u) == (1, 6, 4)


def test_deleted_triangle_is_count_violation():
    data = raw("pants")
    data["triangles"] = data["triangles"][1:]
    report = validate(LaminationComplex.from_json(data))
    assert not report.valid
    assert any(v.startswith("count:") for v in report.violations)
    with pytest.raises(LaminationInvalid):
        require_valid(LaminationComplex.from_json(data))


def test_dangling_side_reference():
    data = raw("single_leaf")
    data["triangles"][0]["sides"][0]["leaf"] = "nope"
    report = validate(LaminationComplex.from_json(data))
    assert any("dangling" in v for v in report.violations)


def test_non_alternating_spiral_order():
    data = raw("pants")
    key = sorted(data["spiral_orders"])[0]
    items = data["spiral_orders"][key]
    items[0], items[1] = items[1], items[0]
    report = validate(LaminationComplex.from_json(data))
    assert any("alternate" in v for v in report.violations)


def test_malformed_json_structure():
    with pytest.raises(InputError):
        LaminationComplex.from_json({"id": "x"})


def test_json_round_trip(fixture_name):
    lam = fixtures.lamination(fixture_name)
    again = LaminationComplex.from_json(json.loads(json.dumps(lam.to_json())))
    assert again == lam


def test_multiplicities_sum(fixture_name):
    lam = fixtures.lamination(fixture_name)
    report = validate(lam)
    assert sum(report.k.values()) == 2 * report.t == 12 * (lam.genus - 1)


def test_every_triangle_contributes_three_spikes(fixture_name):
    lam = fixtures.lamination(fixture_name)
    count = {t: 0 for t in lam.triangle_ids}
    for c in lam.closed_ids:
        for side in ("left", "right"):
            for e in spiral_sequence(lam, c, side):
                count[e.triangle] += 1
    assert set(count.values()) == {3}


def test_pants_spiral_multiplicity():
    lam = fixtures.lamination("pants")
    for c in lam.closed_ids:
        for side in ("left", "right"):
            assert len(spiral_sequence(lam, c, side)) == 2


def test_leaf_with_both_ends_on_one_side_appears_twice():
    lam = fixtures.lamination("single_leaf")
    left = [e.leaf for e in spiral_sequence(lam, "c1", "left")]
    assert left.count("d3") == 2
    flags = {e.toward for e in spiral_sequence(lam, "c1", "left") if e.leaf == "d3"}
    assert flags == {True, False}


def test_spiral_sequence_errors():
    lam = fixtures.lamination("pants")
    with pytest.raises(UnknownLeaf):
        spiral_sequence(lam, "c9", "left")
    with pytest.raises(InputError):
        spiral_sequence(lam, "c1", "up")
