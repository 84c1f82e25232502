import json

import pytest

from mml.world import (
    FileWorldSource,
    WorldLoadError,
    load_world,
    make_snapshot,
    snapshot_from_json,
    validate_world,
    world_lookup,
)

from .conftest import fixture_path


def test_empty_snapshot_is_valid():
    assert validate_world(make_snapshot([], [], {})) == []


def test_duplicate_country_code_reported():
    snap = make_snapshot([("CZE", "A"), ("CZE", "B")], [], {})
    diags = validate_world(snap)
    assert [d.code for d in diags] == ["world.dup-country"]


def test_duplicate_indicator_code_reported():
    snap = make_snapshot([], [("X", "A"), ("X", "B")], {})
    assert [d.code for d in validate_world(snap)] == ["world.dup-indicator"]


def test_dangling_value_key_reported():
    snap = make_snapshot([("CZE", "A")], [], {("CZE", "NOPE"): [(2000, 1.0)]})
    assert [d.code for d in validate_world(snap)] == ["world.dangling-key"]


def test_lookup_returns_fixture_series(world_default):
    # oracle: read the JSON directly, independent of the loader's structures
    with open(fixture_path("world_default.json"), "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    raw_series = next(
        v["series"] for v in raw["values"]
        if v["country"] == "CZE" and v["indicator"] == "SE.TER.ENRR"
    )
    got = world_lookup(world_default, "CZE", "SE.TER.ENRR")
    assert [[y, v] for y, v in got] == raw_series


def test_lookup_absent_cases(world_default):
    assert world_lookup(make_snapshot([], [], {}), "CZE", "X") is None
    assert world_lookup(world_default, "CZE", "NOPE") is None


def test_extensional_equality_ignores_order():
    a = make_snapshot([("A", "x"), ("B", "y")], [("I", "i")], {("A", "I"): [(2000, 1.0)]})
    b = make_snapshot([("B", "y"), ("A", "x")], [("I", "i")], {("A", "I"): [(2000, 1.0)]})
    assert a == b
    assert a.content_hash() == b.content_hash()
    c = make_snapshot([("A", "x")], [("I", "i")], {("A", "I"): [(2000, 1.0)]})
    assert a != c


@pytest.mark.parametrize(
    "mutilate",
    [
        lambda d: d.pop("countries"),
        lambda d: d.update(extra=1),
        lambda d: d["countries"].append({"code": "X"}),
        lambda d: d["values"].append({"country": "A", "indicator": "I", "series": [[2000]]}),
    ],
)
def test_shape_errors_rejected(mutilate):
    doc = {
        "countries": [{"code": "A", "name": "a"}],
        "indicators": [{"code": "I", "name": "i"}],
        "values": [],
    }
    mutilate(doc)
    with pytest.raises(WorldLoadError):
        snapshot_from_json(doc)


def test_load_world_missing_file():
    with pytest.raises(WorldLoadError):
        load_world("/definitely/not/here.json")
    assert not FileWorldSource("/definitely/not/here.json").reachable()


def test_year_must_be_int_not_bool():
    doc = {
        "countries": [{"code": "A", "name": "a"}],
        "indicators": [{"code": "I", "name": "i"}],
        "values": [{"country": "A", "indicator": "I", "series": [[True, 1.0]]}],
    }
    with pytest.raises(WorldLoadError):
        snapshot_from_json(doc)
