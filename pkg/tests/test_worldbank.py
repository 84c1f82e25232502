import json
import os

import pytest

from mml.coreir import TAsync, TNamed, TOption
from mml.providers.kit import JsTemplatePlan, ProviderFailure, RuntimeCallPlan, instantiate_provider
from mml.providers.worldbank import (
    SERIES_TYPE,
    DataProviderParams,
    erase_country_access,
    erase_indicator_access,
    indicator_member_type,
    provide_data_context,
)
from mml.world import FileWorldSource, InMemoryWorldSource, load_world, make_snapshot

from .conftest import fixture_path


@pytest.fixture(scope="module")
def snapshot():
    return load_world(fixture_path("world_default.json"))


def member_names(ctx, type_id):
    return ctx.types[type_id].member_names()


def test_countries_members_match_fixture(snapshot):
    # oracle: enumerate the fixture file directly
    with open(fixture_path("world_default.json"), "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    expected = sorted(c["name"] for c in raw["countries"])
    ctx = provide_data_context(snapshot, DataProviderParams(), alias="W")
    assert member_names(ctx, "W.Countries") == expected


def test_context_shape(snapshot):
    ctx = provide_data_context(snapshot, DataProviderParams(asynchronous=True), alias="W")
    root = ctx.types["W"]
    assert root.member("GetDataContext").kind == "method"
    dc = ctx.types["W.DataContext"]
    assert dc.member("Countries").signature == TNamed("W.Countries")
    country = ctx.types["W.Country"]
    assert country.member("Indicators").signature == TNamed("W.Indicators")


def test_async_parameter_wraps_indicator_type(snapshot):
    assert indicator_member_type(DataProviderParams(asynchronous=True)) == TAsync(SERIES_TYPE)
    assert indicator_member_type(DataProviderParams()) == SERIES_TYPE
    assert indicator_member_type(
        DataProviderParams(asynchronous=True, assume_missing_values=True)
    ) == TAsync(TOption(SERIES_TYPE))


def test_empty_snapshot_context_is_valid():
    ctx = provide_data_context(make_snapshot([], [], {}), DataProviderParams(), alias="W")
    assert member_names(ctx, "W.Countries") == []


def test_country_erasure_bakes_code(snapshot):
    plan = erase_country_access(snapshot, "Czech Republic")
    assert isinstance(plan, RuntimeCallPlan) and plan.symbol == "GetCountry"
    literals = [a.literal for a in plan.args if a.kind == "lit"]
    assert literals == ["CZE"]

    plan = erase_country_access(snapshot, "United States")
    assert [a.literal for a in plan.args if a.kind == "lit"] == ["USA"]


def test_plan_never_contains_display_name(snapshot):
    for _, name in snapshot.countries:
        plan = erase_country_access(snapshot, name)
        assert name not in [a.literal for a in plan.args]


def test_indicator_erasure_symbols(snapshot):
    name = "School enrollment, tertiary (% gross)"
    plan = erase_indicator_access(snapshot, name, DataProviderParams(asynchronous=True))
    assert plan.symbol == "AsyncGetIndicator"
    plan = erase_indicator_access(snapshot, name, DataProviderParams())
    assert plan.symbol == "GetIndicator"
    plan = erase_indicator_access(snapshot, name, DataProviderParams(assume_missing_values=True))
    assert plan.symbol == "GetIndicatorOpt"
    assert [a.literal for a in plan.args if a.kind == "lit"] == ["SE.TER.ENRR", False]


def test_colliding_display_names_get_code_suffix():
    snap = make_snapshot(
        [("KOR", "Korea"), ("PRK", "Korea")],
        [("I", "Ind")],
        {("KOR", "I"): [(2000, 1.0)], ("PRK", "I"): [(2000, 2.0)]},
    )
    ctx = provide_data_context(snap, DataProviderParams(), alias="W")
    assert member_names(ctx, "W.Countries") == ["Korea (KOR)", "Korea (PRK)"]


def test_indicators_property_is_identity_template(snapshot):
    ctx = provide_data_context(snapshot, DataProviderParams(), alias="W")
    plan = ctx.types["W.Country"].member("Indicators").erasure
    assert isinstance(plan, JsTemplatePlan)
    assert plan.text == "return {0};"


def test_invalid_world_fixture_is_provider_failure():
    bad = make_snapshot([("X", "a"), ("X", "b")], [], {})
    with pytest.raises(ProviderFailure, match="invalid world"):
        instantiate_provider("WorldBankData", (), InMemoryWorldSource(bad))


def test_schema_cache_survives_source_removal(tmp_path, monkeypatch, snapshot):
    world_file = tmp_path / "w.json"
    world_file.write_text(open(fixture_path("world_default.json")).read())
    cache_dir = tmp_path / "cache"
    monkeypatch.setenv("MML_CACHE_DIR", str(cache_dir))

    ctx = instantiate_provider("WorldBankData", (), FileWorldSource(str(world_file)), alias="W")
    assert member_names(ctx, "W.Countries")
    assert os.listdir(cache_dir)  # schema cached

    world_file.unlink()  # the source goes away; the cache still serves it
    ctx2 = instantiate_provider("WorldBankData", (), FileWorldSource(str(world_file)), alias="W")
    assert member_names(ctx2, "W.Countries") == member_names(ctx, "W.Countries")


def test_no_cache_without_env(tmp_path, monkeypatch):
    monkeypatch.delenv("MML_CACHE_DIR", raising=False)
    world_file = tmp_path / "w.json"
    world_file.write_text(open(fixture_path("world_default.json")).read())
    instantiate_provider("WorldBankData", (), FileWorldSource(str(world_file)), alias="W")
    world_file.unlink()
    with pytest.raises(ProviderFailure):
        instantiate_provider("WorldBankData", (), FileWorldSource(str(world_file)), alias="W")
