import pytest

from mml.providers.kit import (
    ProvidedMember,
    ProvidedTypeDef,
    ProviderFailure,
    RuntimeCallPlan,
    instantiate_provider,
    lookup_member,
    RECV,
)
from mml.coreir import STRING
from mml.providers.worldbank import provide_data_context, DataProviderParams
from mml.world import InMemoryWorldSource, make_snapshot


def _member(name: str) -> ProvidedMember:
    return ProvidedMember(name, "property", STRING, RuntimeCallPlan("GetCountries", (RECV,)))


def test_member_lists_are_lazy_and_memoized():
    calls = []

    def thunk():
        calls.append(1)
        return [_member("A"), _member("B")]

    typedef = ProvidedTypeDef("T", "T", thunk)
    assert calls == []  # nothing materialized yet
    assert typedef.member("A") is not None
    assert typedef.member("B") is not None
    assert typedef.member("missing") is None
    assert calls == [1]
    assert typedef.materialize_count == 1


def test_materialization_failure_is_sticky():
    attempts = []

    def thunk():
        attempts.append(1)
        raise ProviderFailure("boom")

    typedef = ProvidedTypeDef("T", "T", thunk)
    with pytest.raises(ProviderFailure):
        typedef.member("A")
    with pytest.raises(ProviderFailure):
        typedef.member("A")
    assert attempts == [1]  # not retried within the session


def test_runtime_call_plans_must_use_known_symbols():
    bad = ProvidedMember("x", "property", STRING, RuntimeCallPlan("NotASymbol", (RECV,)))
    typedef = ProvidedTypeDef("T", "T", lambda: [bad])
    with pytest.raises(ProviderFailure):
        typedef.member("x")


def test_instantiate_unknown_provider():
    with pytest.raises(ProviderFailure):
        instantiate_provider("NoSuchProvider", (), None)


def _snapshot():
    return make_snapshot(
        [("CZE", "Czech Republic"), ("USA", "United States")],
        [("SE.TER.ENRR", "School enrollment, tertiary (% gross)")],
        {("CZE", "SE.TER.ENRR"): [(2000, 28.79)]},
    )


def test_instantiate_performs_no_member_work():
    source = InMemoryWorldSource(_snapshot())
    ctx = instantiate_provider("WorldBankData", (("Asynchronous", True),), source, alias="W")
    assert source.reads == 1  # the schema is read once, eagerly
    assert all(t.materialize_count == 0 for t in ctx.types.values())
    member = lookup_member(ctx, "W.Countries", "Czech Republic")
    assert member is not None and member.kind == "property"
    # only the touched type materialized
    assert ctx.types["W.Countries"].materialize_count == 1
    assert ctx.types["W.Indicators"].materialize_count == 0


def test_second_lookup_never_rereads_source():
    source = InMemoryWorldSource(_snapshot())
    ctx = instantiate_provider("WorldBankData", (), source, alias="W")
    assert lookup_member(ctx, "W.Countries", "Czech Republic") is not None
    reads_after_first = source.reads
    assert lookup_member(ctx, "W.Countries", "United States") is not None
    assert lookup_member(ctx, "W.Indicators", "School enrollment, tertiary (% gross)") is not None
    assert source.reads == reads_after_first == 1


def test_absent_member_lookup():
    ctx = provide_data_context(_snapshot(), DataProviderParams(), alias="W")
    assert lookup_member(ctx, "W.Countries", "Atlantis") is None


def test_missing_source_is_provider_failure():
    with pytest.raises(ProviderFailure, match="unreachable"):
        instantiate_provider("WorldBankData", (), InMemoryWorldSource(None))


def test_unknown_static_parameter_is_provider_failure():
    with pytest.raises(ProviderFailure):
        instantiate_provider("WorldBankData", (("Wat", True),), InMemoryWorldSource(_snapshot()))
    with pytest.raises(ProviderFailure):
        instantiate_provider(
            "WorldBankData", (("Asynchronous", "yes"),), InMemoryWorldSource(_snapshot())
        )


def test_determinism_equal_snapshots_equal_contexts():
    a = instantiate_provider("WorldBankData", (), InMemoryWorldSource(_snapshot()), alias="W")
    b = instantiate_provider("WorldBankData", (), InMemoryWorldSource(_snapshot()), alias="W")
    assert a.structural_signature() == b.structural_signature()


def test_merged_contexts_detect_alias_clash():
    a = instantiate_provider("WorldBankData", (), InMemoryWorldSource(_snapshot()), alias="W")
    b = instantiate_provider("WorldBankData", (), InMemoryWorldSource(_snapshot()), alias="W")
    with pytest.raises(ProviderFailure):
        a.merged_with(b)


def test_merged_contexts_combine_distinct_aliases():
    a = instantiate_provider("WorldBankData", (), InMemoryWorldSource(_snapshot()), alias="W1")
    b = instantiate_provider("WorldBankData", (), InMemoryWorldSource(_snapshot()), alias="W2")
    merged = a.merged_with(b)
    assert set(merged.root_aliases) == {"W1", "W2"}


def test_duplicate_member_overloads_rejected():
    from mml.providers.kit import Overload, Param, EmitCallPlan

    with pytest.raises(ValueError):
        ProvidedMember(
            "m",
            "method",
            STRING,
            EmitCallPlan(False, "m", (RECV,)),
            overloads=(
                Overload((Param("a", STRING),), STRING),
                Overload((Param("b", STRING),), STRING),
            ),
        )
