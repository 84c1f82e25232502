"""Data provider projecting a world snapshot into name-keyed member types.

The projection: a root type whose `GetDataContext()` yields a data context;
`.Countries` has one property per country (member name is the display
name); each country's `.Indicators` has one property per indicator. Member
uses erase to runtime-library calls keyed by *codes*, so running compiled
code never depends on display names.

Static parameters:
    Asynchronous=true        indicator members become async computations
    AssumeMissingValues=true indicator members yield options instead of failing
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

from ..coreir import FLOAT, INT, CoreType, TAsync, TList, TNamed, TOption, TTuple
from ..world import (
    FileWorldSource,
    WorldLoadError,
    WorldSnapshot,
    WorldSource,
    snapshot_from_json,
    snapshot_to_json,
    validate_world,
)
from .kit import (
    LIT,
    RECV,
    ErasurePlan,
    JsTemplatePlan,
    Overload,
    ProvidedContext,
    ProvidedMember,
    ProvidedTypeDef,
    ProviderFailure,
    RuntimeCallPlan,
    register_provider,
)

SERIES_TYPE: CoreType = TList(TTuple((INT, FLOAT)))

# Identity template: the indicators handle is the country handle itself,
# so indicator access erases to a call on the country, matching the
# runtime library's AsyncGetIndicator(countryHandle, code) signature.
_IDENTITY_TEMPLATE = "return {0};"
_NULL_TEMPLATE = "return null;"


@dataclass(frozen=True)
class DataProviderParams:
    asynchronous: bool = False
    assume_missing_values: bool = False


def parse_params(static_params: tuple) -> DataProviderParams:
    asynchronous = False
    assume_missing = False
    for name, value in static_params:
        if name is None:
            raise ProviderFailure("WorldBankData static parameters must be named")
        if name == "Asynchronous":
            if not isinstance(value, bool):
                raise ProviderFailure("Asynchronous must be a bool")
            asynchronous = value
        elif name == "AssumeMissingValues":
            if not isinstance(value, bool):
                raise ProviderFailure("AssumeMissingValues must be a bool")
            assume_missing = value
        else:
            raise ProviderFailure(f"unknown static parameter {name!r}")
    return DataProviderParams(asynchronous, assume_missing)


def _disambiguated(pairs: tuple[tuple[str, str], ...]) -> list[tuple[str, str]]:
    """(code, name) pairs -> (member name, code), suffixing codes on clashes."""
    by_name: dict[str, list[str]] = {}
    for code, name in pairs:
        by_name.setdefault(name, []).append(code)
    out = []
    for code, name in pairs:
        if len(by_name[name]) > 1:
            out.append((f"{name} ({code})", code))
        else:
            out.append((name, code))
    return out


def erase_country_access(snapshot: WorldSnapshot, member_name: str) -> ErasurePlan:
    for name, code in _disambiguated(snapshot.countries):
        if name == member_name:
            return RuntimeCallPlan("GetCountry", (RECV, LIT(code)))
    raise ProviderFailure(f"no country member {member_name!r}")


def indicator_symbol(params: DataProviderParams) -> str:
    if params.assume_missing_values:
        return "GetIndicatorOpt"
    return "AsyncGetIndicator" if params.asynchronous else "GetIndicator"


def _indicator_plan(code: str, params: DataProviderParams) -> ErasurePlan:
    if params.assume_missing_values:
        # the option-returning accessor serves both modes; the flag picks
        # immediate vs pending delivery
        return RuntimeCallPlan("GetIndicatorOpt", (RECV, LIT(code), LIT(params.asynchronous)))
    symbol = "AsyncGetIndicator" if params.asynchronous else "GetIndicator"
    return RuntimeCallPlan(symbol, (RECV, LIT(code)))


def erase_indicator_access(
    snapshot: WorldSnapshot, member_name: str, params: DataProviderParams
) -> ErasurePlan:
    for name, code in _disambiguated(snapshot.indicators):
        if name == member_name:
            return _indicator_plan(code, params)
    raise ProviderFailure(f"no indicator member {member_name!r}")


def indicator_member_type(params: DataProviderParams) -> CoreType:
    ty: CoreType = SERIES_TYPE
    if params.assume_missing_values:
        ty = TOption(ty)
    if params.asynchronous:
        ty = TAsync(ty)
    return ty


def provide_data_context(
    snapshot: WorldSnapshot, params: DataProviderParams, alias: str = "WorldBankData"
) -> ProvidedContext:
    """Build the provided context over an already validated snapshot."""
    root_id = alias
    ctx_id = f"{alias}.DataContext"
    countries_id = f"{alias}.Countries"
    country_id = f"{alias}.Country"
    indicators_id = f"{alias}.Indicators"

    def root_members() -> list[ProvidedMember]:
        return [
            ProvidedMember(
                name="GetDataContext",
                kind="method",
                signature=TNamed(ctx_id),
                erasure=JsTemplatePlan(_NULL_TEMPLATE, ()),
                overloads=(Overload((), TNamed(ctx_id)),),
            )
        ]

    def context_members() -> list[ProvidedMember]:
        return [
            ProvidedMember(
                name="Countries",
                kind="property",
                signature=TNamed(countries_id),
                erasure=RuntimeCallPlan("GetCountries", (RECV,)),
            )
        ]

    def country_members() -> list[ProvidedMember]:
        return [
            ProvidedMember(
                name=name,
                kind="property",
                signature=TNamed(country_id),
                erasure=RuntimeCallPlan("GetCountry", (RECV, LIT(code))),
            )
            for name, code in _disambiguated(snapshot.countries)
        ]

    def country_type_members() -> list[ProvidedMember]:
        return [
            ProvidedMember(
                name="Indicators",
                kind="property",
                signature=TNamed(indicators_id),
                erasure=JsTemplatePlan(_IDENTITY_TEMPLATE, (RECV,)),
            )
        ]

    def indicator_members() -> list[ProvidedMember]:
        member_ty = indicator_member_type(params)
        return [
            ProvidedMember(
                name=name,
                kind="property",
                signature=member_ty,
                erasure=_indicator_plan(code, params),
            )
            for name, code in _disambiguated(snapshot.indicators)
        ]

    ctx = ProvidedContext()
    ctx.add_type(ProvidedTypeDef(root_id, alias, root_members))
    ctx.add_type(ProvidedTypeDef(ctx_id, "DataContext", context_members))
    ctx.add_type(ProvidedTypeDef(countries_id, "Countries", country_members))
    ctx.add_type(ProvidedTypeDef(country_id, "Country", country_type_members))
    ctx.add_type(ProvidedTypeDef(indicators_id, "Indicators", indicator_members))
    ctx.root_aliases[alias] = root_id
    return ctx


# ---------------------------------------------------------------------------
# schema cache (optional, keyed by source path; no eviction policy)


def _cache_path(cache_dir: str, source_path: str) -> str:
    key = hashlib.sha256(os.path.abspath(source_path).encode("utf-8")).hexdigest()[:24]
    return os.path.join(cache_dir, f"worldbank-{key}.json")


def load_snapshot(source: WorldSource) -> WorldSnapshot:
    """Load via the source, falling back to / refreshing the on-disk cache."""
    cache_dir = os.environ.get("MML_CACHE_DIR")
    cache_file = None
    if cache_dir and isinstance(source, FileWorldSource):
        cache_file = _cache_path(cache_dir, source.path)
    try:
        snapshot = source.load()
    except WorldLoadError:
        if cache_file and os.path.exists(cache_file):
            with open(cache_file, "r", encoding="utf-8") as fh:
                return snapshot_from_json(json.load(fh))
        raise
    if cache_file:
        os.makedirs(cache_dir, exist_ok=True)
        with open(cache_file, "w", encoding="utf-8") as fh:
            json.dump(snapshot_to_json(snapshot), fh)
    return snapshot


def _provider(alias: str, static_params: tuple, source: object) -> ProvidedContext:
    params = parse_params(static_params)
    if not isinstance(source, WorldSource):
        raise ProviderFailure("WorldBankData requires a world source (--world)")
    try:
        snapshot = load_snapshot(source)
    except WorldLoadError as exc:
        raise ProviderFailure(f"world source unreachable: {exc}") from exc
    problems = validate_world(snapshot)
    if problems:
        raise ProviderFailure(
            "invalid world fixture: " + "; ".join(d.message for d in problems)
        )
    return provide_data_context(snapshot, params, alias)


register_provider("WorldBankData", _provider)
