"""World snapshots: the immutable model of the external data source.

A snapshot declares countries and indicators and stores a partial mapping
from (countryCode, indicatorCode) pairs to a series of (year, value)
points. Snapshots never change after loading; every mutation used by the
harness produces a fresh snapshot.

Fixture file format (all keys mandatory, no extras allowed):

    {
      "countries":  [{"code": "CZE", "name": "Czech Republic"}, ...],
      "indicators": [{"code": "SE.TER.ENRR", "name": "..."}, ...],
      "values":     [{"country": "CZE", "indicator": "SE.TER.ENRR",
                      "series": [[2000, 28.79], ...]}, ...]
    }
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Iterable

from .diagnostics import Diagnostic, error

Series = tuple[tuple[int, float], ...]
PairKey = tuple[str, str]


class WorldLoadError(Exception):
    """Raised when a fixture file cannot be read or has the wrong shape."""


@dataclass(frozen=True)
class WorldSnapshot:
    countries: tuple[tuple[str, str], ...]  # (code, name)
    indicators: tuple[tuple[str, str], ...]  # (code, name)
    values: dict[PairKey, Series] = field(default_factory=dict)

    def country_codes(self) -> list[str]:
        return [code for code, _ in self.countries]

    def indicator_codes(self) -> list[str]:
        return [code for code, _ in self.indicators]

    def country_name(self, code: str) -> str | None:
        for c, n in self.countries:
            if c == code:
                return n
        return None

    def indicator_name(self, code: str) -> str | None:
        for c, n in self.indicators:
            if c == code:
                return n
        return None

    def __eq__(self, other: object) -> bool:
        # Extensional: declaration order is irrelevant.
        if not isinstance(other, WorldSnapshot):
            return NotImplemented
        return (
            set(self.countries) == set(other.countries)
            and set(self.indicators) == set(other.indicators)
            and self.values == other.values
        )

    def __hash__(self) -> int:
        return hash(self.content_hash())

    def content_hash(self) -> str:
        """Order-independent digest; used to assert read-only interpretation."""
        payload = {
            "countries": sorted(self.countries),
            "indicators": sorted(self.indicators),
            "values": sorted(
                (c, i, [[y, v] for y, v in series])
                for (c, i), series in self.values.items()
            ),
        }
        blob = json.dumps(payload, separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def validate_world(snapshot: WorldSnapshot) -> list[Diagnostic]:
    """Check snapshot invariants; one diagnostic per violation, never raises."""
    diags: list[Diagnostic] = []
    seen: set[str] = set()
    for code, _ in snapshot.countries:
        if code in seen:
            diags.append(error("world.dup-country", f"duplicate country code {code!r}"))
        seen.add(code)
    seen = set()
    for code, _ in snapshot.indicators:
        if code in seen:
            diags.append(error("world.dup-indicator", f"duplicate indicator code {code!r}"))
        seen.add(code)
    countries = set(snapshot.country_codes())
    indicators = set(snapshot.indicator_codes())
    for country, indicator in snapshot.values:
        if country not in countries or indicator not in indicators:
            diags.append(
                error(
                    "world.dangling-key",
                    f"value entry ({country!r}, {indicator!r}) references undeclared codes",
                )
            )
    return diags


def world_lookup(snapshot: WorldSnapshot, country_code: str, indicator_code: str) -> Series | None:
    """The stored series for the pair, or None when the pair is absent."""
    return snapshot.values.get((country_code, indicator_code))


def _shape_error(msg: str) -> WorldLoadError:
    return WorldLoadError(f"world fixture: {msg}")


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise _shape_error(f"unknown key(s) {sorted(extra)} in {where}")
    missing = allowed - set(obj)
    if missing:
        raise _shape_error(f"missing key(s) {sorted(missing)} in {where}")


def snapshot_from_json(doc: object) -> WorldSnapshot:
    if not isinstance(doc, dict):
        raise _shape_error("top level must be an object")
    _check_keys(doc, {"countries", "indicators", "values"}, "top level")

    def read_pairs(items: object, what: str) -> tuple[tuple[str, str], ...]:
        if not isinstance(items, list):
            raise _shape_error(f"{what} must be a list")
        out = []
        for item in items:
            if not isinstance(item, dict):
                raise _shape_error(f"{what} entries must be objects")
            _check_keys(item, {"code", "name"}, what)
            if not isinstance(item["code"], str) or not isinstance(item["name"], str):
                raise _shape_error(f"{what} code/name must be strings")
            out.append((item["code"], item["name"]))
        return tuple(out)

    countries = read_pairs(doc["countries"], "countries")
    indicators = read_pairs(doc["indicators"], "indicators")

    values: dict[PairKey, Series] = {}
    if not isinstance(doc["values"], list):
        raise _shape_error("values must be a list")
    for item in doc["values"]:
        if not isinstance(item, dict):
            raise _shape_error("values entries must be objects")
        _check_keys(item, {"country", "indicator", "series"}, "values")
        country, indicator, series = item["country"], item["indicator"], item["series"]
        if not isinstance(country, str) or not isinstance(indicator, str):
            raise _shape_error("values country/indicator must be strings")
        if not isinstance(series, list):
            raise _shape_error("series must be a list of [year, value] pairs")
        points = []
        for point in series:
            if (
                not isinstance(point, list)
                or len(point) != 2
                or not isinstance(point[0], int)
                or isinstance(point[0], bool)
                or not isinstance(point[1], (int, float))
                or isinstance(point[1], bool)
            ):
                raise _shape_error("series points must be [int year, number value]")
            points.append((point[0], float(point[1])))
        key = (country, indicator)
        if key in values:
            raise _shape_error(f"duplicate value entry for {key}")
        values[key] = tuple(points)

    return WorldSnapshot(countries=countries, indicators=indicators, values=values)


def snapshot_to_json(snapshot: WorldSnapshot) -> dict:
    return {
        "countries": [{"code": c, "name": n} for c, n in snapshot.countries],
        "indicators": [{"code": c, "name": n} for c, n in snapshot.indicators],
        "values": [
            {"country": c, "indicator": i, "series": [[y, v] for y, v in series]}
            for (c, i), series in snapshot.values.items()
        ],
    }


def load_world(path: str) -> WorldSnapshot:
    """Load and shape-check a fixture file. Raises WorldLoadError."""
    if not os.path.exists(path):
        raise WorldLoadError(f"world fixture not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise WorldLoadError(f"cannot read world fixture {path}: {exc}") from exc
    return snapshot_from_json(doc)


class WorldSource:
    """Lazy handle to a world fixture, so providers can defer and count reads."""

    def load(self) -> WorldSnapshot:
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    def reachable(self) -> bool:
        raise NotImplementedError


class FileWorldSource(WorldSource):
    def __init__(self, path: str) -> None:
        self.path = path

    def load(self) -> WorldSnapshot:
        return load_world(self.path)

    def describe(self) -> str:
        return self.path

    def reachable(self) -> bool:
        return os.path.exists(self.path)


class InMemoryWorldSource(WorldSource):
    """Used by tests and the harness; counts reads so laziness is observable."""

    def __init__(self, snapshot: WorldSnapshot | None) -> None:
        self.snapshot = snapshot
        self.reads = 0

    def load(self) -> WorldSnapshot:
        self.reads += 1
        if self.snapshot is None:
            raise WorldLoadError("world source unavailable")
        return self.snapshot

    def describe(self) -> str:
        return "<memory>"

    def reachable(self) -> bool:
        return self.snapshot is not None


def make_snapshot(
    countries: Iterable[tuple[str, str]],
    indicators: Iterable[tuple[str, str]],
    values: dict[PairKey, Iterable[tuple[int, float]]],
) -> WorldSnapshot:
    """Convenience constructor used throughout tests and the harness."""
    return WorldSnapshot(
        countries=tuple(countries),
        indicators=tuple(indicators),
        values={k: tuple((int(y), float(v)) for y, v in s) for k, s in values.items()},
    )
