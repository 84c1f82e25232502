"""Compile-under-w0 / run-under-w1 experiments and the safety property suite.

`classify` runs one experiment and reports which of the four outcome kinds
happened. `safety_suite` generates randomized (program, w0, w1) trials and
checks the containment property: when every country-indicator pair the
compiled code may access is still present in w1, interpretation neither
fails with a missing key nor produces a value whose dynamic tag
contradicts the inferred type.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from . import coreir as C
from .compiler import CompileError, compile_source
from .failures import FailureKind, ProviderFailed, RecompilationFailed, RuntimeFailed, Success
from .interp import RunFailure, Value, interpret, trace_accessed_pairs
from .progen import gen_snapshot
from .providers.kit import ProviderFailure
from .typecheck import zonk
from .world import InMemoryWorldSource, WorldSnapshot, WorldSource, make_snapshot

# ---------------------------------------------------------------------------
# world mutations (the scriptable mutation language)


def apply_mutation(snapshot: WorldSnapshot, op: dict) -> WorldSnapshot:
    kind = op.get("op")
    if kind == "rename-country":
        countries = tuple(
            (code, op["name"] if code == op["code"] else name)
            for code, name in snapshot.countries
        )
        return make_snapshot(countries, snapshot.indicators, dict(snapshot.values))
    if kind == "remove-country":
        countries = tuple((c, n) for c, n in snapshot.countries if c != op["code"])
        values = {k: v for k, v in snapshot.values.items() if k[0] != op["code"]}
        return make_snapshot(countries, snapshot.indicators, values)
    if kind == "remove-indicator":
        indicators = tuple((c, n) for c, n in snapshot.indicators if c != op["code"])
        values = {k: v for k, v in snapshot.values.items() if k[1] != op["code"]}
        return make_snapshot(snapshot.countries, indicators, values)
    if kind == "drop-pair":
        key = (op["country"], op["indicator"])
        values = {k: v for k, v in snapshot.values.items() if k != key}
        return make_snapshot(snapshot.countries, snapshot.indicators, values)
    raise ValueError(f"unknown mutation op {kind!r}")


def apply_mutations(snapshot: WorldSnapshot, ops: list[dict]) -> WorldSnapshot:
    for op in ops:
        snapshot = apply_mutation(snapshot, op)
    return snapshot


def load_mutation_script(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise ValueError("mutation script must be a JSON list of ops")
    return doc


# ---------------------------------------------------------------------------
# classification


def classify(
    source_text: str,
    w0_source: WorldSource | None,
    w1: WorldSnapshot,
    dts_dir: str | None = None,
) -> FailureKind:
    """Compile against w0, interpret against w1, name the outcome."""
    try:
        compiled = compile_source(source_text, w0_source, dts_dir)
    except ProviderFailure as exc:
        return ProviderFailed(exc.reason)
    except CompileError as exc:
        return RecompilationFailed(tuple(exc.diagnostics))
    try:
        value = interpret(compiled.core, w1)
    except RunFailure as exc:
        return RuntimeFailed(str(exc), exc.missing_key)
    return Success(value)


# ---------------------------------------------------------------------------
# tag preservation


def tag_matches(ty: C.CoreType, value: Value) -> bool:
    ty = zonk(ty)
    if isinstance(ty, (C.TVar, C.TObject)):
        return True
    if isinstance(ty, C.TAsync):
        # entries of async type are driven to completion by the interpreter
        return tag_matches(ty.result, value)
    if isinstance(ty, C.TOption):
        if value.tag == "jsobject" and value.payload is None:
            return True
        return tag_matches(ty.element, value)
    if isinstance(ty, C.TNamed):
        return value.tag == "jsobject"
    if isinstance(ty, C.TFun):
        return value.tag == "closure"
    if isinstance(ty, C.TInt):
        return value.tag == "int"
    if isinstance(ty, C.TFloat):
        return value.tag == "float"
    if isinstance(ty, C.TBool):
        return value.tag == "bool"
    if isinstance(ty, C.TString):
        return value.tag == "string"
    if isinstance(ty, C.TUnit):
        return value.tag == "unit"
    if isinstance(ty, C.TTuple):
        return (
            value.tag == "tuple"
            and len(value.payload) == len(ty.items)  # type: ignore[arg-type]
            and all(tag_matches(t, v) for t, v in zip(ty.items, value.payload))  # type: ignore[arg-type]
        )
    if isinstance(ty, C.TList):
        return value.tag == "list" and all(tag_matches(ty.element, v) for v in value.payload)  # type: ignore[union-attr]
    if isinstance(ty, C.TArray):
        return value.tag == "array" and all(tag_matches(ty.element, v) for v in value.payload)  # type: ignore[union-attr]
    return False


# ---------------------------------------------------------------------------
# safety templates: programs whose data accesses are unconditional


def _bt(name: str) -> str:
    return f"`{name}`"


def _pick_members(w0: WorldSnapshot, rng: random.Random, n_countries: int, n_indicators: int):
    countries = rng.sample(list(w0.countries), k=min(n_countries, len(w0.countries)))
    indicators = rng.sample(list(w0.indicators), k=min(n_indicators, len(w0.indicators)))
    return countries, indicators


def template_sync_series_list(w0: WorldSnapshot, rng: random.Random):
    countries, [(icode, iname)] = _pick_members(w0, rng, rng.randint(1, 3), 1)
    accesses = "; ".join(
        f"data.Countries.{_bt(name)}.Indicators.{_bt(iname)}" for _, name in countries
    )
    text = (
        "type WB = WorldBankData\n"
        "let data = WB.GetDataContext()\n"
        f"do [ {accesses} ]\n"
    )
    planned = {(code, icode) for code, _ in countries}
    return text, planned


def template_async_accumulate(w0: WorldSnapshot, rng: random.Random):
    countries, [(icode, iname)] = _pick_members(w0, rng, rng.randint(1, 3), 1)
    pairs = "; ".join(f'("{code}", data.Countries.{_bt(name)})' for code, name in countries)
    text = (
        "type WB = WorldBankData<Asynchronous = true>\n"
        "let data = WB.GetDataContext()\n"
        "let main = fun () -> async {\n"
        "  let out = [| |];\n"
        f"  for (nm, c) in [ {pairs} ] do (\n"
        f"    let! s = c.Indicators.{_bt(iname)};\n"
        "    out.push((nm, s));\n"
        "    ()\n"
        "  );\n"
        "  return out\n"
        "}\n"
        "do main ()\n"
    )
    planned = {(code, icode) for code, _ in countries}
    return text, planned


def template_async_pair(w0: WorldSnapshot, rng: random.Random):
    countries, indicators = _pick_members(w0, rng, 2, min(2, len(w0.indicators)))
    (c1_code, c1_name) = countries[0]
    (c2_code, c2_name) = countries[-1]
    (i1_code, i1_name) = indicators[0]
    (i2_code, i2_name) = indicators[-1]
    text = (
        "type WB = WorldBankData<Asynchronous = true>\n"
        "let data = WB.GetDataContext()\n"
        "do (async {\n"
        f"  let! a = data.Countries.{_bt(c1_name)}.Indicators.{_bt(i1_name)};\n"
        f"  let! b = data.Countries.{_bt(c2_name)}.Indicators.{_bt(i2_name)};\n"
        "  return (a, b)\n"
        "})\n"
    )
    planned = {(c1_code, i1_code), (c2_code, i2_code)}
    return text, planned


def template_sync_processed(w0: WorldSnapshot, rng: random.Random):
    [(code, name)], [(icode, iname)] = _pick_members(w0, rng, 1, 1)
    text = (
        "type WB = WorldBankData\n"
        "let data = WB.GetDataContext()\n"
        "let years = fun s -> Seq.map (fun (y, v) -> y) s\n"
        f"do years (data.Countries.{_bt(name)}.Indicators.{_bt(iname)})\n"
    )
    return text, {(code, icode)}


SAFETY_TEMPLATES = (
    template_sync_series_list,
    template_async_accumulate,
    template_async_pair,
    template_sync_processed,
)


# ---------------------------------------------------------------------------
# w1 generation


def _mutate_for_trial(
    w0: WorldSnapshot, rng: random.Random, planned: set[tuple[str, str]], adversarial: bool
) -> WorldSnapshot:
    w1 = w0
    if adversarial:
        victim = rng.choice(sorted(planned))
        if rng.random() < 0.5:
            w1 = apply_mutation(w1, {"op": "remove-country", "code": victim[0]})
        else:
            w1 = apply_mutation(w1, {"op": "drop-pair", "country": victim[0], "indicator": victim[1]})
        return w1
    planned_countries = {c for c, _ in planned}
    # renames never violate the containment hypothesis
    for code, name in w0.countries:
        if rng.random() < 0.4:
            w1 = apply_mutation(w1, {"op": "rename-country", "code": code, "name": name + " (renamed)"})
    # removing an untouched country keeps every planned pair present
    untouched = [c for c, _ in w0.countries if c not in planned_countries]
    if untouched and rng.random() < 0.5:
        w1 = apply_mutation(w1, {"op": "remove-country", "code": rng.choice(untouched)})
    # dropping an unplanned pair may or may not void the hypothesis (the
    # trace is a cartesian over-approximation); both cases are measured
    unplanned = [k for k in w0.values if k not in planned]
    if unplanned and rng.random() < 0.4:
        country, indicator = rng.choice(sorted(unplanned))
        w1 = apply_mutation(w1, {"op": "drop-pair", "country": country, "indicator": indicator})
    # a brand-new country never affects compiled code
    if rng.random() < 0.3:
        countries = w1.countries + ((f"NEW{rng.randint(0, 99):02d}", "Terra Nova"),)
        w1 = make_snapshot(countries, w1.indicators, dict(w1.values))
    return w1


@dataclass
class SafetyReport:
    trials: int = 0
    checked: int = 0  # hypothesis held and the theorem instance was asserted
    vacuous: int = 0  # hypothesis false (trial excluded from the theorem)
    adversarial: int = 0
    counterexamples: list[dict] = field(default_factory=list)
    elapsed: float = 0.0

    def ok(self) -> bool:
        return not self.counterexamples


def safety_suite(
    templates=SAFETY_TEMPLATES,
    snapshot_generator=gen_snapshot,
    trials: int = 1000,
    seed: int = 20260810,
) -> SafetyReport:
    report = SafetyReport()
    start = time.perf_counter()
    for i in range(trials):
        rng = random.Random(seed * 1_000_003 + i)
        w0 = snapshot_generator(rng, rng.randint(2, 4), rng.randint(1, 2), 1.0)
        template = templates[i % len(templates)]
        text, planned = template(w0, rng)
        adversarial = rng.random() < 0.2
        note = {"trial": i, "template": template.__name__}

        try:
            compiled = compile_source(text, InMemoryWorldSource(w0))
        except (CompileError, ProviderFailure) as exc:
            note["error"] = f"template failed to compile: {exc}"
            report.counterexamples.append(note)
            continue
        pairs = trace_accessed_pairs(compiled.core)
        w1 = _mutate_for_trial(w0, rng, planned, adversarial)
        hypothesis = pairs <= set(w1.values.keys())

        outcome: FailureKind
        try:
            value = interpret(compiled.core, w1)
            outcome = Success(value)
        except RunFailure as exc:
            outcome = RuntimeFailed(str(exc), exc.missing_key)

        report.trials += 1
        if adversarial:
            report.adversarial += 1
            # an actually-accessed pair was dropped: the run must fail on it
            if not (isinstance(outcome, RuntimeFailed) and outcome.missing_key is not None):
                note["error"] = f"adversarial drop did not fail at run time: {outcome}"
                report.counterexamples.append(note)
            continue
        if not hypothesis:
            report.vacuous += 1
            continue
        report.checked += 1
        if isinstance(outcome, RuntimeFailed) and outcome.missing_key is not None:
            note["error"] = f"missing-key failure despite containment: {outcome.missing_key}"
            report.counterexamples.append(note)
        elif isinstance(outcome, Success):
            entry_ty = compiled.typed.entry.ty if compiled.typed.entry is not None else None
            if entry_ty is not None and not tag_matches(entry_ty, outcome.value):
                note["error"] = (
                    f"tag mismatch: type {C.type_text(zonk(entry_ty))}, value tag {outcome.value.tag}"
                )
                report.counterexamples.append(note)
        else:
            note["error"] = f"unexpected outcome {outcome}"
            report.counterexamples.append(note)
    report.elapsed = time.perf_counter() - start
    return report
