"""Acceptance criteria, one test per criterion.

Each test prints a `ACCEPT <criterion>: PASS` line on success (run with
`pytest tests/test_acceptance.py -v -s` to see them). Tolerances and
budgets are pinned here, not configurable.
"""

from __future__ import annotations

import json
import os
import random
import time

import pytest

from mml import coreir as C
from mml.compiler import CompileError, compile_file, compile_source
from mml.coreir import dump_module, normalize_type
from mml.failures import ProviderFailed, RecompilationFailed, RuntimeFailed, Success
from mml.harness import apply_mutations, classify, safety_suite
from mml.interp import RunFailure, interpret, value_to_jsonable
from mml.jsbackend import SHIM_SYMBOLS, emit_module
from mml.printer import pretty_print
from mml.progen import GenOptions, MLGen
from mml.providers.kit import EmitCallPlan, EmitPropertyGetPlan, instantiate_provider
from mml.typecheck import CheckError, typecheck_module, zonk
from mml.world import InMemoryWorldSource, world_lookup

from . import reference_w
from .conftest import FIXTURES, GOLDEN, fixture_path, read_fixture, run_node


def _accept(name: str) -> None:
    print(f"ACCEPT {name}: PASS")


WORLD = fixture_path("world_default.json")


# -- [PRIMARY] case-study reproduction ----------------------------------------


def test_case_study_reproduction(world_default):
    started = time.perf_counter()
    compiled = compile_file(fixture_path("case_study.mml"), WORLD)
    value = interpret(compiled.core, world_default)
    elapsed = time.perf_counter() - started

    got = value_to_jsonable(value)
    expected = [
        [name, [[y, v] for y, v in world_lookup(world_default, code, "SE.TER.ENRR")]]
        for code, name in [
            ("EUU", "European Union"),
            ("CZE", "Czech Republic"),
            ("GBR", "United Kingdom"),
            ("USA", "United States"),
        ]
    ]
    assert got == expected, "case-study value differs from the world_lookup oracle"
    assert elapsed < 1.0, f"end-to-end took {elapsed:.2f}s (budget: 1s)"
    _accept("case-study reproduction (4 country-series pairs, <1s)")


# -- [PRIMARY] failure-taxonomy matrix ----------------------------------------

_MATRIX_PROGRAMS = [
    "case_study.mml",
    "enrollment_sync.mml",
    "checked_total.mml",
    "first_year.mml",
]
_MUTATIONS: dict[str, list[dict]] = {
    "identity": [],
    "rename": [{"op": "rename-country", "code": "CZE", "name": "Czechia"}],
    "remove-country": [{"op": "remove-country", "code": "CZE"}],
    "remove-indicator": [{"op": "remove-indicator", "code": "SE.TER.ENRR"}],
    "missing-source": [],
}


def test_failure_taxonomy_matrix(world_default):
    w0 = world_default
    cells = 0
    for program in _MATRIX_PROGRAMS:
        text = read_fixture(program)
        baseline = classify(text, InMemoryWorldSource(w0), w0, dts_dir=FIXTURES)
        assert isinstance(baseline, Success)
        for mutation, script in _MUTATIONS.items():
            if mutation == "missing-source":
                outcome = classify(text, InMemoryWorldSource(None), w0, dts_dir=FIXTURES)
                assert isinstance(outcome, ProviderFailed), (program, mutation, outcome)
                cells += 1
                continue
            w1 = apply_mutations(w0, script)
            outcome = classify(text, InMemoryWorldSource(w0), w1, dts_dir=FIXTURES)
            recompiled = classify(text, InMemoryWorldSource(w1), w1, dts_dir=FIXTURES)
            if mutation == "identity":
                assert isinstance(outcome, Success), (program, mutation, outcome)
                assert isinstance(recompiled, Success)
            elif mutation == "rename":
                assert isinstance(outcome, Success), (program, mutation, outcome)
                assert outcome.value == baseline.value, (program, "rename changed the value")
                assert isinstance(recompiled, RecompilationFailed)
            else:
                assert isinstance(outcome, RuntimeFailed), (program, mutation, outcome)
                assert isinstance(recompiled, RecompilationFailed), (program, mutation)
            cells += 1
    assert cells == 20
    _accept("failure-taxonomy matrix (20/20 cells)")


# -- [PRIMARY] containment safety ------------------------------------------------


def test_containment_type_safety():
    report = safety_suite(trials=1000, seed=20260810)
    assert report.trials == 1000
    assert report.counterexamples == [], report.counterexamples[:5]
    assert report.elapsed < 10.0, f"{report.elapsed:.1f}s (budget: 10s)"
    assert report.checked >= 500  # the hypothesis held for most trials
    _accept(
        f"containment type safety (1000 trials, {report.checked} checked, "
        f"{report.adversarial} adversarial, 0 counterexamples, {report.elapsed:.1f}s)"
    )


# -- [PRIMARY] inference oracle ---------------------------------------------------


def test_inference_matches_independent_oracle():
    rng = random.Random(424242)
    gen = MLGen(rng, GenOptions(allow_async=False, allow_prelude=False))
    compared = 0
    for _ in range(320):
        module = gen.gen_program()
        if module.entry is None:
            continue
        try:
            expected = reference_w.infer_module_entry(module)
            ref_failed = False
        except reference_w.WTypeError:
            ref_failed = True
        try:
            got = zonk(typecheck_module(module, None).entry.ty)
            prod_failed = False
        except CheckError:
            prod_failed = True
        assert ref_failed == prod_failed, pretty_print(module)
        if not ref_failed:
            assert normalize_type(expected) == normalize_type(got), pretty_print(module)
            compared += 1
    assert compared >= 200, f"only {compared} well-typed comparisons"
    _accept(f"inference equivalence with the reference implementation ({compared} terms)")


# -- [PRIMARY] erasure fidelity -----------------------------------------------------


def test_erasure_fidelity_goldens():
    for name in ("erasure_data", "erasure_dom"):
        compiled = compile_file(fixture_path(f"{name}.mml"), WORLD)
        dump = dump_module(compiled.core)
        with open(os.path.join(GOLDEN, f"{name}.core.txt"), "r", encoding="utf-8") as fh:
            assert dump == fh.read(), f"{name} core dump drifted from its golden"
    data = open(os.path.join(GOLDEN, "erasure_data.core.txt")).read()
    dom = open(os.path.join(GOLDEN, "erasure_dom.core.txt")).read()
    assert 'GetCountry("CZE")' in data
    assert 'AsyncGetIndicator("SE.TER.ENRR")' in data
    assert 'PropertyGetImpl(true, "jQuery", [])' in dom
    assert 'CallImpl(false, "attr", [' in dom
    _accept("erasure fidelity goldens (data + imported-library displays)")


# -- [PRIMARY] async laws -------------------------------------------------------------


def test_async_builder_laws_and_start_rejection():
    from .test_asyncpass import _bind, _fn, _lit, _rand_async, _rand_cont, _ret, _run_core

    from mml.coreir import INT, TAsync
    from mml.diagnostics import NO_SPAN

    rng = random.Random(5150)
    trials = 0
    for _ in range(200):
        v = _lit(rng.randint(-40, 40))
        f = _rand_cont(rng)
        m = _rand_async(rng)
        g = _rand_cont(rng, var="y")
        left = _run_core(_bind(_ret(v), f))
        direct = _run_core(C.CApp(NO_SPAN, TAsync(INT), f, v))
        assert left == direct
        ret_fn = _fn("r", _ret(C.CIdent(NO_SPAN, INT, "r")))
        assert _run_core(_bind(m, ret_fn)) == _run_core(m)
        inner = _fn("x", _bind(C.CApp(NO_SPAN, TAsync(INT), f, C.CIdent(NO_SPAN, INT, "x")), g))
        assert _run_core(_bind(_bind(m, f), g)) == _run_core(_bind(m, inner))
        trials += 1
    assert trials >= 200

    for primitive in ("RunSynchronously", "Start"):
        with pytest.raises(CompileError) as exc:
            compile_source(f"let a = async {{ return 1 }}\ndo Async.{primitive} a")
        assert exc.value.diagnostics[0].code == "async.unsupported-start"
    _accept(f"async builder laws ({trials} programs) + start-primitive rejection")


# -- [PRIMARY] declaration-file mapping -------------------------------------------------


def test_dts_mapping_structural_golden():
    ctx = instantiate_provider(
        "TypeScript", ((None, "jquery_excerpt.d.ts"),), FIXTURES, alias="j"
    )
    root = ctx.types["j"]
    assert root.member_names() == ["jQuery"]
    jq = root.member("jQuery")
    assert jq.kind == "property"
    assert jq.signature == C.TNamed("j.JQueryStatic")
    assert jq.erasure == EmitPropertyGetPlan(True, "jQuery", ())

    invoke = ctx.types["j.JQueryStatic"].member("Invoke")
    assert invoke is not None and invoke.kind == "invoke"
    (sig,) = invoke.overloads
    assert [(p.ty, p.optional) for p in sig.params] == [(C.STRING, False), (C.OBJECT, True)]
    assert sig.result == C.TNamed("j.JQuery")
    assert isinstance(invoke.erasure, EmitCallPlan) and invoke.erasure.member_name == ""

    attr = ctx.types["j.JQuery"].member("attr")
    assert attr is not None and attr.kind == "method"
    shapes = sorted(
        ((tuple((p.ty, p.optional) for p in o.params), o.result) for o in attr.overloads),
        key=repr,
    )
    assert shapes == sorted(
        [
            (((C.STRING, False),), C.STRING),
            (((C.STRING, False), (C.OBJECT, False)), C.TNamed("j.JQuery")),
        ],
        key=repr,
    )
    assert ctx.types["j.JQuery"].member_names() == ["attr"]
    _accept("declaration-file mapping golden (jQuery static, Invoke, attr overloads)")


# -- [PRIMARY] golden JS emission -----------------------------------------------------


def test_golden_js_emission():
    for name in ("intdiv", "case_study", "erasure_data", "erasure_dom", "enrollment_sync"):
        compiled = compile_file(fixture_path(f"{name}.mml"), WORLD)
        emitted = emit_module(compiled.core).source_text
        with open(os.path.join(GOLDEN, f"{name}.js"), "r", encoding="utf-8") as fh:
            assert emitted == fh.read(), f"{name}.js drifted from its golden"
    intdiv = open(os.path.join(GOLDEN, "intdiv.js")).read()
    assert "((1 / 2) | 0)" in intdiv, "integer-division truncation missing"
    assert "(21*1.0)" in intdiv, "template splice missing"
    _accept("golden JS emission (byte-identical, truncated division, template splice)")


# -- [SECONDARY] differential semantics ---------------------------------------------------


def test_secondary_differential_semantics(node_path, tmp_path, world_default):
    from mml.world import make_snapshot

    empty = make_snapshot([], [], {})
    rng = random.Random(96024)
    gen = MLGen(rng, GenOptions(allow_async=True, allow_prelude=True))
    items, expected = [], []
    attempts = 0
    while len(items) < 200 and attempts < 1200:
        attempts += 1
        module = gen.gen_program()
        if module.entry is None:
            continue
        text = pretty_print(module)
        compiled = compile_source(text)
        try:
            value = value_to_jsonable(interpret(compiled.core, empty))
        except (RunFailure, ValueError):
            continue
        path = tmp_path / f"d{len(items)}.js"
        path.write_text(emit_module(compiled.core).source_text)
        items.append({"file": str(path)})
        expected.append((text, value))
    assert len(items) >= 200
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"items": items}))
    out = run_node(["runner.js", "--batch", str(manifest)], timeout=240)
    assert out.returncode == 0, out.stderr[:1500]
    results = [json.loads(line) for line in out.stdout.strip().splitlines()]
    for (text, want), got in zip(expected, results):
        assert got.get("ok") and got["value"] == want, f"mismatch on:\n{text}"

    # and the case study against the live fixture server
    from mml.server import WorldServer

    compiled = compile_file(fixture_path("case_study.mml"), WORLD)
    want = value_to_jsonable(interpret(compiled.core, world_default))
    js = tmp_path / "cs.js"
    js.write_text(emit_module(compiled.core).source_text)
    server = WorldServer(world_default, 0)
    server.start_background()
    try:
        out = run_node(["runner.js", str(js), "--server", f"http://127.0.0.1:{server.port}"])
        assert out.returncode == 0 and json.loads(out.stdout) == want
    finally:
        server.shutdown()
    _accept(f"differential semantics ({len(items)} programs + case study over the fixture server)")


# -- [SECONDARY] shim conformance ------------------------------------------------------------


def test_secondary_shim_conformance(node_path):
    out = run_node(["-e", "console.log(JSON.stringify(Object.keys(require('./mmlrt.js'))))"])
    assert out.returncode == 0
    assert sorted(json.loads(out.stdout)) == sorted(SHIM_SYMBOLS)
    _accept("shim conformance (exports equal the symbol table exactly)")
