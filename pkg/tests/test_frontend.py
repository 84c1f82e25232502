"""Secondary-component checks: the JS runtime shim and differential runs.

These need node.js; they are part of the default suite here because the
environment ships node, and they skip cleanly when it is absent.
"""

from __future__ import annotations

import json
import random

import pytest

from mml.compiler import compile_file, compile_source
from mml.interp import RunFailure, interpret, value_to_jsonable
from mml.jsbackend import SHIM_SYMBOLS, emit_module
from mml.printer import pretty_print
from mml.progen import GenOptions, MLGen
from mml.server import WorldServer
from mml.world import make_snapshot, snapshot_to_json

from .conftest import fixture_path, run_node

pytestmark = pytest.mark.secondary

EMPTY = make_snapshot([], [], {})


def test_shim_exports_equal_symbol_table(node_path):
    out = run_node(["-e", "console.log(JSON.stringify(Object.keys(require('./mmlrt.js'))))"])
    assert out.returncode == 0, out.stderr
    exported = json.loads(out.stdout)
    assert sorted(exported) == sorted(SHIM_SYMBOLS)


def test_differential_semantics_generated_programs(node_path, tmp_path):
    rng = random.Random(20260810)
    gen = MLGen(rng, GenOptions(allow_async=True, allow_prelude=True))
    items = []
    expected: list = []
    attempts = 0
    while len(items) < 220 and attempts < 1200:
        attempts += 1
        module = gen.gen_program()
        if module.entry is None:
            continue
        text = pretty_print(module)
        try:
            compiled = compile_source(text)
        except Exception as exc:  # generator bug; surface loudly
            raise AssertionError(f"generated program failed to compile:\n{text}\n{exc}")
        try:
            value = value_to_jsonable(interpret(compiled.core, EMPTY))
        except (RunFailure, ValueError):
            continue  # not representable/runnable on both targets; skip
        doc = emit_module(compiled.core)
        js_path = tmp_path / f"p{len(items)}.js"
        js_path.write_text(doc.source_text)
        items.append({"file": str(js_path)})
        expected.append((text, value))
    assert len(items) >= 200, f"only {len(items)} comparable programs generated"

    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"items": items}))
    out = run_node(["runner.js", "--batch", str(manifest)], timeout=240)
    assert out.returncode == 0, out.stderr[:2000]
    lines = [json.loads(line) for line in out.stdout.strip().splitlines()]
    assert len(lines) == len(items)
    for (text, want), got in zip(expected, lines):
        assert got.get("ok"), f"JS failed on:\n{text}\n{got}"
        assert got["value"] == want, (
            f"differential mismatch on:\n{text}\nindependent: {want!r}\njs: {got['value']!r}"
        )


def test_case_study_js_over_fixture_server_matches_interpreter(node_path, tmp_path, world_default):
    compiled = compile_file(fixture_path("case_study.mml"), fixture_path("world_default.json"))
    expected = value_to_jsonable(interpret(compiled.core, world_default))
    js_path = tmp_path / "case_study.js"
    js_path.write_text(emit_module(compiled.core).source_text)

    server = WorldServer(world_default, 0)
    server.start_background()
    try:
        out = run_node(
            ["runner.js", str(js_path), "--server", f"http://127.0.0.1:{server.port}"],
            timeout=120,
        )
        assert out.returncode == 0, out.stderr
        assert json.loads(out.stdout) == expected
        fetched = set(server.access_log)
    finally:
        server.shutdown()
    assert fetched == {(c, "SE.TER.ENRR") for c in ("EUU", "CZE", "GBR", "USA")}


def test_case_study_js_with_inline_world_matches(node_path, tmp_path, world_default):
    compiled = compile_file(fixture_path("case_study.mml"), fixture_path("world_default.json"))
    expected = value_to_jsonable(interpret(compiled.core, world_default))
    js_path = tmp_path / "case_study.js"
    js_path.write_text(emit_module(compiled.core).source_text)
    world_path = tmp_path / "world.json"
    world_path.write_text(json.dumps(snapshot_to_json(world_default)))
    out = run_node(["runner.js", str(js_path), str(world_path)])
    assert out.returncode == 0, out.stderr
    assert json.loads(out.stdout) == expected


def test_js_missing_pair_fails_with_key(node_path, tmp_path, world_default):
    compiled = compile_file(fixture_path("first_year.mml"), fixture_path("world_default.json"))
    js_path = tmp_path / "p.js"
    js_path.write_text(emit_module(compiled.core).source_text)
    mutated = json.loads(json.dumps(snapshot_to_json(world_default)))
    mutated["values"] = [v for v in mutated["values"] if v["country"] != "CZE"]
    world_path = tmp_path / "w1.json"
    world_path.write_text(json.dumps(mutated))
    out = run_node(["runner.js", str(js_path), str(world_path)])
    assert out.returncode == 2
    assert "missing-key" in out.stderr and "CZE" in out.stderr
