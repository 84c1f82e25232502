import os

import pytest

from mml.compiler import compile_file, compile_source
from mml.coreir import (
    CEmitPropGet,
    CJsTemplate,
    CLit,
    CRuntimeCall,
    core_size,
    dump_module,
    walk_module,
)
from mml.erase import check_template, EraseBug, erase_module
from mml.interp import interpret, value_to_jsonable
from mml.typecheck import typecheck_module
from mml.world import world_lookup

from .conftest import GOLDEN, fixture_path


def compile_fixture(name: str):
    return compile_file(fixture_path(name), fixture_path("world_default.json"))


def golden(name: str) -> str:
    with open(os.path.join(GOLDEN, name), "r", encoding="utf-8") as fh:
        return fh.read()


@pytest.mark.parametrize("name", ["erasure_data", "erasure_dom", "case_study", "intdiv"])
def test_core_dump_matches_golden(name):
    compiled = compile_fixture(f"{name}.mml")
    assert dump_module(compiled.core) == golden(f"{name}.core.txt")


def test_data_erasure_shapes():
    dump = golden("erasure_data.core.txt")
    assert 'GetCountries().GetCountry("CZE")' in dump
    assert 'AsyncGetIndicator("SE.TER.ENRR")' in dump


def test_dom_erasure_shapes():
    dump = golden("erasure_dom.core.txt")
    assert 'PropertyGetImpl(true, "jQuery", [])' in dump
    assert 'CallImpl(false, "", [' in dump
    assert 'CallImpl(false, "attr", [' in dump
    assert '"type"; "checkbox"' in dump


def test_no_display_names_survive_data_erasure():
    dump = golden("erasure_data.core.txt")
    assert "Czech Republic" not in dump
    assert "School enrollment" not in dump


def test_provider_free_module_erases_to_plain_core():
    compiled = compile_source("let f = fun x -> x + 1\ndo f 2")
    kinds = {type(n).__name__ for n in walk_module(compiled.core)}
    assert "CRuntimeCall" not in kinds and "CEmitCall" not in kinds


def test_erasure_size_bound():
    # |erased| <= c * |typed-surface|, c fixed by the largest plan template
    import random

    from mml.progen import GenOptions, MLGen

    rng = random.Random(31337)
    gen = MLGen(rng, GenOptions())
    for _ in range(40):
        module = gen.gen_program()
        typed = typecheck_module(module, None)
        core = erase_module(typed)
        surface_nodes = _surface_size(module)
        assert core_size(core) <= 12 * surface_nodes + 12


def _surface_size(module) -> int:
    import dataclasses

    from mml import surface as S

    def count(node) -> int:
        if isinstance(node, S.Expr):
            total = 1
            for f in dataclasses.fields(node):
                value = getattr(node, f.name)
                if isinstance(value, S.Expr):
                    total += count(value)
                elif isinstance(value, tuple):
                    for item in value:
                        if isinstance(item, S.Expr):
                            total += count(item)
                        elif isinstance(item, tuple) and len(item) == 2 and isinstance(item[1], S.Expr):
                            total += count(item[1])
            return total
        return 1

    total = sum(count(b.value) for b in module.bindings)
    if module.entry is not None:
        total += count(module.entry)
    return max(total, 1)


def test_prelude_partial_application_eta_expands():
    compiled = compile_source("do List.map (fun x -> x + 1)")
    dump = dump_module(compiled.core)
    assert "list_map" in dump and "fun __eta" in dump


def test_prelude_saturated_call_is_direct():
    compiled = compile_source("do List.map (fun x -> x + 1) [1; 2]")
    dump = dump_module(compiled.core)
    assert "list_map((fun x" in dump
    assert "__eta" not in dump


def test_number_global_erases_to_template():
    compiled = compile_source("do number 21")
    node = compiled.core.entry
    assert isinstance(node, CJsTemplate) and node.text == "return {0}*1.0;"


def test_undefined_padding_for_interior_optional():
    compiled = compile_source(
        'type h = TypeScript<"highcharts.d.ts">\n'
        'do h.HighchartsSeriesOptions.Invoke(name = "x")',
        dts_dir=fixture_path(""),
    )
    from mml.erase import JS_UNDEFINED

    call = compiled.core.entry
    args = [n.value for n in call.args if isinstance(n, CLit)]
    assert JS_UNDEFINED in args  # the skipped `data` slot
    assert "x" in args


def test_trailing_optionals_are_omitted():
    compiled = compile_source(
        'type j = TypeScript<"jquery_excerpt.d.ts">\ndo j.jQuery.Invoke("#x")',
        dts_dir=fixture_path(""),
    )
    call = compiled.core.entry
    # receiver (the static property) plus the one given argument
    assert len(call.args) == 2
    assert isinstance(call.args[0], CEmitPropGet)


def test_template_validation():
    check_template("return {0}*1.0;", 1)
    with pytest.raises(EraseBug):
        check_template("return {1};", 1)
    with pytest.raises(EraseBug):
        check_template("return {0}+{0};", 1)


def test_provider_boundary_semantics(world_default):
    # interpreting erased data access equals world_lookup composed by hand
    compiled = compile_fixture("enrollment_sync.mml")
    value = interpret(compiled.core, world_default)
    got = value_to_jsonable(value)
    expected = [
        ["Czech Republic", [[y, v] for y, v in world_lookup(world_default, "CZE", "SE.TER.ENRR")]],
        ["United States", [[y, v] for y, v in world_lookup(world_default, "USA", "SE.TER.ENRR")]],
    ]
    assert got == expected
