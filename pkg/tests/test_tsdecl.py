import pytest

from mml.coreir import BOOL, FLOAT, OBJECT, STRING, TArray, TNamed
from mml.providers.kit import (
    EmitCallPlan,
    EmitPropertyGetPlan,
    EmitPropertySetPlan,
    ProviderFailure,
    instantiate_provider,
)
from mml.providers.tsdecl import TsGlobalVar, TsInterface, map_dts, parse_dts

from .conftest import FIXTURES, read_fixture


def test_excerpt_declarations():
    decls, diags = parse_dts(read_fixture("jquery_excerpt.d.ts"))
    assert diags == []
    assert [type(d).__name__ for d in decls] == ["TsGlobalVar", "TsInterface", "TsInterface"]
    var, static_iface, jq_iface = decls
    assert isinstance(var, TsGlobalVar) and var.name == "jQuery" and var.ty.name == "JQueryStatic"
    assert isinstance(static_iface, TsInterface)
    assert len(static_iface.call_signatures) == 1
    sig = static_iface.call_signatures[0]
    assert [(p.name, p.ty.name, p.optional) for p in sig.params] == [
        ("selector", "string", False),
        ("context", "any", True),
    ]
    assert sig.result.name == "JQuery"
    assert isinstance(jq_iface, TsInterface)
    (attr_name, attr_overloads), = jq_iface.methods
    assert attr_name == "attr" and len(attr_overloads) == 2


def test_empty_file():
    decls, diags = parse_dts("")
    assert decls == [] and diags == []


def test_dangling_reference_parses_then_fails_in_mapping():
    decls, diags = parse_dts("declare var x: Foo;")
    assert diags == [] and len(decls) == 1
    _, map_diags = map_dts(decls, "t")
    assert any(d.code == "dts.dangling-ref" for d in map_diags)


@pytest.mark.parametrize(
    "text",
    [
        "declare function f(): void;",
        "class Widget {}",
        "module M { }",
        "interface G<T> { }",
        "interface E extends B { }",
    ],
)
def test_unsupported_constructs_are_skipped_with_diagnostics(text):
    decls, diags = parse_dts(text + "\ninterface Keep { x: number; }")
    assert any(d.code == "dts.unsupported" for d in diags)
    assert [d.name for d in decls if isinstance(d, TsInterface)] == ["Keep"]


def test_constant_type_collapses_with_warning():
    decls, diags = parse_dts(
        'interface A { attr(name: "checked"): boolean; attr(name: string): boolean; }'
    )
    assert any(d.code == "dts.constant-overload" for d in diags)
    (_, overloads), = decls[0].methods
    assert len(overloads) == 1  # the specialised overload collapsed away


def test_mapping_excerpt_structure():
    decls, _ = parse_dts(read_fixture("jquery_excerpt.d.ts"))
    ctx, diags = map_dts(decls, "j")
    assert diags == []
    root = ctx.types["j"]
    jq = root.member("jQuery")
    assert jq.kind == "property"
    assert jq.signature == TNamed("j.JQueryStatic")
    assert jq.erasure == EmitPropertyGetPlan(True, "jQuery", ())

    static = ctx.types["j.JQueryStatic"]
    invoke = static.member("Invoke")
    assert invoke.kind == "invoke"
    assert isinstance(invoke.erasure, EmitCallPlan) and invoke.erasure.member_name == ""
    (sig,) = invoke.overloads
    assert [(p.ty, p.optional) for p in sig.params] == [(STRING, False), (OBJECT, True)]
    assert sig.result == TNamed("j.JQuery")

    jquery = ctx.types["j.JQuery"]
    attr = jquery.member("attr")
    assert attr.kind == "method"
    results = sorted((len(o.params), repr(o.result)) for o in attr.overloads)
    assert results == sorted(
        [(1, repr(STRING)), (2, repr(TNamed("j.JQuery")))]
    )


def test_property_mapping_and_set_plans():
    decls, _ = parse_dts("interface Opt { chart: any; series: any[]; n: number; flag: boolean; }")
    ctx, diags = map_dts(decls, "h")
    assert diags == []
    opt = ctx.types["h.Opt"]
    assert opt.member("chart").signature == OBJECT
    assert opt.member("series").signature == TArray(OBJECT)
    assert opt.member("n").signature == FLOAT
    assert opt.member("flag").signature == BOOL
    assert opt.member("chart").settable
    assert isinstance(opt.member("chart").set_erasure, EmitPropertySetPlan)


def test_every_mapped_plan_is_emit_family():
    decls, _ = parse_dts(read_fixture("jquery.d.ts"))
    ctx, _ = map_dts(decls, "j")
    for typedef in ctx.types.values():
        for member in typedef.members().values():
            assert type(member.erasure).__name__.startswith("Emit")


def test_provider_registration_and_failures(tmp_path):
    with pytest.raises(ProviderFailure, match="not found"):
        instantiate_provider("TypeScript", ((None, "nope.d.ts"),), str(tmp_path))
    bad = tmp_path / "bad.d.ts"
    bad.write_text("declare var x: Foo;")
    with pytest.raises(ProviderFailure, match="undeclared"):
        instantiate_provider("TypeScript", ((None, "bad.d.ts"),), str(tmp_path))
    ctx = instantiate_provider("TypeScript", ((None, "jquery_excerpt.d.ts"),), FIXTURES, alias="j")
    assert ctx.types["j"].member("jQuery") is not None


def test_optional_params_must_trail():
    decls, diags = parse_dts("interface X { m(a?: string, b: number): void; }")
    assert any(d.code == "dts.unsupported" for d in diags)
    assert decls[0].methods == ()
