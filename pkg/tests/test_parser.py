import random

import pytest

from mml import surface as S
from mml.parser import ParseError, parse_module, try_parse_module
from mml.printer import pretty_print
from mml.progen import SyntaxGen
from mml.surface import ast_equal

from .conftest import read_fixture


def roundtrip(text: str) -> S.SourceModule:
    module = parse_module(text)
    printed = pretty_print(module)
    again = parse_module(printed)
    assert ast_equal(module, again), f"round-trip changed the AST:\n{printed}"
    return module


def test_provider_decl_shapes():
    m = parse_module("type W = WorldBankData<Asynchronous = true>")
    decl = m.provider_decls[0]
    assert (decl.alias, decl.provider) == ("W", "WorldBankData")
    assert decl.static_params == (("Asynchronous", True),)

    m = parse_module('type j = TypeScript<"jquery.d.ts">')
    assert m.provider_decls[0].static_params == ((None, "jquery.d.ts"),)


def test_simple_lambda_binding():
    m = parse_module("let id = fun x -> x")
    b = m.bindings[0]
    assert isinstance(b.value, S.Lambda)
    assert isinstance(b.value.body, S.Ident)


def test_fun_def_sugar_equals_lambda():
    sugar = parse_module("let f x y = x + y")
    explicit = parse_module("let f = fun x -> fun y -> x + y")
    assert ast_equal(sugar, explicit)


def test_case_study_fixture_parses_and_roundtrips():
    roundtrip(read_fixture("case_study.mml"))


@pytest.mark.parametrize(
    "name",
    ["enrollment_sync.mml", "checked_total.mml", "first_year.mml",
     "erasure_data.mml", "erasure_dom.mml", "intdiv.mml"],
)
def test_fixture_programs_roundtrip(name):
    roundtrip(read_fixture(name))


def test_pretty_print_idempotent_on_case_study():
    module = parse_module(read_fixture("case_study.mml"))
    once = pretty_print(module)
    twice = pretty_print(parse_module(once))
    assert once == twice


def test_backtick_member_survives_roundtrip():
    m = roundtrip("do d.`Czech Republic`")
    access = m.entry
    assert isinstance(access, S.MemberAccess)
    assert access.name == "Czech Republic"


def test_pipeline_desugars_to_application():
    m = parse_module("do xs |> f |> g")
    entry = m.entry
    assert isinstance(entry, S.App)
    assert isinstance(entry.fn, S.Ident) and entry.fn.name == "g"
    assert isinstance(entry.arg, S.App)
    assert entry.arg.fn.name == "f"


def test_tight_call_binds_postfix_chain():
    m = parse_module('do jQuery("<input>").attr("type", "checkbox")')
    call = m.entry
    assert isinstance(call, S.MethodCall) and call.name == "attr"
    assert isinstance(call.recv, S.App)


def test_spaced_parens_are_plain_application():
    m = parse_module("do List.map (f) xs")
    entry = m.entry
    assert isinstance(entry, S.App)
    assert isinstance(entry.fn, S.App)
    assert isinstance(entry.fn.fn, S.MemberAccess)


def test_named_args_after_positional_only():
    _, diags = try_parse_module("do r.m(a = 1, 2)")
    assert diags and diags[0].code == "parse.named-arg-order"


def test_letbang_outside_async_rejected():
    _, diags = try_parse_module("let x = (let! v = f; v)")
    assert diags and diags[0].code == "parse.letbang-outside-async"


def test_return_outside_async_rejected():
    _, diags = try_parse_module("do return 5")
    assert diags and diags[0].code == "parse.return-outside-async"


def test_return_must_end_block():
    _, diags = try_parse_module("do async { return 1; 2 }")
    assert diags and diags[0].code == "parse.return-not-last"


def test_unterminated_string():
    _, diags = try_parse_module('let x = "abc')
    assert diags and diags[0].code == "parse.unterminated-string"


def test_static_param_must_be_literal():
    _, diags = try_parse_module("type W = WorldBankData<Asynchronous = x>")
    assert diags and diags[0].code == "parse.bad-static-param"


def test_let_scopes_over_rest_of_block():
    m = parse_module("do (let x = 1; let y = x; x + y)")
    entry = m.entry
    assert isinstance(entry, S.Let)
    assert isinstance(entry.body, S.Let)


def test_let_in_form_inside_block():
    m = parse_module("do (let x = 1 in x; 2)")
    assert isinstance(m.entry, S.Seq)
    assert isinstance(m.entry.first, S.Let)


def test_diagnostic_spans_inside_input():
    text = 'let x = "unterminated'
    _, diags = try_parse_module(text)
    for d in diags:
        assert 0 <= d.span.start <= d.span.end <= len(text.encode("utf-8"))


def test_byte_spans_with_multibyte_text():
    text = "// héllo\nlet x = 1"
    module = parse_module(text)
    b = module.bindings[0]
    raw = text.encode("utf-8")
    assert raw[b.span.start : b.span.start + 3] == b"let"


def test_generated_programs_roundtrip():
    # property: parse(pretty(parse(p))) == parse(p) over the full grammar
    for seed in range(120):
        rng = random.Random(9000 * 100000 + seed)
        module = SyntaxGen(rng).module()
        printed = pretty_print(module)
        try:
            once = parse_module(printed)
        except ParseError as exc:
            raise AssertionError(f"seed {seed}: printer produced unparseable text:\n{printed}") from exc
        again = parse_module(pretty_print(once))
        assert ast_equal(once, again), f"seed {seed} failed:\n{printed}"


def test_duplicate_provider_alias_rejected():
    with pytest.raises(ParseError):
        parse_module("type W = WorldBankData\ntype W = WorldBankData")


def test_at_most_one_entry():
    with pytest.raises(ParseError):
        parse_module("do 1\ndo 2")
