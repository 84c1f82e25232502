"""JavaScript emission for desugared core modules.

Output is deterministic (byte-identical across runs) ES5. Imported-object
operations map to direct JavaScript syntax; runtime-library calls go
through the `MMLRT` shim, whose export surface is the closed symbol table
below; builder operations map to the shim's async trampoline. Integer
division and modulo truncate (`(a / b) | 0`), floats follow JavaScript.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

from . import coreir as C
from .diagnostics import Diagnostic, error
from .erase import JS_UNDEFINED
from .surface import UNIT, Pattern, PTuple, PUnit, PVar, PWildcard

# exactly the shim's exports; the conformance test diffs mmlrt.js against this
SHIM_SYMBOLS = (
    "cons",
    "nil",
    "list_map",
    "seq_map",
    "array_ofSeq",
    "async_bind",
    "async_return",
    "async_delay",
    "async_for",
    "async_startImmediate",
    "async_catch",
    "GetCountries",
    "GetCountry",
    "GetIndicator",
    "GetIndicatorOpt",
    "AsyncGetIndicator",
    "unbox_check",
)

_BUILDER_SYMBOL = {
    "Bind": "async_bind",
    "Return": "async_return",
    "Delay": "async_delay",
    "For": "async_for",
    "StartImmediate": "async_startImmediate",
    "Catch": "async_catch",
}

_JS_RESERVED = {
    "break", "case", "catch", "class", "const", "continue", "debugger",
    "default", "delete", "do", "else", "enum", "export", "extends", "false",
    "finally", "for", "function", "if", "implements", "import", "in",
    "instanceof", "interface", "let", "new", "null", "package", "private",
    "protected", "public", "return", "static", "super", "switch", "this",
    "throw", "true", "try", "typeof", "var", "void", "while", "with",
    "yield", "undefined", "MMLRT", "arguments", "eval",
}


@dataclass
class JsDocument:
    source_text: str
    referenced_shim_symbols: set[str]
    entry_invocation: str | None


class EmitError(Exception):
    def __init__(self, diagnostic: Diagnostic) -> None:
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def _static_global_names(module: C.CoreModule) -> set[str]:
    """Names the emitted code references as host globals (static Emit ops)."""
    names: set[str] = set()
    for node in C.walk_module(module):
        if isinstance(node, (C.CEmitPropGet, C.CEmitCall)) and node.is_static and node.name:
            names.add(node.name)
    return names


@dataclass
class _Emitter:
    avoid: frozenset[str] = frozenset()
    symbols: set[str] = field(default_factory=set)
    _tmp: int = 0

    def fresh(self, base: str) -> str:
        self._tmp += 1
        return f"__{base}{self._tmp}"

    def mangle(self, name: str) -> str:
        # keep user bindings clear of JS keywords and of host globals the
        # module itself references (e.g. a helper named `jQuery`)
        if name in _JS_RESERVED or name in self.avoid:
            return name + "$"
        return name

    def shim(self, symbol: str) -> str:
        if symbol not in SHIM_SYMBOLS:
            raise EmitError(
                error("emit.unresolved-symbol", f"runtime symbol {symbol!r} is not in the shim")
            )
        self.symbols.add(symbol)
        return f"MMLRT.{symbol}"

    # -- patterns ------------------------------------------------------------

    def bind_pattern(self, pattern: Pattern, source: str) -> list[str]:
        """`var` statements binding a pattern against a source expression."""
        if isinstance(pattern, PVar):
            return [f"var {self.mangle(pattern.name)} = {source};"]
        if isinstance(pattern, (PWildcard, PUnit)):
            return []
        if isinstance(pattern, PTuple):
            tmp = self.fresh("t")
            out = [f"var {tmp} = {source};"]
            for i, sub in enumerate(pattern.items):
                out.extend(self.bind_pattern(sub, f"{tmp}[{i}]"))
            return out
        raise TypeError(f"unknown pattern {pattern!r}")

    def params_of(self, pattern: Pattern) -> tuple[str, list[str]]:
        """Parameter list text and binding statements for a lambda."""
        if isinstance(pattern, PVar):
            return self.mangle(pattern.name), []
        if isinstance(pattern, (PWildcard, PUnit)):
            return "", []
        tmp = self.fresh("p")
        return tmp, self.bind_pattern(pattern, tmp)

    # -- expressions -----------------------------------------------------------

    def expr(self, e: C.CoreExpr) -> str:
        if isinstance(e, C.CLit):
            return self.lit(e.value)
        if isinstance(e, C.CIdent):
            return self.mangle(e.name)
        if isinstance(e, C.CLambda):
            param, binds = self.params_of(e.param)
            prefix = (" ".join(binds) + " ") if binds else ""
            return f"(function ({param}) {{ {prefix}return {self.expr(e.body)}; }})"
        if isinstance(e, C.CApp):
            return f"{self.expr(e.fn)}({self.expr(e.arg)})"
        if isinstance(e, C.CLet):
            binds = " ".join(self.bind_pattern(e.pattern, self.expr(e.value)))
            return f"(function () {{ {binds} return {self.expr(e.body)}; }}())"
        if isinstance(e, C.CSeq):
            return f"({self.expr(e.first)}, {self.expr(e.rest)})"
        if isinstance(e, C.CIf):
            orelse = self.expr(e.orelse) if e.orelse is not None else "null"
            return f"({self.expr(e.cond)} ? {self.expr(e.then)} : {orelse})"
        if isinstance(e, C.CTuple):
            return "[" + ", ".join(self.expr(i) for i in e.items) + "]"
        if isinstance(e, C.CListLit):
            out = self.shim("nil")
            for item in reversed(e.items):
                out = f"{self.shim('cons')}({self.expr(item)}, {out})"
            return out
        if isinstance(e, C.CArrayLit):
            return "[" + ", ".join(self.expr(i) for i in e.items) + "]"
        if isinstance(e, C.CFor):
            return self.for_loop(e)
        if isinstance(e, C.CBinOp):
            return self.binop(e)
        if isinstance(e, C.CCast):
            return f"({self.expr(e.operand)})"  # no dynamic check on this target
        if isinstance(e, C.CRuntimeCall):
            args = ", ".join(self.expr(a) for a in e.args)
            return f"{self.shim(e.symbol)}({args})"
        if isinstance(e, C.CEmitCall):
            args = [self.expr(a) for a in e.args]
            if e.name == "":
                recv, rest = args[0], args[1:]
                return f"{recv}({', '.join(rest)})"
            if e.is_static:
                return f"{e.name}({', '.join(args)})"
            recv, rest = args[0], args[1:]
            return f"{recv}.{e.name}({', '.join(rest)})"
        if isinstance(e, C.CEmitPropGet):
            if e.is_static:
                return e.name
            return f"{self.expr(e.args[0])}.{e.name}"
        if isinstance(e, C.CEmitPropSet):
            recv = self.expr(e.args[0])
            value = self.expr(e.args[1])
            return f"({recv}.{e.name} = {value}, null)"
        if isinstance(e, C.CJsTemplate):
            return self.template(e)
        if isinstance(e, C.CBuilderOp):
            args = ", ".join(self.expr(a) for a in e.args)
            return f"{self.shim(_BUILDER_SYMBOL[e.op])}({args})"
        raise EmitError(
            error("emit.residual-member", f"node {type(e).__name__} cannot be emitted")
        )

    def lit(self, value: object) -> str:
        if value is UNIT:
            return "null"
        if isinstance(value, str) and value == JS_UNDEFINED:
            return "undefined"
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, int):
            return str(value) if value >= 0 else f"({value})"
        if isinstance(value, float):
            if not math.isfinite(value):
                raise EmitError(error("emit.residual-member", "non-finite float literal"))
            text = repr(value)
            return text if value >= 0 else f"({text})"
        if isinstance(value, str):
            return json.dumps(value)
        raise TypeError(f"bad literal {value!r}")

    def binop(self, e: C.CBinOp) -> str:
        left, right = self.expr(e.left), self.expr(e.right)
        op = e.op
        if op == "/":
            return f"(({left} / {right}) | 0)"
        if op == "%":
            return f"(({left} % {right}) | 0)"
        if op in ("+.", "-.", "*.", "/."):
            return f"({left} {op[0]} {right})"
        if op == "=":
            return f"({left} === {right})"
        if op == "<>":
            return f"({left} !== {right})"
        return f"({left} {op} {right})"

    def for_loop(self, e: C.CFor) -> str:
        source_ty = e.source.ty
        src = self.expr(e.source)
        body = f"{self.expr(e.body)};"
        item = self.fresh("x")
        binds = " ".join(self.bind_pattern(e.pattern, item))
        if isinstance(source_ty, C.TArray):
            i = self.fresh("i")
            loop = (
                f"for (var {i} = 0; {i} < __s.length; {i}++) "
                f"{{ var {item} = __s[{i}]; {binds} {body} }}"
            )
            return f"(function () {{ var __s = {src}; {loop} return null; }}())"
        if isinstance(source_ty, C.TList):
            t = self.fresh("c")
            loop = (
                f"for (var {t} = __s; {t} !== {self.shim('nil')}; {t} = {t}.t) "
                f"{{ var {item} = {t}.h; {binds} {body} }}"
            )
            return f"(function () {{ var __s = {src}; {loop} return null; }}())"
        # source type unknown: handle both shapes at run time
        i = self.fresh("i")
        t = self.fresh("c")
        return (
            f"(function () {{ var __s = {src}; "
            f"if (Object.prototype.toString.call(__s) === '[object Array]') "
            f"{{ for (var {i} = 0; {i} < __s.length; {i}++) {{ var {item} = __s[{i}]; {binds} {body} }} }} "
            f"else {{ for (var {t} = __s; {t} !== {self.shim('nil')}; {t} = {t}.t) "
            f"{{ var {item} = {t}.h; {binds} {body} }} }} return null; }}())"
        )

    def template(self, e: C.CJsTemplate) -> str:
        args = [self.expr(a) for a in e.args]

        def splice(text: str) -> str:
            return re.sub(r"\{(\d+)\}", lambda m: args[int(m.group(1))], text)

        m = re.fullmatch(r"return (.*);\s*", e.text)
        if m:
            return f"({splice(m.group(1))})"
        return f"(function () {{ {splice(e.text)} }}())"


def emit_module(module: C.CoreModule, include_entry: bool = True) -> JsDocument:
    """Emit a desugared, start-validated module as a JavaScript document."""
    residue = C.check_desugared(module)
    if residue:
        raise EmitError(error("emit.residual-member", "; ".join(residue)))
    emitter = _Emitter(avoid=frozenset(_static_global_names(module)))
    lines = [
        "// compiled module; requires runtime shim: mmlrt.js (global MMLRT)",
        '"use strict";',
    ]
    for binding in module.bindings:
        value = emitter.expr(binding.value)
        stmts = emitter.bind_pattern(binding.pattern, value)
        if not stmts:  # wildcard/unit pattern: evaluate for effect
            stmts = [f"{value};"]
        lines.extend(stmts)
    entry_invocation: str | None = None
    if module.entry is not None and include_entry:
        entry_invocation = f"var __entry = {emitter.expr(module.entry)};"
        lines.append(entry_invocation)
    text = "\n".join(lines) + "\n"
    for symbol in sorted(emitter.symbols):
        assert f"MMLRT.{symbol}" in text
    return JsDocument(text, emitter.symbols, entry_invocation)
