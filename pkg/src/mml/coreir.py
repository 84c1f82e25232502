"""Core IR: the typed language after member erasure.

Between erasure and async desugaring the tree may still contain async
blocks, `let!` and try/with; the desugarer replaces those with builder
operations. `check_erased` / `check_desugared` assert the two stages'
invariants.

`dump_module` renders a module in a stable textual form used for golden
tests. Data-access runtime calls print receiver-first (`recv.GetCountry("CZE")`)
so the dumps read like the runtime code they stand for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .diagnostics import SourceSpan
from .surface import Pattern, PTuple, PUnit, PVar, PWildcard, UNIT

# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class CoreType:
    pass


@dataclass(frozen=True)
class TInt(CoreType):
    pass


@dataclass(frozen=True)
class TFloat(CoreType):
    pass


@dataclass(frozen=True)
class TBool(CoreType):
    pass


@dataclass(frozen=True)
class TString(CoreType):
    pass


@dataclass(frozen=True)
class TUnit(CoreType):
    pass


@dataclass(frozen=True)
class TObject(CoreType):
    """Top type for dynamic values imported from the untyped world."""


@dataclass(frozen=True)
class TFun(CoreType):
    param: CoreType
    result: CoreType


@dataclass(frozen=True)
class TTuple(CoreType):
    items: tuple[CoreType, ...]


@dataclass(frozen=True)
class TList(CoreType):
    element: CoreType


@dataclass(frozen=True)
class TArray(CoreType):
    element: CoreType


@dataclass(frozen=True)
class TAsync(CoreType):
    result: CoreType


@dataclass(frozen=True)
class TOption(CoreType):
    element: CoreType


@dataclass(frozen=True)
class TNamed(CoreType):
    type_id: str


@dataclass(frozen=True)
class TVar(CoreType):
    """A quantified or free type variable in a zonked type."""

    id: int


INT = TInt()
FLOAT = TFloat()
BOOL = TBool()
STRING = TString()
UNIT_T = TUnit()
OBJECT = TObject()


@dataclass(frozen=True)
class Scheme:
    """A possibly-quantified type; `vars` are the TVar ids bound by it."""

    vars: tuple[int, ...]
    ty: CoreType


def type_text(t: CoreType) -> str:
    if isinstance(t, TInt):
        return "int"
    if isinstance(t, TFloat):
        return "float"
    if isinstance(t, TBool):
        return "bool"
    if isinstance(t, TString):
        return "string"
    if isinstance(t, TUnit):
        return "unit"
    if isinstance(t, TObject):
        return "obj"
    if isinstance(t, TFun):
        left = type_text(t.param)
        if isinstance(t.param, (TFun, TTuple)):
            left = f"({left})"
        return f"{left} -> {type_text(t.result)}"
    if isinstance(t, TTuple):
        parts = []
        for item in t.items:
            text = type_text(item)
            if isinstance(item, (TFun, TTuple)):
                text = f"({text})"
            parts.append(text)
        return " * ".join(parts)
    if isinstance(t, TList):
        return f"list<{type_text(t.element)}>"
    if isinstance(t, TArray):
        return f"array<{type_text(t.element)}>"
    if isinstance(t, TAsync):
        return f"async<{type_text(t.result)}>"
    if isinstance(t, TOption):
        return f"option<{type_text(t.element)}>"
    if isinstance(t, TNamed):
        return t.type_id
    if isinstance(t, TVar):
        return _var_name(t.id)
    raise TypeError(f"unknown type {t!r}")


def _var_name(i: int) -> str:
    name = ""
    i += 1
    while i > 0:
        i, rem = divmod(i - 1, 26)
        name = chr(ord("a") + rem) + name
    return "'" + name


def normalize_type(t: CoreType) -> CoreType:
    """Rename type variables in first-occurrence order, for α-comparison."""
    mapping: dict[int, int] = {}

    def walk(t: CoreType) -> CoreType:
        if isinstance(t, TVar):
            if t.id not in mapping:
                mapping[t.id] = len(mapping)
            return TVar(mapping[t.id])
        if isinstance(t, TFun):
            return TFun(walk(t.param), walk(t.result))
        if isinstance(t, TTuple):
            return TTuple(tuple(walk(i) for i in t.items))
        if isinstance(t, TList):
            return TList(walk(t.element))
        if isinstance(t, TArray):
            return TArray(walk(t.element))
        if isinstance(t, TAsync):
            return TAsync(walk(t.result))
        if isinstance(t, TOption):
            return TOption(walk(t.element))
        return t

    return walk(t)


# ---------------------------------------------------------------------------
# expressions

BUILDER_OPS = ("Bind", "Return", "Delay", "For", "StartImmediate", "Catch")


@dataclass(frozen=True)
class CoreExpr:
    span: SourceSpan
    ty: CoreType


@dataclass(frozen=True)
class CLit(CoreExpr):
    value: object


@dataclass(frozen=True)
class CIdent(CoreExpr):
    name: str


@dataclass(frozen=True)
class CLambda(CoreExpr):
    param: Pattern
    body: CoreExpr


@dataclass(frozen=True)
class CApp(CoreExpr):
    fn: CoreExpr
    arg: CoreExpr


@dataclass(frozen=True)
class CLet(CoreExpr):
    pattern: Pattern
    recursive: bool
    value: CoreExpr
    body: CoreExpr


@dataclass(frozen=True)
class CSeq(CoreExpr):
    first: CoreExpr
    rest: CoreExpr


@dataclass(frozen=True)
class CIf(CoreExpr):
    cond: CoreExpr
    then: CoreExpr
    orelse: CoreExpr | None


@dataclass(frozen=True)
class CTuple(CoreExpr):
    items: tuple[CoreExpr, ...]


@dataclass(frozen=True)
class CListLit(CoreExpr):
    items: tuple[CoreExpr, ...]


@dataclass(frozen=True)
class CArrayLit(CoreExpr):
    items: tuple[CoreExpr, ...]


@dataclass(frozen=True)
class CFor(CoreExpr):
    pattern: Pattern
    source: CoreExpr
    body: CoreExpr


@dataclass(frozen=True)
class CBinOp(CoreExpr):
    op: str
    left: CoreExpr
    right: CoreExpr


@dataclass(frozen=True)
class CCast(CoreExpr):
    """unbox<T>: checked at run time by the interpreter, erased by the JS backend."""

    target: CoreType
    operand: CoreExpr


# transient forms, removed by the async desugarer


@dataclass(frozen=True)
class CAsyncBlock(CoreExpr):
    body: CoreExpr


@dataclass(frozen=True)
class CLetBang(CoreExpr):
    pattern: Pattern
    value: CoreExpr
    body: CoreExpr


@dataclass(frozen=True)
class CReturn(CoreExpr):
    value: CoreExpr


@dataclass(frozen=True)
class CTryWith(CoreExpr):
    body: CoreExpr
    var: str
    handler: CoreExpr


# erased forms


@dataclass(frozen=True)
class CRuntimeCall(CoreExpr):
    symbol: str
    args: tuple[CoreExpr, ...]


@dataclass(frozen=True)
class CEmitCall(CoreExpr):
    is_static: bool
    name: str  # empty name: the receiver itself is called
    args: tuple[CoreExpr, ...]


@dataclass(frozen=True)
class CEmitPropGet(CoreExpr):
    is_static: bool
    name: str
    args: tuple[CoreExpr, ...]


@dataclass(frozen=True)
class CEmitPropSet(CoreExpr):
    is_static: bool
    name: str
    args: tuple[CoreExpr, ...]


@dataclass(frozen=True)
class CJsTemplate(CoreExpr):
    text: str
    args: tuple[CoreExpr, ...]


@dataclass(frozen=True)
class CBuilderOp(CoreExpr):
    op: str
    args: tuple[CoreExpr, ...]

    def __post_init__(self) -> None:
        if self.op not in BUILDER_OPS:
            raise ValueError(f"unknown builder op {self.op!r}")


@dataclass(frozen=True)
class CoreBinding:
    pattern: Pattern
    recursive: bool
    value: CoreExpr


@dataclass(frozen=True)
class CoreModule:
    bindings: tuple[CoreBinding, ...]
    entry: CoreExpr | None


# ---------------------------------------------------------------------------
# traversal helpers


def children(expr: CoreExpr) -> list[CoreExpr]:
    out: list[CoreExpr] = []
    for f in fields(expr):
        if f.name in ("span", "ty"):
            continue
        value = getattr(expr, f.name)
        if isinstance(value, CoreExpr):
            out.append(value)
        elif isinstance(value, tuple):
            out.extend(v for v in value if isinstance(v, CoreExpr))
    return out


def walk(expr: CoreExpr):
    yield expr
    for child in children(expr):
        yield from walk(child)


def walk_module(module: CoreModule):
    for binding in module.bindings:
        yield from walk(binding.value)
    if module.entry is not None:
        yield from walk(module.entry)


def core_size(module: CoreModule) -> int:
    return sum(1 for _ in walk_module(module))


def check_desugared(module: CoreModule) -> list[str]:
    bad = []
    for node in walk_module(module):
        if isinstance(node, (CAsyncBlock, CLetBang, CReturn, CTryWith)):
            bad.append(f"residual async sugar {type(node).__name__} at {node.span}")
    return bad


# ---------------------------------------------------------------------------
# stable textual dump

_RECEIVER_STYLE_SYMBOLS = {
    "GetCountries",
    "GetCountry",
    "GetIndicator",
    "GetIndicatorOpt",
    "AsyncGetIndicator",
}


def _dump_lit(value: object) -> str:
    if value is UNIT:
        return "()"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite float in dump")
        return repr(value)
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    raise TypeError(f"bad literal {value!r}")


def _dump_pattern(p: Pattern) -> str:
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, PWildcard):
        return "_"
    if isinstance(p, PUnit):
        return "()"
    if isinstance(p, PTuple):
        return "(" + ", ".join(_dump_pattern(i) for i in p.items) + ")"
    raise TypeError(f"bad pattern {p!r}")


def dump_expr(e: CoreExpr) -> str:
    if isinstance(e, CLit):
        return _dump_lit(e.value)
    if isinstance(e, CIdent):
        return e.name
    if isinstance(e, CLambda):
        return f"(fun {_dump_pattern(e.param)} -> {dump_expr(e.body)})"
    if isinstance(e, CApp):
        return f"({dump_expr(e.fn)} {dump_expr(e.arg)})"
    if isinstance(e, CLet):
        rec = "rec " if e.recursive else ""
        return f"(let {rec}{_dump_pattern(e.pattern)} = {dump_expr(e.value)} in {dump_expr(e.body)})"
    if isinstance(e, CSeq):
        return f"({dump_expr(e.first)}; {dump_expr(e.rest)})"
    if isinstance(e, CIf):
        orelse = f" else {dump_expr(e.orelse)}" if e.orelse is not None else ""
        return f"(if {dump_expr(e.cond)} then {dump_expr(e.then)}{orelse})"
    if isinstance(e, CTuple):
        return "(" + ", ".join(dump_expr(i) for i in e.items) + ")"
    if isinstance(e, CListLit):
        return "[" + "; ".join(dump_expr(i) for i in e.items) + "]"
    if isinstance(e, CArrayLit):
        return "[|" + "; ".join(dump_expr(i) for i in e.items) + "|]"
    if isinstance(e, CFor):
        return f"(for {_dump_pattern(e.pattern)} in {dump_expr(e.source)} do {dump_expr(e.body)})"
    if isinstance(e, CBinOp):
        return f"({dump_expr(e.left)} {e.op} {dump_expr(e.right)})"
    if isinstance(e, CCast):
        return f"unbox<{type_text(e.target)}>({dump_expr(e.operand)})"
    if isinstance(e, CAsyncBlock):
        return f"async({dump_expr(e.body)})"
    if isinstance(e, CLetBang):
        return f"(let! {_dump_pattern(e.pattern)} = {dump_expr(e.value)} in {dump_expr(e.body)})"
    if isinstance(e, CReturn):
        return f"(return {dump_expr(e.value)})"
    if isinstance(e, CTryWith):
        return f"(try {dump_expr(e.body)} with {e.var} -> {dump_expr(e.handler)})"
    if isinstance(e, CRuntimeCall):
        if e.symbol in _RECEIVER_STYLE_SYMBOLS and e.args:
            recv, *rest = e.args
            return f"{dump_expr(recv)}.{e.symbol}({', '.join(dump_expr(a) for a in rest)})"
        return f"{e.symbol}({', '.join(dump_expr(a) for a in e.args)})"
    if isinstance(e, CEmitCall):
        return _dump_emit("CallImpl", e.is_static, e.name, e.args)
    if isinstance(e, CEmitPropGet):
        return _dump_emit("PropertyGetImpl", e.is_static, e.name, e.args)
    if isinstance(e, CEmitPropSet):
        return _dump_emit("PropertySetImpl", e.is_static, e.name, e.args)
    if isinstance(e, CJsTemplate):
        args = "; ".join(dump_expr(a) for a in e.args)
        return f'JsTemplate({_dump_lit(e.text)}, [{args}])'
    if isinstance(e, CBuilderOp):
        return f"{e.op}({', '.join(dump_expr(a) for a in e.args)})"
    raise TypeError(f"unknown core node {e!r}")


def _dump_emit(name: str, is_static: bool, member: str, args: tuple[CoreExpr, ...]) -> str:
    flag = "true" if is_static else "false"
    body = "; ".join(dump_expr(a) for a in args)
    return f'{name}({flag}, {_dump_lit(member)}, [{body}])'


def dump_module(module: CoreModule) -> str:
    lines = []
    for binding in module.bindings:
        rec = "rec " if binding.recursive else ""
        lines.append(f"let {rec}{_dump_pattern(binding.pattern)} = {dump_expr(binding.value)}")
    if module.entry is not None:
        lines.append(f"do {dump_expr(module.entry)}")
    return "\n".join(lines) + "\n"
