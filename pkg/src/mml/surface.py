"""Surface AST produced by the parser.

Blocks are lowered at parse time: `a; b` becomes Seq, `let x = e; rest`
becomes Let with an explicit body, and `xs |> f` becomes App(f, xs). Every
node carries the byte span of the source text it covers.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Union

from .diagnostics import SourceSpan

# ---------------------------------------------------------------------------
# patterns


@dataclass(frozen=True)
class Pattern:
    span: SourceSpan


@dataclass(frozen=True)
class PVar(Pattern):
    name: str


@dataclass(frozen=True)
class PWildcard(Pattern):
    pass


@dataclass(frozen=True)
class PUnit(Pattern):
    pass


@dataclass(frozen=True)
class PTuple(Pattern):
    items: tuple[Pattern, ...]


# ---------------------------------------------------------------------------
# type expressions (only used by unbox<T>)


@dataclass(frozen=True)
class TypeExpr:
    span: SourceSpan
    name: str  # int | float | bool | string | unit | obj | list | array | option
    args: tuple["TypeExpr", ...] = ()


# ---------------------------------------------------------------------------
# expressions

UNIT = object()  # sentinel payload for the unit literal


@dataclass(frozen=True)
class Expr:
    span: SourceSpan


@dataclass(frozen=True)
class Lit(Expr):
    value: object  # int | float | str | bool | UNIT


@dataclass(frozen=True)
class Ident(Expr):
    name: str


@dataclass(frozen=True)
class Lambda(Expr):
    param: Pattern
    body: Expr


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(frozen=True)
class Let(Expr):
    pattern: Pattern
    recursive: bool
    value: Expr
    body: Expr


@dataclass(frozen=True)
class LetBang(Expr):
    pattern: Pattern
    value: Expr
    body: Expr


@dataclass(frozen=True)
class Return(Expr):
    value: Expr


@dataclass(frozen=True)
class Seq(Expr):
    first: Expr
    rest: Expr


@dataclass(frozen=True)
class If(Expr):
    cond: Expr
    then: Expr
    orelse: Expr | None


@dataclass(frozen=True)
class Tuple(Expr):
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class ListLit(Expr):
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class ArrayLit(Expr):
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class MemberAccess(Expr):
    recv: Expr
    name: str


@dataclass(frozen=True)
class MemberAssign(Expr):
    recv: Expr
    name: str
    value: Expr


@dataclass(frozen=True)
class MethodCall(Expr):
    recv: Expr
    name: str
    args: tuple[Expr, ...]
    named_args: tuple[tuple[str, Expr], ...] = ()


@dataclass(frozen=True)
class AsyncBlock(Expr):
    body: Expr


@dataclass(frozen=True)
class For(Expr):
    pattern: Pattern
    source: Expr
    body: Expr


@dataclass(frozen=True)
class Unbox(Expr):
    target: TypeExpr
    operand: Expr


@dataclass(frozen=True)
class TryWith(Expr):
    body: Expr
    var: str
    handler: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # + - * / % +. -. *. /. = <> < <= > >= && ||
    left: Expr
    right: Expr


INT_OPS = ("+", "-", "*", "/", "%")
FLOAT_OPS = ("+.", "-.", "*.", "/.")
CMP_OPS = ("=", "<>", "<", "<=", ">", ">=")
BOOL_OPS = ("&&", "||")


# ---------------------------------------------------------------------------
# modules


@dataclass(frozen=True)
class ProviderDecl:
    span: SourceSpan
    alias: str
    provider: str
    static_params: tuple[tuple[str | None, object], ...]  # (name?, str|bool value)


@dataclass(frozen=True)
class Binding:
    span: SourceSpan
    pattern: Pattern
    recursive: bool
    value: Expr


@dataclass(frozen=True)
class SourceModule:
    provider_decls: tuple[ProviderDecl, ...]
    bindings: tuple[Binding, ...]
    entry: Expr | None


# ---------------------------------------------------------------------------
# structural equality, ignoring spans

_ATOMS = (int, float, str, bool, type(None))


def ast_equal(a: object, b: object) -> bool:
    """Structural equality over AST nodes that ignores source spans."""
    if a is UNIT or b is UNIT:
        return a is b
    if type(a) is not type(b):
        return False
    if isinstance(a, _ATOMS):
        return a == b
    if isinstance(a, tuple):
        return len(a) == len(b) and all(ast_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, (Expr, Pattern, TypeExpr, ProviderDecl, Binding)):
        for f in fields(a):
            if f.name == "span":
                continue
            if not ast_equal(getattr(a, f.name), getattr(b, f.name)):
                return False
        return True
    if isinstance(a, SourceModule):
        return (
            ast_equal(a.provider_decls, b.provider_decls)
            and ast_equal(a.bindings, b.bindings)
            and ast_equal(a.entry, b.entry)
        )
    return a == b


NodeLike = Union[Expr, Pattern, TypeExpr]
