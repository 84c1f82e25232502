"""Pretty-printer for surface modules.

The output is not the original text; the contract is that it re-parses to
a structurally equal AST (`parse(pretty(parse(p))) == parse(p)`), which is
what the round-trip tests pin down. Printing is deliberately conservative
with parentheses.
"""

from __future__ import annotations

import math

from . import surface as S

# precedence levels, mirroring the parser
_EXPR = 0      # tuples allowed
_OPEN = 1      # fun/if/let/return/assign...
_OR = 2
_AND = 3
_CMP = 4
_ADD = 5
_MUL = 6
_APP = 7
_POSTFIX = 8


def _is_plain_ident(name: str) -> bool:
    if not name or name[0].isdigit():
        return False
    from .lexer import KEYWORDS

    return all(ch.isalnum() or ch == "_" for ch in name) and name not in KEYWORDS


def _member_name(name: str) -> str:
    return name if _is_plain_ident(name) else f"`{name}`"


def _escape(s: str) -> str:
    out = []
    table = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}
    for ch in s:
        out.append(table.get(ch, ch))
    return '"' + "".join(out) + '"'


def _lit(value: object) -> str:
    if value is S.UNIT:
        return "()"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value) if value >= 0 else f"({value})"
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("cannot print non-finite float literal")
        text = repr(value)
        return text if math.copysign(1.0, value) > 0 else f"({text})"
    if isinstance(value, str):
        return _escape(value)
    raise TypeError(f"unknown literal payload {value!r}")


def _pattern(p: S.Pattern) -> str:
    if isinstance(p, S.PVar):
        return p.name
    if isinstance(p, S.PWildcard):
        return "_"
    if isinstance(p, S.PUnit):
        return "()"
    if isinstance(p, S.PTuple):
        return "(" + ", ".join(_pattern(i) for i in p.items) + ")"
    raise TypeError(f"unknown pattern {p!r}")


def _type_expr(t: S.TypeExpr) -> str:
    if t.args:
        return f"{t.name}<{_type_expr(t.args[0])}>"
    return t.name


_BINOP_LEVEL = {}
for op in ("||",):
    _BINOP_LEVEL[op] = _OR
for op in ("&&",):
    _BINOP_LEVEL[op] = _AND
for op in S.CMP_OPS:
    _BINOP_LEVEL[op] = _CMP
for op in ("+", "-", "+.", "-."):
    _BINOP_LEVEL[op] = _ADD
for op in ("*", "/", "%", "*.", "/."):
    _BINOP_LEVEL[op] = _MUL


def _block_items(expr: S.Expr) -> list[str]:
    """Flatten a Let/LetBang/Seq chain into printable block items."""
    items: list[str] = []
    cur = expr
    while True:
        if isinstance(cur, S.Let):
            rec = "rec " if cur.recursive else ""
            items.append(f"let {rec}{_pattern(cur.pattern)} = {_print(cur.value, _EXPR)}")
            cur = cur.body
        elif isinstance(cur, S.LetBang):
            items.append(f"let! {_pattern(cur.pattern)} = {_print(cur.value, _EXPR)}")
            cur = cur.body
        elif isinstance(cur, S.Seq):
            items.append(_print(cur.first, _EXPR))
            cur = cur.rest
        else:
            items.append(_print(cur, _EXPR))
            return items


def _print(expr: S.Expr, level: int) -> str:
    text, natural = _render(expr)
    if natural < level:
        return f"({text})"
    return text


def _render(expr: S.Expr) -> tuple[str, int]:
    """Returns (text, natural precedence level)."""
    if isinstance(expr, S.Lit):
        return _lit(expr.value), _POSTFIX
    if isinstance(expr, S.Ident):
        return expr.name, _POSTFIX
    if isinstance(expr, S.Lambda):
        return f"fun {_pattern(expr.param)} -> {_print(expr.body, _OPEN)}", _OPEN
    if isinstance(expr, S.App):
        return f"{_print(expr.fn, _APP)} {_print(expr.arg, _POSTFIX)}", _APP
    if isinstance(expr, (S.Let, S.LetBang, S.Seq)):
        return "(" + "; ".join(_block_items(expr)) + ")", _POSTFIX
    if isinstance(expr, S.Return):
        return f"return {_print(expr.value, _OPEN)}", _OPEN
    if isinstance(expr, S.If):
        cond = _print(expr.cond, _OR)
        if expr.orelse is None:
            return f"if {cond} then {_print(expr.then, _OPEN)}", _OPEN
        # parenthesise the then-branch so the else cannot re-attach inward
        return f"if {cond} then ({_print(expr.then, _EXPR)}) else {_print(expr.orelse, _OPEN)}", _OPEN
    if isinstance(expr, S.Tuple):
        return ", ".join(_print(i, _OPEN) for i in expr.items), _EXPR
    if isinstance(expr, S.ListLit):
        return "[" + "; ".join(_print(i, _EXPR) for i in expr.items) + "]", _POSTFIX
    if isinstance(expr, S.ArrayLit):
        return "[|" + "; ".join(_print(i, _EXPR) for i in expr.items) + "|]", _POSTFIX
    if isinstance(expr, S.MemberAccess):
        return f"{_print(expr.recv, _POSTFIX)}.{_member_name(expr.name)}", _POSTFIX
    if isinstance(expr, S.MemberAssign):
        recv = f"{_print(expr.recv, _POSTFIX)}.{_member_name(expr.name)}"
        return f"{recv} <- {_print(expr.value, _OPEN)}", _OPEN
    if isinstance(expr, S.MethodCall):
        parts = [_print(a, _OPEN) for a in expr.args]
        parts += [f"{n} = {_print(v, _OPEN)}" for n, v in expr.named_args]
        recv = _print(expr.recv, _POSTFIX)
        return f"{recv}.{_member_name(expr.name)}({', '.join(parts)})", _POSTFIX
    if isinstance(expr, S.AsyncBlock):
        return "async { " + "; ".join(_block_items(expr.body)) + " }", _OPEN
    if isinstance(expr, S.For):
        src = _print(expr.source, _OR)
        return f"for {_pattern(expr.pattern)} in {src} do ({_print(expr.body, _EXPR)})", _OPEN
    if isinstance(expr, S.Unbox):
        return f"unbox<{_type_expr(expr.target)}> {_print(expr.operand, _POSTFIX)}", _APP
    if isinstance(expr, S.TryWith):
        body = _print(expr.body, _EXPR)
        handler = _print(expr.handler, _EXPR)
        return f"try ({body}) with {expr.var} -> ({handler})", _OPEN
    if isinstance(expr, S.BinOp):
        lvl = _BINOP_LEVEL[expr.op]
        left = _print(expr.left, lvl if expr.op not in S.CMP_OPS else lvl + 1)
        right = _print(expr.right, lvl + 1)
        return f"{left} {expr.op} {right}", lvl
    raise TypeError(f"unknown expression {expr!r}")


def _static_param(param: tuple[str | None, object]) -> str:
    name, value = param
    if isinstance(value, bool):
        text = "true" if value else "false"
    else:
        text = _escape(str(value))
    return f"{name} = {text}" if name else text


def pretty_print(module: S.SourceModule) -> str:
    lines: list[str] = []
    for decl in module.provider_decls:
        params = ""
        if decl.static_params:
            params = "<" + ", ".join(_static_param(p) for p in decl.static_params) + ">"
        lines.append(f"type {decl.alias} = {decl.provider}{params}")
    for binding in module.bindings:
        rec = "rec " if binding.recursive else ""
        lines.append(f"let {rec}{_pattern(binding.pattern)} = {_print(binding.value, _EXPR)}")
    if module.entry is not None:
        lines.append(f"do {_print(module.entry, _EXPR)}")
    return "\n".join(lines) + "\n"
