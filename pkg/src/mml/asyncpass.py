"""CPS desugaring of async blocks into builder operations.

`async { ... }` becomes `Delay(fun () -> ...)`; `let! x = m; rest` becomes
`Bind(m, fun x -> rest')`; a `for` in an async statement position becomes
the builder `For`; `try/with` becomes `Catch` over a delayed body. Each
bound computation is evaluated exactly once, in source order, because
construction of the continuation chain happens inside the outer Delay and
follows statement order.

The pass is idempotent: its output contains none of the transient forms,
so a second run is the identity.
"""

from __future__ import annotations

from .coreir import (
    OBJECT,
    UNIT_T,
    CoreBinding,
    CoreExpr,
    CoreModule,
    CApp,
    CArrayLit,
    CAsyncBlock,
    CBinOp,
    CBuilderOp,
    CCast,
    CEmitCall,
    CEmitPropGet,
    CEmitPropSet,
    CFor,
    CIf,
    CJsTemplate,
    CLambda,
    CLet,
    CLetBang,
    CListLit,
    CLit,
    CReturn,
    CRuntimeCall,
    CSeq,
    CTryWith,
    CTuple,
    TAsync,
    walk_module,
)
from .diagnostics import Diagnostic, SourceSpan, error
from .prelude import START_PRIMITIVE_SYMBOLS
from .surface import UNIT, PUnit, PWildcard

_ASYNC_TY = TAsync(OBJECT)


class DesugarBug(Exception):
    """Async sugar survived outside an async block (parser validation hole)."""


def _is_async_stmt(e: CoreExpr) -> bool:
    """Does this statement need builder treatment inside an async block?"""
    if isinstance(e, (CLetBang, CReturn, CTryWith, CFor)):
        return True
    if isinstance(e, CSeq):
        return _is_async_stmt(e.first) or _is_async_stmt(e.rest)
    if isinstance(e, CLet):
        return _is_async_stmt(e.body)
    if isinstance(e, CIf):
        return _is_async_stmt(e.then) or (e.orelse is not None and _is_async_stmt(e.orelse))
    return False


def _ret(value: CoreExpr, span: SourceSpan) -> CoreExpr:
    return CBuilderOp(span, TAsync(value.ty), "Return", (value,))


def _ret_unit(span: SourceSpan) -> CoreExpr:
    return _ret(CLit(span, UNIT_T, UNIT), span)


def _bind(m: CoreExpr, k: CoreExpr, span: SourceSpan) -> CoreExpr:
    return CBuilderOp(span, _ASYNC_TY, "Bind", (m, k))


def _discard_lambda(body: CoreExpr, span: SourceSpan) -> CoreExpr:
    return CLambda(span, OBJECT, PWildcard(span), body)


def _to_async(e: CoreExpr) -> CoreExpr:
    """Translate an async tail position into an expression of async type."""
    span = e.span
    if isinstance(e, CLetBang):
        k = CLambda(span, OBJECT, e.pattern, _to_async(e.body))
        return _bind(desugar_expr(e.value), k, span)
    if isinstance(e, CReturn):
        return _ret(desugar_expr(e.value), span)
    if isinstance(e, CLet):
        return CLet(span, _ASYNC_TY, e.pattern, e.recursive, desugar_expr(e.value), _to_async(e.body))
    if isinstance(e, CSeq):
        if _is_async_stmt(e.first):
            return _bind(_stmt_async(e.first), _discard_lambda(_to_async(e.rest), span), span)
        return CSeq(span, _ASYNC_TY, desugar_expr(e.first), _to_async(e.rest))
    if isinstance(e, CFor):
        return _stmt_async(e)  # completes with unit, which is the tail value here
    if isinstance(e, CIf) and _is_async_stmt(e):
        if e.orelse is None:
            return _bind(_stmt_async(e), _discard_lambda(_ret_unit(span), span), span)
        return CIf(span, _ASYNC_TY, desugar_expr(e.cond), _to_async(e.then), _to_async(e.orelse))
    if isinstance(e, CTryWith):
        return _catch(e)
    return _ret(desugar_expr(e), span)


def _stmt_async(e: CoreExpr) -> CoreExpr:
    """Translate an async statement whose value is discarded."""
    span = e.span
    if isinstance(e, CFor):
        body = CLambda(span, OBJECT, e.pattern, _to_async(e.body))
        return CBuilderOp(span, TAsync(UNIT_T), "For", (desugar_expr(e.source), body))
    if isinstance(e, CIf):
        then = _branch_async(e.then)
        orelse = _branch_async(e.orelse) if e.orelse is not None else _ret_unit(span)
        return CIf(span, _ASYNC_TY, desugar_expr(e.cond), then, orelse)
    if isinstance(e, CTryWith):
        return _catch(e)
    return _to_async(e)


def _branch_async(e: CoreExpr) -> CoreExpr:
    if _is_async_stmt(e):
        return _stmt_async(e)
    return _ret(desugar_expr(e), e.span)


def _catch(e: CTryWith) -> CoreExpr:
    span = e.span
    delayed = CBuilderOp(
        span, _ASYNC_TY, "Delay", (CLambda(span, OBJECT, PUnit(span), _to_async(e.body)),)
    )
    handler = CLambda(span, OBJECT, _pvar(e.var, span), _to_async(e.handler))
    return CBuilderOp(span, _ASYNC_TY, "Catch", (delayed, handler))


def _pvar(name: str, span: SourceSpan):
    from .surface import PVar

    return PVar(span, name)


def desugar_expr(e: CoreExpr) -> CoreExpr:
    span = e.span
    if isinstance(e, CAsyncBlock):
        inner = CLambda(span, e.ty, PUnit(span), _to_async(e.body))
        return CBuilderOp(span, e.ty, "Delay", (inner,))
    if isinstance(e, (CLetBang, CReturn, CTryWith)):
        raise DesugarBug(f"{type(e).__name__} outside an async block at {span}")
    if isinstance(e, CLambda):
        return CLambda(span, e.ty, e.param, desugar_expr(e.body))
    if isinstance(e, CApp):
        return CApp(span, e.ty, desugar_expr(e.fn), desugar_expr(e.arg))
    if isinstance(e, CLet):
        return CLet(span, e.ty, e.pattern, e.recursive, desugar_expr(e.value), desugar_expr(e.body))
    if isinstance(e, CSeq):
        return CSeq(span, e.ty, desugar_expr(e.first), desugar_expr(e.rest))
    if isinstance(e, CIf):
        orelse = desugar_expr(e.orelse) if e.orelse is not None else None
        return CIf(span, e.ty, desugar_expr(e.cond), desugar_expr(e.then), orelse)
    if isinstance(e, CTuple):
        return CTuple(span, e.ty, tuple(desugar_expr(i) for i in e.items))
    if isinstance(e, CListLit):
        return CListLit(span, e.ty, tuple(desugar_expr(i) for i in e.items))
    if isinstance(e, CArrayLit):
        return CArrayLit(span, e.ty, tuple(desugar_expr(i) for i in e.items))
    if isinstance(e, CFor):
        return CFor(span, e.ty, e.pattern, desugar_expr(e.source), desugar_expr(e.body))
    if isinstance(e, CBinOp):
        return CBinOp(span, e.ty, e.op, desugar_expr(e.left), desugar_expr(e.right))
    if isinstance(e, CCast):
        return CCast(span, e.ty, e.target, desugar_expr(e.operand))
    if isinstance(e, CRuntimeCall):
        return CRuntimeCall(span, e.ty, e.symbol, tuple(desugar_expr(a) for a in e.args))
    if isinstance(e, CEmitCall):
        return CEmitCall(span, e.ty, e.is_static, e.name, tuple(desugar_expr(a) for a in e.args))
    if isinstance(e, CEmitPropGet):
        return CEmitPropGet(span, e.ty, e.is_static, e.name, tuple(desugar_expr(a) for a in e.args))
    if isinstance(e, CEmitPropSet):
        return CEmitPropSet(span, e.ty, e.is_static, e.name, tuple(desugar_expr(a) for a in e.args))
    if isinstance(e, CJsTemplate):
        return CJsTemplate(span, e.ty, e.text, tuple(desugar_expr(a) for a in e.args))
    if isinstance(e, CBuilderOp):
        return CBuilderOp(span, e.ty, e.op, tuple(desugar_expr(a) for a in e.args))
    # literals, identifiers
    return e


def desugar_async(cm: CoreModule) -> CoreModule:
    bindings = tuple(
        CoreBinding(b.pattern, b.recursive, desugar_expr(b.value)) for b in cm.bindings
    )
    entry = desugar_expr(cm.entry) if cm.entry is not None else None
    return CoreModule(bindings, entry)


def validate_start_primitives(cm: CoreModule, target: str) -> list[Diagnostic]:
    """Both current targets run single-threaded: only StartImmediate maps."""
    del target  # the rule is the same for "js" and "interp"
    diags: list[Diagnostic] = []
    for node in walk_module(cm):
        if isinstance(node, CRuntimeCall) and node.symbol in START_PRIMITIVE_SYMBOLS:
            which = "RunSynchronously" if node.symbol.endswith("runSynchronously") else "Start"
            diags.append(
                error(
                    "async.unsupported-start",
                    f"Async.{which} cannot start work on this target; use Async.StartImmediate",
                    node.span,
                )
            )
    return diags
