"""Erasure: replaces every resolved member use with its plan.

After this pass the tree contains no member accesses at all, only
runtime-library calls, Emit operations, JS templates and ordinary core
forms. Prelude functions used partially are eta-expanded so the generated
call sites are always saturated; fully applied uses collapse to a direct
call.
"""

from __future__ import annotations

import re

from . import typecheck as T
from .coreir import (
    STRING,
    CoreBinding,
    CoreExpr,
    CoreModule,
    CoreType,
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
    CIdent,
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
    TFun,
)
from .diagnostics import SourceSpan
from .prelude import BuilderPlan, PreludeValue
from .providers.kit import (
    EmitCallPlan,
    EmitPropertyGetPlan,
    EmitPropertySetPlan,
    ErasurePlan,
    JsTemplatePlan,
    PlanArg,
    RuntimeCallPlan,
)
from .surface import PVar
from .typecheck import zonk

JS_UNDEFINED = "__undefined__"  # CLit payload for an omitted optional argument


class EraseBug(Exception):
    """Provider produced an inconsistent plan; not a user error."""


_PLACEHOLDER = re.compile(r"\{(\d+)\}")


def check_template(text: str, arg_count: int) -> None:
    seen: set[int] = set()
    for m in _PLACEHOLDER.finditer(text):
        index = int(m.group(1))
        if index >= arg_count:
            raise EraseBug(f"template {text!r} references argument {index} of {arg_count}")
        if index in seen:
            raise EraseBug(f"template {text!r} references argument {index} twice")
        seen.add(index)


def _plan_args(
    plan_args: tuple[PlanArg, ...],
    recv: CoreExpr | None,
    args: tuple[CoreExpr, ...],
    span: SourceSpan,
) -> tuple[CoreExpr, ...]:
    out: list[CoreExpr] = []
    for pa in plan_args:
        if pa.kind == "recv":
            if recv is None:
                raise EraseBug("plan expects a receiver but the member is static")
            out.append(recv)
        elif pa.kind == "arg":
            out.append(args[pa.index])
        elif pa.kind == "rest":
            out.extend(args)
        elif pa.kind == "lit":
            out.append(CLit(span, _lit_type(pa.literal), pa.literal))
        else:
            raise EraseBug(f"unknown plan argument kind {pa.kind!r}")
    return tuple(out)


def _lit_type(value: object) -> CoreType:
    from .coreir import BOOL, FLOAT, INT

    if isinstance(value, bool):
        return BOOL
    if isinstance(value, int):
        return INT
    if isinstance(value, float):
        return FLOAT
    return STRING


def apply_plan(
    plan: ErasurePlan,
    recv: CoreExpr | None,
    args: tuple[CoreExpr, ...],
    span: SourceSpan,
    ty: CoreType,
) -> CoreExpr:
    if isinstance(plan, RuntimeCallPlan):
        return CRuntimeCall(span, ty, plan.symbol, _plan_args(plan.args, recv, args, span))
    if isinstance(plan, EmitCallPlan):
        return CEmitCall(span, ty, plan.is_static, plan.member_name, _plan_args(plan.args, recv, args, span))
    if isinstance(plan, EmitPropertyGetPlan):
        return CEmitPropGet(span, ty, plan.is_static, plan.property_name, _plan_args(plan.args, recv, args, span))
    if isinstance(plan, EmitPropertySetPlan):
        return CEmitPropSet(span, ty, plan.is_static, plan.property_name, _plan_args(plan.args, recv, args, span))
    if isinstance(plan, JsTemplatePlan):
        materialized = _plan_args(plan.args, recv, args, span)
        check_template(plan.text, len(materialized))
        return CJsTemplate(span, ty, plan.text, materialized)
    if isinstance(plan, BuilderPlan):
        return CBuilderOp(span, ty, plan.op, _plan_args(plan.args, recv, args, span))
    raise EraseBug(f"member has no usable erasure plan: {plan!r}")


def _fresh_names(n: int, base: str) -> list[str]:
    return [f"__{base}{i}" for i in range(n)]


def _eta_expand(value: PreludeValue, ty: CoreType, span: SourceSpan) -> CoreExpr:
    """Wrap an unsaturated prelude function so its plan sees all arguments."""
    names = _fresh_names(value.call_arity, "eta")
    fn_types: list[CoreType] = []  # remaining function type at each level
    param_types: list[CoreType] = []
    cur = ty
    for _ in names:
        if not isinstance(cur, TFun):
            raise EraseBug(f"prelude value {value.name} has arity {value.call_arity} but type {cur!r}")
        fn_types.append(cur)
        param_types.append(cur.param)
        cur = cur.result
    args = tuple(CIdent(span, param_types[i], names[i]) for i in range(len(names)))
    body = apply_plan(value.plan, None, args, span, cur)
    for i in reversed(range(len(names))):
        body = CLambda(span, fn_types[i], PVar(span, names[i]), body)
    return body


def erase_expr(e: T.TExpr) -> CoreExpr:
    span = e.span
    ty = zonk(e.ty)

    if isinstance(e, T.TLit):
        return CLit(span, ty, e.value)
    if isinstance(e, T.TVarRef):
        return CIdent(span, ty, e.name)
    if isinstance(e, T.TUndefined):
        return CLit(span, ty, JS_UNDEFINED)
    if isinstance(e, T.TPreludeRef):
        return _eta_expand(e.value, ty, span)
    if isinstance(e, T.TApp):
        # collapse saturated prelude calls into direct plan application
        head, apps = e, []
        while isinstance(head, T.TApp):
            apps.append(head)
            head = head.fn
        if isinstance(head, T.TPreludeRef) and len(apps) >= head.value.call_arity:
            arity = head.value.call_arity
            chain = list(reversed(apps))  # innermost application first
            plan_arg_nodes = tuple(erase_expr(a.arg) for a in chain[:arity])
            call_ty = zonk(chain[arity - 1].ty)
            out = apply_plan(head.value.plan, None, plan_arg_nodes, span, call_ty)
            for extra in chain[arity:]:
                out = CApp(extra.span, zonk(extra.ty), out, erase_expr(extra.arg))
            return out
        return CApp(span, ty, erase_expr(e.fn), erase_expr(e.arg))
    if isinstance(e, T.TLambda):
        return CLambda(span, ty, e.param, erase_expr(e.body))
    if isinstance(e, T.TLet):
        return CLet(span, ty, e.pattern, e.recursive, erase_expr(e.value), erase_expr(e.body))
    if isinstance(e, T.TSeq):
        return CSeq(span, ty, erase_expr(e.first), erase_expr(e.rest))
    if isinstance(e, T.TIf):
        orelse = erase_expr(e.orelse) if e.orelse is not None else None
        return CIf(span, ty, erase_expr(e.cond), erase_expr(e.then), orelse)
    if isinstance(e, T.TTupleE):
        return CTuple(span, ty, tuple(erase_expr(i) for i in e.items))
    if isinstance(e, T.TListE):
        return CListLit(span, ty, tuple(erase_expr(i) for i in e.items))
    if isinstance(e, T.TArrayE):
        return CArrayLit(span, ty, tuple(erase_expr(i) for i in e.items))
    if isinstance(e, T.TForE):
        return CFor(span, ty, e.pattern, erase_expr(e.source), erase_expr(e.body))
    if isinstance(e, T.TBinOp):
        return CBinOp(span, ty, e.op, erase_expr(e.left), erase_expr(e.right))
    if isinstance(e, T.TUnbox):
        return CCast(span, ty, zonk(e.target), erase_expr(e.operand))
    if isinstance(e, T.TAsyncE):
        return CAsyncBlock(span, ty, erase_expr(e.body))
    if isinstance(e, T.TLetBangE):
        return CLetBang(span, ty, e.pattern, erase_expr(e.value), erase_expr(e.body))
    if isinstance(e, T.TReturnE):
        return CReturn(span, ty, erase_expr(e.value))
    if isinstance(e, T.TTryWithE):
        return CTryWith(span, ty, erase_expr(e.body), e.var, erase_expr(e.handler))
    if isinstance(e, T.TPropGet):
        recv = erase_expr(e.recv) if e.recv is not None else None
        return apply_plan(e.plan, recv, (), span, ty)
    if isinstance(e, T.TPropSet):
        recv = erase_expr(e.recv) if e.recv is not None else None
        return apply_plan(e.plan, recv, (erase_expr(e.value),), span, ty)
    if isinstance(e, T.TMethodCallE):
        recv = erase_expr(e.recv) if e.recv is not None else None
        args = tuple(erase_expr(a) for a in e.args)
        return apply_plan(e.plan, recv, args, span, ty)
    if isinstance(e, T.TStaticRef):
        raise EraseBug("type alias reached erasure in value position")
    raise EraseBug(f"unhandled typed node {type(e).__name__}")


def erase_module(tm: T.TypedModule) -> CoreModule:
    bindings = tuple(
        CoreBinding(b.pattern, b.recursive, erase_expr(b.value)) for b in tm.bindings
    )
    entry = erase_expr(tm.entry) if tm.entry is not None else None
    return CoreModule(bindings, entry)
