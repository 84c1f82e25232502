"""Damas-Milner inference extended with member resolution.

The ML core gets standard let-polymorphism (with the value restriction);
member accesses resolve against the provided context and the prelude and
never drive inference: a receiver's type must already be known when a
member is looked up. Overloads resolve by arity first, then by exact
parameter-type match, with `obj` (imported `any`) parameters accepting
every argument.

Trial unification during overload resolution runs on an undo trail so
rejected candidates leave no bindings behind.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import surface as S
from .coreir import (
    BOOL,
    FLOAT,
    INT,
    OBJECT,
    STRING,
    UNIT_T,
    CoreType,
    Scheme,
    TArray,
    TAsync,
    TFun,
    TList,
    TNamed,
    TObject,
    TOption,
    TTuple,
    TVar,
    type_text,
)
from .diagnostics import Diagnostic, SourceSpan, error
from .prelude import (
    PreludeValue,
    array_member,
    is_prelude_module,
    prelude_global,
    prelude_module_member,
)
from .providers.kit import (
    ErasurePlan,
    Overload,
    ProvidedContext,
    ProvidedMember,
)

# ---------------------------------------------------------------------------
# unification variables


@dataclass(eq=False, frozen=True)
class UVar(CoreType):
    uid: int
    cell: list = field(default_factory=lambda: [None])

    # identity semantics: the inherited dataclass __eq__ would make all
    # UVars equal (the base class has no fields)
    def __eq__(self, other: object) -> bool:
        return self is other

    def __hash__(self) -> int:
        return id(self)

    @property
    def link(self) -> CoreType | None:
        return self.cell[0]


def find(t: CoreType) -> CoreType:
    while isinstance(t, UVar) and t.link is not None:
        t = t.link
    return t


class UnifyError(Exception):
    def __init__(self, left: CoreType, right: CoreType, occurs: bool = False) -> None:
        super().__init__(f"cannot unify {type_text(zonk(left))} with {type_text(zonk(right))}")
        self.left = left
        self.right = right
        self.occurs = occurs


def zonk(t: CoreType) -> CoreType:
    """Resolve links; leftover unification variables become rigid TVars."""
    t = find(t)
    if isinstance(t, UVar):
        return TVar(t.uid)
    if isinstance(t, TFun):
        return TFun(zonk(t.param), zonk(t.result))
    if isinstance(t, TTuple):
        return TTuple(tuple(zonk(i) for i in t.items))
    if isinstance(t, TList):
        return TList(zonk(t.element))
    if isinstance(t, TArray):
        return TArray(zonk(t.element))
    if isinstance(t, TAsync):
        return TAsync(zonk(t.result))
    if isinstance(t, TOption):
        return TOption(zonk(t.element))
    return t


def _free_uvars(t: CoreType, acc: set[UVar]) -> None:
    t = find(t)
    if isinstance(t, UVar):
        acc.add(t)
    elif isinstance(t, TFun):
        _free_uvars(t.param, acc)
        _free_uvars(t.result, acc)
    elif isinstance(t, TTuple):
        for i in t.items:
            _free_uvars(i, acc)
    elif isinstance(t, (TList, TArray, TOption)):
        _free_uvars(t.element, acc)
    elif isinstance(t, TAsync):
        _free_uvars(t.result, acc)


# ---------------------------------------------------------------------------
# typed AST


@dataclass(frozen=True)
class TExpr:
    span: SourceSpan
    ty: CoreType


@dataclass(frozen=True)
class TLit(TExpr):
    value: object


@dataclass(frozen=True)
class TVarRef(TExpr):
    name: str


@dataclass(frozen=True)
class TPreludeRef(TExpr):
    value: PreludeValue


@dataclass(frozen=True)
class TUndefined(TExpr):
    """Filler for an interior optional parameter that was not supplied."""


@dataclass(frozen=True)
class TLambda(TExpr):
    param: S.Pattern
    body: TExpr


@dataclass(frozen=True)
class TApp(TExpr):
    fn: TExpr
    arg: TExpr


@dataclass(frozen=True)
class TLet(TExpr):
    pattern: S.Pattern
    recursive: bool
    value: TExpr
    body: TExpr


@dataclass(frozen=True)
class TSeq(TExpr):
    first: TExpr
    rest: TExpr


@dataclass(frozen=True)
class TIf(TExpr):
    cond: TExpr
    then: TExpr
    orelse: TExpr | None


@dataclass(frozen=True)
class TTupleE(TExpr):
    items: tuple[TExpr, ...]


@dataclass(frozen=True)
class TListE(TExpr):
    items: tuple[TExpr, ...]


@dataclass(frozen=True)
class TArrayE(TExpr):
    items: tuple[TExpr, ...]


@dataclass(frozen=True)
class TForE(TExpr):
    pattern: S.Pattern
    source: TExpr
    body: TExpr


@dataclass(frozen=True)
class TBinOp(TExpr):
    op: str
    left: TExpr
    right: TExpr


@dataclass(frozen=True)
class TUnbox(TExpr):
    target: CoreType
    operand: TExpr


@dataclass(frozen=True)
class TAsyncE(TExpr):
    body: TExpr


@dataclass(frozen=True)
class TLetBangE(TExpr):
    pattern: S.Pattern
    value: TExpr
    body: TExpr


@dataclass(frozen=True)
class TReturnE(TExpr):
    value: TExpr


@dataclass(frozen=True)
class TTryWithE(TExpr):
    body: TExpr
    var: str
    handler: TExpr


@dataclass(frozen=True)
class TPropGet(TExpr):
    recv: TExpr | None  # None for static members
    member_name: str
    plan: ErasurePlan


@dataclass(frozen=True)
class TPropSet(TExpr):
    recv: TExpr | None
    member_name: str
    plan: ErasurePlan
    value: TExpr


@dataclass(frozen=True)
class TMethodCallE(TExpr):
    recv: TExpr | None
    member_name: str
    plan: ErasurePlan
    args: tuple[TExpr, ...]  # arranged per the chosen overload


@dataclass(frozen=True)
class TStaticRef(TExpr):
    """A type alias in receiver position; never a value."""

    ref: str  # provider root type id or prelude module name
    is_prelude: bool


@dataclass(frozen=True)
class TypedBinding:
    pattern: S.Pattern
    recursive: bool
    value: TExpr
    scheme: Scheme | None  # None for non-variable patterns


@dataclass(frozen=True)
class TypedModule:
    bindings: tuple[TypedBinding, ...]
    entry: TExpr | None
    context: ProvidedContext


class CheckError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        super().__init__(diagnostics[0].message if diagnostics else "type error")
        self.diagnostics = diagnostics


# ---------------------------------------------------------------------------
# environment


@dataclass
class _EnvEntry:
    scheme: Scheme | None = None  # let-bound value
    mono: CoreType | None = None  # lambda/for/letbang-bound value


class _Env:
    def __init__(self, parent: "_Env | None" = None) -> None:
        self.parent = parent
        self.entries: dict[str, _EnvEntry] = {}

    def lookup(self, name: str) -> _EnvEntry | None:
        env: _Env | None = self
        while env is not None:
            if name in env.entries:
                return env.entries[name]
            env = env.parent
        return None

    def bind_mono(self, name: str, ty: CoreType) -> None:
        self.entries[name] = _EnvEntry(mono=ty)

    def bind_scheme(self, name: str, scheme: Scheme) -> None:
        self.entries[name] = _EnvEntry(scheme=scheme)

    def free_uvars(self) -> set[UVar]:
        acc: set[UVar] = set()
        env: _Env | None = self
        while env is not None:
            for entry in env.entries.values():
                if entry.mono is not None:
                    _free_uvars(entry.mono, acc)
                if entry.scheme is not None:
                    _free_uvars(entry.scheme.ty, acc)
            env = env.parent
        return acc


# ---------------------------------------------------------------------------
# checker


class Checker:
    def __init__(self, ctx: ProvidedContext | None) -> None:
        self.ctx = ctx or ProvidedContext()
        self._fresh = itertools.count(1000)
        self.trail: list[UVar] = []

    # -- unification --------------------------------------------------------

    def fresh(self) -> UVar:
        return UVar(next(self._fresh))

    def _bind(self, var: UVar, ty: CoreType) -> None:
        var.cell[0] = ty
        self.trail.append(var)

    def checkpoint(self) -> int:
        return len(self.trail)

    def rollback(self, mark: int) -> None:
        while len(self.trail) > mark:
            self.trail.pop().cell[0] = None

    def unify(self, a: CoreType, b: CoreType) -> None:
        a, b = find(a), find(b)
        if a is b:
            return
        if isinstance(a, UVar):
            acc: set[UVar] = set()
            _free_uvars(b, acc)
            if a in acc:
                raise UnifyError(a, b, occurs=True)
            self._bind(a, b)
            return
        if isinstance(b, UVar):
            self.unify(b, a)
            return
        if type(a) is not type(b):
            raise UnifyError(a, b)
        if isinstance(a, TFun):
            self.unify(a.param, b.param)
            self.unify(a.result, b.result)
            return
        if isinstance(a, TTuple):
            if len(a.items) != len(b.items):
                raise UnifyError(a, b)
            for x, y in zip(a.items, b.items):
                self.unify(x, y)
            return
        if isinstance(a, (TList, TArray, TOption)):
            self.unify(a.element, b.element)
            return
        if isinstance(a, TAsync):
            self.unify(a.result, b.result)
            return
        if isinstance(a, TNamed):
            if a.type_id != b.type_id:
                raise UnifyError(a, b)
            return
        # ground types: same class means equal
        return

    def try_unify(self, a: CoreType, b: CoreType) -> bool:
        mark = self.checkpoint()
        try:
            self.unify(a, b)
            return True
        except UnifyError:
            self.rollback(mark)
            return False

    def instantiate(self, scheme: Scheme) -> CoreType:
        if not scheme.vars:
            return scheme.ty
        mapping = {vid: self.fresh() for vid in scheme.vars}

        def walk(t: CoreType) -> CoreType:
            t2 = find(t)
            if isinstance(t2, TVar) and t2.id in mapping:
                return mapping[t2.id]
            if isinstance(t2, TFun):
                return TFun(walk(t2.param), walk(t2.result))
            if isinstance(t2, TTuple):
                return TTuple(tuple(walk(i) for i in t2.items))
            if isinstance(t2, TList):
                return TList(walk(t2.element))
            if isinstance(t2, TArray):
                return TArray(walk(t2.element))
            if isinstance(t2, TAsync):
                return TAsync(walk(t2.result))
            if isinstance(t2, TOption):
                return TOption(walk(t2.element))
            return t2

        return walk(scheme.ty)

    def generalize(self, env: _Env, ty: CoreType) -> Scheme:
        """Quantify variables free in `ty` but not in the environment.

        Quantified variables are linked to rigid markers; everything else
        stays live, so an environment-owned variable captured inside the
        scheme keeps following later unifications (instantiate resolves
        links on the fly).
        """
        env_vars = env.free_uvars()
        ty_vars: set[UVar] = set()
        _free_uvars(ty, ty_vars)
        free = [v for v in sorted(ty_vars - env_vars, key=lambda u: u.uid)]
        for var in free:
            self._bind(var, TVar(var.uid))
        return Scheme(tuple(v.uid for v in free), ty)

    # -- diagnostics ---------------------------------------------------------

    def err(self, code: str, message: str, span: SourceSpan) -> CheckError:
        return CheckError([error(code, message, span)])

    # -- patterns ------------------------------------------------------------

    def bind_pattern(self, env: _Env, pattern: S.Pattern) -> CoreType:
        if isinstance(pattern, S.PVar):
            ty = self.fresh()
            env.bind_mono(pattern.name, ty)
            return ty
        if isinstance(pattern, S.PWildcard):
            return self.fresh()
        if isinstance(pattern, S.PUnit):
            return UNIT_T
        if isinstance(pattern, S.PTuple):
            return TTuple(tuple(self.bind_pattern(env, p) for p in pattern.items))
        raise TypeError(f"unknown pattern {pattern!r}")

    # -- type expressions ------------------------------------------------------

    def resolve_type_expr(self, te: S.TypeExpr) -> CoreType:
        table = {"int": INT, "float": FLOAT, "bool": BOOL, "string": STRING, "unit": UNIT_T, "obj": OBJECT}
        if te.name in table:
            return table[te.name]
        inner = self.resolve_type_expr(te.args[0])
        if te.name == "list":
            return TList(inner)
        if te.name == "array":
            return TArray(inner)
        if te.name == "option":
            return TOption(inner)
        raise self.err("type.mismatch", f"unknown type {te.name!r}", te.span)

    # -- value restriction -----------------------------------------------------

    def is_value(self, expr: S.Expr) -> bool:
        if isinstance(expr, (S.Lit, S.Ident, S.Lambda)):
            return True
        if isinstance(expr, S.Tuple):
            return all(self.is_value(i) for i in expr.items)
        if isinstance(expr, S.ListLit):
            return all(self.is_value(i) for i in expr.items)
        return False

    # -- members ---------------------------------------------------------------

    def _member_on(self, recv_ty: CoreType, name: str, span: SourceSpan) -> ProvidedMember:
        ty = find(recv_ty)
        if isinstance(ty, UVar):
            raise self.err(
                "type.member-unresolved-receiver",
                f"cannot access member {name!r}: the receiver type is not known here",
                span,
            )
        if isinstance(ty, TArray):
            member = array_member(ty.element, name)
            if member is not None:
                return member
            raise self.err("type.member-not-found", f"arrays have no member {name!r}", span)
        if isinstance(ty, TNamed):
            typedef = self.ctx.get_type(ty.type_id)
            if typedef is None:
                raise self.err("type.member-not-found", f"unknown type {ty.type_id!r}", span)
            member = typedef.member(name)
            if member is None:
                raise self.err(
                    "type.member-not-found",
                    f"type {typedef.name!r} has no member {name!r}",
                    span,
                )
            return member
        raise self.err(
            "type.member-not-found",
            f"type {type_text(zonk(ty))} has no members",
            span,
        )

    def _static_member(self, ref: TStaticRef, name: str, span: SourceSpan) -> ProvidedMember | PreludeValue:
        if ref.is_prelude:
            value = prelude_module_member(ref.ref, name)
            if value is None:
                raise self.err("type.member-not-found", f"module {ref.ref!r} has no member {name!r}", span)
            return value
        typedef = self.ctx.get_type(ref.ref)
        if typedef is None:
            raise self.err("type.member-not-found", f"unknown provided type {ref.ref!r}", span)
        member = typedef.member(name)
        if member is None:
            raise self.err(
                "type.member-not-found", f"type {typedef.name!r} has no member {name!r}", span
            )
        return member

    def _resolve_overload(
        self,
        member: ProvidedMember,
        args: list[TExpr],
        named: list[tuple[str, TExpr]],
        span: SourceSpan,
    ) -> tuple[Overload, tuple[TExpr, ...], CoreType]:
        """Arity filter, then exact type match; arranges arguments into slots."""
        arity_ok: list[tuple[Overload, list[TExpr | None]]] = []
        for overload in member.overloads:
            slots: list[TExpr | None] = [None] * len(overload.params)
            if len(args) > len(overload.params):
                continue
            for i, arg in enumerate(args):
                slots[i] = arg
            ok = True
            for name, value in named:
                index = next((i for i, p in enumerate(overload.params) if p.name == name), None)
                if index is None or index < len(args) or slots[index] is not None:
                    ok = False
                    break
                slots[index] = value
            if not ok:
                continue
            if any(
                slot is None and not p.optional for slot, p in zip(slots, overload.params)
            ):
                continue
            arity_ok.append((overload, slots))

        if not arity_ok:
            raise self.err(
                "type.overload-none",
                f"no overload of {member.name!r} accepts {len(args) + len(named)} argument(s)",
                span,
            )

        def matches(candidate: tuple[Overload, list[TExpr | None]]) -> bool:
            overload, slots = candidate
            mark = self.checkpoint()
            for slot, param in zip(slots, overload.params):
                if slot is None or isinstance(find(param.ty), TObject):
                    continue  # `any` parameters accept every argument type
                if not self.try_unify(slot.ty, param.ty):
                    self.rollback(mark)
                    return False
            self.rollback(mark)
            return True

        if len(arity_ok) == 1:
            chosen, slots = arity_ok[0]
        else:
            typed = [c for c in arity_ok if matches(c)]
            if not typed:
                raise self.err(
                    "type.overload-none",
                    f"no overload of {member.name!r} matches these argument types",
                    span,
                )
            if len(typed) > 1:
                raise self.err(
                    "type.overload-ambiguous",
                    f"more than one overload of {member.name!r} matches",
                    span,
                )
            chosen, slots = typed[0]

        # commit: unify for real, reporting mismatches against the winner
        for slot, param in zip(slots, chosen.params):
            if slot is None or isinstance(find(param.ty), TObject):
                continue
            try:
                self.unify(slot.ty, param.ty)
            except UnifyError as exc:
                raise self.err(
                    "type.mismatch",
                    f"argument {param.name!r} of {member.name!r}: {exc}",
                    slot.span,
                ) from exc

        # drop trailing unfilled optionals; pad interior gaps with undefined
        while slots and slots[-1] is None:
            slots.pop()
        arranged = tuple(
            slot if slot is not None else TUndefined(span, OBJECT) for slot in slots
        )
        return chosen, arranged, chosen.result

    # -- inference -------------------------------------------------------------

    def infer(self, env: _Env, expr: S.Expr) -> TExpr:
        if isinstance(expr, S.Lit):
            return TLit(expr.span, self._lit_type(expr.value), expr.value)

        if isinstance(expr, S.Ident):
            entry = env.lookup(expr.name)
            if entry is not None:
                if entry.scheme is not None:
                    return TVarRef(expr.span, self.instantiate(entry.scheme), expr.name)
                return TVarRef(expr.span, entry.mono, expr.name)  # type: ignore[arg-type]
            if expr.name in self.ctx.root_aliases:
                type_id = self.ctx.root_aliases[expr.name]
                return TStaticRef(expr.span, TNamed(type_id), type_id, is_prelude=False)
            if is_prelude_module(expr.name):
                return TStaticRef(expr.span, TNamed(expr.name), expr.name, is_prelude=True)
            value = prelude_global(expr.name)
            if value is not None:
                return TPreludeRef(expr.span, self.instantiate(value.scheme), value)
            raise self.err("type.unknown-ident", f"unbound identifier {expr.name!r}", expr.span)

        if isinstance(expr, S.Lambda):
            return self._infer_lambda(env, expr)

        if isinstance(expr, S.App):
            return self._infer_app_spine(env, expr)

        if isinstance(expr, S.Let):
            value, scheme, inner = self._infer_binding(env, expr.pattern, expr.recursive, expr.value)
            body = self.infer(inner, expr.body)
            return TLet(expr.span, body.ty, expr.pattern, expr.recursive, value, body)

        if isinstance(expr, S.Seq):
            first = self.infer(env, expr.first)
            rest = self.infer(env, expr.rest)
            return TSeq(expr.span, rest.ty, first, rest)

        if isinstance(expr, S.If):
            cond = self.infer(env, expr.cond)
            self._unify_at(cond.ty, BOOL, expr.cond.span)
            then = self.infer(env, expr.then)
            if expr.orelse is None:
                self._unify_at(then.ty, UNIT_T, expr.then.span)
                return TIf(expr.span, UNIT_T, cond, then, None)
            orelse = self.infer(env, expr.orelse)
            self._unify_at(orelse.ty, then.ty, expr.orelse.span)
            return TIf(expr.span, then.ty, cond, then, orelse)

        if isinstance(expr, S.Tuple):
            items = tuple(self.infer(env, i) for i in expr.items)
            return TTupleE(expr.span, TTuple(tuple(i.ty for i in items)), items)

        if isinstance(expr, S.ListLit):
            element = self.fresh()
            items = []
            for item in expr.items:
                typed = self.infer(env, item)
                self._unify_at(typed.ty, element, item.span)
                items.append(typed)
            return TListE(expr.span, TList(element), tuple(items))

        if isinstance(expr, S.ArrayLit):
            element = self.fresh()
            items = []
            for item in expr.items:
                typed = self.infer(env, item)
                self._unify_at(typed.ty, element, item.span)
                items.append(typed)
            return TArrayE(expr.span, TArray(element), tuple(items))

        if isinstance(expr, S.For):
            source = self.infer(env, expr.source)
            element = self._for_element(source.ty, expr.source.span)
            inner = _Env(env)
            pattern_ty = self.bind_pattern(inner, expr.pattern)
            self._unify_at(pattern_ty, element, expr.pattern.span)
            body = self.infer(inner, expr.body)
            return TForE(expr.span, UNIT_T, expr.pattern, source, body)

        if isinstance(expr, S.BinOp):
            return self._infer_binop(env, expr)

        if isinstance(expr, S.Unbox):
            target = self.resolve_type_expr(expr.target)
            operand = self.infer(env, expr.operand)
            op_ty = find(operand.ty)
            if isinstance(op_ty, UVar):
                self._unify_at(operand.ty, OBJECT, expr.operand.span)
            elif not isinstance(op_ty, TObject):
                raise self.err(
                    "type.redundant-unbox",
                    f"unbox applied to a {type_text(zonk(op_ty))} expression; only obj can be unboxed",
                    expr.span,
                )
            return TUnbox(expr.span, target, target, operand)

        if isinstance(expr, S.AsyncBlock):
            result = self.fresh()
            body = self._infer_async(env, expr.body, result, tail=True)
            return TAsyncE(expr.span, TAsync(result), body)

        if isinstance(expr, (S.LetBang, S.Return, S.TryWith)):
            raise self.err("async.stray-sugar", "async sugar outside an async block", expr.span)

        if isinstance(expr, S.MemberAccess):
            return self._infer_member_access(env, expr)

        if isinstance(expr, S.MemberAssign):
            return self._infer_member_assign(env, expr)

        if isinstance(expr, S.MethodCall):
            return self._infer_method_call(env, expr)

        raise TypeError(f"unhandled expression {expr!r}")

    def _infer_lambda(self, env: _Env, expr: S.Lambda, expected: CoreType | None = None) -> TExpr:
        """Infer a lambda, constraining its parameter from `expected` first
        so member accesses on the parameter can resolve inside the body."""
        inner = _Env(env)
        param_ty = self.bind_pattern(inner, expr.param)
        expected_result: CoreType | None = None
        if expected is not None:
            expected_result = self.fresh()
            self._unify_at(expected, TFun(param_ty, expected_result), expr.span)
        if isinstance(expr.body, S.Lambda):
            body = self._infer_lambda(inner, expr.body, expected=expected_result)
        else:
            body = self.infer(inner, expr.body)
        if expected_result is not None:
            self._unify_at(body.ty, expected_result, expr.body.span)
        return TLambda(expr.span, TFun(param_ty, body.ty), expr.param, body)

    def _infer_app_spine(self, env: _Env, expr: S.App) -> TExpr:
        """Infer an application spine, delaying lambda arguments.

        The arrow skeleton is laid down first and non-lambda arguments are
        unified into it before any lambda argument's body is inferred, so a
        collection flowing into `List.map`-style calls fixes the lambda's
        parameter type no matter which side of the application it sits on
        (pipelines desugar to the same tree as direct application).
        """
        spine: list[S.App] = []
        head: S.Expr = expr
        while isinstance(head, S.App):
            spine.append(head)
            head = head.fn
        spine.reverse()  # innermost application first

        fn = self.infer(env, head)
        self._reject_static(fn)
        cur = fn.ty
        params: list[CoreType] = []
        results: list[CoreType] = []
        for node in spine:
            param, result = self.fresh(), self.fresh()
            self._unify_at(cur, TFun(param, result), node.span)
            params.append(param)
            results.append(result)
            cur = result

        typed_args: list[TExpr | None] = [None] * len(spine)
        for pass_lambdas in (False, True):
            for i, node in enumerate(spine):
                if isinstance(node.arg, S.Lambda) != pass_lambdas:
                    continue
                if isinstance(node.arg, S.Lambda):
                    arg = self._infer_lambda(env, node.arg, expected=params[i])
                else:
                    arg = self.infer(env, node.arg)
                self._reject_static(arg)
                self._unify_at(arg.ty, params[i], node.arg.span)
                typed_args[i] = arg

        out = fn
        for i, node in enumerate(spine):
            assert typed_args[i] is not None
            out = TApp(node.span, results[i], out, typed_args[i])
        return out

    def _lit_type(self, value: object) -> CoreType:
        if value is S.UNIT:
            return UNIT_T
        if isinstance(value, bool):
            return BOOL
        if isinstance(value, int):
            return INT
        if isinstance(value, float):
            return FLOAT
        if isinstance(value, str):
            return STRING
        raise TypeError(f"bad literal {value!r}")

    def _unify_at(self, a: CoreType, b: CoreType, span: SourceSpan) -> None:
        try:
            self.unify(a, b)
        except UnifyError as exc:
            code = "type.occurs" if exc.occurs else "type.mismatch"
            raise self.err(code, str(exc), span) from exc

    def _reject_static(self, typed: TExpr) -> None:
        if isinstance(typed, TStaticRef):
            raise self.err(
                "type.static-type-as-value",
                f"{typed.ref!r} names a type and cannot be used as a value",
                typed.span,
            )

    def _for_element(self, source_ty: CoreType, span: SourceSpan) -> CoreType:
        ty = find(source_ty)
        if isinstance(ty, TList):
            return ty.element
        if isinstance(ty, TArray):
            return ty.element
        if isinstance(ty, UVar):
            element = self.fresh()
            self.unify(ty, TList(element))  # unknown sources default to lists
            return element
        raise self.err(
            "type.mismatch",
            f"for-loops iterate lists or arrays, not {type_text(zonk(ty))}",
            span,
        )

    def _infer_binop(self, env: _Env, expr: S.BinOp) -> TExpr:
        left = self.infer(env, expr.left)
        right = self.infer(env, expr.right)
        if expr.op in S.INT_OPS:
            operand, result = INT, INT
        elif expr.op in S.FLOAT_OPS:
            operand, result = FLOAT, FLOAT
        elif expr.op in S.CMP_OPS:
            operand, result = INT, BOOL
        elif expr.op in S.BOOL_OPS:
            operand, result = BOOL, BOOL
        else:
            raise TypeError(f"unknown operator {expr.op!r}")
        self._unify_at(left.ty, operand, expr.left.span)
        self._unify_at(right.ty, operand, expr.right.span)
        return TBinOp(expr.span, result, expr.op, left, right)

    # -- member forms ------------------------------------------------------------

    def _infer_member_access(self, env: _Env, expr: S.MemberAccess) -> TExpr:
        recv = self.infer(env, expr.recv)
        if isinstance(recv, TStaticRef):
            member = self._static_member(recv, expr.name, expr.span)
            if isinstance(member, PreludeValue):
                return TPreludeRef(expr.span, self.instantiate(member.scheme), member)
            if member.kind in ("method", "invoke"):
                raise self.err(
                    "type.member-not-value",
                    f"method {expr.name!r} must be called",
                    expr.span,
                )
            return TPropGet(expr.span, member.signature, None, expr.name, member.erasure)
        member = self._member_on(recv.ty, expr.name, expr.span)
        if member.kind in ("method", "invoke"):
            raise self.err(
                "type.member-not-value", f"method {expr.name!r} must be called", expr.span
            )
        return TPropGet(expr.span, member.signature, recv, expr.name, member.erasure)

    def _infer_member_assign(self, env: _Env, expr: S.MemberAssign) -> TExpr:
        recv = self.infer(env, expr.recv)
        if isinstance(recv, TStaticRef):
            raise self.err("type.member-not-settable", "static members cannot be assigned", expr.span)
        member = self._member_on(recv.ty, expr.name, expr.span)
        if member.kind != "property" or not member.settable or member.set_erasure is None:
            raise self.err(
                "type.member-not-settable", f"member {expr.name!r} cannot be assigned", expr.span
            )
        value = self.infer(env, expr.value)
        self._reject_static(value)
        target = find(member.signature)
        if not isinstance(target, TObject):
            self._unify_at(value.ty, member.signature, expr.value.span)
        return TPropSet(expr.span, UNIT_T, recv, expr.name, member.set_erasure, value)

    def _infer_method_call(self, env: _Env, expr: S.MethodCall) -> TExpr:
        recv = self.infer(env, expr.recv)
        args = [self.infer(env, a) for a in expr.args]
        for a in args:
            self._reject_static(a)
        named = [(n, self.infer(env, v)) for n, v in expr.named_args]

        if isinstance(recv, TStaticRef):
            member = self._static_member(recv, expr.name, expr.span)
            if isinstance(member, PreludeValue):
                # a module function invoked call-style: ordinary application
                if named:
                    raise self.err(
                        "type.named-args-not-supported",
                        "named arguments are only valid on imported methods",
                        expr.span,
                    )
                fn: TExpr = TPreludeRef(expr.span, self.instantiate(member.scheme), member)
                for arg in args:
                    result = self.fresh()
                    self._unify_at(fn.ty, TFun(arg.ty, result), expr.span)
                    fn = TApp(expr.span, result, fn, arg)
                return fn
            recv_expr: TExpr | None = None
        else:
            member = self._member_on(recv.ty, expr.name, expr.span)
            recv_expr = recv

        if member.kind == "property":
            if named:
                raise self.err(
                    "type.member-not-callable",
                    f"property {expr.name!r} takes no named arguments",
                    expr.span,
                )
            # calling a function-typed property: read it, then apply
            fn = TPropGet(expr.span, member.signature, recv_expr, expr.name, member.erasure)
            out: TExpr = fn
            for arg in args:
                result = self.fresh()
                self._unify_at(out.ty, TFun(arg.ty, result), expr.span)
                out = TApp(expr.span, result, out, arg)
            return out

        _, arranged, result_ty = self._resolve_overload(member, args, named, expr.span)
        return TMethodCallE(expr.span, result_ty, recv_expr, expr.name, member.erasure, arranged)

    # -- async bodies ------------------------------------------------------------

    def _infer_async(self, env: _Env, expr: S.Expr, result: CoreType, tail: bool) -> TExpr:
        if isinstance(expr, S.LetBang):
            value = self.infer(env, expr.value)
            inner = _Env(env)
            pattern_ty = self.bind_pattern(inner, expr.pattern)
            self._unify_at(value.ty, TAsync(pattern_ty), expr.value.span)
            body = self._infer_async(inner, expr.body, result, tail)
            return TLetBangE(expr.span, body.ty, expr.pattern, value, body)

        if isinstance(expr, S.Return):
            if not tail:
                raise self.err(
                    "parse.return-not-last", "return cannot appear in statement position", expr.span
                )
            value = self.infer(env, expr.value)
            self._unify_at(value.ty, result, expr.value.span)
            return TReturnE(expr.span, value.ty, value)

        if isinstance(expr, S.Let):
            value, scheme, inner = self._infer_binding(env, expr.pattern, expr.recursive, expr.value)
            body = self._infer_async(inner, expr.body, result, tail)
            return TLet(expr.span, body.ty, expr.pattern, expr.recursive, value, body)

        if isinstance(expr, S.Seq):
            first = self._infer_async(env, expr.first, self.fresh(), tail=False)
            rest = self._infer_async(env, expr.rest, result, tail)
            return TSeq(expr.span, rest.ty, first, rest)

        if isinstance(expr, S.If) and _has_async_sugar(expr):
            cond = self.infer(env, expr.cond)
            self._unify_at(cond.ty, BOOL, expr.cond.span)
            if expr.orelse is None or not tail:
                then = self._infer_async(env, expr.then, self.fresh(), tail=False)
                orelse = (
                    self._infer_async(env, expr.orelse, self.fresh(), tail=False)
                    if expr.orelse is not None
                    else None
                )
                if tail:
                    self._unify_at(result, UNIT_T, expr.span)
                return TIf(expr.span, UNIT_T, cond, then, orelse)
            then = self._infer_async(env, expr.then, result, tail=True)
            orelse = self._infer_async(env, expr.orelse, result, tail=True)
            return TIf(expr.span, then.ty, cond, then, orelse)

        if isinstance(expr, S.For):
            # every for-loop in an async statement position goes through the builder
            source = self.infer(env, expr.source)
            element = self._for_element(source.ty, expr.source.span)
            inner = _Env(env)
            pattern_ty = self.bind_pattern(inner, expr.pattern)
            self._unify_at(pattern_ty, element, expr.pattern.span)
            body = self._infer_async(inner, expr.body, self.fresh(), tail=False)
            if tail:
                self._unify_at(result, UNIT_T, expr.span)
            return TForE(expr.span, UNIT_T, expr.pattern, source, body)

        if isinstance(expr, S.TryWith):
            sub_result = result if tail else self.fresh()
            body = self._infer_async(env, expr.body, sub_result, tail=True)
            inner = _Env(env)
            inner.bind_mono(expr.var, OBJECT)
            handler = self._infer_async(inner, expr.handler, sub_result, tail=True)
            return TTryWithE(expr.span, sub_result, body, expr.var, handler)

        # plain expression: in tail position its value is the block's result
        typed = self.infer(env, expr)
        if tail:
            self._unify_at(typed.ty, result, expr.span)
        return typed

    # -- bindings ---------------------------------------------------------------

    def _infer_binding(
        self, env: _Env, pattern: S.Pattern, recursive: bool, value_expr: S.Expr
    ) -> tuple[TExpr, Scheme | None, _Env]:
        if recursive:
            assert isinstance(pattern, S.PVar)
            rec_env = _Env(env)
            rec_ty = self.fresh()
            rec_env.bind_mono(pattern.name, rec_ty)
            value = self.infer(rec_env, value_expr)
            self._unify_at(value.ty, rec_ty, value_expr.span)
        else:
            value = self.infer(env, value_expr)
            self._reject_static(value)

        inner = _Env(env)
        scheme: Scheme | None = None
        if isinstance(pattern, S.PVar):
            if self.is_value(value_expr):
                scheme = self.generalize(env, value.ty)
                inner.bind_scheme(pattern.name, scheme)
            else:
                # value restriction: monomorphic; later uses may still refine it
                inner.bind_mono(pattern.name, value.ty)
        else:
            pattern_ty = self.bind_pattern(inner, pattern)
            self._unify_at(pattern_ty, value.ty, pattern.span)
        return value, scheme, inner


def _has_async_sugar(expr: S.Expr) -> bool:
    """Does this expression contain let!/return/try at its own block level?"""
    if isinstance(expr, (S.LetBang, S.Return, S.TryWith)):
        return True
    if isinstance(expr, S.Seq):
        return _has_async_sugar(expr.first) or _has_async_sugar(expr.rest)
    if isinstance(expr, S.Let):
        return _has_async_sugar(expr.body)
    if isinstance(expr, S.If):
        return _has_async_sugar(expr.then) or (
            expr.orelse is not None and _has_async_sugar(expr.orelse)
        )
    if isinstance(expr, S.For):
        return _has_async_sugar(expr.body)
    return False


# ---------------------------------------------------------------------------
# module entry point


def typecheck_module(module: S.SourceModule, ctx: ProvidedContext | None = None) -> TypedModule:
    """Infer types for a whole module. Raises CheckError with diagnostics."""
    checker = Checker(ctx)
    env = _Env()
    partial: list[tuple[S.Binding, TExpr, Scheme | None]] = []
    for binding in module.bindings:
        value, scheme, env = checker._infer_binding(
            env, binding.pattern, binding.recursive, binding.value
        )
        partial.append((binding, value, scheme))
    entry = checker.infer(env, module.entry) if module.entry is not None else None
    if entry is not None:
        checker._reject_static(entry)

    # display schemes settle only once the whole module has been seen
    # (later uses may have refined environment-owned variables)
    def final_scheme(binding: S.Binding, value: TExpr, scheme: Scheme | None) -> Scheme | None:
        if scheme is not None:
            return Scheme(scheme.vars, zonk(scheme.ty))
        if isinstance(binding.pattern, S.PVar):
            return Scheme((), zonk(value.ty))
        return None

    bindings = tuple(
        TypedBinding(b.pattern, b.recursive, value, final_scheme(b, value, scheme))
        for b, value, scheme in partial
    )
    return TypedModule(bindings, entry, checker.ctx)


def infer_binding_schemes(module: S.SourceModule, ctx: ProvidedContext | None = None) -> dict[str, Scheme]:
    """Name -> generalized scheme for top-level variable bindings (for tests/CLI)."""
    typed = typecheck_module(module, ctx)
    out: dict[str, Scheme] = {}
    for binding in typed.bindings:
        if isinstance(binding.pattern, S.PVar) and binding.scheme is not None:
            out[binding.pattern.name] = binding.scheme
    return out
