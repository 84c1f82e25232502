"""Import of a small TypeScript declaration-file subset.

Supported: `declare var`, interfaces with call signatures, methods with
overloads and optional parameters, property declarations, the primitive
types (string/number/boolean/any/void), interface references and `T[]`
arrays. Anything else (generics, classes, modules, extends clauses, ...)
is reported with `dts.unsupported` and skipped.

String-literal types in parameter position collapse to `string` with a
`dts.constant-overload` warning; the overload set keeps only the general
signatures.

Mapping: a root provided type carries one static property per global
variable; a call signature becomes an `Invoke` member; `any` maps to obj.
All erasure goes through the Emit family, never the runtime library.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

from ..coreir import BOOL, FLOAT, OBJECT, STRING, UNIT_T, CoreType, TArray, TNamed
from ..diagnostics import Diagnostic, SourceSpan, error, warning
from .kit import (
    RECV,
    EmitCallPlan,
    EmitPropertyGetPlan,
    EmitPropertySetPlan,
    Overload,
    Param,
    PlanArg,
    ProvidedContext,
    ProvidedMember,
    ProvidedTypeDef,
    ProviderFailure,
    register_provider,
)

REST = PlanArg("rest")

# ---------------------------------------------------------------------------
# declaration AST


@dataclass(frozen=True)
class TsTypeRef:
    name: str  # primitive name, interface name, or "string!lit" collapse marker
    array_depth: int = 0


@dataclass(frozen=True)
class TsParam:
    name: str
    ty: TsTypeRef
    optional: bool = False


@dataclass(frozen=True)
class TsSig:
    params: tuple[TsParam, ...]
    result: TsTypeRef


@dataclass(frozen=True)
class TsGlobalVar:
    name: str
    ty: TsTypeRef


@dataclass(frozen=True)
class TsInterface:
    name: str
    call_signatures: tuple[TsSig, ...] = ()
    methods: tuple[tuple[str, tuple[TsSig, ...]], ...] = ()
    properties: tuple[tuple[str, TsTypeRef, bool], ...] = ()


TsDeclaration = TsGlobalVar | TsInterface

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<string>"[^"\n]*"|'[^'\n]*')
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<punct>[(){}\[\];:,?<>|=.])
    """,
    re.VERBOSE | re.DOTALL,
)


def _tokenize(text: str) -> tuple[list[tuple[str, str, SourceSpan]], list[Diagnostic]]:
    tokens = []
    pos = 0
    diags: list[Diagnostic] = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            diags.append(error("dts.lex", f"unexpected character {text[pos]!r}", SourceSpan(pos, pos + 1)))
            return tokens, diags
        pos = m.end()
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        tokens.append((kind, m.group(), SourceSpan(m.start(), m.end())))
    tokens.append(("eof", "", SourceSpan(len(text), len(text))))
    return tokens, diags


class _DtsParser:
    def __init__(self, tokens: list[tuple[str, str, SourceSpan]]):
        self.tokens = tokens
        self.pos = 0
        self.diags: list[Diagnostic] = []

    def peek(self, ahead: int = 0):
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.pos]
        if tok[0] != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek()[1] == text

    def expect(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False

    def unsupported(self, what: str, span: SourceSpan) -> None:
        self.diags.append(error("dts.unsupported", f"unsupported construct: {what}", span))

    def skip_decl(self) -> None:
        """Skip to the end of the current declaration (`;` or balanced `}`)."""
        depth = 0
        while True:
            kind, text, _ = self.peek()
            if kind == "eof":
                return
            self.next()
            if text == "{":
                depth += 1
            elif text == "}":
                depth -= 1
                if depth <= 0:
                    return
            elif text == ";" and depth == 0:
                return

    def parse(self) -> list[TsDeclaration]:
        decls: list[TsDeclaration] = []
        while self.peek()[0] != "eof":
            kind, text, span = self.peek()
            if text == "declare":
                self.next()
                if self.at("var"):
                    self.next()
                    decl = self.global_var()
                    if decl is not None:
                        decls.append(decl)
                else:
                    self.unsupported(f"declare {self.peek()[1]}", span)
                    self.skip_decl()
            elif text == "interface":
                self.next()
                decl = self.interface()
                if decl is not None:
                    decls.append(decl)
            else:
                self.unsupported(text or kind, span)
                self.skip_decl()
        return decls

    def global_var(self) -> TsGlobalVar | None:
        kind, name, span = self.next()
        if kind != "ident":
            self.unsupported("declare var without a name", span)
            self.skip_decl()
            return None
        if not self.expect(":"):
            self.unsupported("declare var without a type annotation", span)
            self.skip_decl()
            return None
        ty = self.type_ref()
        if ty is None:
            self.skip_decl()
            return None
        self.expect(";")
        return TsGlobalVar(name, ty)

    def interface(self) -> TsInterface | None:
        kind, name, span = self.next()
        if kind != "ident":
            self.unsupported("interface without a name", span)
            self.skip_decl()
            return None
        if self.at("<"):
            self.unsupported(f"generic interface {name}", span)
            self.skip_decl()
            return None
        if self.peek()[1] == "extends":
            self.unsupported(f"interface {name} extends clause", span)
            self.skip_decl()
            return None
        if not self.expect("{"):
            self.unsupported(f"interface {name} without a body", span)
            self.skip_decl()
            return None
        call_sigs: list[TsSig] = []
        methods: dict[str, list[TsSig]] = {}
        method_order: list[str] = []
        properties: list[tuple[str, TsTypeRef, bool]] = []
        while not self.at("}") and self.peek()[0] != "eof":
            kind, text, span = self.peek()
            if text == "(":
                sig = self.signature()
                if sig is not None:
                    call_sigs.append(sig)
                continue
            if kind != "ident":
                self.unsupported(f"interface member starting with {text!r}", span)
                self.skip_member()
                continue
            member_name = self.next()[1]
            if self.at("<"):
                self.unsupported(f"generic member {member_name}", span)
                self.skip_member()
                continue
            if self.at("("):
                sig = self.signature()
                if sig is not None:
                    if member_name not in methods:
                        methods[member_name] = []
                        method_order.append(member_name)
                    methods[member_name].append(sig)
                continue
            optional = self.expect("?")
            if not self.expect(":"):
                self.unsupported(f"member {member_name} without a type", span)
                self.skip_member()
                continue
            ty = self.type_ref()
            if ty is None:
                self.skip_member()
                continue
            self.expect(";")
            properties.append((member_name, ty, optional))
        self.expect("}")
        deduped = tuple(
            (name, self._dedupe(tuple(methods[name]), name)) for name in method_order
        )
        return TsInterface(name, tuple(call_sigs), deduped, tuple(properties))

    def _dedupe(self, sigs: tuple[TsSig, ...], name: str) -> tuple[TsSig, ...]:
        out: list[TsSig] = []
        for sig in sigs:
            key = tuple((p.ty, p.optional) for p in sig.params)
            if any(key == tuple((p.ty, p.optional) for p in s.params) for s in out):
                self.diags.append(
                    warning(
                        "dts.constant-overload",
                        f"overloads of {name!r} collapsed to one general signature",
                        SourceSpan(0, 0),
                    )
                )
                continue
            out.append(sig)
        return tuple(out)

    def skip_member(self) -> None:
        depth = 0
        while self.peek()[0] != "eof":
            text = self.next()[1]
            if text == "(":
                depth += 1
            elif text == ")":
                depth -= 1
            elif text == ";" and depth <= 0:
                return
            elif text == "}" and depth <= 0:
                self.pos -= 1
                return

    def signature(self) -> TsSig | None:
        self.expect("(")
        params: list[TsParam] = []
        seen_optional = False
        while not self.at(")") and self.peek()[0] != "eof":
            kind, name, span = self.next()
            if kind != "ident":
                self.unsupported(f"parameter starting with {name!r}", span)
                self.skip_member()
                return None
            optional = self.expect("?")
            if not self.expect(":"):
                self.unsupported(f"parameter {name} without a type", span)
                self.skip_member()
                return None
            ty = self.type_ref()
            if ty is None:
                self.skip_member()
                return None
            if optional:
                seen_optional = True
            elif seen_optional:
                self.unsupported(f"required parameter {name} after an optional one", span)
                self.skip_member()
                return None
            params.append(TsParam(name, ty, optional))
            if not self.at(")"):
                if not self.expect(","):
                    self.unsupported("expected ',' in parameter list", span)
                    self.skip_member()
                    return None
        self.expect(")")
        if not self.expect(":"):
            self.unsupported("signature without a return type", self.peek()[2])
            self.skip_member()
            return None
        result = self.type_ref()
        if result is None:
            self.skip_member()
            return None
        self.expect(";")
        return TsSig(tuple(params), result)

    def type_ref(self) -> TsTypeRef | None:
        kind, text, span = self.next()
        if kind == "string":
            # constant type: collapse to the general string type
            self.diags.append(
                warning("dts.constant-overload", f"constant type {text} widened to string", span)
            )
            name = "string"
        elif kind == "ident":
            name = text
        else:
            self.unsupported(f"type starting with {text!r}", span)
            return None
        if self.at("<"):
            self.unsupported(f"generic type {name}", span)
            return None
        depth = 0
        while self.at("["):
            self.next()
            if not self.expect("]"):
                self.unsupported("unclosed array type", span)
                return None
            depth += 1
        return TsTypeRef(name, depth)


def parse_dts(text: str) -> tuple[list[TsDeclaration], list[Diagnostic]]:
    """Parse the subset; unsupported constructs are diagnosed and skipped."""
    tokens, lex_diags = _tokenize(text)
    if lex_diags:
        return [], lex_diags
    parser = _DtsParser(tokens)
    decls = parser.parse()
    return decls, parser.diags


# ---------------------------------------------------------------------------
# mapping to provided types

_PRIMITIVES: dict[str, CoreType] = {
    "string": STRING,
    "number": FLOAT,
    "boolean": BOOL,
    "any": OBJECT,
    "void": UNIT_T,
}


def map_dts(decls: list[TsDeclaration], alias: str) -> tuple[ProvidedContext, list[Diagnostic]]:
    """One root provided type per file; interfaces become provided types."""
    diags: list[Diagnostic] = []
    interfaces = {d.name for d in decls if isinstance(d, TsInterface)}

    def map_type(ref: TsTypeRef) -> CoreType:
        if ref.name in _PRIMITIVES:
            base = _PRIMITIVES[ref.name]
        elif ref.name in interfaces:
            base = TNamed(f"{alias}.{ref.name}")
        else:
            diags.append(error("dts.dangling-ref", f"reference to undeclared type {ref.name!r}"))
            base = OBJECT
        for _ in range(ref.array_depth):
            base = TArray(base)
        return base

    def map_sig(sig: TsSig) -> Overload:
        return Overload(
            tuple(Param(p.name, map_type(p.ty), p.optional) for p in sig.params),
            map_type(sig.result),
        )

    ctx = ProvidedContext()

    root_vars = [d for d in decls if isinstance(d, TsGlobalVar)]

    def root_members() -> list[ProvidedMember]:
        return [
            ProvidedMember(
                name=v.name,
                kind="property",
                signature=map_type(v.ty),
                erasure=EmitPropertyGetPlan(True, v.name, ()),
            )
            for v in root_vars
        ]

    ctx.add_type(ProvidedTypeDef(alias, alias, root_members))
    ctx.root_aliases[alias] = alias

    for decl in decls:
        if not isinstance(decl, TsInterface):
            continue

        def make_members(iface: TsInterface = decl) -> list[ProvidedMember]:
            members: list[ProvidedMember] = []
            if iface.call_signatures:
                overloads = tuple(map_sig(s) for s in iface.call_signatures)
                members.append(
                    ProvidedMember(
                        name="Invoke",
                        kind="invoke",
                        signature=overloads[0].result,
                        erasure=EmitCallPlan(False, "", (RECV, REST)),
                        overloads=overloads,
                    )
                )
            for name, sigs in iface.methods:
                overloads = tuple(map_sig(s) for s in sigs)
                members.append(
                    ProvidedMember(
                        name=name,
                        kind="method",
                        signature=overloads[0].result,
                        erasure=EmitCallPlan(False, name, (RECV, REST)),
                        overloads=overloads,
                    )
                )
            for name, ty, _optional in iface.properties:
                members.append(
                    ProvidedMember(
                        name=name,
                        kind="property",
                        signature=map_type(ty),
                        erasure=EmitPropertyGetPlan(False, name, (RECV,)),
                        settable=True,
                        set_erasure=EmitPropertySetPlan(False, name, (RECV, REST)),
                    )
                )
            return members

        ctx.add_type(ProvidedTypeDef(f"{alias}.{decl.name}", decl.name, make_members))

    # eager reference validation so dangling refs surface at mapping time
    for decl in decls:
        if isinstance(decl, TsGlobalVar):
            map_type(decl.ty)
        else:
            for sig in decl.call_signatures:
                map_sig(sig)
            for _, sigs in decl.methods:
                for sig in sigs:
                    map_sig(sig)
            for _, ty, _opt in decl.properties:
                map_type(ty)
    # the validation pass above may have queued duplicates
    unique: list[Diagnostic] = []
    for d in diags:
        if d not in unique:
            unique.append(d)
    return ctx, unique


def _provider(alias: str, static_params: tuple, source: object) -> ProvidedContext:
    if len(static_params) != 1 or static_params[0][0] is not None:
        raise ProviderFailure("TypeScript takes exactly one static parameter: the .d.ts file")
    filename = static_params[0][1]
    if not isinstance(filename, str):
        raise ProviderFailure("TypeScript's static parameter must be a string")
    base = source if isinstance(source, str) else "."
    path = filename if os.path.isabs(filename) else os.path.join(base, filename)
    if not os.path.exists(path):
        raise ProviderFailure(f"declaration file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProviderFailure(f"cannot read declaration file {path}: {exc}") from exc
    decls, diags = parse_dts(text)
    hard = [d for d in diags if d.code in ("dts.lex",)]
    if hard:
        raise ProviderFailure("; ".join(d.message for d in hard))
    ctx, map_diags = map_dts(decls, alias)
    dangling = [d for d in map_diags if d.code == "dts.dangling-ref"]
    if dangling:
        raise ProviderFailure("; ".join(d.message for d in dangling))
    return ctx


register_provider("TypeScript", _provider)
