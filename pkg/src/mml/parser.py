"""Recursive-descent parser for `.mml` modules.

Shape of a module: provider declarations (`type W = WorldBankData<...>`),
top-level `let` bindings, and at most one `do <expr>` entry expression.

Inside parenthesised blocks and `async { ... }` blocks, items are
separated by `;`. `let x = e in body` and `let x = e; body` are the same
tree. Pipelines desugar to application here, so later passes never see
them.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import surface as S
from .diagnostics import Diagnostic, SourceSpan, error
from .lexer import LexError, Token, tokenize


class ParseError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        super().__init__(diagnostics[0].message if diagnostics else "parse error")
        self.diagnostics = diagnostics


_CMP_TOKENS = {"=", "<>", "<", "<=", ">", ">="}
_ADD_TOKENS = {"+", "-", "+.", "-."}
_MUL_TOKENS = {"*", "/", "%", "*.", "/."}

_ATOM_STARTS = {"ident", "int", "float", "string"}
_TYPE_NAMES = {"int", "float", "bool", "string", "unit", "obj", "list", "array", "option"}


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def at_punct(self, text: str) -> bool:
        return self.at("punct", text)

    def at_keyword(self, text: str) -> bool:
        return self.at("keyword", text)

    def eat(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            tok = self.peek()
            want = text or kind
            raise ParseError([error("parse.unexpected", f"expected {want!r}, found {tok.text or tok.kind!r}", tok.span)])
        return self.next()

    def fail(self, message: str, span: SourceSpan | None = None) -> ParseError:
        return ParseError([error("parse.unexpected", message, span or self.peek().span)])

    # -- module level -------------------------------------------------------

    def parse_module(self) -> S.SourceModule:
        provider_decls: list[S.ProviderDecl] = []
        bindings: list[S.Binding] = []
        entry: S.Expr | None = None
        while not self.at("eof"):
            if self.at_keyword("type"):
                provider_decls.append(self.provider_decl())
            elif self.at_keyword("let"):
                bindings.append(self.top_binding())
            elif self.at_keyword("do"):
                tok = self.next()
                if entry is not None:
                    raise self.fail("a module may designate at most one entry expression", tok.span)
                entry = self.expr()
            else:
                raise self.fail("expected 'type', 'let' or 'do' at top level")
        aliases = [d.alias for d in provider_decls]
        for alias in aliases:
            if aliases.count(alias) > 1:
                raise ParseError([error("parse.unexpected", f"duplicate provider alias {alias!r}",
                                        next(d.span for d in provider_decls if d.alias == alias))])
        return S.SourceModule(tuple(provider_decls), tuple(bindings), entry)

    def provider_decl(self) -> S.ProviderDecl:
        start = self.eat("keyword", "type")
        alias = self.eat("ident")
        self.eat("punct", "=")
        provider = self.eat("ident")
        params: list[tuple[str | None, object]] = []
        if self.at_punct("<"):
            self.next()
            while not self.at_punct(">"):
                params.append(self.static_param())
                if self.at_punct(","):
                    self.next()
                elif not self.at_punct(">"):
                    raise ParseError([error("parse.bad-static-param", "expected ',' or '>' in static parameters", self.peek().span)])
            self.eat("punct", ">")
        end = self.tokens[self.pos - 1]
        return S.ProviderDecl(
            span=SourceSpan(start.span.start, end.span.end),
            alias=alias.text,
            provider=provider.text,
            static_params=tuple(params),
        )

    def static_param(self) -> tuple[str | None, object]:
        tok = self.peek()
        name: str | None = None
        if tok.kind == "ident" and self.peek(1).kind == "punct" and self.peek(1).text == "=":
            name = self.next().text
            self.next()
            tok = self.peek()
        if tok.kind == "string":
            self.next()
            return (name, tok.value)
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            self.next()
            return (name, tok.value)
        raise ParseError([error("parse.bad-static-param", "static parameter values must be string or bool literals", tok.span)])

    def top_binding(self) -> S.Binding:
        start = self.eat("keyword", "let")
        pattern, recursive, value = self.let_parts()
        return S.Binding(
            span=SourceSpan(start.span.start, value.span.end),
            pattern=pattern,
            recursive=recursive,
            value=value,
        )

    def let_parts(self) -> tuple[S.Pattern, bool, S.Expr]:
        """Everything after the `let` keyword up to and including the bound value."""
        recursive = False
        if self.at_keyword("rec"):
            self.next()
            recursive = True
        pattern = self.pattern()
        params: list[S.Pattern] = []
        while not self.at_punct("="):
            params.append(self.pattern())
        self.eat("punct", "=")
        value = self.expr()
        for param in reversed(params):
            value = S.Lambda(span=SourceSpan(param.span.start, value.span.end), param=param, body=value)
        if params and not isinstance(pattern, S.PVar):
            raise self.fail("a function definition must be named by a plain identifier", pattern.span)
        if recursive and not isinstance(pattern, S.PVar):
            raise self.fail("'let rec' requires a plain identifier", pattern.span)
        return pattern, recursive, value

    # -- patterns -----------------------------------------------------------

    def pattern(self) -> S.Pattern:
        tok = self.peek()
        if tok.kind == "ident":
            self.next()
            if tok.text == "_":
                return S.PWildcard(tok.span)
            return S.PVar(tok.span, tok.text)
        if tok.kind == "punct" and tok.text == "(":
            start = self.next()
            if self.at_punct(")"):
                end = self.next()
                return S.PUnit(SourceSpan(start.span.start, end.span.end))
            items = [self.pattern()]
            while self.at_punct(","):
                self.next()
                items.append(self.pattern())
            end = self.eat("punct", ")")
            span = SourceSpan(start.span.start, end.span.end)
            if len(items) == 1:
                return items[0]
            return S.PTuple(span, tuple(items))
        raise self.fail("expected a pattern")

    # -- type expressions (unbox) -------------------------------------------

    def type_expr(self) -> S.TypeExpr:
        tok = self.peek()
        name = None
        if tok.kind == "ident" and tok.text in _TYPE_NAMES:
            name = tok.text
        elif tok.kind == "keyword" and tok.text in _TYPE_NAMES:
            name = tok.text
        if name is None:
            raise self.fail(f"expected a type name, found {tok.text!r}")
        self.next()
        args: tuple[S.TypeExpr, ...] = ()
        if name in ("list", "array", "option"):
            self.eat("punct", "<")
            args = (self.type_expr(),)
            self.eat("punct", ">")
        return S.TypeExpr(tok.span, name, args)

    # -- expressions --------------------------------------------------------

    def expr(self) -> S.Expr:
        """Expression including top-level tuples (`a, b, c`)."""
        first = self.open_expr()
        if not self.at_punct(","):
            return first
        items = [first]
        while self.at_punct(","):
            self.next()
            items.append(self.open_expr())
        return S.Tuple(SourceSpan(first.span.start, items[-1].span.end), tuple(items))

    def open_expr(self) -> S.Expr:
        tok = self.peek()
        if tok.kind == "keyword":
            if tok.text == "fun":
                return self.fun_expr()
            if tok.text == "if":
                return self.if_expr()
            if tok.text == "for":
                return self.for_expr()
            if tok.text == "async":
                return self.async_expr()
            if tok.text == "try":
                return self.try_expr()
            if tok.text == "return":
                start = self.next()
                value = self.open_expr()
                return S.Return(SourceSpan(start.span.start, value.span.end), value)
            if tok.text == "let":
                return self.let_in_expr()
        if tok.kind == "letbang":
            return self.letbang_expr()
        return self.assign_or_pipeline()

    def fun_expr(self) -> S.Expr:
        start = self.eat("keyword", "fun")
        params = [self.pattern()]
        while not self.at_punct("->"):
            params.append(self.pattern())
        self.eat("punct", "->")
        body = self.open_expr()
        expr = body
        for param in reversed(params):
            expr = S.Lambda(SourceSpan(start.span.start, body.span.end), param, expr)
        return expr

    def if_expr(self) -> S.Expr:
        start = self.eat("keyword", "if")
        cond = self.assign_or_pipeline()
        self.eat("keyword", "then")
        then = self.open_expr()
        orelse = None
        end = then.span.end
        if self.at_keyword("else"):
            self.next()
            orelse = self.open_expr()
            end = orelse.span.end
        return S.If(SourceSpan(start.span.start, end), cond, then, orelse)

    def for_expr(self) -> S.Expr:
        start = self.eat("keyword", "for")
        pattern = self.pattern()
        self.eat("keyword", "in")
        source = self.assign_or_pipeline()
        self.eat("keyword", "do")
        body = self.open_expr()
        return S.For(SourceSpan(start.span.start, body.span.end), pattern, source, body)

    def async_expr(self) -> S.Expr:
        start = self.eat("keyword", "async")
        self.eat("punct", "{")
        body = self.block_body(terminator="}")
        end = self.eat("punct", "}")
        return S.AsyncBlock(SourceSpan(start.span.start, end.span.end), body)

    def try_expr(self) -> S.Expr:
        start = self.eat("keyword", "try")
        body = self.open_expr()
        self.eat("keyword", "with")
        var = self.eat("ident")
        self.eat("punct", "->")
        handler = self.open_expr()
        return S.TryWith(SourceSpan(start.span.start, handler.span.end), body, var.text, handler)

    def let_in_expr(self) -> S.Expr:
        # `let p = v in body` in expression position; the `;` form lives in blocks
        start = self.eat("keyword", "let")
        pattern, recursive, value = self.let_parts()
        self.eat("keyword", "in")
        body = self.open_expr()
        return S.Let(SourceSpan(start.span.start, body.span.end), pattern, recursive, value, body)

    def letbang_expr(self) -> S.Expr:
        start = self.eat("letbang")
        pattern = self.pattern()
        self.eat("punct", "=")
        value = self.open_expr()
        self.eat("keyword", "in")
        body = self.open_expr()
        return S.LetBang(SourceSpan(start.span.start, body.span.end), pattern, value, body)

    def assign_or_pipeline(self) -> S.Expr:
        expr = self.pipeline()
        if isinstance(expr, S.MemberAccess) and self.at_punct("<-"):
            self.next()
            value = self.open_expr()
            return S.MemberAssign(
                SourceSpan(expr.span.start, value.span.end), expr.recv, expr.name, value
            )
        return expr

    def pipeline(self) -> S.Expr:
        expr = self.or_expr()
        while self.at_punct("|>"):
            self.next()
            fn = self.or_expr()
            expr = S.App(SourceSpan(expr.span.start, fn.span.end), fn, expr)
        return expr

    def or_expr(self) -> S.Expr:
        expr = self.and_expr()
        while self.at_punct("||"):
            self.next()
            right = self.and_expr()
            expr = S.BinOp(SourceSpan(expr.span.start, right.span.end), "||", expr, right)
        return expr

    def and_expr(self) -> S.Expr:
        expr = self.cmp_expr()
        while self.at_punct("&&"):
            self.next()
            right = self.cmp_expr()
            expr = S.BinOp(SourceSpan(expr.span.start, right.span.end), "&&", expr, right)
        return expr

    def cmp_expr(self) -> S.Expr:
        expr = self.add_expr()
        if self.peek().kind == "punct" and self.peek().text in _CMP_TOKENS:
            op = self.next().text
            right = self.add_expr()
            return S.BinOp(SourceSpan(expr.span.start, right.span.end), op, expr, right)
        return expr

    def add_expr(self) -> S.Expr:
        expr = self.mul_expr()
        while self.peek().kind == "punct" and self.peek().text in _ADD_TOKENS:
            op = self.next().text
            right = self.mul_expr()
            expr = S.BinOp(SourceSpan(expr.span.start, right.span.end), op, expr, right)
        return expr

    def mul_expr(self) -> S.Expr:
        expr = self.app_expr()
        while self.peek().kind == "punct" and self.peek().text in _MUL_TOKENS:
            op = self.next().text
            right = self.app_expr()
            expr = S.BinOp(SourceSpan(expr.span.start, right.span.end), op, expr, right)
        return expr

    def app_expr(self) -> S.Expr:
        if self.at_keyword("unbox"):
            start = self.next()
            self.eat("punct", "<")
            target = self.type_expr()
            self.eat("punct", ">")
            operand = self.postfix_expr()
            unboxed = S.Unbox(SourceSpan(start.span.start, operand.span.end), target, operand)
            return self.apply_chain(unboxed)
        if self.at_punct("-") and self.peek(1).kind in ("int", "float"):
            # negative literal
            start = self.next()
            tok = self.next()
            value = -tok.value  # type: ignore[operator]
            lit = S.Lit(SourceSpan(start.span.start, tok.span.end), value)
            return self.apply_chain(lit)
        expr = self.postfix_expr()
        return self.apply_chain(expr)

    def apply_chain(self, expr: S.Expr) -> S.Expr:
        while self.starts_atom():
            arg = self.postfix_expr()
            expr = S.App(SourceSpan(expr.span.start, arg.span.end), expr, arg)
        return expr

    def starts_atom(self) -> bool:
        tok = self.peek()
        if tok.kind in _ATOM_STARTS:
            return True
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            return True
        if tok.kind == "punct" and tok.text in ("(", "[", "[|"):
            return True
        return False

    def _adjacent(self) -> bool:
        """True when the next token starts exactly where the previous ended.

        `f(x)` is a (tight) application and `r.m(x)` a method call, while
        `f (x)` and `r.m (x)` keep the parens as an ordinary argument.
        """
        prev = self.tokens[self.pos - 1]
        return prev.span.end == self.peek().span.start

    def postfix_expr(self) -> S.Expr:
        expr = self.atom()
        while True:
            if self.at_punct("."):
                self.next()
                tok = self.peek()
                if tok.kind == "ident":
                    name = self.next().text
                elif tok.kind == "backtick":
                    name = self.next().value  # type: ignore[assignment]
                else:
                    raise self.fail("expected a member name after '.'")
                if self.at_punct("(") and self._adjacent():
                    args, named = self.call_args()
                    end = self.tokens[self.pos - 1]
                    expr = S.MethodCall(
                        SourceSpan(expr.span.start, end.span.end), expr, str(name), tuple(args), tuple(named)
                    )
                else:
                    end = self.tokens[self.pos - 1]
                    expr = S.MemberAccess(SourceSpan(expr.span.start, end.span.end), expr, str(name))
            elif self.at_punct("(") and self._adjacent():
                arg = self.atom()
                expr = S.App(SourceSpan(expr.span.start, arg.span.end), expr, arg)
            else:
                return expr

    def call_args(self) -> tuple[list[S.Expr], list[tuple[str, S.Expr]]]:
        self.eat("punct", "(")
        args: list[S.Expr] = []
        named: list[tuple[str, S.Expr]] = []
        while not self.at_punct(")"):
            if (
                self.peek().kind == "ident"
                and self.peek(1).kind == "punct"
                and self.peek(1).text == "="
            ):
                name = self.next().text
                self.next()
                named.append((name, self.open_expr()))
            else:
                value = self.open_expr()
                if named:
                    raise ParseError([error("parse.named-arg-order",
                                            "positional argument after named argument", value.span)])
                args.append(value)
            if self.at_punct(","):
                self.next()
            elif not self.at_punct(")"):
                raise self.fail("expected ',' or ')' in argument list")
        self.eat("punct", ")")
        return args, named

    def atom(self) -> S.Expr:
        tok = self.peek()
        if tok.kind in ("int", "float", "string"):
            self.next()
            return S.Lit(tok.span, tok.value)
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            self.next()
            return S.Lit(tok.span, tok.value)
        if tok.kind == "ident":
            self.next()
            return S.Ident(tok.span, tok.text)
        if tok.kind == "punct" and tok.text == "(":
            start = self.next()
            if self.at_punct(")"):
                end = self.next()
                return S.Lit(SourceSpan(start.span.start, end.span.end), S.UNIT)
            body = self.block_body(terminator=")")
            self.eat("punct", ")")
            return body
        if tok.kind == "punct" and tok.text == "[":
            return self.list_lit()
        if tok.kind == "punct" and tok.text == "[|":
            return self.array_lit()
        raise self.fail(f"unexpected token {tok.text or tok.kind!r} in expression")

    def list_lit(self) -> S.Expr:
        start = self.eat("punct", "[")
        items: list[S.Expr] = []
        while not self.at_punct("]"):
            items.append(self.expr())
            if self.at_punct(";"):
                self.next()
            elif not self.at_punct("]"):
                raise self.fail("expected ';' or ']' in list literal")
        end = self.eat("punct", "]")
        return S.ListLit(SourceSpan(start.span.start, end.span.end), tuple(items))

    def array_lit(self) -> S.Expr:
        start = self.eat("punct", "[|")
        items: list[S.Expr] = []
        while not self.at_punct("|]"):
            items.append(self.expr())
            if self.at_punct(";"):
                self.next()
            elif not self.at_punct("|]"):
                raise self.fail("expected ';' or '|]' in array literal")
        end = self.eat("punct", "|]")
        return S.ArrayLit(SourceSpan(start.span.start, end.span.end), tuple(items))

    # -- blocks --------------------------------------------------------------

    def block_body(self, terminator: str) -> S.Expr:
        """Items separated by `;`, lowered to Let/LetBang/Seq chains.

        A `let p = v;` item scopes over everything that follows it in the
        block, so it consumes the remainder recursively. The `let ... in e`
        form stays available and is self-contained.
        """
        tok = self.peek()
        if self.at_punct(terminator):
            return S.Lit(tok.span, S.UNIT)

        if self.at_keyword("let") and not self._is_let_in():
            start = self.next()
            pattern, recursive, value = self.let_parts()
            body = self._block_tail(terminator, value.span)
            return S.Let(SourceSpan(start.span.start, body.span.end), pattern, recursive, value, body)
        if self.at("letbang") and not self._is_let_in():
            start = self.next()
            pattern = self.pattern()
            self.eat("punct", "=")
            value = self.expr()
            body = self._block_tail(terminator, value.span)
            return S.LetBang(SourceSpan(start.span.start, body.span.end), pattern, value, body)

        first = self.expr()
        if self.at_punct(";"):
            self.next()
            rest = self.block_body(terminator)
            return S.Seq(SourceSpan(first.span.start, rest.span.end), first, rest)
        if not self.at_punct(terminator):
            raise self.fail(f"expected ';' or '{terminator}' in block")
        return first

    def _is_let_in(self) -> bool:
        """Lookahead: does this let/let! use the `in` form (self-contained)?

        Scans forward at bracket depth zero; nested let/for constructs
        consume their own `in` keywords, the first unowned `in` wins, and a
        `;` settles it as the block form.
        """
        depth = 0
        let_owners = 0
        for_owners = 0
        i = self.pos + 1
        while i < len(self.tokens):
            tok = self.tokens[i]
            if tok.kind == "punct" and tok.text in ("(", "[", "[|", "{"):
                depth += 1
            elif tok.kind == "punct" and tok.text in (")", "]", "|]", "}"):
                depth -= 1
                if depth < 0:
                    return False
            elif depth == 0:
                if tok.kind in ("keyword", "letbang") and tok.text in ("let", "let!"):
                    let_owners += 1
                elif tok.kind == "keyword" and tok.text == "for":
                    for_owners += 1
                elif tok.kind == "keyword" and tok.text == "in":
                    if for_owners > 0:
                        for_owners -= 1
                    elif let_owners > 0:
                        let_owners -= 1
                    else:
                        return True
                elif tok.kind == "punct" and tok.text == ";":
                    return False
            i += 1
        return False

    def _block_tail(self, terminator: str, prev: SourceSpan) -> S.Expr:
        if self.at_punct(";"):
            self.next()
            return self.block_body(terminator)
        if self.at_punct(terminator):
            return S.Lit(SourceSpan(prev.end, prev.end), S.UNIT)
        raise self.fail(f"expected ';' or '{terminator}' after binding in block")


# ---------------------------------------------------------------------------
# let!/return/try placement validation


def _check_async_placement(expr: S.Expr, in_async: bool, diags: list[Diagnostic]) -> None:
    if isinstance(expr, S.AsyncBlock):
        _check_async_placement(expr.body, True, diags)
        return
    if isinstance(expr, S.Lambda):
        _check_async_placement(expr.body, False, diags)
        return
    if isinstance(expr, S.LetBang):
        if not in_async:
            diags.append(error("parse.letbang-outside-async", "let! outside an async block", expr.span))
        _check_async_placement(expr.value, False, diags)
        _check_async_placement(expr.body, in_async, diags)
        return
    if isinstance(expr, S.Return):
        if not in_async:
            diags.append(error("parse.return-outside-async", "return outside an async block", expr.span))
        _check_async_placement(expr.value, False, diags)
        return
    if isinstance(expr, S.TryWith):
        if not in_async:
            diags.append(error("parse.try-outside-async", "try/with outside an async block", expr.span))
        _check_async_placement(expr.body, in_async, diags)
        _check_async_placement(expr.handler, in_async, diags)
        return
    if isinstance(expr, S.Seq):
        if isinstance(expr.first, S.Return):
            diags.append(error("parse.return-not-last", "return must end its block", expr.first.span))
        _check_async_placement(expr.first, in_async, diags)
        _check_async_placement(expr.rest, in_async, diags)
        return
    if isinstance(expr, S.Let):
        _check_async_placement(expr.value, False, diags)
        _check_async_placement(expr.body, in_async, diags)
        return
    if isinstance(expr, S.If):
        _check_async_placement(expr.cond, False, diags)
        _check_async_placement(expr.then, in_async, diags)
        if expr.orelse is not None:
            _check_async_placement(expr.orelse, in_async, diags)
        return
    if isinstance(expr, S.For):
        _check_async_placement(expr.source, False, diags)
        _check_async_placement(expr.body, in_async, diags)
        return
    # remaining nodes: all children are non-tail positions
    for child in _children(expr):
        _check_async_placement(child, False, diags)


def _children(expr: S.Expr) -> list[S.Expr]:
    out: list[S.Expr] = []
    for name in getattr(expr, "__dataclass_fields__", {}):
        if name == "span":
            continue
        value = getattr(expr, name)
        if isinstance(value, S.Expr):
            out.append(value)
        elif isinstance(value, tuple):
            for item in value:
                if isinstance(item, S.Expr):
                    out.append(item)
                elif isinstance(item, tuple) and len(item) == 2 and isinstance(item[1], S.Expr):
                    out.append(item[1])
    return out


def validate_module(module: S.SourceModule) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    for binding in module.bindings:
        _check_async_placement(binding.value, False, diags)
    if module.entry is not None:
        _check_async_placement(module.entry, False, diags)
    return diags


def parse_module(text: str) -> S.SourceModule:
    """Parse and validate; raises ParseError carrying diagnostics."""
    try:
        tokens = tokenize(text)
    except LexError as exc:
        raise ParseError([exc.diagnostic]) from exc
    module = _Parser(tokens).parse_module()
    diags = validate_module(module)
    if diags:
        raise ParseError(diags)
    return module


def try_parse_module(text: str) -> tuple[S.SourceModule | None, list[Diagnostic]]:
    try:
        return parse_module(text), []
    except ParseError as exc:
        return None, exc.diagnostics
