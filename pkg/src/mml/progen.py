"""Seeded generators: snapshots, ML-subset programs, and safety templates.

Everything here is deterministic in the seed. The ML program generator
keeps integer magnitudes small and divisors nonzero so results stay exact
on both execution targets (the JS backend works in doubles and truncates
division to 32 bits).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import surface as S
from .coreir import (
    BOOL,
    FLOAT,
    INT,
    STRING,
    UNIT_T,
    CoreType,
    TArray,
    TAsync,
    TList,
    TTuple,
)
from .diagnostics import NO_SPAN
from .world import WorldSnapshot, make_snapshot

_SP = NO_SPAN


def _lit(value) -> S.Lit:
    return S.Lit(_SP, value)


def _ident(name: str) -> S.Ident:
    return S.Ident(_SP, name)


def _app(fn: S.Expr, *args: S.Expr) -> S.Expr:
    out = fn
    for a in args:
        out = S.App(_SP, out, a)
    return out


def _member(recv: S.Expr, name: str) -> S.Expr:
    return S.MemberAccess(_SP, recv, name)


# ---------------------------------------------------------------------------
# snapshots


def gen_snapshot(
    rng: random.Random,
    n_countries: int = 4,
    n_indicators: int = 2,
    pair_density: float = 1.0,
) -> WorldSnapshot:
    words = ["Alpha", "Bravo", "Cedar", "Delta", "Ember", "Fjord", "Grove", "Harbor"]
    countries = []
    for i in range(n_countries):
        code = f"C{i:02d}"
        name = f"{rng.choice(words)} {rng.choice(words)} {i}"
        countries.append((code, name))
    indicators = []
    for i in range(n_indicators):
        code = f"IND.{chr(ord('A') + i)}"
        name = f"Indicator {rng.choice(words)} {i}"
        indicators.append((code, name))
    values = {}
    for ccode, _ in countries:
        for icode, _ in indicators:
            if rng.random() <= pair_density:
                years = range(2000, 2000 + rng.randint(2, 5))
                values[(ccode, icode)] = [
                    (year, round(rng.uniform(1.0, 99.0), 2)) for year in years
                ]
    return make_snapshot(countries, indicators, values)


# ---------------------------------------------------------------------------
# ML-subset program generation


@dataclass
class GenOptions:
    max_depth: int = 4
    allow_async: bool = True
    allow_prelude: bool = True
    allow_functions: bool = True


class MLGen:
    """Generates well-typed provider-free programs (surface AST)."""

    def __init__(self, rng: random.Random, options: GenOptions | None = None) -> None:
        self.rng = rng
        self.opt = options or GenOptions()
        self._names = 0

    def fresh_name(self) -> str:
        self._names += 1
        return f"v{self._names}"

    def gen_type(self, depth: int) -> CoreType:
        choices = [INT, INT, FLOAT, BOOL, STRING, UNIT_T]
        if depth > 0:
            choices += [
                TList(self.gen_type(depth - 1)),
                TArray(self.gen_type(depth - 1)),
                TTuple((self.gen_type(depth - 1), self.gen_type(depth - 1))),
            ]
            if self.opt.allow_async:
                choices.append(TAsync(self.gen_type(depth - 1)))
        return self.rng.choice(choices)

    # env: list of (name, CoreType)
    def gen_expr(self, ty: CoreType, depth: int, env: list[tuple[str, CoreType]]) -> S.Expr:
        rng = self.rng
        matching = [n for n, t in env if t == ty]
        if matching and rng.random() < 0.3:
            return _ident(rng.choice(matching))
        if depth > 0 and rng.random() < 0.15:
            # let-wrap with an unrelated binding
            name = self.fresh_name()
            helper_ty = self.gen_type(1)
            value = self.gen_expr(helper_ty, depth - 1, env)
            body = self.gen_expr(ty, depth - 1, env + [(name, helper_ty)])
            return S.Let(_SP, S.PVar(_SP, name), False, value, body)
        if depth > 0 and rng.random() < 0.12:
            cond = self.gen_expr(BOOL, depth - 1, env)
            then = self.gen_expr(ty, depth - 1, env)
            orelse = self.gen_expr(ty, depth - 1, env)
            return S.If(_SP, cond, then, orelse)
        if depth > 0 and self.opt.allow_functions and rng.random() < 0.12:
            # beta redex: (fun x -> body) arg
            name = self.fresh_name()
            param_ty = self.gen_type(1)
            body = self.gen_expr(ty, depth - 1, env + [(name, param_ty)])
            arg = self.gen_expr(param_ty, depth - 1, env)
            return S.App(_SP, S.Lambda(_SP, S.PVar(_SP, name), body), arg)

        if ty == INT:
            return self._gen_int(depth, env)
        if ty == FLOAT:
            return self._gen_float(depth, env)
        if ty == BOOL:
            return self._gen_bool(depth, env)
        if ty == STRING:
            return _lit(rng.choice(["red", "green", "blue", "x y", "zed"]))
        if ty == UNIT_T:
            return self._gen_unit(depth, env)
        if isinstance(ty, TList):
            return self._gen_list(ty, depth, env)
        if isinstance(ty, TArray):
            return self._gen_array(ty, depth, env)
        if isinstance(ty, TTuple):
            return S.Tuple(_SP, tuple(self.gen_expr(i, depth - 1, env) for i in ty.items))
        if isinstance(ty, TAsync):
            return self._gen_async(ty, depth, env)
        raise ValueError(f"cannot generate type {ty!r}")

    def _gen_int(self, depth: int, env) -> S.Expr:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.35:
            return _lit(rng.randint(-50, 50))
        op = rng.choice(["+", "-", "*", "/", "%"])
        if op == "*":
            return S.BinOp(_SP, op, self._gen_int(0, env), _lit(rng.randint(-9, 9)))
        if op in ("/", "%"):
            divisor = rng.choice([d for d in range(-9, 10) if d != 0])
            return S.BinOp(_SP, op, self._gen_int(depth - 1, env), _lit(divisor))
        return S.BinOp(_SP, op, self._gen_int(depth - 1, env), self._gen_int(depth - 1, env))

    def _gen_float(self, depth: int, env) -> S.Expr:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.4:
            return _lit(round(rng.uniform(-40.0, 40.0), 2))
        op = rng.choice(["+.", "-.", "*.", "/."])
        if op == "/.":
            divisor = round(rng.uniform(0.5, 8.0), 2)
            return S.BinOp(_SP, op, self._gen_float(depth - 1, env), _lit(divisor))
        if op == "*.":
            return S.BinOp(_SP, op, self._gen_float(0, env), _lit(round(rng.uniform(-4.0, 4.0), 2)))
        return S.BinOp(_SP, op, self._gen_float(depth - 1, env), self._gen_float(depth - 1, env))

    def _gen_bool(self, depth: int, env) -> S.Expr:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.3:
            return _lit(rng.random() < 0.5)
        kind = rng.random()
        if kind < 0.5:
            op = rng.choice(list(S.CMP_OPS))
            return S.BinOp(_SP, op, self._gen_int(depth - 1, env), self._gen_int(depth - 1, env))
        op = rng.choice(["&&", "||"])
        return S.BinOp(_SP, op, self._gen_bool(depth - 1, env), self._gen_bool(depth - 1, env))

    def _gen_unit(self, depth: int, env) -> S.Expr:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.5:
            return _lit(S.UNIT)
        # a for-loop over a small collection
        elem = self.gen_type(0)
        source = self._gen_list(TList(elem), depth - 1, env)
        name = self.fresh_name()
        body = self.gen_expr(self.gen_type(0), depth - 1, env + [(name, elem)])
        return S.For(_SP, S.PVar(_SP, name), source, body)

    def _gen_list(self, ty: TList, depth: int, env) -> S.Expr:
        rng = self.rng
        if self.opt.allow_prelude and depth > 0 and rng.random() < 0.35:
            src_elem = self.gen_type(0)
            src = self._gen_list(TList(src_elem), depth - 1, env)
            name = self.fresh_name()
            body = self.gen_expr(ty.element, depth - 1, env + [(name, src_elem)])
            fn = S.Lambda(_SP, S.PVar(_SP, name), body)
            module = rng.choice(["List", "Seq"])
            return _app(_member(_ident(module), "map"), fn, src)
        n = rng.randint(0, 3)
        return S.ListLit(_SP, tuple(self.gen_expr(ty.element, depth - 1, env) for _ in range(n)))

    def _gen_array(self, ty: TArray, depth: int, env) -> S.Expr:
        rng = self.rng
        if self.opt.allow_prelude and depth > 0 and rng.random() < 0.35:
            src = self._gen_list(TList(ty.element), depth - 1, env)
            return _app(_member(_ident("Array"), "ofSeq"), src)
        n = rng.randint(0, 3)
        return S.ArrayLit(_SP, tuple(self.gen_expr(ty.element, depth - 1, env) for _ in range(n)))

    def _gen_async(self, ty: TAsync, depth: int, env) -> S.Expr:
        rng = self.rng
        items: list = []
        inner_env = list(env)
        # a few bindings, possibly a let! on a nested async
        for _ in range(rng.randint(0, 2)):
            name = self.fresh_name()
            if depth > 1 and rng.random() < 0.5:
                sub_ty = self.gen_type(0)
                sub = self._gen_async(TAsync(sub_ty), depth - 1, inner_env)
                items.append(("let!", name, sub))
                inner_env.append((name, sub_ty))
            else:
                sub_ty = self.gen_type(1)
                value = self.gen_expr(sub_ty, depth - 1, inner_env)
                items.append(("let", name, value))
                inner_env.append((name, sub_ty))
        if depth > 1 and rng.random() < 0.4:
            elem = self.gen_type(0)
            source = self._gen_list(TList(elem), depth - 1, inner_env)
            loop_var = self.fresh_name()
            loop_body = self.gen_expr(
                self.gen_type(0), depth - 1, inner_env + [(loop_var, elem)]
            )
            items.append(("for", loop_var, source, loop_body))
        result = self.gen_expr(ty.result, depth - 1, inner_env)
        body: S.Expr = S.Return(_SP, result)
        for item in reversed(items):
            if item[0] == "let":
                body = S.Let(_SP, S.PVar(_SP, item[1]), False, item[2], body)
            elif item[0] == "let!":
                body = S.LetBang(_SP, S.PVar(_SP, item[1]), item[2], body)
            else:
                loop = S.For(_SP, S.PVar(_SP, item[1]), item[2], item[3])
                body = S.Seq(_SP, loop, body)
        return S.AsyncBlock(_SP, body)

    def gen_program(self, result_depth: int = 2) -> S.SourceModule:
        """A short module: helper bindings plus an entry of a random type."""
        env: list[tuple[str, CoreType]] = []
        bindings: list[S.Binding] = []
        for _ in range(self.rng.randint(0, 3)):
            name = self.fresh_name()
            ty = self.gen_type(1)
            value = self.gen_expr(ty, self.opt.max_depth - 1, env)
            bindings.append(S.Binding(_SP, S.PVar(_SP, name), False, value))
            env.append((name, ty))
        entry_ty = self.gen_type(result_depth)
        entry = self.gen_expr(entry_ty, self.opt.max_depth, env)
        return S.SourceModule((), tuple(bindings), entry)


# ---------------------------------------------------------------------------
# broad syntax generator (round-trip testing only; output is not typed)


class SyntaxGen:
    """Random well-formed surface programs exercising every construct."""

    def __init__(self, rng: random.Random) -> None:
        self.rng = rng
        self._n = 0

    def name(self) -> str:
        self._n += 1
        return f"n{self._n}"

    def expr(self, depth: int, in_async: bool = False) -> S.Expr:
        rng = self.rng
        if depth <= 0:
            return rng.choice(
                [
                    _lit(rng.randint(-20, 20)),
                    _lit(round(rng.uniform(-5, 5), 2)),
                    _lit(rng.choice(["a", "b c", 'd"e'])),
                    _lit(rng.random() < 0.5),
                    _lit(S.UNIT),
                    _ident(rng.choice(["x", "y", "zed"])),
                ]
            )
        pick = rng.randrange(14)
        if pick == 0:
            return S.Lambda(_SP, self.pattern(), self.expr(depth - 1))
        if pick == 1:
            return S.App(_SP, self.expr(depth - 1), self.expr(depth - 1))
        if pick == 2:
            pattern = self.pattern()
            recursive = isinstance(pattern, S.PVar) and rng.random() < 0.2
            return S.Let(_SP, pattern, recursive, self.expr(depth - 1), self.expr(depth - 1, in_async))
        if pick == 3:
            return S.If(_SP, self.expr(depth - 1), self.expr(depth - 1, in_async),
                        self.expr(depth - 1, in_async) if rng.random() < 0.7 else None)
        if pick == 4:
            return S.Tuple(_SP, tuple(self.expr(depth - 1) for _ in range(rng.randint(2, 3))))
        if pick == 5:
            return S.ListLit(_SP, tuple(self.expr(depth - 1) for _ in range(rng.randint(0, 3))))
        if pick == 6:
            return S.ArrayLit(_SP, tuple(self.expr(depth - 1) for _ in range(rng.randint(0, 3))))
        if pick == 7:
            return S.MemberAccess(_SP, self.expr(depth - 1), self.member_name())
        if pick == 8:
            named = tuple(
                (self.name(), self.expr(depth - 1)) for _ in range(rng.randint(0, 2))
            )
            args = tuple(self.expr(depth - 1) for _ in range(rng.randint(0, 2)))
            return S.MethodCall(_SP, self.expr(depth - 1), self.member_name(), args, named)
        if pick == 9:
            return S.MemberAssign(_SP, self.expr(depth - 1), self.member_name(), self.expr(depth - 1))
        if pick == 10:
            return S.AsyncBlock(_SP, self.async_body(depth - 1))
        if pick == 11:
            return S.For(_SP, self.pattern(), self.expr(depth - 1), self.expr(depth - 1, in_async))
        if pick == 12:
            op = rng.choice(list(S.INT_OPS + S.FLOAT_OPS + S.CMP_OPS + S.BOOL_OPS))
            return S.BinOp(_SP, op, self.expr(depth - 1), self.expr(depth - 1))
        target = self.rng.choice(
            [S.TypeExpr(_SP, "bool"), S.TypeExpr(_SP, "int"),
             S.TypeExpr(_SP, "list", (S.TypeExpr(_SP, "float"),))]
        )
        return S.Unbox(_SP, target, self.expr(depth - 1))

    def async_body(self, depth: int) -> S.Expr:
        rng = self.rng
        items = rng.randint(0, 2)
        body: S.Expr = S.Return(_SP, self.expr(depth))
        for _ in range(items):
            kind = rng.randrange(3)
            if kind == 0:
                body = S.LetBang(_SP, self.pattern(), self.expr(depth), body)
            elif kind == 1:
                body = S.Let(_SP, self.pattern(), False, self.expr(depth), body)
            else:
                body = S.Seq(_SP, self.expr(depth, in_async=True), body)
        if rng.random() < 0.3:
            body = S.TryWith(_SP, body, self.name(), S.Return(_SP, self.expr(depth)))
        return body

    def member_name(self) -> str:
        rng = self.rng
        if rng.random() < 0.4:
            return rng.choice(["Czech Republic", "School enrollment, tertiary (% gross)", "two words"])
        return rng.choice(["Name", "Indicators", "attr", "push", "map"])

    def pattern(self) -> S.Pattern:
        rng = self.rng
        pick = rng.randrange(5)
        if pick == 0:
            return S.PWildcard(_SP)
        if pick == 1:
            return S.PUnit(_SP)
        if pick <= 3:
            return S.PVar(_SP, self.name())
        return S.PTuple(_SP, tuple(S.PVar(_SP, self.name()) for _ in range(rng.randint(2, 3))))

    def module(self) -> S.SourceModule:
        rng = self.rng
        decls = []
        if rng.random() < 0.4:
            decls.append(
                S.ProviderDecl(_SP, "WB", "WorldBankData", (("Asynchronous", True),))
            )
        if rng.random() < 0.3:
            decls.append(S.ProviderDecl(_SP, "ts", "TypeScript", ((None, "lib.d.ts"),)))
        bindings = tuple(
            S.Binding(_SP, S.PVar(_SP, self.name()), rng.random() < 0.2, self.expr(3))
            for _ in range(rng.randint(1, 4))
        )
        entry = self.expr(3) if rng.random() < 0.7 else None
        return S.SourceModule(tuple(decls), bindings, entry)
