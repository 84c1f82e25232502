"""Reference interpreter for desugared core modules over a world snapshot.

Call-by-value; values carry dynamic tags so cast checks and the harness's
tag-preservation property are observable. Async computations are values
(`pending` tag) run by a single FIFO scheduler; simulated fetch latency is
zero by default, and a test hook can inject deterministic delays.

Imported-object operations (Emit nodes) evaluate against a recording stub
host; world data access goes through the runtime symbols, which fail with
the missing (country, indicator) pair when the data is gone.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field

from . import coreir as C
from .erase import JS_UNDEFINED
from .prelude import ISSOME_TEMPLATE, NUMBER_TEMPLATE, START_PRIMITIVE_SYMBOLS
from .surface import UNIT, Pattern, PTuple, PUnit, PVar, PWildcard
from .world import WorldSnapshot, world_lookup

# ---------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class Value:
    tag: str  # int float bool string unit tuple list array closure jsobject pending
    payload: object = None

    def __repr__(self) -> str:
        return f"<{self.tag}:{self.payload!r}>"


V_UNIT = Value("unit")
JS_NULL = Value("jsobject", None)


def v_int(n: int) -> Value:
    return Value("int", n)


def v_float(x: float) -> Value:
    return Value("float", x)


def v_bool(b: bool) -> Value:
    return Value("bool", b)


def v_str(s: str) -> Value:
    return Value("string", s)


@dataclass(eq=False)
class Closure:
    param: Pattern
    body: C.CoreExpr
    env: "Frame"


@dataclass(eq=False)
class StubObject:
    """A recording stand-in for an imported JavaScript object."""

    path: str
    props: dict[str, Value] = field(default_factory=dict)


@dataclass(eq=False)
class WorldHandle:
    pass


@dataclass(eq=False)
class CountryHandle:
    code: str


class RunFailure(Exception):
    """A runtime failure: missing data, failed cast, uncaught async error."""

    def __init__(self, kind: str, message: str, missing_key: tuple[str, str] | None = None):
        super().__init__(message)
        self.kind = kind  # missing-key | cast | div-zero | js-template | internal
        self.missing_key = missing_key


# ---------------------------------------------------------------------------
# environment


class Frame:
    __slots__ = ("vars", "parent")

    def __init__(self, parent: "Frame | None" = None) -> None:
        self.vars: dict[str, Value] = {}
        self.parent = parent

    def lookup(self, name: str) -> Value:
        frame: Frame | None = self
        while frame is not None:
            if name in frame.vars:
                return frame.vars[name]
            frame = frame.parent
        raise RunFailure("internal", f"unbound name {name!r} at run time")


def bind_pattern(frame: Frame, pattern: Pattern, value: Value) -> None:
    if isinstance(pattern, PVar):
        frame.vars[pattern.name] = value
    elif isinstance(pattern, (PWildcard, PUnit)):
        pass
    elif isinstance(pattern, PTuple):
        if value.tag != "tuple" or len(value.payload) != len(pattern.items):  # type: ignore[arg-type]
            raise RunFailure("internal", "tuple pattern arity mismatch")
        for sub, item in zip(pattern.items, value.payload):  # type: ignore[arg-type]
            bind_pattern(frame, sub, item)
    else:
        raise RunFailure("internal", f"unknown pattern {pattern!r}")


# ---------------------------------------------------------------------------
# scheduler


class Scheduler:
    """Single logical thread: a FIFO queue plus a virtual-time timer heap."""

    def __init__(self) -> None:
        self.queue: deque = deque()
        self.timers: list = []
        self.now = 0
        self._seq = itertools.count()
        self.draining = False
        self.trace: list[tuple] = []

    def schedule(self, thunk) -> None:
        self.queue.append(thunk)

    def after(self, delay: int, thunk) -> None:
        if delay <= 0:
            self.schedule(thunk)
        else:
            heapq.heappush(self.timers, (self.now + delay, next(self._seq), thunk))

    def drain_ready(self) -> None:
        """Run queued continuations without advancing virtual time."""
        if self.draining:
            return
        self.draining = True
        try:
            while self.queue:
                self.queue.popleft()()
        finally:
            self.draining = False

    def drain_all(self) -> None:
        """Run to quiescence, advancing virtual time across pending timers."""
        if self.draining:
            return
        self.draining = True
        try:
            while True:
                while self.queue:
                    self.queue.popleft()()
                if not self.timers:
                    return
                when, _, thunk = heapq.heappop(self.timers)
                self.now = max(self.now, when)
                self.queue.append(thunk)
        finally:
            self.draining = False


# ---------------------------------------------------------------------------
# async computations


class AsyncComp:
    def run(self, interp: "Interp", k, ke) -> None:
        raise NotImplementedError


@dataclass(eq=False)
class ReturnComp(AsyncComp):
    value: Value

    def run(self, interp, k, ke):
        k(self.value)


@dataclass(eq=False)
class DelayComp(AsyncComp):
    thunk: Closure

    def run(self, interp, k, ke):
        try:
            inner = interp.call_closure(self.thunk, V_UNIT)
            comp = interp.as_comp(inner)
        except RunFailure as exc:
            ke(exc)
            return
        comp.run(interp, k, ke)


@dataclass(eq=False)
class BindComp(AsyncComp):
    source: AsyncComp
    cont: Closure

    def run(self, interp, k, ke):
        def resume(value: Value) -> None:
            interp.sched.schedule(lambda: self._step(interp, value, k, ke))

        # entering through the queue keeps left-nested chains iterative
        interp.sched.schedule(lambda: self.source.run(interp, resume, ke))

    def _step(self, interp, value, k, ke):
        try:
            nxt = interp.call_closure(self.cont, value)
            comp = interp.as_comp(nxt)
        except RunFailure as exc:
            ke(exc)
            return
        comp.run(interp, k, ke)


@dataclass(eq=False)
class ForComp(AsyncComp):
    items: list
    body: Closure

    def run(self, interp, k, ke):
        items = self.items

        def step(index: int) -> None:
            if index >= len(items):
                k(V_UNIT)
                return
            try:
                inner = interp.call_closure(self.body, items[index])
                comp = interp.as_comp(inner)
            except RunFailure as exc:
                ke(exc)
                return
            comp.run(
                interp,
                lambda _v: interp.sched.schedule(lambda: step(index + 1)),
                ke,
            )

        step(0)


@dataclass(eq=False)
class CatchComp(AsyncComp):
    source: AsyncComp
    handler: Closure

    def run(self, interp, k, ke):
        def on_error(exc: RunFailure) -> None:
            try:
                handled = interp.call_closure(self.handler, Value("jsobject", exc))
                comp = interp.as_comp(handled)
            except RunFailure as inner:
                ke(inner)
                return
            comp.run(interp, k, ke)

        self.source.run(interp, k, on_error)


@dataclass(eq=False)
class FetchComp(AsyncComp):
    country: str
    indicator: str
    optional: bool

    def run(self, interp, k, ke):
        interp.sched.trace.append(("fetch", self.country, self.indicator))
        series = world_lookup(interp.world, self.country, self.indicator)

        def deliver() -> None:
            interp.sched.trace.append(("resume", self.country, self.indicator))
            if series is None:
                if self.optional:
                    k(JS_NULL)
                else:
                    ke(
                        RunFailure(
                            "missing-key",
                            f"no data for ({self.country!r}, {self.indicator!r})",
                            (self.country, self.indicator),
                        )
                    )
            else:
                k(series_value(series))

        interp.sched.after(interp.latency, deliver)


def series_value(series) -> Value:
    return Value(
        "list",
        tuple(Value("tuple", (v_int(y), v_float(v))) for y, v in series),
    )


# ---------------------------------------------------------------------------
# recording stub host


class RecordingHost:
    """Imported-object environment: auto-created stubs that record traffic.

    Method calls return the receiver (chainable, jQuery style); calling an
    object (`Invoke`) fabricates a fresh stub. Results for specific method
    names can be overridden; by default `is` answers js-true so checkbox
    style probes succeed deterministically.
    """

    def __init__(self, method_results: dict[str, Value] | None = None) -> None:
        self.globals: dict[str, StubObject] = {}
        self.events: list[tuple] = []
        self._fresh = itertools.count()
        self.method_results = {"is": Value("jsobject", True)}
        if method_results is not None:
            self.method_results.update(method_results)

    def global_ref(self, name: str) -> Value:
        if name not in self.globals:
            self.globals[name] = StubObject(path=name)
        return Value("jsobject", self.globals[name])

    def _fresh_stub(self, path: str) -> Value:
        return Value("jsobject", StubObject(path=f"{path}#{next(self._fresh)}"))

    def prop_get(self, recv: Value, name: str) -> Value:
        stub = self._stub(recv, f"property {name!r}")
        self.events.append(("get", stub.path, name))
        return stub.props.get(name, JS_NULL)

    def prop_set(self, recv: Value, name: str, value: Value) -> Value:
        stub = self._stub(recv, f"property {name!r}")
        stub.props[name] = value
        self.events.append(("set", stub.path, name))
        return V_UNIT

    def call(self, recv: Value, name: str, args: tuple[Value, ...]) -> Value:
        stub = self._stub(recv, f"method {name!r}")
        self.events.append(("call", stub.path, name, len(args)))
        if name in self.method_results:
            return self.method_results[name]
        return Value("jsobject", stub)  # chainable

    def invoke(self, recv: Value, args: tuple[Value, ...]) -> Value:
        stub = self._stub(recv, "invocation")
        self.events.append(("invoke", stub.path, len(args)))
        result = self._fresh_stub(stub.path)
        return result

    def _stub(self, recv: Value, what: str) -> StubObject:
        if recv.tag == "jsobject" and isinstance(recv.payload, StubObject):
            return recv.payload
        raise RunFailure("internal", f"{what} on a non-object value {recv.tag}")


# ---------------------------------------------------------------------------
# interpreter

_CAST_TAGS = {
    C.TInt: "int",
    C.TFloat: "float",
    C.TBool: "bool",
    C.TString: "string",
    C.TUnit: "unit",
    C.TList: "list",
    C.TArray: "array",
    C.TTuple: "tuple",
}


class Interp:
    def __init__(
        self,
        world: WorldSnapshot,
        host: RecordingHost | None = None,
        latency: int = 0,
    ) -> None:
        self.world = world
        self.host = host or RecordingHost()
        self.latency = latency
        self.sched = Scheduler()

    # -- helpers -------------------------------------------------------------

    def call_closure(self, clo: Closure, arg: Value) -> Value:
        frame = Frame(clo.env)
        bind_pattern(frame, clo.param, arg)
        return self.eval(frame, clo.body)

    def as_comp(self, value: Value) -> AsyncComp:
        if value.tag != "pending" or not isinstance(value.payload, AsyncComp):
            raise RunFailure("internal", f"expected an async computation, got {value.tag}")
        return value.payload

    def start_immediate(self, comp: AsyncComp) -> None:
        def boot() -> None:
            comp.run(self, lambda _v: None, self._uncaught)

        self.sched.schedule(boot)
        self.sched.drain_ready()

    def _uncaught(self, exc: RunFailure) -> None:
        raise exc

    def run_to_completion(self, comp: AsyncComp) -> Value:
        done: list = []

        def on_ok(value: Value) -> None:
            done.append(("ok", value))

        def on_err(exc: RunFailure) -> None:
            done.append(("err", exc))

        self.sched.schedule(lambda: comp.run(self, on_ok, on_err))
        self.sched.drain_all()
        if not done:
            raise RunFailure("internal", "async computation never completed")
        kind, payload = done[0]
        if kind == "err":
            raise payload
        return payload

    # -- evaluation ------------------------------------------------------------

    def eval_module(self, module: C.CoreModule, entry: str | None = None) -> Value:
        top = Frame()
        for binding in module.bindings:
            self._eval_binding(top, binding)
        result: Value | None = None
        if entry is not None:
            value = top.lookup(entry)
            if value.tag == "closure":
                value = self.call_closure(value.payload, V_UNIT)  # type: ignore[arg-type]
            result = value
        elif module.entry is not None:
            result = self.eval(top, module.entry)
        else:
            raise RunFailure("internal", "module has no entry expression")
        if result.tag == "pending":
            result = self.run_to_completion(self.as_comp(result))
        return result

    def _eval_binding(self, top: Frame, binding: C.CoreBinding) -> Value:
        if binding.recursive and isinstance(binding.pattern, PVar):
            # the closure's environment must include its own binding
            value = self.eval(top, binding.value)
            top.vars[binding.pattern.name] = value
            if value.tag == "closure":
                value.payload.env = top  # type: ignore[union-attr]
            return value
        value = self.eval(top, binding.value)
        bind_pattern(top, binding.pattern, value)
        return value

    def eval(self, env: Frame, e: C.CoreExpr) -> Value:
        if isinstance(e, C.CLit):
            return self._lit(e.value)
        if isinstance(e, C.CIdent):
            return env.lookup(e.name)
        if isinstance(e, C.CLambda):
            return Value("closure", Closure(e.param, e.body, env))
        if isinstance(e, C.CApp):
            fn = self.eval(env, e.fn)
            arg = self.eval(env, e.arg)
            if fn.tag != "closure":
                raise RunFailure("internal", f"applying a non-function ({fn.tag})")
            return self.call_closure(fn.payload, arg)  # type: ignore[arg-type]
        if isinstance(e, C.CLet):
            frame = Frame(env)
            if e.recursive and isinstance(e.pattern, PVar):
                value = self.eval(frame, e.value)
                frame.vars[e.pattern.name] = value
                if value.tag == "closure":
                    value.payload.env = frame  # type: ignore[union-attr]
            else:
                value = self.eval(env, e.value)
                bind_pattern(frame, e.pattern, value)
            return self.eval(frame, e.body)
        if isinstance(e, C.CSeq):
            self.eval(env, e.first)
            return self.eval(env, e.rest)
        if isinstance(e, C.CIf):
            cond = self.eval(env, e.cond)
            if cond.tag != "bool":
                raise RunFailure("internal", "if condition is not a bool")
            if cond.payload:
                return self.eval(env, e.then)
            if e.orelse is None:
                return V_UNIT
            return self.eval(env, e.orelse)
        if isinstance(e, C.CTuple):
            return Value("tuple", tuple(self.eval(env, i) for i in e.items))
        if isinstance(e, C.CListLit):
            return Value("list", tuple(self.eval(env, i) for i in e.items))
        if isinstance(e, C.CArrayLit):
            return Value("array", [self.eval(env, i) for i in e.items])
        if isinstance(e, C.CFor):
            source = self.eval(env, e.source)
            for item in _iterable(source):
                frame = Frame(env)
                bind_pattern(frame, e.pattern, item)
                self.eval(frame, e.body)
            return V_UNIT
        if isinstance(e, C.CBinOp):
            return self._binop(env, e)
        if isinstance(e, C.CCast):
            return self._cast(self.eval(env, e.operand), e.target)
        if isinstance(e, C.CRuntimeCall):
            return self._runtime_call(env, e)
        if isinstance(e, C.CEmitCall):
            return self._emit_call(env, e)
        if isinstance(e, C.CEmitPropGet):
            if e.is_static:
                return self.host.global_ref(e.name)
            recv = self.eval(env, e.args[0])
            return self.host.prop_get(recv, e.name)
        if isinstance(e, C.CEmitPropSet):
            recv = self.eval(env, e.args[0])
            value = self.eval(env, e.args[1])
            return self.host.prop_set(recv, e.name, value)
        if isinstance(e, C.CJsTemplate):
            return self._js_template(e.text, tuple(self.eval(env, a) for a in e.args))
        if isinstance(e, C.CBuilderOp):
            return self._builder(env, e)
        if isinstance(e, (C.CAsyncBlock, C.CLetBang, C.CReturn, C.CTryWith)):
            raise RunFailure("internal", f"residual async sugar {type(e).__name__}; run the desugarer")
        raise RunFailure("internal", f"unknown core node {type(e).__name__}")

    def _lit(self, value: object) -> Value:
        if value is UNIT:
            return V_UNIT
        if value == JS_UNDEFINED and isinstance(value, str):
            return JS_NULL
        if isinstance(value, bool):
            return v_bool(value)
        if isinstance(value, int):
            return v_int(value)
        if isinstance(value, float):
            return v_float(value)
        if isinstance(value, str):
            return v_str(value)
        raise RunFailure("internal", f"bad literal {value!r}")

    def _binop(self, env: Frame, e: C.CBinOp) -> Value:
        op = e.op
        if op in ("&&", "||"):
            left = self.eval(env, e.left)
            if left.tag != "bool":
                raise RunFailure("internal", "boolean operator on non-bool")
            if op == "&&" and not left.payload:
                return v_bool(False)
            if op == "||" and left.payload:
                return v_bool(True)
            right = self.eval(env, e.right)
            return v_bool(bool(right.payload))
        left = self.eval(env, e.left)
        right = self.eval(env, e.right)
        a, b = left.payload, right.payload
        if op in ("+", "-", "*", "/", "%"):
            if op == "+":
                return v_int(a + b)
            if op == "-":
                return v_int(a - b)
            if op == "*":
                return v_int(a * b)
            if b == 0:
                raise RunFailure("div-zero", "integer division by zero")
            if op == "/":
                return v_int(_trunc_div(a, b))
            return v_int(_trunc_mod(a, b))
        if op in ("+.", "-.", "*.", "/."):
            if op == "+.":
                return v_float(a + b)
            if op == "-.":
                return v_float(a - b)
            if op == "*.":
                return v_float(a * b)
            if b == 0.0:
                raise RunFailure("div-zero", "float division by zero")
            return v_float(a / b)
        if op in ("=", "<>", "<", "<=", ">", ">="):
            table = {
                "=": a == b,
                "<>": a != b,
                "<": a < b,
                "<=": a <= b,
                ">": a > b,
                ">=": a >= b,
            }
            return v_bool(table[op])
        raise RunFailure("internal", f"unknown operator {op!r}")

    def _cast(self, value: Value, target: C.CoreType) -> Value:
        if isinstance(target, C.TObject):
            return value
        if isinstance(target, C.TOption):
            if value.tag == "jsobject" and value.payload is None:
                return value
            return self._cast(value, target.element)
        want = _CAST_TAGS.get(type(target))
        if want is None:
            raise RunFailure("cast", f"cannot cast to {C.type_text(target)}")
        if value.tag == want:
            return value
        if value.tag == "jsobject":
            payload = value.payload
            if want == "bool" and isinstance(payload, bool):
                return v_bool(payload)
            if want == "int" and isinstance(payload, int) and not isinstance(payload, bool):
                return v_int(payload)
            if want == "float" and isinstance(payload, (int, float)) and not isinstance(payload, bool):
                return v_float(float(payload))
            if want == "string" and isinstance(payload, str):
                return v_str(payload)
        raise RunFailure(
            "cast", f"dynamic tag {value.tag!r} does not match cast target {C.type_text(target)}"
        )

    def _runtime_call(self, env: Frame, e: C.CRuntimeCall) -> Value:
        args = [self.eval(env, a) for a in e.args]
        sym = e.symbol
        if sym == "GetCountries":
            return Value("jsobject", WorldHandle())
        if sym == "GetCountry":
            return Value("jsobject", CountryHandle(_string(args[1])))
        if sym in ("GetIndicator", "AsyncGetIndicator", "GetIndicatorOpt"):
            handle = args[0].payload
            if not isinstance(handle, CountryHandle):
                raise RunFailure("internal", "indicator access on a non-country handle")
            code = _string(args[1])
            if sym == "AsyncGetIndicator":
                return Value("pending", FetchComp(handle.code, code, optional=False))
            if sym == "GetIndicatorOpt":
                is_async = len(args) > 2 and args[2].payload is True
                if is_async:
                    return Value("pending", FetchComp(handle.code, code, optional=True))
                self.sched.trace.append(("fetch", handle.code, code))
                series = world_lookup(self.world, handle.code, code)
                return JS_NULL if series is None else series_value(series)
            self.sched.trace.append(("fetch", handle.code, code))
            series = world_lookup(self.world, handle.code, code)
            if series is None:
                raise RunFailure(
                    "missing-key",
                    f"no data for ({handle.code!r}, {code!r})",
                    (handle.code, code),
                )
            return series_value(series)
        if sym == "list_map" or sym == "seq_map":
            clo = _closure(args[0])
            return Value("list", tuple(self.call_closure(clo, i) for i in _iterable(args[1])))
        if sym == "array_ofSeq":
            return Value("array", list(_iterable(args[0])))
        if sym == "unbox_check":
            return args[0]
        if sym in START_PRIMITIVE_SYMBOLS:
            raise RunFailure(
                "internal", f"{sym} reached the interpreter; the translator must reject it"
            )
        raise RunFailure("internal", f"unknown runtime symbol {sym!r}")

    def _emit_call(self, env: Frame, e: C.CEmitCall) -> Value:
        args = tuple(self.eval(env, a) for a in e.args)
        if e.name == "" and not e.is_static:
            return self.host.invoke(args[0], args[1:])
        recv, rest = args[0], args[1:]
        if recv.tag == "array":
            if e.name == "push":
                recv.payload.append(rest[0])  # type: ignore[union-attr]
                return v_int(len(recv.payload))  # type: ignore[arg-type]
            raise RunFailure("internal", f"arrays have no method {e.name!r}")
        return self.host.call(recv, e.name, rest)

    def _js_template(self, text: str, args: tuple[Value, ...]) -> Value:
        if text == "return null;":
            return JS_NULL
        if text == "return {0};":
            return args[0]
        if text == NUMBER_TEMPLATE:
            value = args[0]
            if value.tag == "int" or value.tag == "float":
                return v_float(float(value.payload))  # type: ignore[arg-type]
            if value.tag == "bool":
                return v_float(1.0 if value.payload else 0.0)
            if value.tag == "jsobject" and isinstance(value.payload, (int, float)) and not isinstance(value.payload, bool):
                return v_float(float(value.payload))
            raise RunFailure("js-template", f"cannot coerce {value.tag} to a number")
        if text == ISSOME_TEMPLATE:
            return v_bool(not (args[0].tag == "jsobject" and args[0].payload is None))
        raise RunFailure("js-template", f"no interpretation for template {text!r}")

    def _builder(self, env: Frame, e: C.CBuilderOp) -> Value:
        op = e.op
        if op == "Return":
            return Value("pending", ReturnComp(self.eval(env, e.args[0])))
        if op == "Delay":
            return Value("pending", DelayComp(_closure(self.eval(env, e.args[0]))))
        if op == "Bind":
            source = self.as_comp(self.eval(env, e.args[0]))
            cont = _closure(self.eval(env, e.args[1]))
            return Value("pending", BindComp(source, cont))
        if op == "For":
            items = list(_iterable(self.eval(env, e.args[0])))
            body = _closure(self.eval(env, e.args[1]))
            return Value("pending", ForComp(items, body))
        if op == "Catch":
            source = self.as_comp(self.eval(env, e.args[0]))
            handler = _closure(self.eval(env, e.args[1]))
            return Value("pending", CatchComp(source, handler))
        if op == "StartImmediate":
            self.start_immediate(self.as_comp(self.eval(env, e.args[0])))
            return V_UNIT
        raise RunFailure("internal", f"unknown builder op {op!r}")


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def _trunc_mod(a: int, b: int) -> int:
    return a - _trunc_div(a, b) * b


def _iterable(value: Value):
    if value.tag in ("list", "array"):
        return list(value.payload)  # type: ignore[arg-type]
    raise RunFailure("internal", f"cannot iterate a {value.tag}")


def _closure(value: Value) -> Closure:
    if value.tag != "closure":
        raise RunFailure("internal", f"expected a function, got {value.tag}")
    return value.payload  # type: ignore[return-value]


def _string(value: Value) -> str:
    if value.tag != "string":
        raise RunFailure("internal", f"expected a string, got {value.tag}")
    return value.payload  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# public API


def interpret(
    module: C.CoreModule,
    world: WorldSnapshot,
    entry: str | None = None,
    host: RecordingHost | None = None,
    latency: int = 0,
) -> Value:
    """Evaluate a desugared module; raises RunFailure on runtime failure."""
    return Interp(world, host=host, latency=latency).eval_module(module, entry)


def trace_accessed_pairs(module: C.CoreModule) -> set[tuple[str, str]]:
    """Static over-approximation: every country literal × every indicator literal."""
    countries: set[str] = set()
    indicators: set[str] = set()
    for node in C.walk_module(module):
        if isinstance(node, C.CRuntimeCall) and len(node.args) >= 2:
            arg = node.args[1]
            if isinstance(arg, C.CLit) and isinstance(arg.value, str):
                if node.symbol == "GetCountry":
                    countries.add(arg.value)
                elif node.symbol in ("GetIndicator", "AsyncGetIndicator", "GetIndicatorOpt"):
                    indicators.add(arg.value)
    return {(c, i) for c in countries for i in indicators}


# ---------------------------------------------------------------------------
# value rendering


def value_text(value: Value) -> str:
    if value.tag == "int":
        return str(value.payload)
    if value.tag == "float":
        return repr(value.payload)
    if value.tag == "bool":
        return "true" if value.payload else "false"
    if value.tag == "string":
        escaped = str(value.payload).replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if value.tag == "unit":
        return "()"
    if value.tag == "tuple":
        return "(" + ", ".join(value_text(i) for i in value.payload) + ")"
    if value.tag == "list":
        return "[" + "; ".join(value_text(i) for i in value.payload) + "]"
    if value.tag == "array":
        return "[|" + "; ".join(value_text(i) for i in value.payload) + "|]"
    if value.tag == "closure":
        return "<fun>"
    if value.tag == "pending":
        return "<async>"
    if value.tag == "jsobject":
        if value.payload is None:
            return "<null>"
        if isinstance(value.payload, bool):
            return "<js:true>" if value.payload else "<js:false>"
        if isinstance(value.payload, (int, float, str)):
            return f"<js:{value.payload!r}>"
        return "<obj>"
    return f"<{value.tag}>"


def value_to_jsonable(value: Value):
    """Canonical JSON form for differential comparison with the JS backend."""
    if value.tag in ("int", "float", "bool", "string"):
        return value.payload
    if value.tag == "unit":
        return None
    if value.tag in ("tuple", "list", "array"):
        return [value_to_jsonable(i) for i in value.payload]
    if value.tag == "jsobject" and value.payload is None:
        return None
    raise ValueError(f"value of tag {value.tag!r} has no canonical JSON form")
