"""The fixed prelude: module functions, globals, and array members.

Kept deliberately small: every function here must be expressible against
the runtime shim's closed symbol table (or as an inline JS template), so
that any program built from the prelude can run on both backends.

`Async.RunSynchronously` and `Async.Start` type-check but are rejected at
translation time for every current target; only `StartImmediate` can be
mapped onto a single-threaded engine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coreir import (
    BOOL,
    FLOAT,
    INT,
    UNIT_T,
    CoreType,
    Scheme,
    TArray,
    TAsync,
    TFun,
    TList,
    TOption,
    TVar,
)
from .providers.kit import (
    ARG,
    RECV,
    EmitCallPlan,
    ErasurePlan,
    JsTemplatePlan,
    Overload,
    Param,
    PlanArg,
    ProvidedMember,
    RuntimeCallPlan,
)

REST = PlanArg("rest")

NUMBER_TEMPLATE = "return {0}*1.0;"
ISSOME_TEMPLATE = "return {0} !== null;"


@dataclass(frozen=True)
class BuilderPlan(ErasurePlan):
    """Erases to a builder operation node rather than a call or template."""

    op: str
    args: tuple[PlanArg, ...]


@dataclass(frozen=True)
class PreludeValue:
    """A first-class prelude function with its erasure recipe."""

    name: str
    scheme: Scheme
    plan: ErasurePlan
    call_arity: int  # how many arguments the plan consumes when saturated


_A = TVar(0)
_B = TVar(1)


def _fun(*types: CoreType) -> CoreType:
    result = types[-1]
    for t in reversed(types[:-1]):
        result = TFun(t, result)
    return result


PRELUDE_MODULES: dict[str, dict[str, PreludeValue]] = {
    "List": {
        "map": PreludeValue(
            "List.map",
            Scheme((0, 1), _fun(TFun(_A, _B), TList(_A), TList(_B))),
            RuntimeCallPlan("list_map", (ARG(0), ARG(1))),
            2,
        ),
    },
    "Seq": {
        "map": PreludeValue(
            "Seq.map",
            Scheme((0, 1), _fun(TFun(_A, _B), TList(_A), TList(_B))),
            RuntimeCallPlan("seq_map", (ARG(0), ARG(1))),
            2,
        ),
    },
    "Array": {
        "ofSeq": PreludeValue(
            "Array.ofSeq",
            Scheme((0,), _fun(TList(_A), TArray(_A))),
            RuntimeCallPlan("array_ofSeq", (ARG(0),)),
            1,
        ),
    },
    "Async": {
        "StartImmediate": PreludeValue(
            "Async.StartImmediate",
            Scheme((0,), _fun(TAsync(_A), UNIT_T)),
            BuilderPlan("StartImmediate", (ARG(0),)),
            1,
        ),
        "RunSynchronously": PreludeValue(
            "Async.RunSynchronously",
            Scheme((0,), _fun(TAsync(_A), _A)),
            RuntimeCallPlan("async_runSynchronously", (ARG(0),)),
            1,
        ),
        "Start": PreludeValue(
            "Async.Start",
            Scheme((0,), _fun(TAsync(_A), UNIT_T)),
            RuntimeCallPlan("async_start", (ARG(0),)),
            1,
        ),
    },
    "Option": {
        "isSome": PreludeValue(
            "Option.isSome",
            Scheme((0,), _fun(TOption(_A), BOOL)),
            JsTemplatePlan(ISSOME_TEMPLATE, (ARG(0),)),
            1,
        ),
    },
}

PRELUDE_GLOBALS: dict[str, PreludeValue] = {
    "number": PreludeValue(
        "number",
        Scheme((0,), _fun(_A, FLOAT)),
        JsTemplatePlan(NUMBER_TEMPLATE, (ARG(0),)),
        1,
    ),
}

START_PRIMITIVE_SYMBOLS = ("async_runSynchronously", "async_start")


def array_member(element: CoreType, name: str) -> ProvidedMember | None:
    """Members available on every array type (JS-array extensions)."""
    if name == "push":
        return ProvidedMember(
            name="push",
            kind="method",
            signature=INT,
            erasure=EmitCallPlan(False, "push", (RECV, REST)),
            overloads=(Overload((Param("item", element),), INT),),
        )
    return None


def is_prelude_module(name: str) -> bool:
    return name in PRELUDE_MODULES


def prelude_module_member(module: str, name: str) -> PreludeValue | None:
    return PRELUDE_MODULES.get(module, {}).get(name)


def prelude_global(name: str) -> PreludeValue | None:
    return PRELUDE_GLOBALS.get(name)
