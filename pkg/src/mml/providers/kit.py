"""Provider abstraction: lazily materialized type definitions with erasure plans.

A provider turns an external source (world fixture, declaration file) into
a ProvidedContext: a set of type definitions whose member lists are
computed on first touch and memoized, plus root aliases that the type
checker exposes as static type references. Every member carries an
ErasurePlan describing the runtime call or JavaScript operation its uses
compile to.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

from ..coreir import CoreType

# ---------------------------------------------------------------------------
# erasure plans


@dataclass(frozen=True)
class PlanArg:
    """Positional reference into a member use: receiver, argument or literal."""

    kind: str  # recv | arg | lit
    index: int = 0
    literal: object = None


RECV = PlanArg("recv")


def ARG(i: int) -> PlanArg:
    return PlanArg("arg", index=i)


def LIT(value: object) -> PlanArg:
    return PlanArg("lit", literal=value)


@dataclass(frozen=True)
class ErasurePlan:
    pass


@dataclass(frozen=True)
class RuntimeCallPlan(ErasurePlan):
    symbol: str
    args: tuple[PlanArg, ...]


@dataclass(frozen=True)
class EmitCallPlan(ErasurePlan):
    is_static: bool
    member_name: str
    args: tuple[PlanArg, ...]


@dataclass(frozen=True)
class EmitPropertyGetPlan(ErasurePlan):
    is_static: bool
    property_name: str
    args: tuple[PlanArg, ...]


@dataclass(frozen=True)
class EmitPropertySetPlan(ErasurePlan):
    is_static: bool
    property_name: str
    args: tuple[PlanArg, ...]


@dataclass(frozen=True)
class JsTemplatePlan(ErasurePlan):
    text: str
    args: tuple[PlanArg, ...]


# Symbols the reference runtime implements. The JS shim exports the same
# set minus the two start primitives that cannot run there (the translator
# rejects those before emission).
RUNTIME_SYMBOLS = frozenset(
    {
        "cons",
        "nil",
        "list_map",
        "seq_map",
        "array_ofSeq",
        "async_bind",
        "async_return",
        "async_delay",
        "async_for",
        "async_startImmediate",
        "async_catch",
        "GetCountries",
        "GetCountry",
        "GetIndicator",
        "GetIndicatorOpt",
        "AsyncGetIndicator",
        "unbox_check",
        "async_start",
        "async_runSynchronously",
    }
)


def check_plan(plan: ErasurePlan) -> None:
    """RuntimeCall plans must target a symbol the runtime library defines."""
    if isinstance(plan, RuntimeCallPlan) and plan.symbol not in RUNTIME_SYMBOLS:
        raise ProviderFailure(f"erasure plan references unknown runtime symbol {plan.symbol!r}")


# ---------------------------------------------------------------------------
# members and type definitions


@dataclass(frozen=True)
class Param:
    name: str
    ty: CoreType
    optional: bool = False


@dataclass(frozen=True)
class Overload:
    params: tuple[Param, ...]
    result: CoreType

    def required(self) -> int:
        return sum(1 for p in self.params if not p.optional)


@dataclass(frozen=True)
class ProvidedMember:
    name: str
    kind: str  # property | method | invoke | value
    signature: CoreType  # property/value: the member type; method: first overload's fn type
    erasure: ErasurePlan
    overloads: tuple[Overload, ...] = ()
    settable: bool = False
    set_erasure: ErasurePlan | None = None
    scheme_vars: tuple[int, ...] = ()  # quantified type vars (value members only)

    def __post_init__(self) -> None:
        if self.kind in ("method", "invoke") and not self.overloads:
            raise ValueError(f"member {self.name!r} of kind {self.kind} needs overloads")
        seen = set()
        for o in self.overloads:
            key = tuple(p.ty for p in o.params)
            if key in seen:
                raise ValueError(f"member {self.name!r} has duplicate overload {key}")
            seen.add(key)


class ProviderFailure(Exception):
    """The projection itself failed: unreachable source, bad parameters, bugs."""

    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


class ProvidedTypeDef:
    """A named erased type whose member list materializes at most once.

    Materialization is idempotent and guarded per type, so a host that
    type-checks in parallel still sees a single initialization; a failure
    is sticky for the rest of the compilation session.
    """

    def __init__(self, type_id: str, name: str, member_thunk: Callable[[], list[ProvidedMember]]):
        self.type_id = type_id
        self.name = name
        self.is_erased = True
        self._thunk = member_thunk
        self._members: dict[str, ProvidedMember] | None = None
        self._failure: ProviderFailure | None = None
        self._init_lock = threading.Lock()
        self.materialize_count = 0

    def members(self) -> dict[str, ProvidedMember]:
        if self._failure is not None:
            raise self._failure  # sticky within this context
        if self._members is None:
            with self._init_lock:
                if self._failure is not None:
                    raise self._failure
                if self._members is None:
                    self.materialize_count += 1
                    try:
                        members = self._thunk()
                    except ProviderFailure as failure:
                        self._failure = failure
                        raise
                    for m in members:
                        check_plan(m.erasure)
                    self._members = {m.name: m for m in members}
        return self._members

    def member(self, name: str) -> ProvidedMember | None:
        return self.members().get(name)

    def member_names(self) -> list[str]:
        return sorted(self.members())


@dataclass
class ProvidedContext:
    """Everything a set of provider declarations adds to the typing context."""

    types: dict[str, ProvidedTypeDef] = field(default_factory=dict)
    root_aliases: dict[str, str] = field(default_factory=dict)  # alias -> type_id

    def add_type(self, typedef: ProvidedTypeDef) -> None:
        if typedef.type_id in self.types:
            raise ProviderFailure(f"duplicate provided type id {typedef.type_id!r}")
        self.types[typedef.type_id] = typedef

    def get_type(self, type_id: str) -> ProvidedTypeDef | None:
        return self.types.get(type_id)

    def merged_with(self, other: "ProvidedContext") -> "ProvidedContext":
        merged = ProvidedContext(dict(self.types), dict(self.root_aliases))
        for type_id, typedef in other.types.items():
            if type_id in merged.types:
                raise ProviderFailure(f"provided type id {type_id!r} clashes across providers")
            merged.types[type_id] = typedef
        for alias, type_id in other.root_aliases.items():
            if alias in merged.root_aliases:
                raise ProviderFailure(f"provider alias {alias!r} declared twice")
            merged.root_aliases[alias] = type_id
        return merged

    def structural_signature(self) -> dict:
        """Materializes everything; used to compare contexts extensionally."""
        out: dict = {}
        for type_id in sorted(self.types):
            typedef = self.types[type_id]
            out[type_id] = {
                name: (m.kind, repr(m.signature), repr(m.erasure))
                for name, m in sorted(typedef.members().items())
            }
        return out


def lookup_member(ctx: ProvidedContext, type_id: str, member_name: str) -> ProvidedMember | None:
    """Member lookup; triggers at most one materialization of the owning type."""
    typedef = ctx.get_type(type_id)
    if typedef is None:
        return None
    return typedef.member(member_name)


# ---------------------------------------------------------------------------
# registry

ProviderFn = Callable[[str, tuple, object], ProvidedContext]

_REGISTRY: dict[str, ProviderFn] = {}


def register_provider(name: str, fn: ProviderFn) -> None:
    _REGISTRY[name] = fn


def provider_names() -> list[str]:
    return sorted(_REGISTRY)


def instantiate_provider(
    name: str,
    static_params: tuple,
    source: object,
    alias: str | None = None,
) -> ProvidedContext:
    """Run the registered projection. Raises ProviderFailure on any failure."""
    fn = _REGISTRY.get(name)
    if fn is None:
        raise ProviderFailure(f"unknown provider {name!r}")
    return fn(alias or name, static_params, source)
