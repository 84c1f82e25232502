"""Source spans and diagnostics shared by every pass.

Spans are byte offsets (start, end) into the original UTF-8 text, so they
stay stable regardless of how a host tool decodes the file.

Diagnostic codes form a closed set, documented in DIAGNOSTIC_CODES below.
Passes must not invent codes outside this table.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span ({self.start}, {self.end})")

    def __str__(self) -> str:
        return f"{self.start}-{self.end}"


NO_SPAN = SourceSpan(0, 0)


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: SourceSpan

    def __post_init__(self) -> None:
        if self.code not in DIAGNOSTIC_CODES:
            raise ValueError(f"unknown diagnostic code {self.code!r}")

    def render(self) -> str:
        """One-line form used by the CLI: `code span message`."""
        return f"{self.code} {self.span} {self.message}"


def error(code: str, message: str, span: SourceSpan = NO_SPAN) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span)


def warning(code: str, message: str, span: SourceSpan = NO_SPAN) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, span)


# The documented closed set of diagnostic codes.
DIAGNOSTIC_CODES: dict[str, str] = {
    # world fixtures
    "world.dup-country": "duplicate country code in world fixture",
    "world.dup-indicator": "duplicate indicator code in world fixture",
    "world.dangling-key": "value entry references an undeclared country or indicator",
    # parsing
    "parse.unexpected": "unexpected token",
    "parse.unterminated-string": "string literal is not terminated",
    "parse.bad-static-param": "malformed static parameter list",
    "parse.letbang-outside-async": "let! is only legal inside an async block",
    "parse.return-outside-async": "return is only legal inside an async block",
    "parse.try-outside-async": "try/with is only legal inside an async block",
    "parse.return-not-last": "return must be the last item of its block",
    "parse.bad-number": "malformed numeric literal",
    "parse.named-arg-order": "named arguments must follow all positional arguments",
    # TypeScript declaration import
    "dts.unsupported": "declaration construct outside the supported subset",
    "dts.dangling-ref": "type reference to an undeclared interface",
    "dts.lex": "lexical error in declaration file",
    "dts.constant-overload": "constant-specialised overload collapsed to its general signature",
    # type checking
    "type.unknown-ident": "unbound identifier",
    "type.mismatch": "type mismatch",
    "type.occurs": "occurs-check failure (infinite type)",
    "type.member-not-found": "receiver type has no such member",
    "type.member-unresolved-receiver": "receiver type must be known before member access",
    "type.overload-ambiguous": "more than one overload matches",
    "type.overload-none": "no overload accepts these arguments",
    "type.member-not-callable": "member is a property, not a method",
    "type.member-not-value": "method member must be called, not read",
    "type.member-not-settable": "member cannot be assigned",
    "type.redundant-unbox": "unbox applied to an expression that is not obj-typed",
    "type.static-type-as-value": "type alias used where a value is expected",
    "type.named-args-not-supported": "named arguments are only valid on imported methods",
    # async desugaring / start primitives
    "async.unsupported-start": "only StartImmediate can start an async computation on this target",
    "async.stray-sugar": "async sugar survived outside an async block",
    # backend
    "emit.unresolved-symbol": "runtime symbol is not provided by the JavaScript shim",
    "emit.residual-member": "provided member survived erasure",
}
