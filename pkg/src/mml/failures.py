"""Outcome taxonomy for compile-under-w0 / run-under-w1 experiments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .diagnostics import Diagnostic


@dataclass(frozen=True)
class ProviderFailed:
    """The projection could not run: unreachable source, bad parameters."""

    reason: str

    label = "ProviderFailure"


@dataclass(frozen=True)
class RecompilationFailed:
    """The program no longer compiles against the current world."""

    diagnostics: tuple[Diagnostic, ...]

    label = "RecompilationFailure"


@dataclass(frozen=True)
class RuntimeFailed:
    """Compiled code hit missing data (or another runtime error) under w1."""

    message: str
    missing_key: tuple[str, str] | None = None

    label = "RuntimeFailure"


@dataclass(frozen=True)
class Success:
    value: object  # interp.Value

    label = "Success"


FailureKind = Union[ProviderFailed, RecompilationFailed, RuntimeFailed, Success]
