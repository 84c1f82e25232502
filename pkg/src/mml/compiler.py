"""Front-to-back compilation driver shared by the CLI and the harness."""

from __future__ import annotations

import os
from dataclasses import dataclass

from .asyncpass import desugar_async, validate_start_primitives
from .coreir import CoreModule, check_desugared
from .diagnostics import Diagnostic
from .erase import erase_module
from .parser import ParseError, parse_module
from .providers.kit import ProvidedContext, ProviderFailure, instantiate_provider
from .surface import SourceModule
from .typecheck import CheckError, TypedModule, typecheck_module
from .world import FileWorldSource, WorldSource


class CompileError(Exception):
    """Parse or type diagnostics; distinct from provider failures."""

    def __init__(self, diagnostics: list[Diagnostic]) -> None:
        super().__init__(diagnostics[0].message if diagnostics else "compile error")
        self.diagnostics = diagnostics


@dataclass
class Compiled:
    source: SourceModule
    typed: TypedModule
    core: CoreModule  # desugared, start-validated
    context: ProvidedContext


def build_context(
    module: SourceModule,
    world_source: WorldSource | None,
    dts_dir: str | None,
) -> ProvidedContext:
    """Instantiate every declared provider and merge the contexts."""
    merged = ProvidedContext()
    for decl in module.provider_decls:
        if decl.provider == "WorldBankData":
            source: object = world_source
        elif decl.provider == "TypeScript":
            source = dts_dir or "."
        else:
            source = None
        ctx = instantiate_provider(decl.provider, decl.static_params, source, alias=decl.alias)
        merged = merged.merged_with(ctx)
    return merged


def compile_source(
    text: str,
    world_source: WorldSource | None = None,
    dts_dir: str | None = None,
    target: str = "interp",
) -> Compiled:
    """Raises ParseError/CompileError for user errors, ProviderFailure for π failures."""
    try:
        module = parse_module(text)
    except ParseError as exc:
        raise CompileError(exc.diagnostics) from exc
    ctx = build_context(module, world_source, dts_dir)
    try:
        typed = typecheck_module(module, ctx)
    except CheckError as exc:
        raise CompileError(exc.diagnostics) from exc
    core = desugar_async(erase_module(typed))
    residue = check_desugared(core)
    if residue:
        raise ProviderFailure("internal: " + "; ".join(residue))
    start_diags = validate_start_primitives(core, target)
    if start_diags:
        raise CompileError(start_diags)
    return Compiled(source=module, typed=typed, core=core, context=ctx)


def compile_file(
    path: str,
    world_path: str | None = None,
    dts_dir: str | None = None,
    target: str = "interp",
) -> Compiled:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    world = FileWorldSource(world_path) if world_path else None
    base = dts_dir if dts_dir is not None else os.path.dirname(os.path.abspath(path))
    return compile_source(text, world, base, target)
