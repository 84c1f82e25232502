"""Command-line entry point.

Exit codes: 0 success, 1 parse/type errors, 2 runtime failure, 3 provider
failure. Diagnostics print one per line as `code span message`.
"""

from __future__ import annotations

import argparse
import os
import sys

from .compiler import CompileError, compile_file
from .coreir import TNamed, dump_module, type_text
from .failures import ProviderFailed, RecompilationFailed, RuntimeFailed
from .harness import classify, safety_suite
from .interp import RunFailure, interpret, value_text
from .jsbackend import EmitError, emit_module
from .providers.kit import ProvidedContext, ProviderFailure, instantiate_provider
from .server import serve_world
from .world import FileWorldSource, WorldLoadError, load_world

EXIT_OK = 0
EXIT_COMPILE = 1
EXIT_RUNTIME = 2
EXIT_PROVIDER = 3


def _print_diags(diags) -> None:
    for d in diags:
        print(d.render(), file=sys.stderr)


def _cmd_check(args) -> int:
    try:
        compile_file(args.program, args.world, args.dts_dir)
    except CompileError as exc:
        _print_diags(exc.diagnostics)
        return EXIT_COMPILE
    except ProviderFailure as exc:
        print(f"provider failure: {exc.reason}", file=sys.stderr)
        return EXIT_PROVIDER
    return EXIT_OK


def _cmd_compile(args) -> int:
    try:
        compiled = compile_file(args.program, args.world, args.dts_dir, target=args.target)
    except CompileError as exc:
        _print_diags(exc.diagnostics)
        return EXIT_COMPILE
    except ProviderFailure as exc:
        print(f"provider failure: {exc.reason}", file=sys.stderr)
        return EXIT_PROVIDER
    if args.dump_core:
        sys.stdout.write(dump_module(compiled.core))
        if not args.output:
            return EXIT_OK
    if args.target != "js":
        print(f"unknown target {args.target!r}", file=sys.stderr)
        return EXIT_COMPILE
    try:
        doc = emit_module(compiled.core, include_entry=not args.no_entry)
    except EmitError as exc:
        _print_diags([exc.diagnostic])
        return EXIT_COMPILE
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(doc.source_text)
    elif not args.dump_core:
        sys.stdout.write(doc.source_text)
    return EXIT_OK


def _cmd_run(args) -> int:
    try:
        compiled = compile_file(args.program, args.world, args.dts_dir)
    except CompileError as exc:
        _print_diags(exc.diagnostics)
        return EXIT_COMPILE
    except ProviderFailure as exc:
        print(f"provider failure: {exc.reason}", file=sys.stderr)
        return EXIT_PROVIDER
    try:
        world = load_world(args.world) if args.world else _empty_world()
    except WorldLoadError as exc:
        print(f"provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    try:
        value = interpret(compiled.core, world, entry=args.entry)
    except RunFailure as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(value_text(value))
    return EXIT_OK


def _empty_world():
    from .world import make_snapshot

    return make_snapshot([], [], {})


def _resolve_path(ctx: ProvidedContext, alias: str, path: str, start: str) -> str | None:
    """Walk a dotted member path (backticks allowed) to a provided type id."""
    segments: list[str] = []
    buf, i, text = "", 0, path
    while i < len(text):
        ch = text[i]
        if ch == "`":
            j = text.index("`", i + 1)
            buf += text[i + 1 : j]
            i = j + 1
        elif ch == ".":
            segments.append(buf)
            buf = ""
            i += 1
        else:
            buf += ch
            i += 1
    if buf:
        segments.append(buf)
    if segments and segments[0] == alias:
        segments = segments[1:]
    type_id = start
    for segment in segments:
        typedef = ctx.get_type(type_id)
        member = typedef.member(segment) if typedef else None
        if member is None:
            print(f"no member {segment!r} on {type_id}", file=sys.stderr)
            return None
        if not isinstance(member.signature, TNamed):
            print(f"member {segment!r} is a leaf of type {type_text(member.signature)}", file=sys.stderr)
            return None
        type_id = member.signature.type_id
    return type_id


def _cmd_inspect(args) -> int:
    try:
        if args.provider == "WorldBankData":
            params = []
            if args.asynchronous:
                params.append(("Asynchronous", True))
            source = FileWorldSource(args.world) if args.world else None
            alias = args.alias or "WorldBankData"
            ctx = instantiate_provider("WorldBankData", tuple(params), source, alias=alias)
            path = args.arg or args.path or ""
            start = f"{alias}.DataContext"  # members are explored from the data context
        elif args.provider == "TypeScript":
            if not args.arg:
                print("usage: inspect TypeScript <file.d.ts> [path]", file=sys.stderr)
                return EXIT_COMPILE
            alias = args.alias or os.path.basename(args.arg).split(".")[0]
            ctx = instantiate_provider(
                "TypeScript", ((None, args.arg),), args.dts_dir or ".", alias=alias
            )
            path = args.path or ""
            start = ctx.root_aliases[alias]
        else:
            print(f"unknown provider {args.provider!r}", file=sys.stderr)
            return EXIT_COMPILE
    except ProviderFailure as exc:
        print(f"provider failure: {exc.reason}", file=sys.stderr)
        return EXIT_PROVIDER

    type_id = _resolve_path(ctx, alias, path, start) if path else start
    if type_id is None:
        return EXIT_COMPILE
    typedef = ctx.get_type(type_id)
    try:
        names = typedef.member_names()
    except ProviderFailure as exc:
        print(f"provider failure: {exc.reason}", file=sys.stderr)
        return EXIT_PROVIDER
    for name in names:
        member = typedef.member(name)
        if member.kind in ("method", "invoke"):
            for overload in member.overloads:
                params_text = ", ".join(
                    f"{p.name}{'?' if p.optional else ''}: {type_text(p.ty)}" for p in overload.params
                )
                print(f"{name}({params_text}) : {type_text(overload.result)}")
        else:
            print(f"{name} : {type_text(member.signature)}")
    return EXIT_OK


def _cmd_harness_classify(args) -> int:
    with open(args.program, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        w1 = load_world(args.w1)
    except WorldLoadError as exc:
        print(f"cannot load w1: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    outcome = classify(
        text,
        FileWorldSource(args.w0) if args.w0 else None,
        w1,
        dts_dir=args.dts_dir or os.path.dirname(os.path.abspath(args.program)),
    )
    print(outcome.label)
    if isinstance(outcome, RecompilationFailed):
        _print_diags(outcome.diagnostics)
    if isinstance(outcome, (ProviderFailed, RuntimeFailed)) and getattr(outcome, "reason", None):
        print(outcome.reason, file=sys.stderr)
    return EXIT_OK


def _cmd_harness_safety(args) -> int:
    report = safety_suite(trials=args.trials, seed=args.seed)
    print(
        f"trials={report.trials} checked={report.checked} vacuous={report.vacuous} "
        f"adversarial={report.adversarial} counterexamples={len(report.counterexamples)} "
        f"elapsed={report.elapsed:.2f}s"
    )
    for ce in report.counterexamples:
        print(f"counterexample: {ce}")
    return EXIT_OK if report.ok() else EXIT_COMPILE


def _cmd_serve_world(args) -> int:
    try:
        snapshot = load_world(args.world)
    except WorldLoadError as exc:
        print(f"provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    print(f"serving world fixture on http://127.0.0.1:{args.port}", file=sys.stderr)
    try:
        serve_world(snapshot, args.port, verbose=True)
    except OSError as exc:
        print(f"cannot bind port {args.port}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mml", description="mini-ML web toolchain")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--world", help="world fixture JSON (data provider source)")
        p.add_argument("--dts-dir", help="directory for .d.ts static parameters")

    p = sub.add_parser("check", help="parse and type-check a program")
    p.add_argument("program")
    common(p)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("compile", help="compile a program to JavaScript")
    p.add_argument("program")
    p.add_argument("--target", default="js")
    p.add_argument("-o", "--output")
    p.add_argument("--no-entry", action="store_true", help="suppress the entry invocation")
    p.add_argument("--dump-core", action="store_true", help="print the erased core IR")
    common(p)
    p.set_defaults(fn=_cmd_compile)

    p = sub.add_parser("run", help="interpret a program over a world fixture")
    p.add_argument("program")
    p.add_argument("--entry", help="run this binding instead of the module entry")
    common(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("inspect", help="list provided members at a path")
    p.add_argument("provider", help="WorldBankData or TypeScript")
    p.add_argument("arg", nargs="?", help="TypeScript: the .d.ts file; WorldBankData: member path")
    p.add_argument("path", nargs="?", help="dotted member path")
    p.add_argument("--alias", help="alias for the provided root type")
    p.add_argument("--asynchronous", action="store_true", help="WorldBankData Asynchronous=true")
    common(p)
    p.set_defaults(fn=_cmd_inspect)

    p = sub.add_parser("harness", help="failure-taxonomy and safety experiments")
    hsub = p.add_subparsers(dest="harness_command", required=True)
    pc = hsub.add_parser("classify", help="compile under w0, run under w1, print the outcome")
    pc.add_argument("--program", required=True)
    pc.add_argument("--w0", help="compile-time world fixture (omit for an unavailable source)")
    pc.add_argument("--w1", required=True, help="run-time world fixture")
    pc.add_argument("--dts-dir")
    pc.set_defaults(fn=_cmd_harness_classify)
    ps = hsub.add_parser("safety", help="randomized containment-safety trials")
    ps.add_argument("--trials", type=int, default=1000)
    ps.add_argument("--seed", type=int, default=20260810)
    ps.set_defaults(fn=_cmd_harness_safety)

    p = sub.add_parser("serve-world", help="serve a world fixture over HTTP")
    p.add_argument("world")
    p.add_argument("--port", type=int, default=8731)
    p.set_defaults(fn=_cmd_serve_world)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
