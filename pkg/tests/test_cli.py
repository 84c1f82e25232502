import json
import urllib.request

import pytest

from mml.cli import main
from mml.server import WorldServer

from .conftest import FIXTURES, fixture_path


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


WORLD = fixture_path("world_default.json")


def test_check_ok(capsys):
    code, _, _ = run_cli(capsys, "check", fixture_path("case_study.mml"), "--world", WORLD)
    assert code == 0


def test_check_type_error_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.mml"
    bad.write_text('do 1 + "x"')
    code, _, err = run_cli(capsys, "check", str(bad))
    assert code == 1
    line = err.strip().splitlines()[0]
    code_part, span_part, *_ = line.split(" ")
    assert code_part == "type.mismatch"
    assert "-" in span_part


def test_check_provider_failure_exit_3(capsys):
    code, _, err = run_cli(
        capsys, "check", fixture_path("case_study.mml"), "--world", "/missing.json"
    )
    assert code == 3
    assert "provider failure" in err


def test_run_prints_value(capsys):
    code, out, _ = run_cli(capsys, "run", fixture_path("intdiv.mml"), "--world", WORLD)
    assert code == 0
    assert out.strip() == "(0, 3, -3, 1, 21.0)"


def test_run_runtime_failure_exit_2(tmp_path, capsys):
    w1 = tmp_path / "w1.json"
    world = json.load(open(WORLD))
    world["values"] = [v for v in world["values"] if v["country"] != "CZE"]
    w1.write_text(json.dumps(world))
    code, _, err = run_cli(
        capsys, "run", fixture_path("first_year.mml"), "--world", str(w1)
    )
    assert code == 2
    assert "runtime failure" in err


def test_run_entry_flag(tmp_path, capsys):
    p = tmp_path / "p.mml"
    p.write_text("let answer = fun () -> 41 + 1\ndo 0")
    code, out, _ = run_cli(capsys, "run", str(p), "--entry", "answer")
    assert code == 0 and out.strip() == "42"


def test_compile_writes_js(tmp_path, capsys):
    out_file = tmp_path / "out.js"
    code, _, _ = run_cli(
        capsys, "compile", fixture_path("intdiv.mml"), "--world", WORLD, "-o", str(out_file)
    )
    assert code == 0
    text = out_file.read_text()
    assert "mmlrt.js" in text and "var __entry" in text


def test_compile_no_entry(tmp_path, capsys):
    out_file = tmp_path / "out.js"
    run_cli(capsys, "compile", fixture_path("intdiv.mml"), "-o", str(out_file), "--no-entry")
    assert "__entry" not in out_file.read_text()


def test_compile_dump_core(capsys):
    code, out, _ = run_cli(capsys, "compile", fixture_path("erasure_data.mml"), "--world", WORLD, "--dump-core")
    assert code == 0
    assert 'GetCountry("CZE")' in out


def test_compile_rejects_bad_start(tmp_path, capsys):
    p = tmp_path / "p.mml"
    p.write_text("let a = async { return 1 }\ndo Async.RunSynchronously a")
    code, _, err = run_cli(capsys, "compile", str(p), "-o", str(tmp_path / "o.js"))
    assert code == 1
    assert "async.unsupported-start" in err


def test_inspect_worldbank_countries(capsys):
    code, out, _ = run_cli(capsys, "inspect", "WorldBankData", "Countries", "--world", WORLD)
    assert code == 0
    names = [line.split(" : ")[0] for line in out.strip().splitlines()]
    assert names == ["Czech Republic", "European Union", "United Kingdom", "United States"]


def test_inspect_typescript_invoke(capsys):
    code, out, _ = run_cli(
        capsys, "inspect", "TypeScript", "jquery.d.ts", "j.jQuery", "--dts-dir", FIXTURES, "--alias", "j"
    )
    assert code == 0
    assert out.startswith("Invoke(")


def test_inspect_missing_world_exit_3(capsys):
    code, _, err = run_cli(capsys, "inspect", "WorldBankData", "--world", "/gone.json")
    assert code == 3
    assert "provider failure" in err


def test_harness_classify_cli(capsys, tmp_path):
    code, out, _ = run_cli(
        capsys,
        "harness",
        "classify",
        "--program",
        fixture_path("first_year.mml"),
        "--w0",
        WORLD,
        "--w1",
        WORLD,
    )
    assert code == 0 and out.strip() == "Success"

    code, out, _ = run_cli(
        capsys,
        "harness",
        "classify",
        "--program",
        fixture_path("first_year.mml"),
        "--w1",
        WORLD,
    )
    assert out.strip().splitlines()[0] == "ProviderFailure"


def test_harness_safety_cli(capsys):
    code, out, _ = run_cli(capsys, "harness", "safety", "--trials", "25", "--seed", "5")
    assert code == 0
    assert "counterexamples=0" in out


def test_serve_world_endpoints(world_default):
    server = WorldServer(world_default, 0)
    server.start_background()
    try:
        base = f"http://127.0.0.1:{server.port}"
        with urllib.request.urlopen(f"{base}/world/countries") as resp:
            countries = json.load(resp)
        assert {"code": "CZE", "name": "Czech Republic"} in countries

        with urllib.request.urlopen(
            f"{base}/world/values?country=CZE&indicator=SE.TER.ENRR"
        ) as resp:
            series = json.load(resp)
        assert series[0] == [2000, 28.79]

        with pytest.raises(urllib.error.HTTPError) as exc:
            urllib.request.urlopen(f"{base}/world/values?country=XXX&indicator=SE.TER.ENRR")
        assert exc.value.code == 404

        assert ("CZE", "SE.TER.ENRR") in server.access_log
        assert ("XXX", "SE.TER.ENRR") in server.access_log
    finally:
        server.shutdown()


def test_readme_example_compiles_and_runs(tmp_path, capsys):
    # keep the README's language tour honest
    import re

    readme = open(fixture_path("../README.md")).read()
    block = re.search(r"```fsharp\n(.*?)```", readme, re.S).group(1)
    program = tmp_path / "tour.mml"
    program.write_text(block)
    code, out, err = run_cli(capsys, "run", str(program), "--world", WORLD, "--dts-dir", FIXTURES)
    assert code == 0, err
    assert out.startswith('[|("Czech Republic"')


def test_run_entry_async_binding(tmp_path, capsys):
    p = tmp_path / "p.mml"
    p.write_text("let task = fun () -> async { return 6 * 7 }\ndo 0")
    code, out, _ = run_cli(capsys, "run", str(p), "--entry", "task")
    assert code == 0 and out.strip() == "42"
