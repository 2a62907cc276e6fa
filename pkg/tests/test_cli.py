import io
import json

import pytest

from conftest import CORPUS, GOLDEN, LEN_SRC
from crashlens.cli import (
    EXIT_DEFINITE, EXIT_FUEL, EXIT_OK, EXIT_PARSE, EXIT_PROPERTY, EXIT_RUNTIME_ERROR,
    CliConfig, main,
)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return _write


def test_analyze_json_matches_golden(capsys):
    argv = ["analyze", str(CORPUS / "length.lc"), "--json", "-k", "5", "--witness-depth", "2"]
    code, out, _ = run(argv, capsys)
    assert code == EXIT_OK
    assert out == (GOLDEN / "length.json").read_text()
    # byte-stable across runs
    assert run(argv, capsys)[1] == out


def test_analyze_json_schema(capsys):
    code, out, _ = run(["analyze", str(CORPUS / "check_length.lc"), "--json"], capsys)
    records = json.loads(out)
    assert [r["def"] for r in records] == ["len", "check", "main"]
    for r in records:
        assert set(r) == {"def", "type", "crash_condition", "verdict", "k", "witnesses"}
        assert r["verdict"] in ("crash", "no_crash_at_bound", "unknown")
    assert records[-1]["verdict"] == "crash"


def test_analyze_several_files_keyed_by_path(capsys):
    paths = [str(CORPUS / "length.lc"), str(CORPUS / "generator.lc")]
    code, out, _ = run(["analyze", *paths, "--json", "--witness-depth", "1"], capsys)
    assert code == EXIT_OK and list(json.loads(out)) == paths


def test_analyze_human_output(capsys):
    code, out, _ = run(["analyze", str(CORPUS / "length.lc"), "--witness-depth", "1"], capsys)
    assert code == EXIT_OK
    assert "len : [a0,X0]" in out and "witnesses: Zero, int" in out


def test_check_exit_codes(capsys, write):
    assert run(["check", str(CORPUS / "check_length.lc"), "-k", "5"], capsys)[0] == EXIT_DEFINITE
    assert run(["check", str(CORPUS / "check_length.lc"), "-k", "2"], capsys)[0] == EXIT_OK
    assert run(["check", str(CORPUS / "generator.lc")], capsys)[0] == EXIT_DEFINITE
    assert run(["check", str(CORPUS / "length.lc")], capsys)[0] == EXIT_OK
    code, out, _ = run(["check", write("lz.lc", f"let len = {LEN_SRC};\nlen Zero\n")], capsys)
    assert code == EXIT_DEFINITE and "Nil notin Zero" in out
    ok = write("ok.lc", f"let len = {LEN_SRC};\nlen Cons(1, Nil)\n")
    assert run(["check", ok], capsys)[0] == EXIT_OK


def test_check_respects_environment_k(capsys, monkeypatch):
    monkeypatch.setenv("CRASHLENS_K", "2")
    assert run(["check", str(CORPUS / "check_length.lc")], capsys)[0] == EXIT_OK
    monkeypatch.setenv("CRASHLENS_K", "5")
    assert run(["check", str(CORPUS / "check_length.lc")], capsys)[0] == EXIT_DEFINITE


def test_eval_exit_codes(capsys, write):
    code, out, _ = run(["eval", write("ok.lc", "5\n")], capsys)
    assert (code, out) == (EXIT_OK, "5\n")
    code, out, _ = run(["eval", str(CORPUS / "check_length.lc")], capsys)
    assert code == EXIT_RUNTIME_ERROR and out.startswith("error after")
    assert run(["eval", str(CORPUS / "generator.lc"), "--fuel", "500"], capsys)[0] == EXIT_FUEL
    assert run(["eval", str(CORPUS / "length.lc")], capsys)[0] == EXIT_PARSE


def test_parse_errors_report_position(capsys, write):
    path = write("bad.lc", "let x = 1;\nlet y = );\n")
    code, _, err = run(["analyze", path], capsys)
    assert code == EXIT_PARSE
    assert err.startswith(f"{path}:2:9: ")
    code, _, err = run(["check", write("arity.lc", "ctor Pair/2;\nPair(1)\n")], capsys)
    assert code == EXIT_PARSE and ":2:" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(["analyze", str(tmp_path / "nope.lc")], capsys)
    assert code == EXIT_PARSE and "nope.lc" in err


def test_bad_flags():
    with pytest.raises(SystemExit):
        main(["check", "x.lc", "-k", "-1"])
    with pytest.raises(ValueError):
        CliConfig("check", k=-1)
    with pytest.raises(ValueError):
        CliConfig("eval", fuel=0)


def test_fuzz(capsys, tmp_path):
    code, out, _ = run(["fuzz", "--property", "failure", "--property", "roundtrip",
                        "--cases", "50", "--out", str(tmp_path)], capsys)
    assert code == EXIT_OK
    assert out.splitlines() == ["failure: 50 cases, ok", "roundtrip: 50 cases, ok"]


def test_fuzz_failure_writes_repro(capsys, tmp_path, monkeypatch):
    from crashlens import testkit
    monkeypatch.setattr(testkit, "check_roundtrip",
                        lambda e: testkit.Outcome(True, "anything", "broken"))
    code, out, _ = run(["fuzz", "--property", "roundtrip", "--cases", "3",
                        "--out", str(tmp_path)], capsys)
    assert code == EXIT_PROPERTY
    files = sorted(tmp_path.glob("roundtrip-seed*.lc"))
    assert files and files[0].read_text().startswith("-- seed")


def test_check_never_flags_a_terminating_program(tmp_path):
    from crashlens.cli import run as run_cfg
    from crashlens.semantics import Value, evaluate
    from crashlens.syntax import print_expr
    from crashlens.testkit import GenConfig, gen_expr
    for seed in range(150):
        e = gen_expr(GenConfig(seed, 5))
        if not isinstance(evaluate(e, 10_000), Value):
            continue
        path = tmp_path / f"p{seed}.lc"
        path.write_text(print_expr(e) + "\n")
        code = run_cfg(CliConfig("check", [str(path)]), io.StringIO(), io.StringIO())
        assert code == EXIT_OK, print_expr(e)
