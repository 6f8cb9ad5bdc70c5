import json

import pytest

from kkfilt import catalog, cli
from kkfilt.catalog import CATALOG, cases
from kkfilt.expr import ParseError
from kkfilt.jobs import execute, parse_input, parse_jobs, tokenize
from kkfilt.tower import DirectTower


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tokenize_respects_brackets():
    toks = tokenize("uct-report K0A=prufer(3) K1B=InfSum(3; n)  --window 8")
    assert [t for t, _ in toks] == ["uct-report", "K0A=prufer(3)", "K1B=InfSum(3; n)",
                                    "--window", "8"]
    assert toks[2][1] == 25


def test_parse_input_examples():
    job = parse_input("fg-hom Z/4 Z/6")
    assert job.command == "fg-hom" and str(job.get("arg0")) == "Z/4"
    job = parse_input("pext --tower prufer(2) --target InfSum(2; n) --window 8 --strict")
    assert isinstance(job.get("--tower"), DirectTower) and job.window == 8 and job.strict
    job = parse_input("diagram-check K0A=Z/2 K1A=0 K0B=Z/2 K1B=0 --degree 1")
    assert job.get("--degree") == 1 and job.get("data").finite_model
    assert parse_input("catalog-run remark24").get("arg0") == "remark24"


@pytest.mark.parametrize("line,col", [
    ("fg-hom Z/4 Z/", 14),
    ("nosuch Z", 1),
    ("pext --tower prufer(4) --target Z", 14),
    ("uct-report K0A=Z K1A=0 K0B=Z", None),
    ("uct-report K0A=Z K1A=0 K0B=Z K1B=0 K2B=0", 36),
    ("catalog-run nothing", 13),
    ("pext --tower prufer(2) --target Z --window 4 --truncation 2", None),
])
def test_parse_errors_have_columns(line, col):
    with pytest.raises(ParseError) as info:
        parse_input(line)
    assert info.value.column >= 1
    if col is not None:
        assert info.value.column == col, str(info.value)


def test_catalog_jobs_roundtrip():
    for name in CATALOG:
        for case in cases(name):
            job = parse_input(case.job)
            assert parse_input(job.to_text()) == job, case.job


def test_json_is_deterministic():
    for line in ("fg-ext Z/4 Z/6", "pext --tower prufer(2) --target InfSum(2; n)",
                 "uct-report K0A=elementary(2,1) K1A=0 K0B=Z/2 K1B=0"):
        a = cli.render_json(execute(parse_input(line)))
        b = cli.render_json(execute(parse_input(line)))
        assert a == b
        assert json.loads(a)["schema"] == 1


def test_exit_ok_and_json(capsys):
    code, out, err = run(capsys, "fg-ext", "Z/4", "Z/6")
    assert code == 0 and not err
    rep = json.loads(out)
    assert rep["command"] == "fg-ext" and rep["result"]["result"]["value"] == "Z/2"


def test_exit_parse_error(capsys):
    code, out, err = run(capsys, "fg-hom", "Z/4", "Z/")
    assert code == 1 and "column" in err and not out
    assert run(capsys)[0] == 1
    assert run(capsys, "--help")[0] == 0


def test_exit_strict_inconclusive(capsys):
    argv = ["pext", "--tower", "prufer(2)", "--target", "InfSum(2; n)", "--window", "1"]
    assert run(capsys, *argv)[0] == 0
    assert run(capsys, *argv, "--strict")[0] == 2


def test_exit_mismatch(capsys, monkeypatch):
    bad = catalog.CatalogCase("fg-hom Z/4 Z/6", {"result.value": "Z/3"})
    monkeypatch.setitem(catalog.CATALOG, "remark24", lambda: [bad])
    code, out, _ = run(capsys, "catalog-run", "remark24")
    assert code == 3 and json.loads(out)["result"]["ok"] is False


def test_exit_io(capsys, tmp_path):
    code, _, err = run(capsys, "fg-hom", "Z/4", "Z/6", "--out", str(tmp_path / "no" / "x.json"))
    assert code == 4 and "cannot write" in err
    assert run(capsys, "--file", str(tmp_path / "missing.txt"))[0] == 4


def test_out_and_summary(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, err = run(capsys, "pext", "--tower", "elementary(2,1)", "--target", "Z",
                         "--summary", "--out", str(path))
    assert code == 0 and "pext" in out and "verdict" in out
    assert json.loads(path.read_text())["result"]["pext"]["verdict"] == "Zero"
    code, out, err = run(capsys, "fg-hom", "Z/4", "Z/6", "--summary")
    assert json.loads(out)["command"] == "fg-hom" and "fg-hom" in err


def test_jobs_file(capsys, tmp_path):
    jobs = tmp_path / "jobs.txt"
    jobs.write_text("# two jobs\nfg-hom Z/4 Z/6\n\nfg-ext Z/2 Z  # trailing comment\n")
    assert [j.line_no for j in parse_jobs(jobs.read_text())] == [2, 4]
    out_path = tmp_path / "out.json"
    code, _, _ = run(capsys, "--file", str(jobs), "--out", str(out_path))
    reps = json.loads(out_path.read_text())["jobs"]
    assert code == 0 and [r["line"] for r in reps] == [2, 4]
    jobs.write_text("fg-hom Z/4\n")
    assert run(capsys, "--file", str(jobs))[0] == 1


def test_catalog_run_command(capsys):
    code, out, _ = run(capsys, "catalog-run", "remark46")
    rep = json.loads(out)
    assert code == 0 and rep["result"]["ok"] and rep["result"]["catalog"] == "remark46"
