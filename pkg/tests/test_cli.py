import csv
import io

import pytest

from stquad.cli import EXIT_NO_RULE, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAIL, run
from stquad.duffy import duffy_rule
from stquad.rules import RULES_ENV, get_rule, read_rule, write_rule


@pytest.fixture(autouse=True)
def _no_env(monkeypatch):
    monkeypatch.delenv(RULES_ENV, raising=False)


def test_sequences(capsys):
    assert run(["sequences", "--dim", "3", "--variant", "b"]) == EXIT_OK
    assert capsys.readouterr().out.split() == ["111", "110", "101", "011"]


def test_sequences_bad_dim(capsys):
    assert run(["sequences", "--dim", "9"]) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: ")


def test_decomps(capsys):
    assert run(["decomps", "--element", "pentatope", "--points", "61"]) == EXIT_OK
    out = capsys.readouterr()
    lines = out.out.splitlines()
    assert len(lines) == 24 and "S1^1 S2^12" in lines
    assert "24" in out.err


def test_verify_pass_and_fail(capsys):
    assert run(["verify", "--rule", "rules/pentatope/9-151.txt"]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out
    assert run(["verify", "--rule", "rules/pentatope/9-151.txt", "--strength", "10"]) == EXIT_VERIFY_FAIL
    assert "FAIL" in capsys.readouterr().out


def test_verify_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("pentatope 2 5 1\n2 oops 0.1\n")
    assert run(["verify", "--rule", str(bad)]) == EXIT_VERIFY_FAIL
    assert "line 2" in capsys.readouterr().err


def test_verify_missing_file(capsys):
    assert run(["verify", "--rule", "nowhere/1-1.txt"]) == EXIT_USAGE


@pytest.mark.parametrize("argv", [[], ["bogus"], ["decomps", "--element", "cube", "--points", "5"],
                                  ["decomps", "--points", "5"], ["exactness", "--element", "pentatope"]])
def test_usage_errors(argv, capsys):
    assert run(argv) == EXIT_USAGE
    assert capsys.readouterr().err.startswith("error: usage")


def test_generate_writes_rule(tmp_path, capsys):
    out = tmp_path / "r.txt"
    code = run(["generate", "--element", "tetprism", "--strength", "2", "--points", "6",
                "--seed", "0", "--starts", "8", "--out", str(out)])
    assert code == EXIT_OK
    rule = read_rule(out)
    assert rule.n_points == 6
    assert run(["verify", "--rule", str(out)]) == EXIT_OK


def test_generate_default_path(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert run(["generate", "--element", "pentatope", "--strength", "2", "--points", "5"]) == EXIT_OK
    assert (tmp_path / "rules" / "pentatope" / "2-5.txt").exists()


def test_generate_no_rule(capsys):
    code = run(["generate", "--element", "pentatope", "--strength", "4", "--points", "5",
                "--starts", "2", "--max-iterations", "20"])
    assert code == EXIT_NO_RULE
    assert "best_residual" in capsys.readouterr().out


def test_exactness_csv(tmp_path):
    out = tmp_path / "e.csv"
    assert run(["exactness", "--element", "pentatope", "--strengths", "9", "--p-max", "10",
                "--out", str(out)]) == EXIT_OK
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 11
    assert float(rows[9]["percent_error"]) <= 1e-12 and float(rows[10]["percent_error"]) > 1e-10


def test_exactness_deterministic(capsys):
    argv = ["exactness", "--element", "tesseract", "--strengths", "3", "--p-max", "4"]
    run(argv)
    a = capsys.readouterr().out
    run(argv)
    assert capsys.readouterr().out == a


def test_convergence_csv(capsys):
    code = run(["convergence", "--element", "tesseract", "--strengths", "3", "--function", "f3",
                "--m", "1", "2", "3"])
    assert code == EXIT_OK
    out = capsys.readouterr()
    rows = list(csv.reader(io.StringIO(out.out)))
    assert rows[0][:3] == ["element", "strength", "p_or_m"] and len(rows) == 4
    assert "slope=" in out.err


def test_export_duffy(tmp_path, capsys):
    out = tmp_path / "d.txt"
    assert run(["export-duffy", "--element", "pentatope", "--axis-points", "3", "--out", str(out)]) == EXIT_OK
    rule = read_rule(out)
    assert rule.n_points == duffy_rule("pentatope", 3).n_points and rule.provenance == "duffy"


def test_catalog(capsys):
    assert run(["catalog"]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["element", "strength", "bundled_points", "published_points"]
    assert ["pentatope", "9", "151", "151"] in rows


def test_env_rules_dir(tmp_path, monkeypatch, capsys):
    write_rule(get_rule("pentatope", 2), tmp_path / "pentatope" / "2-5.txt")
    monkeypatch.setenv(RULES_ENV, str(tmp_path))
    assert run(["verify", "--rule", "pentatope/2-5.txt"]) == EXIT_OK
    assert run(["catalog"]) == EXIT_OK
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out.split("\n", 1)[1])))
    assert ["pentatope", "2", "5", "5"] in rows
    assert ["pentatope", "9", "", "151"] in rows
