import io

import mpmath
import numpy as np
import pytest

from stquad.duffy import duffy_rule
from stquad.elements import PENTATOPE, TESSERACT, TETPRISM, ElementKind, contains, volume
from stquad.quadgen import verify_rule
from stquad.rules import (RULES_ENV, Orbit, QuadratureRule, RuleFormatError,
                          RuleValidationError, bundled_rules, catalog_table, get_rule,
                          parse_rule, read_rule, resolve_rule_path, rule_path, rules_dir,
                          write_rule)


@pytest.fixture(autouse=True)
def _isolated_catalog(monkeypatch):
    monkeypatch.delenv(RULES_ENV, raising=False)


def test_table2_first_row():
    rule = get_rule(PENTATOPE, 9)
    s1 = [o for o in rule.orbits if o.family_id == 1]
    assert len(s1) == 1
    assert abs(s1[0].weight - mpmath.mpf("0.026283450664919790544554931007647")) < mpmath.mpf(10) ** -34


def test_table2_s4_row():
    rule = get_rule(PENTATOPE, 9)
    s4 = [o for o in rule.orbits if o.family_id == 4]
    assert len(s4) == 3
    first = s4[0]
    assert float(first.params[0]) == pytest.approx(0.0397035, abs=1e-7)
    assert float(first.params[1]) == pytest.approx(0.1855665, abs=1e-7)
    assert float(first.weight) == pytest.approx(0.0034567258, abs=1e-10)


def test_table2_structure():
    rule = get_rule(PENTATOPE, 9)
    assert rule.signature() == "S1^1 S2^2 S3^2 S4^3 S5^2"
    assert rule.n_points == 1 + 2 * 5 + 2 * 10 + 3 * 20 + 2 * 30 == 151
    pts, w = rule.expanded()
    assert abs(w.sum() - 2 / 3) < 1e-12
    assert np.all(contains(PENTATOPE, pts, 1e-12))


@pytest.mark.parametrize("key", sorted(bundled_rules(), key=str))
def test_every_bundled_rule_verifies(key):
    rule = bundled_rules()[key]
    assert verify_rule(rule).max_error <= 1e-12
    assert verify_rule(rule, extended=True).max_error <= 1e-25
    rule.validate()


def test_round_trip_symmetric():
    rule = get_rule(PENTATOPE, 6)
    buf = io.StringIO()
    write_rule(rule, buf)
    back = parse_rule(buf.getvalue())
    assert back.kind is rule.kind and back.strength == rule.strength
    assert back.provenance == rule.provenance
    for a, b in zip(rule.orbits, back.orbits):
        assert a.family_id == b.family_id
        assert abs(a.weight - b.weight) <= mpmath.mpf(10) ** -33 * abs(a.weight)
        for p, q in zip(a.params, b.params):
            assert abs(p - q) <= mpmath.mpf(10) ** -33 * max(abs(p), 1e-6)


def test_round_trip_expanded(tmp_path):
    rule = duffy_rule(TETPRISM, 3)
    path = tmp_path / "d.txt"
    write_rule(rule, path, expanded=True)
    back = read_rule(path)
    assert back.provenance == "duffy" and back.n_points == rule.n_points
    p1, w1 = rule.expanded()
    p2, w2 = back.expanded()
    assert np.allclose(p1, p2, atol=1e-16) and np.allclose(w1, w2, atol=1e-16)


def test_negative_weight_rejected():
    text = "pentatope 2 6 2\n1 0.7\n2 0.1 -0.00666666666666666667\n"
    with pytest.raises(RuleValidationError):
        parse_rule(text)


def test_outside_point_rejected():
    rule = QuadratureRule.from_points(TESSERACT, 0, [[1.5, 0, 0, 0]], [16.0])
    with pytest.raises(RuleValidationError):
        rule.validate()


@pytest.mark.parametrize("text,line", [
    ("pentatope 2 5\n", 1),
    ("pentatope 2 5 1\n2 0.1x 0.1\n", 2),
    ("pentatope 2 5 1\n\n# note\n9 0.1 0.1\n", 4),
    ("pentatope 2 5 1\n2 0.1\n", 2),
    ("pentatope 2 6 1\n2 0.1 0.13\n", 1),
    ("cube 2 5 1\n2 0.1 0.13\n", 1),
])
def test_malformed_files_report_line(text, line):
    with pytest.raises(RuleFormatError) as info:
        parse_rule(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_empty_file():
    with pytest.raises(RuleFormatError):
        parse_rule("# nothing\n")


def test_env_var_rules_dir(tmp_path, monkeypatch):
    rule = get_rule(TETPRISM, 2)
    write_rule(rule, rule_path(TETPRISM, 2, 6, root=tmp_path))
    monkeypatch.setenv(RULES_ENV, str(tmp_path))
    assert rules_dir() == tmp_path
    cat = bundled_rules()
    assert list(cat) == [(TETPRISM, 2)]
    assert resolve_rule_path("tetprism/2-6.txt") == tmp_path / "tetprism" / "2-6.txt"
    with pytest.raises(KeyError):
        get_rule(PENTATOPE, 9)


def test_resolve_bundled_path():
    assert resolve_rule_path("rules/pentatope/9-151.txt").exists()
    with pytest.raises(FileNotFoundError):
        resolve_rule_path("pentatope/99-1.txt")


def test_catalog_rows():
    rows = {(k, s): (have, pub) for k, s, have, pub in catalog_table()}
    assert rows[(PENTATOPE, 9)] == (151, 151)
    assert rows[(TESSERACT, 2)][1] == 16
    assert rows[(PENTATOPE, 2)] == (5, 5)
    assert rows[(TETPRISM, 2)] == (6, 6)


def test_integrate_extended():
    rule = get_rule(PENTATOPE, 2)
    val = rule.integrate(lambda x: np.ones(len(x), dtype=object), extended=True)
    assert abs(val - mpmath.mpf(2) / 3) < mpmath.mpf(10) ** -30


def test_orbit_coerces_to_mpf():
    o = Orbit(2, (0.1,), "0.2")
    assert isinstance(o.weight, mpmath.mpf) and isinstance(o.params[0], mpmath.mpf)
