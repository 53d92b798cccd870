from __future__ import annotations

import json

import pytest

from ldform.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


def test_cmp(capsys):
    assert run(capsys, "cmp", "x", "x x") == (0, "Less", "")
    assert run(capsys, "cmp", "x (x x)", "(x x) (x x)")[1] == "Equal"
    assert run(capsys, "cmp", "x o x", "(x x) x")[1] == "Greater"


def test_eq(capsys):
    assert run(capsys, "eq", "x (x x)", "(x x) (x x)")[1] == "Equal"
    assert run(capsys, "eq", "x", "x x")[1] == "NotEqual"
    code, out, _ = run(capsys, "eq", "--oracle", "x o x", "(x x) o x")
    assert code == 0 and out == "Equal"


def test_df_div_nf(capsys):
    assert run(capsys, "df", "x (x x)")[1] == "(df x [(df x [x] app)] app)"
    assert run(capsys, "div", "x x", "(x x) x")[1] == "(df (xx) [x] app)"
    assert run(capsys, "nf", "x", "(x x) x")[1] == "(nf p^(1) [p^(0)] app)"
    assert run(capsys, "findpow", "x", "x x")[1] == "2"


def test_term_tools(capsys):
    assert run(capsys, "parse", "x (x x)")[1] == "(* x (* x x))"
    assert run(capsys, "print", "(o x x)")[1] == "x o x"
    assert run(capsys, "iterate", "x", "x", "3")[1] == "x x x"
    assert run(capsys, "power", "x", "2")[1] == "x (x x)"
    assert run(capsys, "power", "x", "2", "--kind", "comp")[1] == "x o x"
    code, out, _ = run(capsys, "rewrite", "x (x x)", "--steps", "1")
    assert code == 0 and out.endswith("x x (x x)")


def test_enum_counts(capsys):
    code, out, _ = run(capsys, "enum", "--leaves", "6", "--a-only", "--upto", "--count")
    lines = out.splitlines()
    assert [int(l.split()[1]) for l in lines[:6]] == [1, 1, 2, 5, 14, 42]
    assert lines[-1] == "# total 65"


def test_confluence(capsys):
    code, out, _ = run(capsys, "confluence", "x (x x)", "(x x) (x x)")
    assert code == 0 and out


def test_json_records(capsys):
    code, out, _ = run(capsys, "--json", "div", "x x", "(x x) x")
    rec = json.loads(out)
    assert code == 0
    assert rec["op"] == "div" and rec["inputs"] == ["x x", "x x x"]
    assert rec["tier_used"] in (0, 1, 2, 3)
    assert set(rec) == {"op", "inputs", "result", "tier_used", "cost"}
    code, out, _ = run(capsys, "cmp", "x", "x", "--json")
    assert json.loads(out)["result"] == "Equal"


def test_corpus_file(capsys, tmp_path):
    f = tmp_path / "terms.txt"
    f.write_text("# two terms\nx\nx x\n")
    code, out, _ = run(capsys, "cmp", f"@{f}", "x x")
    assert code == 0 and out.splitlines() == ["Less", "Equal"]


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "cmp", "x (", "x")[0] == 2
    assert run(capsys, "df", f"@{tmp_path / 'missing.txt'}")[0] == 2
    code, _, err = run(capsys, "confluence", "x (x (x x))", "((x x) x) (x x)", "--budget", "1")
    assert code == 3
    with pytest.raises(SystemExit) as e:
        main(["enum", "--leaves", "0"])
    assert e.value.code == 2
