import json
import subprocess
import sys

import pytest

from vonstaudt.cli import run


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_builtin_and_axioms(tmp_path, capsys):
    assert run(["builtin", "fano"]) == 0
    fano = write(tmp_path, "fano.txt", capsys.readouterr().out)
    assert run(["axioms-check", fano]) == 0
    assert "ok" in capsys.readouterr().out


def test_axioms_check_failure(tmp_path, capsys):
    bad = write(tmp_path, "bad.json", json.dumps({"n": 4, "r": 2, "bases": [[0, 1], [2, 3]]}))
    assert run(["axioms-check", "--format", "json", bad]) == 1
    assert json.loads(capsys.readouterr().out)["ok"] is False


def test_verify_fano_over_rationals(tmp_path, capsys):
    run(["builtin", "fano"])
    fano = write(tmp_path, "fano.txt", capsys.readouterr().out)
    run(["builtin", "fano", "--matrix"])
    mat = write(tmp_path, "fano.mat", capsys.readouterr().out)
    assert run(["verify", "--matroid", fano, "--matrix", mat]) == 1
    assert "extra-basis" in capsys.readouterr().out


def test_verify_nonfano(tmp_path, capsys):
    run(["builtin", "nonfano"])
    m = write(tmp_path, "m.txt", capsys.readouterr().out)
    run(["builtin", "nonfano", "--matrix"])
    a = write(tmp_path, "a.mat", capsys.readouterr().out)
    assert run(["verify", "--matroid", m, "--matrix", a, "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "represents"


def test_from_matrix(tmp_path, capsys):
    run(["builtin", "u24", "--matrix"])
    a = write(tmp_path, "a.mat", capsys.readouterr().out)
    assert run(["from-matrix", a, "--format", "json"]) == 0
    assert len(json.loads(capsys.readouterr().out)["bases"]) == 6


def test_check(tmp_path, capsys):
    sys_ = write(tmp_path, "s.etr", "VAR x y\nMUL x x y\n")
    good = write(tmp_path, "a.json", '{"x": 3, "y": 9}')
    bad = write(tmp_path, "b.json", '{"x": 3, "y": 8}')
    assert run(["check", "--system", sys_, "--assignment", good]) == 0
    assert run(["check", "--system", sys_, "--assignment", bad]) == 1


def test_compile_realize_read_values(tmp_path, capsys):
    s = write(tmp_path, "s.etr", "VAR x y z\nADD x y z\n")
    a = write(tmp_path, "a.json", '{"x": 2, "y": 3, "z": 5}')
    out, trace = str(tmp_path / "m.txt"), str(tmp_path / "t.json")
    assert run(["compile", "--system", s, "--out", out, "--trace", trace]) == 0
    pts = str(tmp_path / "p.txt")
    assert run(["realize", "--trace", trace, "--assignment", a, "--matroid", out,
                "--out", pts, "--format", "json", "--seed", "7"]) == 0
    meta = json.loads(capsys.readouterr().out)
    assert meta["represents"] is True and meta["points"] == 10
    assert run(["read-values", "--points", pts]) == 0
    values = dict(line.split() for line in capsys.readouterr().out.splitlines())
    assert values == {"x": "2", "y": "3", "z": "5"}


def test_normalize_stages(tmp_path, capsys):
    polys = write(tmp_path, "p.txt", "poly 1\nterm 1 2\nterm -2 0\n")
    assert run(["normalize", "--in", polys, "--stage", "etrami"]) == 0
    assert "MUL x1 x1" in capsys.readouterr().out
    meta = str(tmp_path / "meta.json")
    assert run(["normalize", "--in", polys, "--test-scale", "1/16", "100", "--meta", meta]) == 0
    assert "PROMISE distinct" in capsys.readouterr().out
    assert json.loads(open(meta).read())["test_scale"] == ["1/16", "100"]


def test_simulate_ot(tmp_path, capsys):
    chi = write(tmp_path, "c.txt", "chirotope 4\n0 1 2 1\n0 1 3 1\n0 2 3 1\n1 2 3 1\n")
    assert run(["simulate-ot", "--in", chi, "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["n"] > 4


def test_input_errors(tmp_path, capsys):
    assert run(["check", "--system", str(tmp_path / "missing"), "--assignment", "x"]) == 2
    bad = write(tmp_path, "bad.etr", "ADD x y z\n")
    a = write(tmp_path, "a.json", "{}")
    assert run(["check", "--system", bad, "--assignment", a]) == 2
    assert "line 1" in capsys.readouterr().err
    assert run(["no-such-command"]) == 2
    assert run(["from-matrix", "--max-n", "0"]) == 2


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "vonstaudt.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "simulate-ot" in out.stdout
