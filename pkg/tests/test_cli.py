import json

import pytest

from rcf import io
from rcf.cli import main
from rcf.free import FreeAutomorphism
from rcf.geometry import stallings_graph
from rcf.free import parse_word as W
from rcf.vfgroup import build_wp_pda, d_infinity


@pytest.fixture
def d_inf(tmp_path):
    path = tmp_path / "d_inf.json"
    io.dump(d_infinity(), path)
    return str(path)


def test_wp_accepts(d_inf, capsys):
    assert main(["wp", "--group", d_inf, "--word", "t a t a"]) == 0
    assert capsys.readouterr().out.strip() == "accept"
    assert main(["cowp", "--group", "Dinf", "--word", "t a t a"]) == 0
    assert capsys.readouterr().out.strip() == "reject"


def test_missing_file_and_bad_usage(capsys):
    assert main(["wp", "--group", "/nonexistent/g.json"]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["frobnicate"]) == 2
    assert main(["wp"]) == 2


def test_check_round_trip(tmp_path, capsys):
    rec = tmp_path / "wp.json"
    assert main(["wp", "--group", "F2", "--out", str(rec)]) == 0
    report = tmp_path / "r.json"
    assert main(["check", "--recognizer", str(rec), "--oracle", "free-reduce", "--max-len", "5", "--report", str(report)]) == 0
    assert "ok" in capsys.readouterr().out
    data = json.loads(report.read_text())
    assert data["format"] == "rcf.check-report/1" and data["sound_failures"] == 0


def test_check_failure_exits_one(tmp_path, capsys):
    rec = tmp_path / "wp.json"
    io.dump(build_wp_pda(d_infinity()), rec)
    code = main(["check", "--recognizer", str(rec), "--oracle", "dinf-class", "--param", "element=t", "--max-len", "3"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_check_is_deterministic_with_seed(tmp_path, capsys):
    rec = tmp_path / "wp.json"
    io.dump(build_wp_pda(d_infinity()), rec)
    args = ["check", "--recognizer", str(rec), "--oracle", "vf-nf", "--group", "Dinf", "--max-len", "6", "--sample", "20"]
    main(["--seed", "4"] + args)
    a = capsys.readouterr().out
    main(["--seed", "4"] + args)
    assert capsys.readouterr().out == a


def test_conj(capsys):
    assert main(["conj", "--group", "Dinf", "--element", "t", "--word", "a a t"]) == 0
    assert capsys.readouterr().out.strip() == "accept"
    assert main(["conj", "--group", "Dinf", "--element", "t", "--word", "a t"]) == 0
    assert capsys.readouterr().out.strip() == "reject"


def test_twisted(tmp_path, capsys):
    phi = tmp_path / "phi.json"
    io.dump(FreeAutomorphism(("a",), {"a": ("a^-1",)}, {"a": ("a^-1",)}), phi)
    assert main(["twisted", "--phi", str(phi), "--base", "a", "--word", "a^-1 a a"]) == 0
    assert capsys.readouterr().out.strip() == "accept"
    assert main(["twisted", "--phi", str(phi), "--base", "a", "--word", "a a"]) == 0
    assert capsys.readouterr().out.strip() == "reject"


def test_stallings_and_coset(tmp_path, capsys):
    g = tmp_path / "g.json"
    assert main(["stallings", "--rank", "2", "--gens", "a a", "b", "a b a^-1", "--out", str(g)]) == 0
    assert "vertices=2 complete=True index=2" in capsys.readouterr().out
    assert main(["coset", "--graph", str(g), "--accept", "1", "--word", "a b"]) == 0
    assert capsys.readouterr().out.strip() == "accept"


def test_quotient(tmp_path, capsys):
    rec = tmp_path / "wp.json"
    io.dump(build_wp_pda(d_infinity()), rec)
    assert main(["quotient", "--group", "Dinf", "--recognizer", str(rec), "--by", "t", "--word", "a t a"]) == 0
    assert capsys.readouterr().out.strip() == "accept"


def test_triangulate(tmp_path, capsys):
    import numpy as np

    i = np.arange(13)
    d = np.abs(i[:, None] - i[None, :]) % 12
    path = tmp_path / "D.json"
    path.write_text(json.dumps(np.minimum(d, 12 - d).tolist()))
    assert main(["triangulate", "--distances", str(path), "--m", "1"]) == 1
    assert main(["triangulate", "--distances", str(path), "--m", "4", "--out", str(tmp_path / "c.json")]) == 0
    assert main(["export-dot", "--input", str(tmp_path / "c.json")]) == 0
    assert "graph" in capsys.readouterr().out


def test_amalgamate(tmp_path, capsys):
    from rcf.amalgam import TreeAmalgamationSpec
    from rcf.geometry import LabelledGraph

    A = ("a", "b")
    g1 = LabelledGraph((0, 1, 2), A, ((0, "a", 1), (1, "a", 2), (2, "a", 0)), 0)
    g2 = LabelledGraph((0, 1), A, ((0, "b", 1), (1, "b", 0)), 0)
    spec = TreeAmalgamationSpec((g1, g2), ({"p0": [0], "p1": [1], "p2": [2]}, {"q0": [0], "q1": [1]}))
    path = tmp_path / "spec.json"
    io.dump(spec, path)
    assert main(["amalgamate", "--spec", str(path), "--origin", "0", "--word", "a a a b b"]) == 0
    assert capsys.readouterr().out.strip() == "accept"
    assert main(["amalgamate", "--spec", str(path), "--origin", "0", "--list", "3"]) == 0
    assert capsys.readouterr().out.split("\n")[:3] == ["ε", "b b", "a a a"]


def test_export_dot_graph(tmp_path, capsys):
    g = tmp_path / "g.json"
    io.dump(stallings_graph(1, [W("a")]).graph, g)
    assert main(["export-dot", "--input", str(g)]) == 0
    assert "->" in capsys.readouterr().out
