import json

import pytest

from sepk.cli import main
from sepk.graph_model import builtin, parse, serialize


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ktheory_builtin_text(capsys):
    code, out, _ = run(capsys, "ktheory", "--builtin", "E(3,3)")
    assert code == 0
    assert out.strip() == "K0 = Z, K1 = Z, K1 basis: X - Y"


def test_k0_tame_text(capsys):
    code, out, _ = run(capsys, "k0-tame", "--builtin", "E(2,2)", "--depth", "2")
    assert code == 0
    assert "Z ⊕ Z^1 ⊕ Z^11 (truncated at depth 2)" in out


def test_ktheory_json_round_trip(capsys):
    code, out, _ = run(capsys, "ktheory", "--builtin", "lamplighter(2)", "--format", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["k0"] == {"rank": 2, "factors": []}
    assert obj["k1"] == {"rank": 1, "basis": [{"X": 1, "Y": -1}]}


def test_deterministic_output(capsys):
    a = run(capsys, "sequence", "--builtin", "E(2,2)", "--depth", "2", "--format", "json")
    b = run(capsys, "sequence", "--builtin", "E(2,2)", "--depth", "2", "--format", "json")
    assert a == b


def test_validate_ok_and_broken(tmp_path, capsys):
    good = tmp_path / "good.graph"
    good.write_bytes(serialize(builtin("E", [2, 2])))
    code, out, _ = run(capsys, "validate", str(good))
    assert code == 0 and out.strip() == "ok"

    broken = tmp_path / "broken.graph"
    broken.write_text(
        '{"vertices": ["v", "w"], "edges": [{"id": "a", "src": "w", "dst": "v"}],'
        ' "separation": {"v": [[]]}}'
    )
    code, out, _ = run(capsys, "validate", str(broken))
    assert code == 2
    assert "empty-group" in out
    assert "partition-not-covering" in out


def test_malformed_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.graph"
    bad.write_text("{nope")
    code, _, err = run(capsys, "ktheory", str(bad))
    assert code == 2
    assert "malformed" in err


def test_usage_errors_exit_1(tmp_path, capsys):
    assert main(["no-such-command"]) == 1
    capsys.readouterr()
    good = tmp_path / "g.graph"
    good.write_bytes(serialize(builtin("E", [2, 2])))
    code, _, err = run(capsys, "ktheory", str(good), "--builtin", "E(2,2)")
    assert code == 1
    code, _, err = run(capsys, "ktheory")
    assert code == 1


def test_builtin_range_error_exits_4(capsys):
    code, _, err = run(capsys, "ktheory", "--builtin", "E(1,1)")
    assert code == 4
    assert "1 < m <= n" in err


def test_budget_exceeded_exits_3(capsys, monkeypatch):
    code, _, err = run(
        capsys, "k0-tame", "--builtin", "E(2,2)", "--depth", "3", "--budget", "10"
    )
    assert code == 3
    assert "last completed layer" in err
    monkeypatch.setenv("SEPK_BUDGET", "10")
    code, _, _ = run(capsys, "sequence", "--builtin", "E(2,2)", "--depth", "3")
    assert code == 3
    # an explicit flag overrides the environment
    code, _, _ = run(
        capsys, "sequence", "--builtin", "E(2,2)", "--depth", "3", "--budget", "100000"
    )
    assert code == 0


def test_multires_and_companion_emit_parseable_graphs(capsys):
    code, out, _ = run(capsys, "multires", "--builtin", "E(2,2)", "--at", "v")
    assert code == 0
    g = parse(out)
    assert len(g.vertices) == 6
    code, out, _ = run(capsys, "companion", "--builtin", "lamplighter(2)")
    assert code == 0
    assert len(parse(out).vertices) == 6


def test_element_syntax_and_errors(capsys):
    code, out, _ = run(capsys, "delta", "--builtin", "E(3,3)", "--element", "v.1:+1,v.2:-1")
    assert code == 0
    assert out.strip() == "-1 v +3 w"
    code, _, err = run(capsys, "delta", "--builtin", "E(3,3)", "--element", "Q:1")
    assert code == 4
    code, _, err = run(capsys, "delta", "--builtin", "E(3,3)", "--element", "X:1")
    assert code == 4  # not in the kernel


def test_phi_command(capsys):
    code, out, _ = run(capsys, "phi", "--builtin", "E(2,2)", "--element", "X:1,Y:-1")
    assert code == 0
    assert out.strip() == "-X(a1) - X(a2) + X(b1) + X(b2)"


def test_verify_generator_command(capsys):
    code, out, _ = run(
        capsys, "verify-generator", "--builtin", "E(3,3)", "--element", "X:1,Y:-1"
    )
    assert code == 0
    assert "FAIL" not in out
    code, out, _ = run(
        capsys,
        "verify-generator",
        "--builtin",
        "E(3,3)",
        "--element",
        "X:1,Y:-1",
        "--format",
        "json",
    )
    obj = json.loads(out)
    assert obj["ok"] is True
    assert len(obj["checks"]) == 10


def test_k1_generator_json(capsys):
    code, out, _ = run(
        capsys, "k1-generator", "--builtin", "E(3,3)", "--element", "X:1,Y:-1",
        "--format", "json",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["Z"] == [["a1", "a2", "a3"]]
    assert obj["U"] == [["a1b1* + a2b2* + a3b3*"]]


def test_character_command(tmp_path, capsys):
    base = tmp_path / "base.json"
    base.write_text(json.dumps({"v": 0.5, "w": 0.25}))  # v = -1, w = i
    free = tmp_path / "free.json"
    free.write_text(json.dumps({"v|a2,b2": 1.0 / 6.0}))
    code, out, _ = run(
        capsys, "character", "--builtin", "E(2,2)", "--base", str(base),
        "--free", str(free), "--at", "v", "--format", "json",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["max_relation_error"] < 1e-9
    assert len(obj["values"]) == 6


def test_sequence_text_summary(capsys):
    code, out, _ = run(capsys, "sequence", "--builtin", "E(2,2)", "--depth", "2")
    assert code == 0
    assert "|W_2| = 1" in out
    assert "|W_3| = 11" in out
