import json

import pytest

from permqubo.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_perm_batcher(tmp_path, capsys):
    f = tmp_path / "p.json"
    assert run(capsys, "build", "perm", "--n", "4", "--network", "batcher", "-o", str(f))[0] == 0
    assert len(json.loads(f.read_text())["meta"]["gates"]) == 5


def test_build_matrix_to_stdout(capsys):
    code, out, _ = run(capsys, "build", "matrix", "--n", "3")
    assert code == 0 and len(json.loads(out)["variables"]) == 9


def test_build_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        run(capsys, "build", "perm", "--n", "4", "--constraint", "forbid_perm", "4,3,2,1", "-o", str(f))
    assert a.read_bytes() == b.read_bytes()


def test_verify_derangement_n6(tmp_path, capsys):
    f = tmp_path / "d.json"
    run(capsys, "build", "perm", "--n", "6", "--constraint", "derangement", "-o", str(f))
    code, out, _ = run(capsys, "verify", str(f))
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 265 and rep["uniform"] and rep["oracle_match"]


def test_verify_match(tmp_path, capsys):
    f = tmp_path / "m.json"
    run(capsys, "build", "match", "--n", "4", "--pattern", "2,1", "-o", str(f))
    code, out, _ = run(capsys, "verify", str(f))
    rep = json.loads(out)
    assert code == 0 and rep["count"] == 23 and not rep["uniform"]


def test_verify_tampered(tmp_path, capsys):
    f = tmp_path / "p.json"
    run(capsys, "build", "perm", "--n", "3", "-o", str(f))
    doc = json.loads(f.read_text())
    doc["quadratic"][0][2] += 1
    f.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", str(f))
    assert code == 1 and not json.loads(out)["pass"]


def test_verify_cap(tmp_path, capsys, monkeypatch):
    f = tmp_path / "p.json"
    run(capsys, "build", "perm", "--n", "3", "-o", str(f))
    monkeypatch.setenv("PERMQUBO_ENUM_CAP", "4")
    monkeypatch.setattr("permqubo.verify._CERTIFIED", {})
    assert run(capsys, "verify", str(f))[0] == 3


def test_sample_deterministic(tmp_path, capsys):
    f = tmp_path / "p.json"
    run(capsys, "build", "perm", "--n", "4", "-o", str(f))
    outs = [tmp_path / "s1.json", tmp_path / "s2.json"]
    for o in outs:
        assert run(capsys, "sample", str(f), "--reads", "4", "--sweeps", "200", "--seed", "42", "-o", str(o))[0] == 0
    assert outs[0].read_bytes() == outs[1].read_bytes()
    assert len(json.loads(outs[0].read_text())["reads"]) == 4


def test_stats_and_export(tmp_path, capsys):
    f = tmp_path / "p.json"
    run(capsys, "build", "perm", "--n", "8", "-o", str(f))
    code, out, _ = run(capsys, "stats", str(f))
    assert code == 0 and json.loads(out)["deltas"] == {"auxiliary": 0, "variables": 0}
    code, out, _ = run(capsys, "export", str(f), "--format", "qubo")
    assert code == 0 and "p qubo 0 570 " in out
    code, out, _ = run(capsys, "export", str(f), "--format", "ising")
    assert code == 0 and out.startswith("offset ")


@pytest.mark.parametrize("argv", [
    ["build", "perm"],
    ["build", "perm", "--n", "3", "--constraint", "nope"],
    ["build", "perm", "--n", "3", "--constraint", "value", "1"],
    ["build", "match", "--n", "3"],
    ["build", "perm", "--n", "1"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 2


def test_invalid_file(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text("{")
    assert run(capsys, "sample", str(f))[0] == 2
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 2
