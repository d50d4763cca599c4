import json

import pytest

from rrcong.cli import main
from rrcong.operators import load_relations


def run_json(argv, tmp_path, name="out.json"):
    path = tmp_path / name
    code = main(["--json", str(path)] + argv)
    return code, json.loads(path.read_text())


def test_a1_worked_example(tmp_path):
    code, rep = run_json(["a1", "5"], tmp_path)
    assert code == 0
    assert rep["data"]["R"] == {"0": 2, "1": 4, "2": 1}
    assert rep["data"]["A1"] == "6"
    assert "elapsed_ms" not in rep


def test_a1_above_bound(tmp_path):
    code, rep = run_json(["a1", "100"], tmp_path)
    assert code == 0 and rep["checks"][0]["status"] == "skipped"


def test_eta_check_sigma(tmp_path):
    code, rep = run_json(["eta-check", "N=20; 1:0 2:-2 4:4 5:0 10:2 20:-4"], tmp_path)
    assert code == 0
    newman = rep["checks"][0]["details"]
    assert (newman["sum_delta_r"], newman["sum_cofactor_r"]) == (-48, 0)
    assert newman["product"] == str(128000 ** 2)
    orders = rep["data"]["orders"]
    assert [orders[c] for c in ("1/20", "1/10", "1/5", "1/4", "1/2", "1/1")] == ["-2", "0", "0", "2", "0", "0"]


def test_eta_check_non_modular():
    assert main(["eta-check", "N=20; 1:1 2:-1"]) == 1


def test_verify_relations_default(tmp_path):
    code, rep = run_json(["verify-relations"], tmp_path)
    assert code == 0 and len(rep["checks"]) == 21
    assert all(c["status"] == "pass" and c["window"] == 250 for c in rep["checks"])


def test_verify_relations_small_window(tmp_path):
    code, rep = run_json(["--precision", "20", "verify-relations"], tmp_path)
    assert code == 0 and {c["window"] for c in rep["checks"]} == {20}


def test_verify_relations_corrupted(tmp_path, capsys):
    rels = [r.to_json() for r in load_relations()]
    rels[7]["rhs"]["const_poly"][0][1] = str(int(rels[7]["rhs"]["const_poly"][0][1]) + 1)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"relations": rels}))
    code = main(["verify-relations", "--precision", "40", "--relations", str(bad)])
    out = capsys.readouterr().out
    assert code == 1
    label = load_relations()[7].label
    assert f"FAIL    {label}" in out


def test_parallel_matches_sequential(tmp_path):
    _, seq = run_json(["--precision", "30", "verify-relations", "--parallel", "false"], tmp_path, "a.json")
    _, par = run_json(["--precision", "30", "verify-relations", "--parallel", "true"], tmp_path, "b.json")
    assert seq["checks"] == par["checks"]


def test_verify_modeq(tmp_path):
    code, rep = run_json(["--precision", "100", "verify-modeq"], tmp_path)
    assert code == 0
    assert rep["checks"][1]["details"]["s"]["4,5"] == -1


@pytest.mark.parametrize("target, n, count, first", [("a1", 1, 5, 24), ("a1", 2, 1, 599), ("p", 2, 3, 24)])
def test_congruence(tmp_path, target, n, count, first):
    code, rep = run_json(["congruence", "--target", target, "--n", str(n), "--count", str(count)], tmp_path)
    assert code == 0 and len(rep["checks"]) == count
    assert rep["checks"][0]["details"]["m"] == first


def test_theorem8_small(tmp_path):
    dump = tmp_path / "certs"
    code, rep = run_json(["theorem8", "--n-max", "2", "--dump-certificates", str(dump)], tmp_path)
    assert code == 0
    assert [c["name"] for c in rep["checks"]] == [
        "L_1/5^0 in X^(1)", "L_2/5^1 in X^(0)", "L_3/5^1 in X^(1)", "L_4/5^2 in X^(0)"]
    cert = json.loads((dump / "L2.json").read_text())
    assert cert["member"] and cert["parity"] == 0


def test_skeleton(tmp_path):
    dump = tmp_path / "sk"
    code, rep = run_json(["skeleton", "--n-max", "10", "--dump-certificates", str(dump)], tmp_path)
    assert code == 0 and all(c["status"] == "pass" for c in rep["checks"])
    assert (dump / "skeleton.json").exists()


def test_series(tmp_path, capsys):
    code, rep = run_json(["series", "t", "--terms", "6"], tmp_path)
    assert code == 0 and rep["data"]["prec"] == 6
    assert main(["series", "p", "--terms", "6"]) == 0
    assert "1*q^0 + 1*q^1 + 2*q^2 + 3*q^3 + 5*q^4 + 7*q^5" in capsys.readouterr().out


def test_json_to_stdout(capsys):
    assert main(["a1", "3", "--json", "-"]) == 0
    assert json.loads(capsys.readouterr().out)["data"]["A1"] == "2"


def test_timing_flag(tmp_path):
    _, rep = run_json(["a1", "3", "--timing"], tmp_path)
    assert isinstance(rep["elapsed_ms"], int)


def test_deterministic_json(tmp_path):
    argv = ["--parallel", "false", "--precision", "40", "verify-relations"]
    main(["--json", str(tmp_path / "1.json")] + argv)
    main(["--json", str(tmp_path / "2.json")] + argv)
    assert (tmp_path / "1.json").read_bytes() == (tmp_path / "2.json").read_bytes()


@pytest.mark.parametrize("argv", [
    [],
    ["nope"],
    ["--precision", "10", "a1", "5"],
    ["--parallel", "maybe", "a1", "5"],
    ["congruence", "--target", "q", "--n", "1"],
    ["eta-check", "N=20; 3:1"],
    ["verify-relations", "--relations", "/nonexistent.json"],
])
def test_usage_errors(argv):
    assert main(argv) == 2


def test_env_precision(monkeypatch, tmp_path):
    monkeypatch.setenv("RRC_PRECISION", "30")
    _, rep = run_json(["verify-modeq"], tmp_path)
    assert rep["parameters"]["precision"] == 30
    monkeypatch.setenv("RRC_PRECISION", "5")
    assert main(["verify-modeq"]) == 2
