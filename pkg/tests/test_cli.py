import json
import math

import pytest

from tlrep import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None)


def test_verify_catalog(capsys):
    code, doc = run(capsys, "verify", "--catalog", "xxz", "--q", "2", "--zeta", "1")
    assert code == 0 and doc["result"]["verdict"]["q_value"] == 2.5
    assert doc["meta"]["command"] == "verify" and doc["ok"] is True


def test_verify_failure_exit_code(capsys):
    code, doc = run(capsys, "verify", "--catalog", "cg-s1j1", "--param", "q=1.3",
                    "--param", "force=true")
    assert code == 1 and doc["result"]["verdict"]["pass"] is False


def test_bad_input_exit_codes(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["verify", "--bogus"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main([])
    assert e.value.code == 2
    assert cli.main(["verify", "--catalog", "xxz", "--zeta", "2"]) == 2
    assert cli.main(["verify", "--catalog", "unknown"]) == 2


def test_jw(capsys):
    code, doc = run(capsys, "jw", "--n", "3", "--r", "3")
    want = [math.sqrt(2), (1 + math.sqrt(5)) / 2, math.sqrt(3)]
    assert code == 0 and doc["result"]["allowed_q"] == pytest.approx(want, abs=1e-8)
    code, doc = run(capsys, "jw", "--n", "2", "--r", "2", "--q", str(math.sqrt(2)))
    assert doc["result"]["rho"][-1] == "inf"


def test_scan_pairs(capsys):
    code, doc = run(capsys, "scan-pairs", "--spin", "1", "--q", "1")
    hits = doc["result"]["hits"]
    assert code == 0 and len(hits) == 8
    assert sorted({h["family"] for h in hits}) == ["i", "ii", "iii", "iv", "v"]
    assert all(h["Q_values"][0] == pytest.approx(2.0) for h in hits)


def test_scan_vectors_and_subsets(capsys):
    code, doc = run(capsys, "scan-vectors", "--spin", "0.5", "--q", "1")
    assert [h["labels"] for h in doc["result"]["hits"]] == [[[0, 0]], [[2, 0]]]
    code, doc = run(capsys, "scan-subsets", "--basis", "cg:1,1", "--max-rank", "2", "--jobs", "2")
    assert code == 0 and len(doc["result"]["hits"]) == 9
    assert cli.main(["scan-vectors", "--spin", "1"]) == 2


def test_catalog_ybe_bounds(capsys):
    code, doc = run(capsys, "catalog", "list")
    assert "rank2-n2" in doc["result"]["ids"]
    code, doc = run(capsys, "catalog", "build", "tower:rank2-n2:2")
    assert doc["result"]["n"] == 4 and doc["result"]["expected_q"] == pytest.approx(2 * math.sqrt(2))
    code, doc = run(capsys, "ybe", "--catalog", "rank2-n2")
    assert code == 0 and doc["result"]["branch"] == "mult" and doc["result"]["max_residual"] < 1e-9
    code, doc = run(capsys, "bounds", "--catalog", "xxz", "--q", "5")
    assert code == 0 and doc["result"]["all_satisfied"]


def test_file_inputs_and_out(tmp_path, capsys):
    from tlrep import catalog
    from tlrep.densec import matrix_to_dict

    e = catalog.rank2_n2(1j)
    (tmp_path / "t.json").write_text(json.dumps(matrix_to_dict(e.t)))
    (tmp_path / "cs.json").write_text(json.dumps(e.cs.to_dict()))
    out = tmp_path / "res.json"
    assert cli.main(["verify", "--t", str(tmp_path / "t.json"), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["verdict"]["q_value"] == pytest.approx(math.sqrt(2))
    code, doc = run(capsys, "verify", "--coeffs", str(tmp_path / "cs.json"))
    assert code == 0 and doc["result"]["w_criterion"]["pass"]


def test_tolerance_sources(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(cli.TOL_ENV, "1e-7")
    _, doc = run(capsys, "jw", "--n", "2", "--r", "1")
    assert doc["meta"]["tol"] == 1e-7
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tol": 1e-6, "n": 3, "r": 3}))
    _, doc = run(capsys, "jw", "--config", str(cfg), "--r", "2")
    assert doc["meta"]["tol"] == 1e-6 and doc["result"]["r"] == 2 and doc["result"]["n"] == 3


def test_output_is_deterministic_and_17_digits(capsys):
    cli.main(["verify", "--catalog", "rank2-n2"])
    a = capsys.readouterr().out
    cli.main(["verify", "--catalog", "rank2-n2"])
    assert a == capsys.readouterr().out
    assert cli.dumps(0.1) == "0.10000000000000001"
    assert cli.dumps({"x": float("inf"), "y": [1, True, None]}) == '{"x": "inf", "y": [1, true, null]}'
