import json

import pytest

from finbox.cli import main


@pytest.fixture(autouse=True)
def _cwd(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def manifest(path="finbox-manifest.json"):
    with open(path) as fh:
        return json.load(fh)


def test_minbox(capsys):
    code, out, _ = run(capsys, "minbox", "example1.json")
    assert code == 0 and out.splitlines()[0] == "K=157"
    doc = manifest()
    assert doc["result"]["K"] == 157 and doc["exit_code"] == 0
    assert "example1.json" in doc["inputs"] and doc["versions"]["finbox"]


def test_check_strict_cx1(capsys):
    code, out, _ = run(capsys, "check", "counterexample1.json", "--strict")
    assert code == 1 and "00 10 11" in out


def test_check_existence_cx1(capsys):
    code, out, _ = run(capsys, "check", "counterexample1.json")
    assert code == 0 and "00 -> [3, -1]" in out and "box [0,16] x [0,8]" in out


def test_check_lp_example2(capsys):
    code, out, _ = run(capsys, "check", "example2.json", "--strict", "--mode", "lp", "--epsilon", "1")
    assert code == 0 and "64 witnesses" in out


def test_check_cap_is_inconclusive(capsys):
    code, _, err = run(capsys, "check", "example2.json", "--strict")
    assert code == 2 and "lp" in err


def test_heuristic_failure_exit(capsys, tmp_path):
    doc = {"n": 1, "m": 1, "p": 1, "B": [[1]], "D": [[1]], "U": {"interval": [0, 0]}, "W": {"interval": [1, 1]}}
    (tmp_path / "toy.json").write_text(json.dumps(doc))
    code, _, err = run(capsys, "check", "toy.json", "--strict", "--mode", "lp")
    assert code == 2 and "heuristic failed at vertex 0" in err
    assert manifest()["result"]["heuristic_failure"] == {"vertex": "0", "stage": "lp"}


def test_synthesize_verify_simulate(capsys, tmp_path):
    code, _, _ = run(capsys, "synthesize", "example1.json", "--strict", "--out", "law.json")
    assert code == 0
    doc = json.loads((tmp_path / "law.json").read_text())
    assert doc["box"]["upper"] == [312.0] and doc["delta"] == 94
    code, out, _ = run(capsys, "verify", "example1.json", "law.json")
    assert code == 0 and out.count("certified") == 2
    code, out, _ = run(capsys, "verify", "example1.json", "law.json", "200")
    assert code == 1 and "witness" in out
    code, out, _ = run(
        capsys, "simulate", "example1.json", "law.json", "--paths", "5", "--horizon", "50", "--seed", "4",
        "--init=-500,812", "--svg", "p.svg", "--out-dir", "sim",
    )
    assert code == 0 and "5/5 paths" in out
    summary = json.loads((tmp_path / "sim" / "summary.json").read_text())
    assert len(summary["paths"]) == 5 and summary["post_entry_violations"] == 0
    assert (tmp_path / "sim" / "path_0004.csv").exists() and (tmp_path / "p.svg").exists()
    m = manifest(tmp_path / "sim" / "finbox-manifest.json")
    assert m["seed"] == 4 and "sim/summary.json" in m["outputs"]


def test_simulation_is_reproducible(capsys, tmp_path):
    run(capsys, "synthesize", "example1.json", "--strict", "--out", "law.json")
    for d in ("a", "b"):
        run(capsys, "simulate", "example1.json", "law.json", "--paths", "3", "--horizon", "20", "--out-dir", d)
    ma = manifest(tmp_path / "a" / "finbox-manifest.json")["outputs"]
    mb = manifest(tmp_path / "b" / "finbox-manifest.json")["outputs"]
    assert [v for k, v in sorted(ma.items())] == [v for k, v in sorted(mb.items())]


def test_verify_cellwise_law(capsys):
    code, _, _ = run(capsys, "verify", "counterexample1.json", "counterexample1_law.json", "24,8")
    assert code == 0


def test_verify_box_ranges(capsys, tmp_path):
    run(capsys, "synthesize", "counterexample1.json", "--out", "law.json")
    code, _, _ = run(capsys, "verify", "counterexample1.json", "law.json", "0:16,0:8")
    assert code == 0


def test_hull(capsys):
    code, out, _ = run(capsys, "hull", "example1.json", "--strict")
    assert code == 0 and "certified" in out


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 64
    assert run(capsys)[0] == 64
    assert run(capsys, "check", "missing.json")[0] == 64
    assert run(capsys, "minbox", "counterexample1.json")[0] == 64
    assert run(capsys, "verify", "example1.json", "example1.json")[0] == 64


def test_bad_model_reports_module(capsys, tmp_path):
    (tmp_path / "bad.json").write_text('{"n": 2}')
    code, _, err = run(capsys, "check", "bad.json")
    assert code == 64 and "model" in err


def test_manifest_override(capsys, tmp_path):
    run(capsys, "--manifest", "m/run.json", "hull", "example1.json")
    assert manifest(tmp_path / "m" / "run.json")["command"] == "hull"
