import json

import pytest

from shortdlog.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bounds_examples(capsys):
    code, out, _ = run(capsys, "bounds", "--delta", "0", "--target", "0.99")
    assert code == 0 and "<= 8.6" in out and "    7    2" in out
    code, out, _ = run(capsys, "bounds", "--delta", "130", "--target", "1e-10-complement", "--format", "csv")
    assert code == 0 and out.strip().splitlines()[1].endswith(",85.6")


def test_bounds_usage_and_infeasible(capsys):
    code, _, _ = run(capsys, "bounds")
    assert code == 2
    code, _, err = run(capsys, "bounds", "--delta", "0", "--target", "0.999999999999", "--tau-max", "4")
    assert code == 3 and "no (tau, t)" in err
    code, _, _ = run(capsys, "bounds", "--delta", "0", "--target", "2")
    assert code == 3


def test_bounds_default_targets_and_rsa_factor(capsys, tmp_path):
    out_path = tmp_path / "t.csv"
    code, _, _ = run(capsys, "bounds", "--delta", "0", "10", "--format", "csv", "--out", str(out_path))
    assert code == 0 and len(out_path.read_text().splitlines()) == 23
    code, out, _ = run(capsys, "bounds", "--delta", "21", "--target", "1-1e-4", "--rsa-factor")
    assert code == 0 and "<= 22.1" in out


def test_ffdh(capsys):
    code, out, _ = run(capsys, "ffdh", "--l", "2048", "--z", "112", "--delta", "70", "--tau", "7", "--t", "37")
    rec = json.loads(out)
    assert code == 0 and rec["ops"] == 532 and rec["advantage"] == 7.6


def test_factor(capsys):
    code, out, _ = run(capsys, "factor", "--N", "77", "--d", "9")
    assert code == 0 and json.loads(out) == {"p": "7", "q": "11"}
    code, _, err = run(capsys, "factor", "--N", "77", "--d", "10")
    assert code == 3 and "perfect square" in err


def test_instance_simulate_recover_roundtrip(capsys, tmp_path):
    inst_path, pair_path = tmp_path / "inst.json", tmp_path / "pair.jsonl"
    assert run(capsys, "instance", "--m", "14", "--seed", "4", "--out", str(inst_path))[0] == 0
    assert run(capsys, "simulate", "--instance", str(inst_path), "--seed", "2", "--out", str(pair_path))[0] == 0
    code, out, _ = run(capsys, "recover", "--instance", str(inst_path), "--pair", str(pair_path), "--tau", "7")
    rep = json.loads(out)
    assert code == 0 and rep["found"] and rep["d"] == json.loads(inst_path.read_text())["d"]


def test_recover_garbage_pair_and_bad_files(capsys, tmp_path):
    inst_path = tmp_path / "inst.json"
    run(capsys, "instance", "--m", "12", "--seed", "1", "--out", str(inst_path))
    code, out, _ = run(capsys, "recover", "--instance", str(inst_path), "--j", "1", "--k", "4000", "--tau", "0")
    assert code == 0 and json.loads(out)["found"] in (True, False)
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "recover", "--instance", str(bad), "--j", "1", "--k", "1")[0] == 3
    assert run(capsys, "recover", "--instance", str(tmp_path / "missing.json"), "--j", "1", "--k", "1")[0] == 4
    assert run(capsys, "recover", "--instance", str(inst_path))[0] == 3
    assert run(capsys, "recover", "--instance", str(inst_path), "--j", "1", "--k", "99999999")[0] == 3


def test_experiment_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["experiment", "--m", "12", "--tau", "6", "--trials", "30", "--seed", "5"]
    assert run(capsys, *args, "--out", str(a))[0] == 0
    code, out, _ = run(capsys, *args, "--workers", "2", "--out", str(b))
    assert code == 0
    assert a.read_bytes() == b.read_bytes()
    summary = json.loads(out)
    assert summary["trials"] == 30 and summary["successes"] >= 25


def test_experiment_errors(capsys, tmp_path):
    assert run(capsys, "experiment", "--m", "12", "--tau", "20", "--trials", "1")[0] == 3
    assert run(capsys, "experiment", "--m", "12", "--tau", "6", "--prime-bits", "10")[0] == 3
    assert run(capsys, "experiment", "--m", "12", "--tau", "6", "--trials", "1",
               "--out", str(tmp_path / "no" / "dir.jsonl"))[0] == 4


def test_experiment_fixed_instance(capsys, tmp_path):
    inst_path = tmp_path / "inst.json"
    run(capsys, "instance", "--m", "12", "--seed", "1", "--out", str(inst_path))
    code, out, _ = run(capsys, "experiment", "--m", "99", "--tau", "6", "--trials", "5",
                       "--fixed-instance", str(inst_path))
    assert code == 0 and json.loads(out)["m"] == 12
