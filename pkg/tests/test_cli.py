import csv

import pytest

from iomhash.cli import main
from iomhash.dataio import SyntheticSpec, save_features, synth_dataset


def summary(capsys):
    out = capsys.readouterr().out.splitlines()
    return dict(kv.split("=", 1) for kv in out[0].split()), out[1:]


@pytest.fixture
def features(tmp_path):
    path = tmp_path / "f.csv"
    save_features(synth_dataset(SyntheticSpec(6, 3, 32, seed=11)), path)
    return path


def test_enroll_one_row(tmp_path, capsys):
    src = tmp_path / "one.csv"
    src.write_text("u,s," + ",".join(str(0.1 * j + 0.05) for j in range(10)) + "\n")
    out = tmp_path / "t.jsonl"
    assert main(["enroll", str(src), "--scheme", "grp", "--m", "300", "--q", "16", "--out", str(out)]) == 0
    import json

    rec = json.loads(out.read_text())
    assert len(rec["indices"]) == 300 and set(rec["indices"]) <= set(range(1, 17))
    assert summary(capsys)[0]["templates"] == "1"


def test_enroll_window_too_large(features, tmp_path):
    assert main(["enroll", str(features), "--scheme", "urp", "--k", "64", "--out", str(tmp_path / "t")]) == 2


def test_enroll_byte_identical(features, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (a, b):
        assert main(["enroll", str(features), "--scheme", "urp", "--k", "16", "--seed", "9", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_enroll_missing_file(tmp_path):
    assert main(["enroll", str(tmp_path / "nope.csv"), "--scheme", "grp", "--out", str(tmp_path / "t")]) == 3


def test_verify_accept_and_reject(features, tmp_path, capsys):
    t = tmp_path / "t.jsonl"
    main(["enroll", str(features), "--scheme", "urp", "--k", "16", "--m", "300", "--out", str(t)])
    capsys.readouterr()
    assert main(["verify", str(t), str(features), "--threshold", "1.0"]) == 0
    s, _ = summary(capsys)
    assert float(s["score"]) == 1.0 and s["decision"] == "accept"
    assert main(["verify", str(t), str(features), "--threshold", "0.9", "--probe-index", "3"]) == 1
    assert summary(capsys)[0]["decision"] == "reject"


def test_verify_random_probe_near_chance(tmp_path, capsys):
    enrolled = tmp_path / "e.csv"
    probes = tmp_path / "p.csv"
    save_features(synth_dataset(SyntheticSpec(1, 1, 128, seed=1)), enrolled)
    save_features(synth_dataset(SyntheticSpec(20, 1, 128, seed=2)), probes)
    t = tmp_path / "t.jsonl"
    main(["enroll", str(enrolled), "--scheme", "urp", "--m", "600", "--k", "128", "--out", str(t)])
    capsys.readouterr()
    scores = []
    for i in range(20):
        assert main(["verify", str(t), str(probes), "--threshold", "0.11", "--probe-index", str(i)]) == 1
        scores.append(float(summary(capsys)[0]["score"]))
    # single pairs scatter widely at k = d; the average sits at chance
    assert abs(sum(scores) / len(scores) - 1 / 128) < 0.01


def test_verify_mismatched_m(features, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    main(["enroll", str(features), "--scheme", "urp", "--k", "16", "--m", "100", "--out", str(a)])
    main(["enroll", str(features), "--scheme", "urp", "--k", "16", "--m", "50", "--out", str(b)])
    assert main(["verify", str(a), str(b), "--threshold", "0.1"]) == 2


def test_eval_fvc_counts(tmp_path, capsys):
    rc = main(["eval", "--synthetic", "U=100,S=5,d=32", "--scheme", "grp", "--m", "50", "--out-dir", str(tmp_path)])
    assert rc == 0
    s, _ = summary(capsys)
    assert s["n_genuine"] == "1000" and s["n_imposter"] == "4950"
    with open(tmp_path / "roc.csv") as fh:
        assert next(csv.reader(fh)) == ["threshold", "far", "frr"]
    assert (tmp_path / "hist_genuine.csv").exists()


def test_eval_revocability_counts(capsys):
    rc = main(["eval", "--synthetic", "U=100,S=5,d=32", "--scheme", "urp", "--k", "16", "--m", "20",
               "--protocol", "revocability", "--tokens", "100"])
    assert rc == 0
    assert summary(capsys)[0]["n_pseudo_imposter"] == "50000"


def test_eval_unlinkability_prints_gap(capsys):
    assert main(["eval", "--synthetic", "U=5,S=3,d=16", "--scheme", "urp", "--k", "8", "--m", "50",
                 "--protocol", "unlinkability", "--tokens", "3"]) == 0
    s, detail = summary(capsys)
    assert "mean_gap" in s and any("mean gap" in line for line in detail)


def test_eval_infeasible(capsys):
    assert main(["eval", "--synthetic", "U=1,S=1,d=16", "--scheme", "grp"]) == 2


def test_eval_sweep(tmp_path, capsys):
    assert main(["eval", "--synthetic", "U=6,S=3,d=16", "--scheme", "urp", "--k", "8", "--sweep", "m=5,50",
                 "--reps", "2", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "sweep.csv").read_text().startswith("m,mean_eer,eers")


def test_theory_outputs(capsys):
    assert main(["theory", "--complexity", "false-accept", "--tau", "0.11", "--m", "600", "--delta", "128"]) == 0
    assert "462 bits" in capsys.readouterr().out
    assert main(["theory", "--complexity", "birthday", "--tau", "0.06", "--m", "300", "--delta", "16"]) == 0
    assert "≈42 bits" in capsys.readouterr().out
    assert main(["theory", "--kq", "2", "0"]) == 0
    assert float(summary(capsys)[0]["value"]) == 0.5


def test_theory_missing_args():
    assert main(["theory", "--complexity", "brute", "--m", "10"]) == 2


def test_attack_arm_vector(capsys):
    assert main(["attack", "--arm-vector", "0.1,0.5,0.3,0.9,0.2", "--codes", "200"]) == 0
    s, _ = summary(capsys)
    assert s["status"] == "consistent" and s["matches_truth"] == "True"
    assert main(["attack", "--arm-vector=-0.2,0.5,-0.1", "--codes", "200"]) == 0
    assert "contradiction" in summary(capsys)[0]["status"]


def test_attack_arm_grp_templates(features, tmp_path):
    t = tmp_path / "g.jsonl"
    main(["enroll", str(features), "--scheme", "grp", "--out", str(t)])
    assert main(["attack", "--arm", str(t), "--dim", "32"]) == 2


def test_attack_arm_urp_templates(features, tmp_path, capsys):
    t = tmp_path / "u.jsonl"
    main(["enroll", str(features), "--scheme", "urp", "--k", "4", "--m", "20", "--out", str(t)])
    capsys.readouterr()
    assert main(["attack", "--arm", str(t), "--dim", "32"]) == 0
    assert summary(capsys)[0]["attack"] == "arm"


def test_attack_bruteforce(features, tmp_path, capsys):
    assert main(["attack", "--bruteforce", "1000", str(features), "--scheme", "urp", "--k", "16",
                 "--m", "100", "--out-dir", str(tmp_path)]) == 0
    s, _ = summary(capsys)
    assert s["scores"] == "18000"
    lines = (tmp_path / "hist_brute_force_attack.csv").read_text().splitlines()
    assert sum(int(l.split(",")[2]) for l in lines[1:]) == 18000
