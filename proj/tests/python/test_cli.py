import csv
import json
import subprocess


def run(cli, *args, check=True):
    return subprocess.run([cli, *map(str, args)], capture_output=True, text=True, check=check)


def test_synth_folds_evaluate(cli, tmp_path):
    data = tmp_path / "data"
    run(cli, "synth", "--out", data, "--profiles", 200, "--matched", 80, "--seed", 5)
    folds = tmp_path / "folds"
    run(cli, "folds", "--s1", data / "s1.jsonl", "--s2", data / "s2.jsonl", "--ref", data,
        "--positives", data / "positives.csv", "--k", 2, "--out", folds)
    assert (folds / "manifest.json").exists()
    out = tmp_path / "a.json"
    run(cli, "evaluate", "--manifest", folds, "--scenario", "A", "--out", out,
        "--roc-out", tmp_path / "roc.csv")
    report = json.loads(out.read_text())
    assert report["summary"]["auc"]["mean"] > 0.9
    assert (tmp_path / "roc.csv").read_text().startswith("fold,fpr,tpr")

    model = tmp_path / "model.json"
    run(cli, "train", "--input", folds / "manifest.json", "--fold", 0, "--out", model)
    preds = tmp_path / "preds.csv"
    run(cli, "predict", "--model", model, "--input", folds / "fold_01_test.csv", "--out", preds)
    rows = list(csv.reader(preds.open()))
    assert rows[0] == ["id1", "id2", "score"]
    assert all(0.0 <= float(r[2]) <= 1.0 for r in rows[1:])


def test_scenario_b_without_equal_soundex_fails(cli, tmp_path):
    data = tmp_path / "data"
    run(cli, "synth", "--out", data, "--profiles", 120, "--matched", 60, "--pseudonym-rate", 1.0)
    folds = tmp_path / "folds"
    run(cli, "folds", "--s1", data / "s1.jsonl", "--s2", data / "s2.jsonl", "--ref", data,
        "--positives", data / "positives.csv", "--k", 2, "--out", folds)
    res = run(cli, "evaluate", "--manifest", folds, "--scenario", "B", check=False)
    if res.returncode == 0:
        # Random name collisions can still share a Soundex code; the report must say so.
        report = json.loads(res.stdout)
        assert report["scenario"] == "B"
    else:
        assert "xlink: error:" in res.stderr


def test_ablate_only_x(cli, corpus, tmp_path):
    folds = tmp_path / "folds"
    run(cli, "folds", "--s1", corpus / "s1.jsonl", "--s2", corpus / "s2.jsonl", "--ref", corpus,
        "--positives", corpus / "positives.csv", "--k", 2, "--out", folds)
    out = tmp_path / "abl.csv"
    run(cli, "ablate", "--manifest", folds, "--mode", "only-x", "--csv-out", out)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["index", "feature", "auc"]
    assert len(rows) == 28


def test_bad_input_exits_nonzero(cli, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id":"a","full_name":"x"}\n{not json\n')
    res = run(cli, "ingest", bad, "--network", "S1", "--out", tmp_path / "o.jsonl", check=False)
    assert res.returncode != 0
    assert "bad.jsonl:2" in res.stderr
