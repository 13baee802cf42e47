import configparser
import json

import numpy as np
import pandas as pd
import pytest

from conftest import copy_run
from stancekit.cli import main
from stancekit.synth import SynthConfig, build_vocabulary


def edit(cfg, section, key, value):
    p = configparser.ConfigParser(interpolation=None)
    p.read(cfg)
    p[section][key] = str(value)
    with open(cfg, "w") as fh:
        p.write(fh)


def out(cfg):
    return cfg.parent / "out"


@pytest.fixture
def run_copy(pipeline_run, tmp_path):
    return copy_run(pipeline_run[0], tmp_path / "run")


def test_init_refuses_overwrite(tmp_path):
    cfg = tmp_path / "c.ini"
    assert main(["init", str(cfg)]) == 0
    cfg.write_text("[general]\nseed = 1\n")
    assert main(["init", str(cfg)]) == 2
    assert cfg.read_text() == "[general]\nseed = 1\n"
    assert main(["init", str(cfg), "--force"]) == 0
    assert "[stance]" in cfg.read_text()


def test_missing_config_and_input(tmp_path, run_copy):
    assert main(["ingest", "-c", str(tmp_path / "nope.ini")]) == 2
    edit(run_copy, "ingest", "posts", "does/not/exist.jsonl")
    assert main(["ingest", "-c", str(run_copy)]) == 2


def test_corrupted_gazetteer(run_copy):
    (out(run_copy) / "synth" / "gazetteer.csv").write_bytes(b"\x00garbage,,\n1,2\n")
    assert main(["ingest", "-c", str(run_copy)]) == 2


def test_empty_anchor_file(run_copy):
    (out(run_copy) / "synth" / "anchors.csv").write_text("user_id,side\n")
    assert main(["stance", "-c", str(run_copy)]) == 2


def test_empty_posts(run_copy):
    (out(run_copy) / "synth" / "posts.jsonl").write_text("")
    assert main(["ingest", "-c", str(run_copy)]) == 0
    report = json.loads((out(run_copy) / "ingest" / "filter_report.json").read_text())
    assert report["kept"] == 0
    assert main(["stance", "-c", str(run_copy)]) == 3


def test_predict_cohort_too_small(run_copy):
    (out(run_copy) / "synth" / "attendees.csv").write_text("user_id\nq00012\nq00034\n")
    assert main(["predict", "-c", str(run_copy)]) == 3


def test_state_model_too_few_features(run_copy):
    edit(run_copy, "state_model", "min_abs_r", 0.99)
    assert main(["state-model", "-c", str(run_copy)]) == 3


def test_ingest_matches_truth(pipeline_run):
    o = out(pipeline_run[0])
    truth = json.loads((o / "synth" / "truth.json").read_text())
    kept = [json.loads(line)["user_id"] for line in (o / "ingest" / "users.jsonl").read_text().splitlines()]
    assert kept == truth["kept"]
    report = json.loads((o / "ingest" / "filter_report.json").read_text())
    viol = [r["violation"] for r in truth["users"] if r["violation"]]
    assert report["input"] == len(kept) + len(viol)
    assert all(report[rule] == viol.count(rule) for rule in set(viol))


def test_stance_accuracy(pipeline_run):
    o = out(pipeline_run[0])
    truth = {r["user_id"]: r["side"] for r in json.loads((o / "synth" / "truth.json").read_text())["users"]}
    sides = pd.read_csv(o / "stance" / "sides.csv", dtype={"user_id": str})
    labelled = sides[sides.side != "unknown"]
    acc = np.mean([truth[u] == s for u, s in zip(labelled.user_id, labelled.side)])
    assert acc >= 0.95 and len(labelled) >= 0.9 * len(sides)


def test_state_model_recovers_planted_fit(pipeline_run):
    o = out(pipeline_run[0]) / "state_model"
    report = json.loads((o / "report.json").read_text())
    assert abs(report["r2"] - report["planted_r2"]) <= 0.05
    selected = set(report["selected"])
    assert {"perc_rural", "income_inequality_ratio", "perc_vote_republican"} <= selected
    log = pd.read_csv(o / "selection_log.csv")
    candidates = set(pd.read_csv(o / "features.csv", index_col=0, nrows=1).columns)
    assert set(log.column) == candidates
    dropped = set(log.column[log.decision.str.startswith("dropped")])
    assert dropped.isdisjoint(selected) and dropped | selected == candidates
    ols = pd.read_csv(o / "ols.csv")
    assert set(ols.term) == selected | {"intercept"}


def test_predict_outputs(pipeline_run):
    o = out(pipeline_run[0]) / "predict"
    clf = pd.read_csv(o / "classifiers.csv").set_index("model")
    assert set(clf.index) == {"logreg", "linear_svm", "random_forest"}
    for m in ("accuracy", "precision", "recall", "f1"):
        assert clf[f"{m}_mean"].between(0, 1).all() and (clf[f"{m}_std"] >= 0).all()
    abl = pd.read_csv(o / "ablation.csv")
    only = abl[abl.kind == "only"].set_index("features").f1_mean
    assert only.idxmax() == "C"
    report = json.loads((o / "report.json").read_text())
    folds = report["folds"]["logreg"]
    assert len(folds) == 5
    assert clf.loc["logreg", "f1_mean"] == pytest.approx(np.mean([f["f1"] for f in folds]), abs=1e-9)


def test_top_terms(pipeline_run):
    cfg = pipeline_run[0]
    o = out(cfg) / "top_terms"
    terms = pd.read_csv(o / "top_terms.csv", keep_default_na=False)
    assert (terms.count_control + terms.count_rights >= 20).all()
    assert (terms.z >= 1.96).all()
    vocab = build_vocabulary(SynthConfig())
    for side in ("control", "rights"):
        words = set(vocab.class_words(side)) | set(vocab.hashtags[side])
        top = terms[terms.side == side].token
        assert 0 < len(top) <= 50
        assert np.mean([t in words for t in top]) >= 0.9
    assert (terms[terms.side == "control"].z > 0).all()
