"""End-to-end runs of the command-line front end on copies of the mini dataset."""

import csv
import json
import shutil
from dataclasses import replace

import numpy as np
import pytest

from cli import main
from cli.commands import cmd_ablate, cmd_evaluate, cmd_predict, cmd_train, cmd_train_sme
from core.errors import ConfigError, DataError
from core.evaluation import ABLATION_HEADER, SUBSET_COUNT
from core.features import FEATURE_NAMES
from core.run_config import ConfigKeys, load_run_config
from core.sme import SmeModel, score_triple
from core.sme_artifact import load_sme_model, save_sme_model
from tests.conftest import copy_mini_dataset
from utils.file_utils import load_triples, read_commented_csv


ARTIFACTS = (
    "sme_model.bin", "sme_training_log.csv", "classifier.json",
    "report_train.json", "report_validation.json", "report_test.json",
)


def _run(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    """A mini copy on which `train` has already run."""
    config_path = copy_mini_dataset(tmp_path_factory.mktemp("cli") / "mini")
    assert _run("train", "--config", config_path) == 0
    return config_path


def _read_json(path):
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


class TestTrain:

    def test_artifacts_written(self, trained):
        out = trained.parent / "out"
        for name in ARTIFACTS:
            assert (out / name).is_file(), name

    def test_classifier_artifact(self, trained):
        data = _read_json(trained.parent / "out" / "classifier.json")
        assert data["feature_names"] == list(FEATURE_NAMES)
        assert len(data["weights"]) == 15
        assert all(w >= 0 for w in data["weights"])
        assert data["seed"] == 42
        assert len(data["config_hash"]) == 16

    def test_training_split_is_fit(self, trained):
        report = _read_json(trained.parent / "out" / "report_train.json")
        assert report["f1_macro"] >= 0.95
        assert report["n"] == 20

    def test_report_echoes_defaults(self, trained):
        report = _read_json(trained.parent / "out" / "report_validation.json")
        assert report["C"] == 1.0
        assert report["tolerance"] == 1e-4
        assert report["bootstrap_samples"] == 1000
        assert report["sem_estimator"] == "bootstrap"
        assert report["split"] == "validation"

    def test_training_log(self, trained):
        comments, rows = read_commented_csv(trained.parent / "out" / "sme_training_log.csv")
        assert comments[0].startswith("seed=42 config_hash=")
        assert rows[0][1] == ["step", "mean_loss"]
        assert [int(row[0]) for _, row in rows[1:]] == [1000, 2000, 3000]

    def test_rerun_is_byte_identical(self, trained, tmp_path):
        other = copy_mini_dataset(tmp_path / "mini")
        assert _run("train", "--config", other) == 0
        for name in ARTIFACTS:
            first = (trained.parent / "out" / name).read_bytes()
            second = (other.parent / "out" / name).read_bytes()
            assert first == second, f"{name} differs between runs"


class TestPredictEvaluate:

    def test_predict_then_evaluate(self, trained):
        out = trained.parent / "out"
        test_split = trained.parent / "test.csv"
        train_report_bytes = (out / "report_test.json").read_bytes()

        assert _run("predict", test_split, "--config", trained) == 0
        predictions = out / "predictions_test.csv"
        comments, rows = read_commented_csv(predictions)
        n_input = len(load_triples(test_split))
        assert len(rows) - 1 == n_input
        assert comments[0].startswith(f"input=test.csv rows={n_input} seed=42")
        assert rows[0][1] == ["term1", "term2", "attribute", "predicted"]

        assert _run("evaluate", predictions, test_split, "--config", trained) == 0
        # evaluate has its own report; train's is left alone
        assert (out / "report_test.json").read_bytes() == train_report_bytes
        train_report = _read_json(out / "report_test.json")
        eval_report = _read_json(out / "report_eval_test.json")
        for key in ("f1_positive", "f1_negative", "f1_macro", "sem", "n", "seed"):
            assert eval_report[key] == train_report[key], key
        assert eval_report["config_hash"] != train_report["config_hash"]

    def test_predict_unlabeled_input(self, trained, tmp_path):
        split = tmp_path / "unlabeled.csv"
        split.write_text("frog,snail,legs\ncar,horse,wheels\nsofa,couch,legs\n", encoding="utf-8")
        config = load_run_config(trained)
        path = cmd_predict(config, split)
        _, rows = read_commented_csv(path)
        assert path.name == "predictions_unlabeled.csv"
        assert [row[:3] for _, row in rows[1:]] == [
            ["frog", "snail", "legs"], ["car", "horse", "wheels"], ["sofa", "couch", "legs"]
        ]
        assert all(row[3] in ("0", "1") for _, row in rows[1:])
        # All-zero feature row scores the intercept, which is not positive here
        assert rows[3][1][3] == "0"

    def test_predict_empty_split(self, trained, tmp_path):
        split = tmp_path / "empty.csv"
        split.write_text("", encoding="utf-8")
        path = cmd_predict(load_run_config(trained), split)
        comments, rows = read_commented_csv(path)
        assert "rows=0" in comments[0]
        assert len(rows) == 1

    def test_predict_is_deterministic(self, trained):
        config = load_run_config(trained)
        first = cmd_predict(config, trained.parent / "validation.csv").read_bytes()
        second = cmd_predict(config, trained.parent / "validation.csv").read_bytes()
        assert first == second

    def test_evaluate_perfect_predictions(self, trained, tmp_path):
        gold = trained.parent / "validation.csv"
        predictions = tmp_path / "predictions.csv"
        with open(predictions, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["term1", "term2", "attribute", "predicted"])
            for t in load_triples(gold):
                writer.writerow([t.term1, t.term2, t.attribute, t.label])

        out = tmp_path / "eval_out"
        assert _run("evaluate", predictions, gold, "--config", trained, "--out", out) == 0
        report = _read_json(out / "report_eval_validation.json")
        assert report["f1_macro"] == 1.0
        assert report["sem"] == 0.0

    def test_evaluate_report_golden(self, mini_config, tmp_path, golden):
        gold = mini_config.parent / "validation.csv"
        predictions = tmp_path / "predictions.csv"
        # One miss in each class: tp = tn = 3, fp = fn = 1
        predicted = [1, 1, 1, 0, 1, 0, 0, 0]
        with open(predictions, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["term1", "term2", "attribute", "predicted"])
            for t, p in zip(load_triples(gold), predicted):
                writer.writerow([t.term1, t.term2, t.attribute, p])

        config = replace(load_run_config(mini_config), bootstrap_samples=1)
        cmd_evaluate(config, predictions, gold)
        text = (config.output_dir / "report_eval_validation.json").read_text(encoding="utf-8")

        config_hash = config.config_hash([predictions, gold])
        assert f'"config_hash": "{config_hash}"' in text
        golden("mini_report_eval_validation.json", text.replace(config_hash, "CONFIG_HASH"))

    def test_misaligned_predictions(self, trained, tmp_path, capsys):
        gold = trained.parent / "validation.csv"
        triples = load_triples(gold)
        predictions = tmp_path / "predictions.csv"
        with open(predictions, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["term1", "term2", "attribute", "predicted"])
            for t in reversed(triples):
                writer.writerow([t.term1, t.term2, t.attribute, 1])

        code = _run("evaluate", predictions, gold, "--config", trained, "--out", tmp_path / "eval_out")
        assert code == 2
        assert "Row 1" in capsys.readouterr().err

    def test_predict_without_classifier(self, trained, tmp_path):
        code = _run("predict", trained.parent / "test.csv", "--config", trained,
                    "--classifier", tmp_path / "missing.json")
        assert code == 2


class TestErrors:

    def test_missing_edges_file(self, tmp_path, capsys):
        config_path = copy_mini_dataset(tmp_path / "mini")
        (config_path.parent / "edges.tsv").unlink()
        code = _run("train", "--config", config_path)
        assert code == 1
        assert "edges.tsv" in capsys.readouterr().err

    def test_malformed_task_file(self, tmp_path, capsys):
        config_path = copy_mini_dataset(tmp_path / "mini")
        with open(config_path.parent / "train.csv", "a", encoding="utf-8") as f:
            f.write("frog,snail,legs,maybe\n")
        code = _run("train", "--config", config_path)
        assert code == 2
        assert "train.csv:21" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [[], ["bogus"], ["predict"], ["train", "--seed", "x"]])
    def test_usage_errors(self, argv):
        assert main(argv) == 1

    def test_help(self):
        assert main(["--help"]) == 0


class TestTrainSme:

    def test_artifact_round_trip(self, tmp_path):
        config = load_run_config(copy_mini_dataset(tmp_path / "mini", iterations=500), seed=7)
        model = cmd_train_sme(config)
        loaded = load_sme_model(config.sme_model_path)
        assert loaded.parameters_equal(model)
        for triple in (("HasA", "frog", "legs"), ("IsA", "car", "vehicle"), ("PartOf", "shell", "snail")):
            assert score_triple(loaded, *triple) == score_triple(model, *triple)

    def test_rerun_is_byte_identical(self, tmp_path):
        config_path = copy_mini_dataset(tmp_path / "mini", iterations=500)
        assert _run("train-sme", "--config", config_path) == 0
        first = (config_path.parent / "out" / "sme_model.bin").read_bytes()
        assert _run("train-sme", "--config", config_path) == 0
        assert (config_path.parent / "out" / "sme_model.bin").read_bytes() == first

    def test_seed_flag_changes_model(self, tmp_path):
        config_path = copy_mini_dataset(tmp_path / "mini", iterations=200)
        assert _run("train-sme", "--config", config_path, "--out", tmp_path / "a") == 0
        assert _run("train-sme", "--config", config_path, "--out", tmp_path / "b", "--seed", 8) == 0
        assert (tmp_path / "a" / "sme_model.bin").read_bytes() != (tmp_path / "b" / "sme_model.bin").read_bytes()


class TestExtractFeatures:

    def test_matrices_for_every_split(self, trained, tmp_path):
        out = tmp_path / "features"
        sme_model = trained.parent / "out" / "sme_model.bin"
        assert _run("extract-features", "--config", trained, "--out", out, "--sme-model", sme_model) == 0
        for split, rows in (("train", 20), ("validation", 8), ("test", 8)):
            comments, body = read_commented_csv(out / f"features_{split}.csv")
            assert comments[0].startswith(f"input={split}.csv rows={rows}")
            assert body[0][1][:15] == list(FEATURE_NAMES)
            assert len(body) - 1 == rows


class TestAblate:

    def test_ablation_outputs(self, trained):
        config = load_run_config(trained)
        rows = cmd_ablate(config, max_workers=1)
        assert len(rows) == SUBSET_COUNT

        out = trained.parent / "out"
        comments, body = read_commented_csv(out / "ablation.csv")
        assert comments[0].startswith("seed=42 config_hash=")
        assert tuple(body[0][1]) == ABLATION_HEADER
        assert len(body) - 1 == SUBSET_COUNT

        # The all-sources row is exactly the full classifier's validation score
        full = body[-1][1]
        report = _read_json(out / "report_validation.json")
        assert full[0] == "ABCDE"
        assert float(full[1]) == report["f1_macro"]
        assert float(full[2]) == report["sem"]

        points = _read_json(out / "ablation_points.json")
        assert len(points["points"]) == sum(not row.failed for row in rows)

    def test_worker_count_does_not_change_results(self, trained, tmp_path):
        pytest.importorskip("PySide6")
        serial = cmd_ablate(load_run_config(trained, output_dir=tmp_path / "serial"), max_workers=1)
        pooled = cmd_ablate(load_run_config(trained, output_dir=tmp_path / "pooled"), max_workers=4)
        assert pooled == serial
        assert (tmp_path / "serial" / "ablation.csv").read_bytes() == (tmp_path / "pooled" / "ablation.csv").read_bytes()

    def test_cli_entry(self, trained, tmp_path):
        out = tmp_path / "ablate_out"
        sme_model = trained.parent / "out" / "sme_model.bin"
        assert _run("ablate", "--config", trained, "--out", out, "--sme-model", sme_model, "--workers", 1) == 0
        values = np.array([
            float(row[1]) for _, row in read_commented_csv(out / "ablation.csv")[1][1:] if row[1]
        ])
        assert np.all((values >= 0) & (values <= 1))


def _stamp_hash(path) -> str:
    comments, _ = read_commented_csv(path)
    return comments[0].rsplit("config_hash=", 1)[1]


class TestSmeModelReuse:

    def test_seed_change_retrains_default_model(self, tmp_path):
        shared = copy_mini_dataset(tmp_path / "shared", iterations=500)
        fresh = copy_mini_dataset(tmp_path / "fresh", iterations=500)

        assert _run("train", "--config", shared) == 0
        assert _run("train", "--config", shared, "--seed", 7) == 0
        assert _run("train", "--config", fresh, "--seed", 7) == 0

        for name in ("sme_model.bin", "classifier.json", "report_test.json"):
            first = (shared.parent / "out" / name).read_bytes()
            second = (fresh.parent / "out" / name).read_bytes()
            assert first == second, f"{name} depends on the previous run"

    def test_matching_model_is_reused(self, tmp_path):
        config = load_run_config(copy_mini_dataset(tmp_path / "mini", iterations=200))
        cmd_train_sme(config)
        path = config.sme_model_path
        # Same fingerprint, different parameters: reuse must load this file as is
        trained_model = load_sme_model(path)
        zeros = SmeModel.zeros(trained_model.terms, trained_model.relations, trained_model.term_dim)
        save_sme_model(zeros, path, config.sme_fingerprint())
        before = path.read_bytes()
        cmd_train(config)
        assert path.read_bytes() == before

    def test_predict_rejects_model_from_other_settings(self, trained):
        config = load_run_config(trained, seed=7)
        with pytest.raises(DataError):
            cmd_predict(config, trained.parent / "validation.csv")

    def test_explicit_model_is_used_as_given(self, trained, tmp_path):
        model_path = tmp_path / "other.bin"
        shutil.copy(trained.parent / "out" / "sme_model.bin", model_path)
        out = tmp_path / "features"
        code = _run("extract-features", "--config", trained, "--out", out, "--sme-model", model_path, "--seed", 7)
        assert code == 0
        assert model_path.read_bytes() == (trained.parent / "out" / "sme_model.bin").read_bytes()


class TestStamps:

    def test_prediction_stamp_follows_split_content(self, trained, tmp_path):
        split = tmp_path / "stamped.csv"
        config = load_run_config(trained)
        split.write_text("frog,snail,legs\n", encoding="utf-8")
        first = _stamp_hash(cmd_predict(config, split))
        split.write_text("car,horse,wheels\n", encoding="utf-8")
        second = _stamp_hash(cmd_predict(config, split))
        assert first != second
        assert config.config_hash() not in (first, second)

    def test_feature_stamp_follows_sme_model_bytes(self, trained, tmp_path):
        model_path = tmp_path / "model.bin"
        shutil.copy(trained.parent / "out" / "sme_model.bin", model_path)
        args = ("extract-features", "--config", trained, "--sme-model", model_path)

        assert _run(*args, "--out", tmp_path / "a") == 0
        save_sme_model(load_sme_model(model_path), model_path, fingerprint="rewritten")
        assert _run(*args, "--out", tmp_path / "b") == 0

        first = tmp_path / "a" / "features_train.csv"
        second = tmp_path / "b" / "features_train.csv"
        assert _stamp_hash(first) != _stamp_hash(second)
        assert read_commented_csv(first)[1] == read_commented_csv(second)[1]


class TestOutputNames:

    def test_predictions_for_same_named_splits_do_not_overwrite(self, trained, tmp_path):
        config = load_run_config(trained, output_dir=tmp_path / "out",
                                 path_overrides={ConfigKeys.SME_MODEL: trained.parent / "out" / "sme_model.bin"})
        classifier = trained.parent / "out" / "classifier.json"
        other = tmp_path / "elsewhere" / "test.csv"
        other.parent.mkdir()
        shutil.copy(trained.parent / "test.csv", other)

        written = cmd_predict(config, trained.parent / "test.csv", classifier)
        before = written.read_bytes()
        with pytest.raises(ConfigError):
            cmd_predict(config, other, classifier)
        assert written.read_bytes() == before
        # Rerunning on the same input still overwrites
        assert cmd_predict(config, trained.parent / "test.csv", classifier).read_bytes() == before

    def test_declared_splits_need_distinct_names(self, mini_config, tmp_path):
        clash = tmp_path / "sub" / "train.csv"
        clash.parent.mkdir()
        shutil.copy(mini_config.parent / "validation.csv", clash)
        config = load_run_config(mini_config, path_overrides={ConfigKeys.VALIDATION: clash})
        with pytest.raises(ConfigError, match="train"):
            cmd_train(config)
        assert not config.sme_model_path.exists()
