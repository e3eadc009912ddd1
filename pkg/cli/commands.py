"""
Command implementations

Each cmd_* function is a pure function of (config, input files): it reads
the declared inputs, writes its artifacts into config.output_dir and returns
what it produced so callers and tests can inspect it.
"""

import csv
import re
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.classifier import (
    TrainedClassifier, decision_function, fit_classifier, load_classifier, save_classifier
)
from core.embeddings import load_embeddings
from core.errors import AlignmentError, ConfigError, DataError
from core.evaluation import (
    AblationRow, AblationSettings, EvalReport, SplitMatrices,
    ablate, bootstrap_sem, evaluate_split, macro_f1,
    write_ablation_csv, write_ablation_points, write_report
)
from core.features import FEATURE_NAMES, ResourceBundle, build_matrix, write_feature_matrix
from core.run_config import ConfigKeys, RESOURCE_PATH_KEYS, SPLIT_KEYS, RunConfig
from core.sme import SmeModel, SmeTrainer, load_knowledge_graph
from core.sme_artifact import SmeArtifactError, load_sme_model, read_sme_fingerprint, save_sme_model
from models.triple import PredictionRecord, Triple
from utils.file_utils import load_predictions, load_triples, read_commented_csv
from utils.filename_utils import (
    ABLATION_CSV, ABLATION_POINTS, CLASSIFIER_FILENAME, SME_TRAINING_LOG,
    artifact_path, evaluation_report_path, feature_output_path, prediction_output_path,
    report_output_path, split_name
)
from utils.logger import logger


PREDICTION_HEADER = ("term1", "term2", "attribute", "predicted")


# ============================================================
# Shared steps
# ============================================================

def _stamp_line(config: RunConfig, extra_inputs: Sequence[Path] = (), **extra) -> str:
    fields = dict(extra)
    fields.update(config.stamp(extra_inputs))
    return " ".join(f"{key}={value}" for key, value in fields.items())


def _report_stamp(config: RunConfig, extra_inputs: Sequence[Path] = ()) -> dict:
    stamp = config.stamp(extra_inputs)
    stamp["C"] = config.classifier.C
    stamp["tolerance"] = config.classifier.tolerance
    stamp["bootstrap_samples"] = config.bootstrap_samples
    return stamp


def _declared_splits(config: RunConfig) -> List[Tuple[str, Path, str]]:
    """(config key, path, output name) of every declared split; names must be distinct."""
    splits = []
    seen: Dict[str, Path] = {}
    for key in SPLIT_KEYS:
        path = config.path(key)
        if path is None:
            continue
        name = split_name(path)
        if name in seen:
            raise ConfigError(
                f"Splits {config.display_path(seen[name])} and {config.display_path(path)} "
                f"would both write outputs named '{name}'"
            )
        seen[name] = path
        splits.append((key, path, name))
    return splits


def _train_and_save_sme(config: RunConfig) -> SmeModel:
    (edge_path,) = config.require(ConfigKeys.EDGES)
    kg, schema = load_knowledge_graph(edge_path, config.path(ConfigKeys.SCHEMA))

    init_store = None
    if config.init_from_embeddings:
        (embeddings_path,) = config.require(ConfigKeys.EMBEDDINGS)
        init_store = load_embeddings(embeddings_path)

    trainer = SmeTrainer(kg, schema, config.sme_hyperparams(), init_store)
    model = trainer.train()
    save_sme_model(model, config.sme_model_path, fingerprint=config.sme_fingerprint())

    log_path = artifact_path(config.output_dir, SME_TRAINING_LOG)
    with open(log_path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# {_stamp_line(config)}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(("step", "mean_loss"))
        for step, loss in trainer.loss_log:
            writer.writerow((step, repr(float(loss))))
    return model


def _sme_model(config: RunConfig, train_if_missing: bool = True) -> SmeModel:
    """
    The relational model for this run.

    An explicit paths.sme_model is used as given. The default artifact in the
    output directory is reused only when its fingerprint matches this run's
    SME settings and inputs; otherwise it is retrained, or rejected when
    train_if_missing is False.
    """
    path = config.sme_model_path
    explicit = config.path(ConfigKeys.SME_MODEL) is not None

    if path.is_file():
        if explicit:
            return load_sme_model(path)
        try:
            current = read_sme_fingerprint(path) == config.sme_fingerprint()
        except SmeArtifactError as e:
            logger.warning(f"Ignoring unreadable SME model: {e}", source="CLI")
            current = False
        if current:
            return load_sme_model(path)
        if not train_if_missing:
            raise DataError("SME model was trained with other settings or inputs; run train-sme or train", path)
        logger.info(f"SME model at {path} is out of date, retraining", source="CLI")
        return _train_and_save_sme(config)

    if not train_if_missing:
        raise DataError("SME model artifact not found; run train-sme or train first", path)
    logger.info(f"No SME model at {path}, training one", source="CLI")
    return _train_and_save_sme(config)


def _bundle(config: RunConfig, model: SmeModel) -> ResourceBundle:
    return ResourceBundle.load(*config.require(*RESOURCE_PATH_KEYS), sme_model=model)


def _labeled_matrix(path: Path, bundle: ResourceBundle) -> Tuple[np.ndarray, np.ndarray]:
    triples = load_triples(path, require_labels=True)
    if not triples:
        raise DataError("Split is empty", path)
    return build_matrix(triples, bundle, require_labels=True)


_INPUT_COMMENT = re.compile(r"^input=(.*) rows=\d+ ")


def _check_prediction_target(config: RunConfig, out_path: Path, split_path: Path):
    """Refuse to replace predictions that were written for a different input file."""
    if not out_path.is_file():
        return
    comments, _ = read_commented_csv(out_path)
    match = _INPUT_COMMENT.match(comments[0]) if comments else None
    if match and match.group(1) != config.display_path(split_path):
        raise ConfigError(
            f"{out_path.name} already holds predictions for {match.group(1)}; "
            f"use --out to keep predictions for {config.display_path(split_path)} separately"
        )


# ============================================================
# Commands
# ============================================================

def cmd_train_sme(config: RunConfig) -> SmeModel:
    """Train the relational model; writes the artifact and sme_training_log.csv."""
    return _train_and_save_sme(config)


def cmd_extract_features(config: RunConfig) -> List[Path]:
    """features_<split>.csv for every declared split."""
    splits = _declared_splits(config)
    bundle = _bundle(config, _sme_model(config))
    inputs = (config.sme_model_path,)
    written = []
    for _, path, name in splits:
        triples = load_triples(path)
        X, labels = build_matrix(triples, bundle)
        written.append(write_feature_matrix(
            feature_output_path(config.output_dir, name), X, labels,
            comment=_stamp_line(config, inputs, input=config.display_path(path), rows=len(triples))
        ))
    if not written:
        logger.warning("No split paths declared; nothing extracted", source="CLI")
    return written


def cmd_train(config: RunConfig) -> Dict[str, EvalReport]:
    """
    Fit scales and SVM on the train split, clip, save classifier.json and
    write a report for every declared split.
    """
    (train_path,) = config.require(ConfigKeys.TRAIN)
    splits = _declared_splits(config)
    bundle = _bundle(config, _sme_model(config))
    inputs = (config.sme_model_path,)

    X_train, y_train = _labeled_matrix(train_path, bundle)
    clf = fit_classifier(
        X_train, y_train, FEATURE_NAMES,
        hyperparams=config.classifier, seed=config.sub_seed("svm")
    )
    save_classifier(clf, artifact_path(config.output_dir, CLASSIFIER_FILENAME), extra=config.stamp(inputs))
    _log_coefficients(clf)

    reports: Dict[str, EvalReport] = {}
    stamp = _report_stamp(config, inputs)
    for key, path, name in splits:
        X, y = (X_train, y_train) if key == ConfigKeys.TRAIN else _labeled_matrix(path, bundle)
        report = evaluate_split(clf, X, y, config.bootstrap_samples, config.sub_seed("bootstrap"))
        write_report(report_output_path(config.output_dir, name), report, name, **stamp)
        reports[name] = report
    return reports


def _log_coefficients(clf: TrainedClassifier):
    for name, weight in zip(clf.feature_names, clf.weights):
        logger.debug(f"{name:<24} {weight: .6f}", source="Classifier")
    logger.debug(f"{'intercept':<24} {clf.intercept: .6f}", source="Classifier")


def cmd_predict(config: RunConfig, split_path: Path, classifier_path: Optional[Path] = None) -> Path:
    """
    predictions_<split>.csv in input order.

    The row count of the written file is re-read and checked before returning.
    """
    split_path = Path(split_path).resolve()
    classifier_path = Path(classifier_path or config.output_dir / CLASSIFIER_FILENAME)
    out_path = prediction_output_path(config.output_dir, split_path)
    _check_prediction_target(config, out_path, split_path)

    clf = load_classifier(classifier_path)
    bundle = _bundle(config, _sme_model(config, train_if_missing=False))

    triples = load_triples(split_path)
    X, _ = build_matrix(triples, bundle)
    scores = decision_function(clf, X) if triples else np.zeros(0)
    records = [PredictionRecord(t, int(s > 0), float(s)) for t, s in zip(triples, scores)]

    inputs = (split_path, classifier_path, config.sme_model_path)
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# {_stamp_line(config, inputs, input=config.display_path(split_path), rows=len(records))}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(PREDICTION_HEADER)
        for record in records:
            writer.writerow(record.as_row())

    _, rows = read_commented_csv(out_path)
    written = len(rows) - 1
    if written != len(triples):
        raise DataError(f"Wrote {written} prediction rows for {len(triples)} input rows", out_path)

    for record in records:
        logger.debug(f"{record.triple} score {record.decision_score:.6f}", source="Predict")
    if not records:
        logger.warning(f"{split_path.name} has zero rows; wrote header only", source="Predict")
    logger.success(f"Wrote {written} predictions to {out_path.name}", source="Predict")
    return out_path


def _check_alignment(predictions: Sequence[Triple], gold: Sequence[Triple]):
    for row, (p, g) in enumerate(zip(predictions, gold), start=1):
        if p.key != g.key:
            raise AlignmentError(f"Row {row}: prediction {p.key} does not match gold {g.key}")
    if len(predictions) > len(gold):
        extra = predictions[len(gold)]
        raise AlignmentError(f"Row {len(gold) + 1}: prediction {extra.key} has no gold row")
    if len(gold) > len(predictions):
        extra = gold[len(predictions)]
        raise AlignmentError(f"Row {len(predictions) + 1}: gold {extra.key} has no prediction")


def cmd_evaluate(config: RunConfig, predictions_path: Path, gold_path: Path) -> EvalReport:
    """report_eval_<split>.json for a predictions file against its gold split."""
    predictions = load_predictions(predictions_path)
    gold = load_triples(gold_path, require_labels=True)
    _check_alignment(predictions, gold)

    predicted = [p.label for p in predictions]
    labels = [g.label for g in gold]
    report = macro_f1(predicted, labels)
    if report.n >= 2:
        report = report.with_sem(
            bootstrap_sem(predicted, labels, config.bootstrap_samples, config.sub_seed("bootstrap"))
        )

    name = split_name(gold_path)
    stamp = _report_stamp(config, (predictions_path, gold_path))
    write_report(evaluation_report_path(config.output_dir, name), report, name, **stamp)
    return report


def cmd_ablate(config: RunConfig, max_workers: Optional[int] = None) -> List[AblationRow]:
    """ablation.csv and ablation_points.json over all 31 source subsets."""
    paths = config.require(*SPLIT_KEYS)
    bundle = _bundle(config, _sme_model(config))
    inputs = (config.sme_model_path,)

    (X_train, y_train), (X_val, y_val), (X_test, y_test) = (_labeled_matrix(p, bundle) for p in paths)
    data = SplitMatrices(X_train, y_train, X_val, y_val, X_test, y_test)
    settings = AblationSettings(
        hyperparams=config.classifier,
        svm_seed=config.sub_seed("svm"),
        bootstrap_samples=config.bootstrap_samples,
        bootstrap_seed=config.sub_seed("bootstrap"),
    )

    rows = ablate(data, settings, max_workers=max_workers or config.max_workers)
    write_ablation_csv(artifact_path(config.output_dir, ABLATION_CSV), rows, stamp=_stamp_line(config, inputs))
    write_ablation_points(artifact_path(config.output_dir, ABLATION_POINTS), rows, **config.stamp(inputs))
    return rows
