"""
Evaluation and feature-source ablation

Macro F1 is the mean of the per-class F1 scores with each class in turn
treated as positive. Its standard error is estimated by a seeded bootstrap
over instances. The ablation sweep retrains the classifier on every
non-empty subset of the five feature sources.
"""

import csv
import json
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import f1_score

from core.classifier import SvmHyperparams, TrainedClassifier, decision_function, fit_classifier
from core.errors import DataError, DiscrimError, LengthMismatchError
from core.features import FEATURE_NAMES, SOURCE_LABELS, source_columns
from utils.logger import logger


DEFAULT_BOOTSTRAP_SAMPLES = 1000
ABLATION_HEADER = ("subset", "validation_f1", "validation_sem", "test_f1", "test_sem")
SUBSET_COUNT = 2 ** len(SOURCE_LABELS) - 1


@dataclass(frozen=True)
class EvalReport:
    f1_positive: float
    f1_negative: float
    f1_macro: float
    sem: Optional[float]
    n: int

    def __post_init__(self):
        for name in ("f1_positive", "f1_negative", "f1_macro"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")

    def with_sem(self, sem: Optional[float]) -> "EvalReport":
        return EvalReport(self.f1_positive, self.f1_negative, self.f1_macro, sem, self.n)

    def to_dict(self, split: str, **stamp) -> dict:
        data = asdict(self)
        data["split"] = split
        data["sem_estimator"] = "bootstrap"
        data.update(stamp)
        return data


# ============================================================
# Scores
# ============================================================

def _class_f1(predictions: np.ndarray, gold: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    (F1 of class 1, F1 of class 0) with the absent-class convention: a class
    that is neither predicted nor present scores 1.

    1-D inputs give scalars. 2-D inputs of shape (n, k) are k independent
    label sets, one per column, scored as a multilabel indicator in one call.
    """
    if predictions.ndim == 1:
        f1_pos, f1_neg = f1_score(gold, predictions, labels=[1, 0], average=None, zero_division=1.0)
        return f1_pos, f1_neg
    f1_pos = f1_score(gold, predictions, average=None, zero_division=1.0)
    f1_neg = f1_score(1 - gold, 1 - predictions, average=None, zero_division=1.0)
    return f1_pos, f1_neg


def _as_binary(values: Sequence[int], name: str) -> np.ndarray:
    array = np.asarray(values, dtype=np.int64).reshape(-1)
    if not np.all((array == 0) | (array == 1)):
        raise DataError(f"{name} must contain only 0 and 1")
    return array


def _check_pair(predictions: Sequence[int], gold: Sequence[int], minimum: int) -> Tuple[np.ndarray, np.ndarray]:
    pred = _as_binary(predictions, "predictions")
    gold_ = _as_binary(gold, "gold")
    if len(pred) != len(gold_):
        raise LengthMismatchError(f"{len(pred)} predictions vs {len(gold_)} gold labels")
    if len(pred) < minimum:
        raise DataError(f"Need at least {minimum} instance(s), got {len(pred)}")
    return pred, gold_


def macro_f1(predictions: Sequence[int], gold: Sequence[int]) -> EvalReport:
    """
    Per-class and macro-averaged F1 (report has no SEM).

    Raises:
        LengthMismatchError: lists differ in length
        DataError: empty input
    """
    pred, gold_ = _check_pair(predictions, gold, minimum=1)
    f1_pos, f1_neg = (float(v) for v in _class_f1(pred, gold_))
    return EvalReport(
        f1_positive=f1_pos,
        f1_negative=f1_neg,
        f1_macro=(f1_pos + f1_neg) / 2,
        sem=None,
        n=len(pred),
    )


def bootstrap_sem(
        predictions: Sequence[int],
        gold: Sequence[int],
        B: int = DEFAULT_BOOTSTRAP_SAMPLES,
        seed: int = 0
) -> float:
    """
    Sample standard deviation of macro F1 over B seeded resamples of the instances.
    """
    if not isinstance(B, (int, np.integer)) or B < 1:
        raise DataError(f"Bootstrap sample count must be a positive integer, got {B!r}")
    pred, gold_ = _check_pair(predictions, gold, minimum=2)
    if B == 1:
        return 0.0

    rng = np.random.default_rng(seed)
    indices = rng.integers(0, len(pred), size=(B, len(pred)))
    # One column per resample
    f1_pos, f1_neg = _class_f1(pred[indices].T, gold_[indices].T)
    scores = (f1_pos + f1_neg) / 2
    return float(np.std(scores, ddof=1))


def evaluate_split(
        clf: TrainedClassifier,
        X: np.ndarray,
        gold: np.ndarray,
        bootstrap_samples: int = DEFAULT_BOOTSTRAP_SAMPLES,
        seed: int = 0
) -> EvalReport:
    """Predict a split with clf and score it, SEM included when n >= 2."""
    predictions = (decision_function(clf, X) > 0).astype(np.int64)
    report = macro_f1(predictions, gold)
    sem = bootstrap_sem(predictions, gold, bootstrap_samples, seed) if report.n >= 2 else None
    return report.with_sem(sem)


# ============================================================
# Ablation
# ============================================================

def subset_label(mask: int) -> str:
    """Bitmask over sources (bit 0 = A) -> label in canonical order, e.g. 0b01011 -> "ABD"."""
    if not 1 <= mask <= SUBSET_COUNT:
        raise ValueError(f"Subset mask out of range: {mask}")
    return "".join(label for bit, label in enumerate(SOURCE_LABELS) if mask & (1 << bit))


@dataclass(frozen=True)
class AblationRow:
    """One subset's scores; all four are None when its fit failed."""
    subset: str
    validation_f1: Optional[float]
    validation_sem: Optional[float]
    test_f1: Optional[float]
    test_sem: Optional[float]
    error: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.error)

    def cells(self) -> List[str]:
        def fmt(value: Optional[float]) -> str:
            return "" if value is None else repr(float(value))
        return [self.subset, fmt(self.validation_f1), fmt(self.validation_sem), fmt(self.test_f1), fmt(self.test_sem)]


@dataclass(frozen=True, eq=False)
class SplitMatrices:
    """Full 15-column matrices and labels for the three splits."""
    X_train: np.ndarray
    y_train: np.ndarray
    X_validation: np.ndarray
    y_validation: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray

    def __post_init__(self):
        for name in ("train", "validation", "test"):
            X = getattr(self, f"X_{name}")
            y = getattr(self, f"y_{name}")
            if X.shape[0] == 0:
                raise DataError(f"The {name} split is empty")
            if X.shape[0] != len(y):
                raise LengthMismatchError(f"{name}: {X.shape[0]} rows vs {len(y)} labels")


@dataclass(frozen=True)
class AblationSettings:
    hyperparams: SvmHyperparams = SvmHyperparams()
    svm_seed: int = 0
    bootstrap_samples: int = DEFAULT_BOOTSTRAP_SAMPLES
    bootstrap_seed: int = 0


def evaluate_subset(mask: int, data: SplitMatrices, settings: AblationSettings) -> AblationRow:
    """
    Restrict to the subset's columns, fit on train, score validation and test.

    Any toolkit error is recorded in the row instead of propagating.
    """
    label = subset_label(mask)
    columns = source_columns(label)
    names = [FEATURE_NAMES[c] for c in columns]

    try:
        clf = fit_classifier(
            data.X_train[:, columns], data.y_train, names,
            hyperparams=settings.hyperparams, seed=settings.svm_seed
        )
        validation = evaluate_split(
            clf, data.X_validation[:, columns], data.y_validation,
            settings.bootstrap_samples, settings.bootstrap_seed
        )
        test = evaluate_split(
            clf, data.X_test[:, columns], data.y_test,
            settings.bootstrap_samples, settings.bootstrap_seed
        )
    except DiscrimError as e:
        logger.warning(f"Subset {label} failed: {e}", source="Ablation")
        return AblationRow(label, None, None, None, None, error=str(e))

    return AblationRow(label, validation.f1_macro, validation.sem, test.f1_macro, test.sem)


def ablate(
        data: SplitMatrices,
        settings: AblationSettings = AblationSettings(),
        max_workers: int = 1,
        on_row: Optional[Callable[[AblationRow], None]] = None
) -> List[AblationRow]:
    """
    All 31 subsets in bitmask order.

    With max_workers > 1 the fits run on a thread pool; each fit is seeded,
    so the rows do not depend on scheduling.
    """
    masks = list(range(1, SUBSET_COUNT + 1))
    logger.info(f"Ablation over {len(masks)} feature-source subsets", source="Ablation")

    if max_workers > 1:
        from PySide6.QtCore import Qt
        from workers.ablation_processor import AblationProcessor

        processor = AblationProcessor(data, settings, max_workers=max_workers)
        if on_row is not None:
            processor.row_finished.connect(on_row, Qt.DirectConnection)
        rows = processor.run(masks)
    else:
        rows = []
        for mask in masks:
            row = evaluate_subset(mask, data, settings)
            if on_row is not None:
                on_row(row)
            rows.append(row)

    failed = sum(row.failed for row in rows)
    if failed:
        logger.warning(f"{failed} subset(s) recorded as missing", source="Ablation")
    logger.success(f"Ablation finished: {len(rows) - failed}/{len(rows)} subsets scored", source="Ablation")
    return rows


# ============================================================
# Output files
# ============================================================

def write_ablation_csv(path: Path, rows: Sequence[AblationRow], stamp: str = "") -> Path:
    """Header row, then one row per subset; failed fits leave empty cells."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        if stamp:
            f.write(f"# {stamp}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ABLATION_HEADER)
        for row in rows:
            writer.writerow(row.cells())
    logger.info(f"Wrote {len(rows)} ablation rows to {path.name}", source="Ablation")
    return path


def read_ablation_csv(path: Path) -> List[AblationRow]:
    def parse(cell: str) -> Optional[float]:
        return float(cell) if cell else None

    with open(Path(path), "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(line for line in f if not line.startswith("#"))
        header = next(reader)
        if tuple(header) != ABLATION_HEADER:
            raise DataError(f"Unexpected ablation header: {header}", path, 1)
        return [
            AblationRow(cells[0], parse(cells[1]), parse(cells[2]), parse(cells[3]), parse(cells[4]))
            for cells in reader
        ]


def write_ablation_points(path: Path, rows: Sequence[AblationRow], **stamp) -> Path:
    """
    Plotting companion: validation F1 on x, test F1 on y, SEMs as error bars.
    Failed subsets are left out.
    """
    points = [
        {
            "subset": row.subset,
            "x": row.validation_f1,
            "y": row.test_f1,
            "x_err": row.validation_sem,
            "y_err": row.test_sem,
        }
        for row in rows if not row.failed
    ]
    payload = dict(stamp)
    payload["x_label"] = "validation_f1"
    payload["y_label"] = "test_f1"
    payload["points"] = points

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
    return path


def write_report(path: Path, report: EvalReport, split: str, **stamp) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(split, **stamp), f, indent=2)
        f.write("\n")
    logger.info(
        f"{split}: macro F1 {report.f1_macro:.4f}"
        + (f" +/- {report.sem:.4f}" if report.sem is not None else ""),
        source="Evaluation"
    )
    return path
