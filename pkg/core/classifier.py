"""
Overfitting-resistant linear classifier

Columns are L2-normalised with scales fit on the training split only, a
squared-hinge L2-regularised linear SVM is trained in the dual with a
constant-1 column appended (so the intercept is regularised too), and every
negative feature weight is clipped to zero after training.
"""

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from core.errors import (
    ConfigError, DataError, DimensionMismatchError, NumericalError,
    SingleClassError, SvmConvergenceWarning
)
from utils.logger import logger


DEFAULT_C = 1.0
DEFAULT_TOLERANCE = 1e-4
DEFAULT_MAX_ITERATIONS = 1000
HEURISTIC_A_THRESHOLD = 0.0961


# ============================================================
# Column scaling
# ============================================================

@dataclass(frozen=True, eq=False)
class ColumnScales:
    """Multiplicative per-column factors, all > 0."""
    scales: np.ndarray

    def __post_init__(self):
        if np.any(self.scales <= 0):
            raise ValueError("Column scales must be positive")

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != len(self.scales):
            raise DimensionMismatchError(
                f"Matrix has {X.shape[-1]} columns, scales expect {len(self.scales)}"
            )
        return X * self.scales


def fit_column_scales(X_train: np.ndarray) -> ColumnScales:
    """1 / column norm, or 1 for an all-zero column."""
    X_train = np.asarray(X_train, dtype=np.float64)
    if X_train.ndim != 2 or X_train.shape[0] < 1:
        raise DataError("fit_column_scales needs a non-empty 2-D matrix")
    norms = np.linalg.norm(X_train, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    return ColumnScales(scales=1.0 / safe)


# ============================================================
# SVM training
# ============================================================

@dataclass(frozen=True)
class SvmHyperparams:
    C: float = DEFAULT_C
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        if not self.C > 0:
            raise ConfigError("classifier.C must be positive")
        if not self.tolerance > 0:
            raise ConfigError("classifier.tolerance must be positive")
        if not isinstance(self.max_iterations, int) or self.max_iterations < 1:
            raise ConfigError("classifier.max_iterations must be a positive integer")


@dataclass(frozen=True, eq=False)
class SvmProblem:
    """Column-scaled features and +/-1 targets."""
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.X.ndim != 2:
            raise DataError("SvmProblem.X must be a matrix")
        if self.y.shape != (self.X.shape[0],):
            raise DataError(f"SvmProblem.y must have {self.X.shape[0]} entries")
        if not np.all(np.isin(self.y, (-1, 1))):
            raise DataError("SvmProblem.y must contain only +1 and -1")

    @classmethod
    def from_labels(cls, X: np.ndarray, labels: Sequence[int]) -> "SvmProblem":
        """Build from 0/1 labels (1 -> +1, 0 -> -1)."""
        labels = np.asarray(labels)
        return cls(X=np.asarray(X, dtype=np.float64), y=np.where(labels == 1, 1.0, -1.0))


def primal_objective(X: np.ndarray, y: np.ndarray, weights: np.ndarray, intercept: float, C: float) -> float:
    """(1/2)(|w|^2 + b^2) + C * sum(max(0, 1 - y (w.x + b))^2)"""
    margins = 1.0 - y * (X @ weights + intercept)
    hinge = np.maximum(margins, 0.0)
    return float(0.5 * (weights @ weights + intercept * intercept) + C * (hinge @ hinge))


def train_svc(
        problem: SvmProblem,
        C: float = DEFAULT_C,
        tolerance: float = DEFAULT_TOLERANCE,
        max_iterations: int = DEFAULT_MAX_ITERATIONS,
        seed: int = 0
) -> Tuple[np.ndarray, float]:
    """
    Dual coordinate descent for the L2-loss (squared hinge) linear SVM.

    Each pass visits samples in a seeded random order. The pass-end iterate
    with the lowest primal objective is returned; passes stop once the
    relative duality gap drops below `tolerance`.

    Returns:
        (weights, intercept)

    Raises:
        SingleClassError: y holds a single class
    """
    y = problem.y
    if len(np.unique(y)) < 2:
        raise SingleClassError("Training data contains a single class")

    n, d = problem.X.shape
    X = np.hstack([problem.X, np.ones((n, 1))])
    diag = 1.0 / (2.0 * C)
    q_diag = np.einsum("ij,ij->i", X, X) + diag

    alpha = np.zeros(n)
    w = np.zeros(d + 1)
    rng = np.random.default_rng(seed)

    def objectives(w_: np.ndarray) -> Tuple[float, float]:
        primal = primal_objective(X[:, :d], y, w_[:d], w_[d], C)
        dual = float(alpha.sum() - 0.5 * (w_ @ w_) - 0.5 * diag * (alpha @ alpha))
        return primal, dual

    best_w = w.copy()
    best_primal = np.inf
    gap = np.inf
    passes = 0

    for passes in range(1, max_iterations + 1):
        for i in rng.permutation(n):
            gradient = y[i] * (w @ X[i]) - 1.0 + diag * alpha[i]
            projected = min(gradient, 0.0) if alpha[i] == 0.0 else gradient
            if projected != 0.0:
                old = alpha[i]
                alpha[i] = max(old - gradient / q_diag[i], 0.0)
                w += (alpha[i] - old) * y[i] * X[i]

        primal, dual = objectives(w)
        if not np.isfinite(primal):
            raise NumericalError("SVM objective became non-finite")
        if primal < best_primal:
            best_primal = primal
            best_w = w.copy()

        gap = (primal - dual) / max(abs(primal), 1e-12)
        if gap <= tolerance:
            break
    else:
        warning = SvmConvergenceWarning(gap=float(gap), passes=passes)
        logger.warning(str(warning), source="Classifier")
        warnings.warn(warning, stacklevel=2)

    logger.debug(
        f"SVM: {passes} passes, relative gap {gap:.2e}, objective {best_primal:.6f}",
        source="Classifier"
    )
    return best_w[:d].copy(), float(best_w[d])


def clip_negative(weights: np.ndarray) -> np.ndarray:
    """Copy of weights with every negative entry replaced by 0."""
    return np.maximum(np.asarray(weights, dtype=np.float64), 0.0)


# ============================================================
# Trained model
# ============================================================

@dataclass(frozen=True, eq=False)
class TrainedClassifier:
    """Finalised model: clipped weights, intercept and the training column scales."""
    weights: np.ndarray
    intercept: float
    scales: ColumnScales
    feature_names: Tuple[str, ...]
    hyperparams: SvmHyperparams = field(default_factory=SvmHyperparams)

    def __post_init__(self):
        if len(self.weights) != len(self.feature_names) or len(self.scales.scales) != len(self.weights):
            raise DimensionMismatchError("weights, scales and feature_names must have equal length")
        if np.any(self.weights < 0):
            raise ValueError("TrainedClassifier weights must be clipped (non-negative)")

    @property
    def dim(self) -> int:
        return len(self.weights)

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "weights": [float(v) for v in self.weights],
            "intercept": float(self.intercept),
            "scales": [float(v) for v in self.scales.scales],
            "C": self.hyperparams.C,
            "tolerance": self.hyperparams.tolerance,
            "max_iterations": self.hyperparams.max_iterations,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainedClassifier":
        try:
            return cls(
                weights=np.asarray(data["weights"], dtype=np.float64),
                intercept=float(data["intercept"]),
                scales=ColumnScales(np.asarray(data["scales"], dtype=np.float64)),
                feature_names=tuple(data["feature_names"]),
                hyperparams=SvmHyperparams(
                    C=float(data["C"]),
                    tolerance=float(data["tolerance"]),
                    max_iterations=int(data.get("max_iterations", DEFAULT_MAX_ITERATIONS)),
                ),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"Invalid classifier artifact: {e}")

    def equivalent_threshold(self, column: int = 0) -> float:
        """
        For a single-feature model, the raw feature value where the decision flips:
        score > 0  <=>  x > -b / (w * scale).
        """
        w = self.weights[column] * self.scales.scales[column]
        if w <= 0:
            return float("inf")
        return -self.intercept / w


def fit_classifier(
        X_train: np.ndarray,
        labels: Sequence[int],
        feature_names: Sequence[str],
        hyperparams: Optional[SvmHyperparams] = None,
        seed: int = 0
) -> TrainedClassifier:
    """
    Full training recipe: fit scales, train the SVM on scaled data, clip.

    Args:
        X_train: Raw (unscaled) training matrix
        labels: 0/1 labels aligned with X_train rows
        feature_names: Column names, stored with the model
        hyperparams: Solver settings (defaults when None)
        seed: Seed for the solver's visiting order
    """
    hp = hyperparams or SvmHyperparams()
    scales = fit_column_scales(X_train)
    problem = SvmProblem.from_labels(scales.apply(X_train), labels)
    weights, intercept = train_svc(problem, C=hp.C, tolerance=hp.tolerance, max_iterations=hp.max_iterations, seed=seed)

    clipped = clip_negative(weights)
    n_clipped = int(np.sum(weights < 0))
    if n_clipped:
        logger.info(f"Clipped {n_clipped} negative coefficient(s) to zero", source="Classifier")

    return TrainedClassifier(
        weights=clipped,
        intercept=intercept,
        scales=scales,
        feature_names=tuple(feature_names),
        hyperparams=hp,
    )


def decision_function(clf: TrainedClassifier, X: np.ndarray) -> np.ndarray:
    """weights . (x * scales) + intercept for each row."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != clf.dim:
        raise DimensionMismatchError(f"Expected {clf.dim} features, got {X.shape[1]}")
    return clf.scales.apply(X) @ clf.weights + clf.intercept


def predict(clf: TrainedClassifier, x) -> int:
    """1 when the decision score is strictly positive, else 0."""
    values = getattr(x, "values", x)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (clf.dim,):
        raise DimensionMismatchError(f"Expected {clf.dim} features, got shape {values.shape}")
    return int(decision_function(clf, values)[0] > 0)


def predict_matrix(clf: TrainedClassifier, X: np.ndarray) -> np.ndarray:
    return (decision_function(clf, X) > 0).astype(np.int64)


def heuristic_a(simdiff: float, threshold: float = HEURISTIC_A_THRESHOLD) -> int:
    """Closed-form baseline: 1 iff the similarity difference exceeds threshold."""
    return int(simdiff > threshold)


# ============================================================
# Persistence
# ============================================================

def save_classifier(clf: TrainedClassifier, path: Path, extra: Optional[dict] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = clf.to_dict()
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=False)
        f.write("\n")
    logger.info(f"Saved classifier to {path}", source="Classifier")
    return path


def load_classifier(path: Path) -> TrainedClassifier:
    path = Path(path)
    if not path.exists():
        raise DataError("Classifier artifact not found", path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise DataError(f"Invalid JSON: {e.msg}", path, e.lineno)
    return TrainedClassifier.from_dict(data)
