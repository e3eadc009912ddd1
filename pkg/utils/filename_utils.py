"""
Filename Utilities

Output path generation for run artifacts. Every file produced from a task
split carries the split's name, so outputs of different splits can never be
confused. Paths are deterministic: reruns overwrite, they never auto-increment.
"""

import re
from pathlib import Path


SME_TRAINING_LOG = "sme_training_log.csv"
CLASSIFIER_FILENAME = "classifier.json"
ABLATION_CSV = "ablation.csv"
ABLATION_POINTS = "ablation_points.json"
LOG_FOLDER = "logs"

_UNSAFE = re.compile(r"[^A-Za-z0-9._-]+")


def split_name(split_path: Path) -> str:
    """
    Name of a split file for embedding in output names.

    "data/mini/validation.csv" -> "validation"
    """
    stem = Path(split_path).stem
    cleaned = _UNSAFE.sub("_", stem).strip("._")
    return cleaned or "split"


def _in_folder(output_folder: Path, filename: str) -> Path:
    output_folder = Path(output_folder)
    output_folder.mkdir(parents=True, exist_ok=True)
    return output_folder / filename


def prediction_output_path(output_folder: Path, split_path: Path) -> Path:
    return _in_folder(output_folder, f"predictions_{split_name(split_path)}.csv")


def report_output_path(output_folder: Path, split: str) -> Path:
    return _in_folder(output_folder, f"report_{split}.json")


def evaluation_report_path(output_folder: Path, split: str) -> Path:
    """Report written by `evaluate`; never the same file as a `train` report."""
    return _in_folder(output_folder, f"report_eval_{split}.json")


def feature_output_path(output_folder: Path, split: str) -> Path:
    return _in_folder(output_folder, f"features_{split}.csv")


def artifact_path(output_folder: Path, filename: str) -> Path:
    """Fixed-name artifact (classifier, ablation, training log) inside output_folder."""
    return _in_folder(output_folder, filename)
