"""
Error types shared by every layer.

Each family carries the process exit code the CLI reports for it:
1 for configuration problems, 2 for data problems, 3 for numerical failures.
"""

from pathlib import Path
from typing import Optional


class DiscrimError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(DiscrimError):
    """Invalid or incomplete run configuration."""

    exit_code = 1


class DataError(DiscrimError, ValueError):
    """Bad input data: malformed files, misaligned splits, impossible requests."""

    exit_code = 2

    def __init__(self, message: str, path: Optional[Path] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")


class NumericalError(DiscrimError):
    """Training produced non-finite values."""

    exit_code = 3


# ============================================================
# Ingestion
# ============================================================

class EmbeddingFormatError(DataError):
    """Embedding file is empty, ragged or non-numeric."""


class ResourceFormatError(DataError):
    """A lead-section, lexicon, n-gram, edge or task file is malformed."""


# ============================================================
# Knowledge graph / SME
# ============================================================

class SchemaError(DataError):
    """Relation schema violates its invariants."""


class UnknownRelationError(DataError):
    """A relation name is not part of the schema or model."""

    def __init__(self, relation: str):
        self.relation = relation
        super().__init__(f"Unknown relation: {relation!r}")


class CorruptionExhaustedError(DataError):
    """No negative example could be produced for a positive triple."""


# ============================================================
# Features / classifier / evaluation
# ============================================================

class MissingLabelError(DataError):
    """A triple used for training or evaluation has no label."""


class SingleClassError(DataError):
    """Training labels contain only one class."""


class LengthMismatchError(DataError):
    """Two sequences that must be aligned differ in length."""


class AlignmentError(DataError):
    """Prediction rows do not line up with gold rows."""


class DimensionMismatchError(DataError):
    """A vector does not have the dimension a model expects."""


class SvmConvergenceWarning(UserWarning):
    """The SVM solver hit its pass limit before reaching the tolerance."""

    def __init__(self, gap: float, passes: int):
        self.gap = gap
        self.passes = passes
        super().__init__(
            f"SVM solver stopped after {passes} passes with relative duality gap {gap:.3e}"
        )
