"""
Computation layer: embeddings, lexical resources, relational inference,
features, classifier, evaluation and run configuration.

Submodules are imported explicitly (``from core.features import extract``);
only the error types are re-exported here.
"""

from .errors import (
    DiscrimError,
    ConfigError,
    DataError,
    NumericalError,
    SvmConvergenceWarning,
)

__all__ = [
    'DiscrimError',
    'ConfigError',
    'DataError',
    'NumericalError',
    'SvmConvergenceWarning',
]
