"""
Pretrained word embeddings.

Loads whitespace-separated text embeddings (optionally with a "count dim"
header), resolves terms through a fixed normalisation chain and provides the
square-root-floored cosine similarity every similarity feature is built on.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional

import numpy as np

from core.errors import EmbeddingFormatError
from utils.logger import logger


def normalization_candidates(term: str) -> Iterator[str]:
    """
    Yield lookup keys for a term in the order they should be tried.

    Exact text, lowercase, spaces replaced by underscores, then English
    de-pluralisation of the last word ("ies" -> "y", strip "es", strip "s").
    Duplicates are skipped.
    """
    term = term.strip()
    lowered = term.lower()
    joined = lowered.replace(" ", "_")

    seen = set()
    forms = [term, lowered, joined]

    head, sep, last = joined.rpartition("_")
    prefix = head + sep
    if last.endswith("ies") and len(last) > 3:
        forms.append(prefix + last[:-3] + "y")
    if last.endswith("es") and len(last) > 2:
        forms.append(prefix + last[:-2])
    if last.endswith("s") and len(last) > 1:
        forms.append(prefix + last[:-1])

    for form in forms:
        if form and form not in seen:
            seen.add(form)
            yield form


@dataclass(frozen=True)
class TermVector:
    """Result of a lookup; values is all zeros when found is False."""
    values: np.ndarray
    found: bool
    key: Optional[str] = None  # Vocabulary entry that matched


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable vocabulary-to-vector map."""

    vocab: Dict[str, int]
    matrix: np.ndarray
    norms: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.matrix.ndim != 2:
            raise EmbeddingFormatError("Embedding matrix must be two-dimensional")
        if len(self.vocab) != self.matrix.shape[0]:
            raise EmbeddingFormatError(
                f"Vocabulary has {len(self.vocab)} entries but matrix has {self.matrix.shape[0]} rows"
            )
        if not np.all(np.isfinite(self.matrix)):
            raise EmbeddingFormatError("Embedding matrix contains nan or infinite values")
        if self.norms is None:
            object.__setattr__(self, "norms", np.linalg.norm(self.matrix, axis=1))
        self.matrix.setflags(write=False)

    @classmethod
    def from_dict(cls, vectors: Dict[str, List[float]]) -> "EmbeddingStore":
        """Build a store from {term: vector}; insertion order gives row order."""
        if not vectors:
            raise EmbeddingFormatError("Cannot build an empty embedding store")
        vocab = {term: i for i, term in enumerate(vectors)}
        matrix = np.asarray(list(vectors.values()), dtype=np.float64)
        return cls(vocab=vocab, matrix=matrix)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, term: str) -> bool:
        return term in self.vocab

    def resolve(self, term: str) -> Optional[str]:
        """Vocabulary key the normalisation chain lands on, or None."""
        for candidate in normalization_candidates(term):
            if candidate in self.vocab:
                return candidate
        return None


def load_embeddings(path: Path) -> EmbeddingStore:
    """
    Load a text embedding file.

    Args:
        path: UTF-8 file, one "token v1 ... vD" per line, optional "count dim" header

    Returns:
        EmbeddingStore with one row per distinct token (first occurrence wins)

    Raises:
        EmbeddingFormatError: empty file, ragged rows, non-numeric or non-finite components
    """
    path = Path(path)
    vocab: Dict[str, int] = {}
    rows: List[List[float]] = []
    dim: Optional[int] = None
    duplicates = 0
    first_line = True

    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            parts = line.split()
            if not parts:
                continue

            # Header, if any, is the first non-blank line
            is_first, first_line = first_line, False
            if is_first and len(parts) == 2 and _is_int(parts[0]) and _is_int(parts[1]):
                logger.debug(f"Skipping header: {line.strip()}", source="Embeddings")
                continue

            token, components = parts[0], parts[1:]
            if dim is None:
                if not components:
                    raise EmbeddingFormatError("Row has no vector components", path, line_number)
                dim = len(components)
            elif len(components) != dim:
                raise EmbeddingFormatError(
                    f"Expected {dim} components, found {len(components)}", path, line_number
                )

            try:
                values = [float(c) for c in components]
            except ValueError:
                raise EmbeddingFormatError("Non-numeric vector component", path, line_number)
            if not all(math.isfinite(v) for v in values):
                raise EmbeddingFormatError("Vector component is nan or infinite", path, line_number)

            if token in vocab:
                duplicates += 1
                continue

            vocab[token] = len(rows)
            rows.append(values)

    if not rows:
        raise EmbeddingFormatError("Embedding file contains no vectors", path)

    if duplicates:
        logger.warning(f"Ignored {duplicates} duplicate token(s) in {path.name}", source="Embeddings")

    store = EmbeddingStore(vocab=vocab, matrix=np.asarray(rows, dtype=np.float64))
    logger.info(f"Loaded {len(store)} embeddings (D={store.dim}) from {path.name}", source="Embeddings")
    return store


def lookup(store: EmbeddingStore, term: str) -> TermVector:
    """
    Find the vector for a term, falling back through the normalisation chain.

    Args:
        store: Embedding store
        term: Term text, non-empty after trimming

    Returns:
        TermVector; found=False with a zero vector when nothing matches
    """
    if not term.strip():
        raise ValueError("lookup() needs a non-empty term")

    key = store.resolve(term)
    if key is None:
        return TermVector(values=np.zeros(store.dim), found=False)
    return TermVector(values=store.matrix[store.vocab[key]], found=True, key=key)


def sqrt_cosine(store: EmbeddingStore, a: str, b: str) -> float:
    """
    sqrt(max(cos(a, b), 0)); 0 when either term is missing or has a zero vector.
    """
    key_a = store.resolve(a)
    key_b = store.resolve(b)
    if key_a is None or key_b is None:
        return 0.0

    row_a = store.vocab[key_a]
    row_b = store.vocab[key_b]
    norm_a = store.norms[row_a]
    norm_b = store.norms[row_b]
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0

    cosine = float(np.dot(store.matrix[row_a], store.matrix[row_b]) / (norm_a * norm_b))
    if cosine <= 0.0:
        return 0.0
    return min(1.0, math.sqrt(cosine))


def _is_int(text: str) -> bool:
    try:
        int(text)
    except ValueError:
        return False
    return True
