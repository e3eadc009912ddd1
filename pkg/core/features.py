"""
Feature extraction

Every feature is a term1-minus-term2 difference, so swapping the two terms
negates the whole vector. Column order is fixed and shared by the classifier,
the ablation sweep and every exported matrix.
"""

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.embeddings import EmbeddingStore, load_embeddings, sqrt_cosine
from core.errors import MissingLabelError
from core.lexical_resources import (
    LeadSectionCorpus, Lexicon, NgramCounts,
    lead_max_similarity, lexicon_max_similarity, ngram_significance,
    load_lead_sections, load_lexicon, load_ngram_counts
)
from core.sme import SME_FEATURE_COUNT, SmeModel, sme_features
from models.triple import Triple
from utils.logger import logger


FEATURE_NAMES: Tuple[str, ...] = (
    "vector_similarity",
    "sme_relatedto",
    "sme_isa",
    "sme_hasa",
    "sme_partof",
    "sme_capableof",
    "sme_usedfor",
    "sme_hascontext",
    "sme_hasproperty",
    "sme_atlocation",
    "sme_partof_swapped",
    "sme_atlocation_swapped",
    "wikipedia_lead",
    "wordnet_relatedness",
    "google_ngrams",
)
FEATURE_COUNT = len(FEATURE_NAMES)

# Feature sources and the columns each one owns
SOURCE_COLUMNS: Dict[str, Tuple[int, ...]] = {
    "A": (0,),                                   # embedding similarity
    "B": tuple(range(1, 1 + SME_FEATURE_COUNT)),  # relational inference
    "C": (12,),                                  # lead sections
    "D": (13,),                                  # lexicon expansion
    "E": (14,),                                  # bigram significance
}
SOURCE_LABELS = tuple(SOURCE_COLUMNS)


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    names: Tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        if self.values.shape != (len(self.names),):
            raise ValueError(f"FeatureVector needs {len(self.names)} values, got {self.values.shape}")

    def as_dict(self) -> Dict[str, float]:
        return {name: float(v) for name, v in zip(self.names, self.values)}


@dataclass(frozen=True)
class ResourceBundle:
    """Everything extract() reads; immutable once loaded."""
    embeddings: EmbeddingStore
    leads: LeadSectionCorpus
    lexicon: Lexicon
    ngrams: NgramCounts
    sme_model: SmeModel

    @classmethod
    def load(
            cls,
            embeddings_path: Path,
            leads_path: Path,
            lexicon_path: Path,
            unigrams_path: Path,
            bigrams_path: Path,
            sme_model: SmeModel
    ) -> "ResourceBundle":
        return cls(
            embeddings=load_embeddings(embeddings_path),
            leads=load_lead_sections(leads_path),
            lexicon=load_lexicon(lexicon_path),
            ngrams=load_ngram_counts(unigrams_path, bigrams_path),
            sme_model=sme_model,
        )


def vector_similarity_feature(store: EmbeddingStore, t: Triple) -> float:
    """sqrt_cosine(term1, att) - sqrt_cosine(term2, att)"""
    return sqrt_cosine(store, t.term1, t.attribute) - sqrt_cosine(store, t.term2, t.attribute)


def extract(t: Triple, r: ResourceBundle) -> FeatureVector:
    """
    The 15 features of one triple.

    Raises:
        UnknownRelationError: the SME model lacks a feature relation
    """
    att = t.attribute
    values = np.empty(FEATURE_COUNT, dtype=np.float64)

    values[0] = vector_similarity_feature(r.embeddings, t)
    values[1:1 + SME_FEATURE_COUNT] = sme_features(r.sme_model, t)
    values[12] = (
        lead_max_similarity(r.leads, r.embeddings, t.term1, att)
        - lead_max_similarity(r.leads, r.embeddings, t.term2, att)
    )
    values[13] = (
        lexicon_max_similarity(r.lexicon, r.embeddings, t.term1, att)
        - lexicon_max_similarity(r.lexicon, r.embeddings, t.term2, att)
    )
    values[14] = ngram_significance(r.ngrams, t.term1, att) - ngram_significance(r.ngrams, t.term2, att)

    return FeatureVector(values=values)


def build_matrix(
        triples: Sequence[Triple],
        r: ResourceBundle,
        require_labels: bool = False
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Stack extract() rows in input order.

    Args:
        triples: Triples to featurise
        r: Loaded resources
        require_labels: Raise when any triple is unlabeled (training/evaluation)

    Returns:
        (N x 15 matrix, label vector) - labels are None when any triple lacks one
    """
    missing = [i for i, t in enumerate(triples) if not t.is_labeled]
    if require_labels and missing:
        raise MissingLabelError(
            f"{len(missing)} triple(s) have no label; first is row {missing[0] + 1}: {triples[missing[0]]}"
        )

    X = np.zeros((len(triples), FEATURE_COUNT), dtype=np.float64)
    for i, t in enumerate(triples):
        X[i] = extract(t, r).values

    labels = None
    if not missing:
        labels = np.asarray([t.label for t in triples], dtype=np.int64)

    logger.debug(f"Built {X.shape[0]}x{X.shape[1]} feature matrix", source="Features")
    return X, labels


def source_columns(subset: str) -> List[int]:
    """Column indices for a subset label such as "ABDE"."""
    columns: List[int] = []
    for letter in subset:
        if letter not in SOURCE_COLUMNS:
            raise ValueError(f"Unknown feature source {letter!r}")
        columns.extend(SOURCE_COLUMNS[letter])
    return sorted(set(columns))


def write_feature_matrix(
        path: Path,
        X: np.ndarray,
        labels: Optional[np.ndarray] = None,
        comment: str = ""
) -> Path:
    """
    CSV with a header of the 15 feature names (+ "label" when present).

    Values use repr() so a reload reproduces them exactly.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    with open(path, "w", encoding="utf-8", newline="") as f:
        if comment:
            f.write(f"# {comment}\n")
        writer = csv.writer(f, lineterminator="\n")
        header = list(FEATURE_NAMES) + (["label"] if labels is not None else [])
        writer.writerow(header)
        for i, row in enumerate(X):
            cells = [repr(float(v)) for v in row]
            if labels is not None:
                cells.append(str(int(labels[i])))
            writer.writerow(cells)

    logger.info(f"Wrote {len(X)} feature rows to {path.name}", source="Features")
    return path


def read_feature_matrix(path: Path) -> Tuple[List[str], np.ndarray, Optional[np.ndarray]]:
    """Inverse of write_feature_matrix: (header names, matrix, labels or None)."""
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = [row for row in csv.reader(line for line in f if not line.startswith("#"))]

    header, body = rows[0], rows[1:]
    has_labels = header[-1] == "label"
    width = len(header) - (1 if has_labels else 0)
    X = np.asarray([[float(v) for v in row[:width]] for row in body], dtype=np.float64).reshape(len(body), width)
    labels = np.asarray([int(row[-1]) for row in body], dtype=np.int64) if has_labels else None
    return header[:width], X, labels
