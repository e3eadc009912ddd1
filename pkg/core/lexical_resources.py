"""
Auxiliary lexical resources

Lead-section bags of words, a synonym/gloss lexicon and unigram/bigram counts,
plus the per-(term, attribute) scores each of them contributes:

- lead_max_similarity: best match between the attribute and the term's lead section
- lexicon_max_similarity: best match between the attribute and the term's expansion
- ngram_significance: smoothed log-likelihood of the phrase "term att"
"""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from core.embeddings import EmbeddingStore, normalization_candidates, sqrt_cosine
from core.errors import ResourceFormatError
from utils.logger import logger


# Smoothing constants of the significance formula
NGRAM_OFFSET = 10.0
NGRAM_UNIGRAM_PRIOR = 1e5


def _resolve_entry(entries: Dict[str, object], term: str) -> Optional[str]:
    for candidate in normalization_candidates(term):
        if candidate in entries:
            return candidate
    return None


def _max_similarity(store: EmbeddingStore, att: str, words) -> float:
    return max((sqrt_cosine(store, att, word) for word in words), default=0.0)


# ============================================================
# Lead sections
# ============================================================

@dataclass(frozen=True)
class LeadSectionCorpus:
    """Article title -> lowercase lead-section tokens."""
    entries: Dict[str, Tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for title, tokens in self.entries.items():
            if not title:
                raise ResourceFormatError("Lead-section title must be non-empty")
            if any(not token for token in tokens):
                raise ResourceFormatError(f"Lead section for {title!r} contains an empty token")

    def __len__(self) -> int:
        return len(self.entries)

    def tokens_for(self, term: str) -> Optional[Tuple[str, ...]]:
        """Title tokens plus lead tokens for the term's article, or None."""
        title = _resolve_entry(self.entries, term)
        if title is None:
            return None
        title_tokens = tuple(t for t in title.lower().replace("_", " ").split() if t)
        return title_tokens + self.entries[title]


def load_lead_sections(path: Path) -> LeadSectionCorpus:
    """
    Load "title<TAB>space-separated tokens" lines.

    Raises:
        ResourceFormatError: line without a tab or with an empty title
    """
    path = Path(path)
    entries: Dict[str, Tuple[str, ...]] = {}

    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            title, sep, text = line.partition("\t")
            if not sep or not title.strip():
                raise ResourceFormatError("Expected 'title<TAB>tokens'", path, line_number)
            title = title.strip()
            if title in entries:
                continue
            entries[title] = tuple(token.lower() for token in text.split())

    logger.info(f"Loaded {len(entries)} lead sections from {path.name}", source="LexicalResources")
    return LeadSectionCorpus(entries=entries)


def lead_max_similarity(corpus: LeadSectionCorpus, store: EmbeddingStore, term: str, att: str) -> float:
    """
    Max sqrt-cosine between att and any title/lead token of the term's article.

    Falls back to sqrt_cosine(term, att) when the corpus has no article for the term.
    """
    tokens = corpus.tokens_for(term)
    if tokens is None:
        return sqrt_cosine(store, term, att)
    return _max_similarity(store, att, tokens)


# ============================================================
# Lexicon
# ============================================================

@dataclass(frozen=True)
class LexiconEntry:
    synonyms: Tuple[str, ...] = ()
    related: Tuple[str, ...] = ()
    gloss_words: Tuple[str, ...] = ()

    def expansion(self) -> Tuple[str, ...]:
        return self.synonyms + self.related + self.gloss_words


@dataclass(frozen=True)
class Lexicon:
    """Word -> synonyms, words of connected synsets and gloss words."""
    entries: Dict[str, LexiconEntry] = field(default_factory=dict)

    def __post_init__(self):
        if any(not word for word in self.entries):
            raise ResourceFormatError("Lexicon entry key must be non-empty")

    def __len__(self) -> int:
        return len(self.entries)

    def expansion_for(self, term: str) -> List[str]:
        """{term} plus every word listed in the term's entry."""
        words = [term]
        key = _resolve_entry(self.entries, term)
        if key is not None:
            words.extend(w for w in self.entries[key].expansion() if w)
        return words


def load_lexicon(path: Path) -> Lexicon:
    """
    Load a JSON Lines lexicon: {"word", "synonyms", "related", "gloss_words"} per line.

    Raises:
        ResourceFormatError: invalid JSON, missing word, or non-list fields
    """
    path = Path(path)
    entries: Dict[str, LexiconEntry] = {}

    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ResourceFormatError(f"Invalid JSON: {e.msg}", path, line_number)

            word = record.get("word") if isinstance(record, dict) else None
            if not isinstance(word, str) or not word.strip():
                raise ResourceFormatError("Lexicon record needs a non-empty 'word'", path, line_number)

            lists = {}
            for key in ("synonyms", "related", "gloss_words"):
                value = record.get(key, [])
                if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
                    raise ResourceFormatError(f"'{key}' must be a list of strings", path, line_number)
                lists[key] = tuple(value)

            entries.setdefault(word.strip(), LexiconEntry(**lists))

    logger.info(f"Loaded {len(entries)} lexicon entries from {path.name}", source="LexicalResources")
    return Lexicon(entries=entries)


def lexicon_max_similarity(lex: Lexicon, store: EmbeddingStore, term: str, att: str) -> float:
    """Max sqrt-cosine between att and the term's lexicon expansion (term included)."""
    return _max_similarity(store, att, lex.expansion_for(term))


# ============================================================
# N-gram counts
# ============================================================

@dataclass(frozen=True)
class NgramCounts:
    """Unigram and bigram occurrence counts; missing keys count as 0."""
    unigrams: Dict[str, int] = field(default_factory=dict)
    bigrams: Dict[Tuple[str, str], int] = field(default_factory=dict)

    def unigram(self, token: str) -> int:
        return self.unigrams.get(_count_key(token), 0)

    def bigram(self, first: str, second: str) -> int:
        return self.bigrams.get((_count_key(first), _count_key(second)), 0)


def _count_key(token: str) -> str:
    return token.strip()


def _parse_count(raw: str, path: Path, line_number: int) -> int:
    try:
        count = int(raw)
    except ValueError:
        raise ResourceFormatError(f"Count is not an integer: {raw!r}", path, line_number)
    if count < 0:
        raise ResourceFormatError(f"Count must be non-negative: {count}", path, line_number)
    return count


def load_ngram_counts(unigram_path: Path, bigram_path: Path) -> NgramCounts:
    """
    Load "token<TAB>count" unigrams and "token1 token2<TAB>count" bigrams.

    Keys are exact (case-sensitive) after trimming surrounding whitespace. A
    repeated key keeps its first count, like duplicate embedding rows.

    Raises:
        ResourceFormatError: wrong field count or invalid count
    """
    unigram_path = Path(unigram_path)
    bigram_path = Path(bigram_path)
    unigrams: Dict[str, int] = {}
    bigrams: Dict[Tuple[str, str], int] = {}
    duplicates = 0

    with open(unigram_path, "r", encoding="utf-8", newline="") as f:
        for line_number, row in enumerate(csv.reader(f, delimiter="\t", quoting=csv.QUOTE_NONE), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2 or not row[0].strip():
                raise ResourceFormatError("Expected 'token<TAB>count'", unigram_path, line_number)
            key = _count_key(row[0])
            count = _parse_count(row[1], unigram_path, line_number)
            if key in unigrams:
                duplicates += 1
                continue
            unigrams[key] = count

    with open(bigram_path, "r", encoding="utf-8", newline="") as f:
        for line_number, row in enumerate(csv.reader(f, delimiter="\t", quoting=csv.QUOTE_NONE), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise ResourceFormatError("Expected 'token1 token2<TAB>count'", bigram_path, line_number)
            words = row[0].split(" ")
            if len(words) != 2 or not all(words):
                raise ResourceFormatError(
                    f"Bigram key must be two tokens separated by one space: {row[0]!r}",
                    bigram_path, line_number
                )
            bigram = (_count_key(words[0]), _count_key(words[1]))
            count = _parse_count(row[1], bigram_path, line_number)
            if bigram in bigrams:
                duplicates += 1
                continue
            bigrams[bigram] = count

    if duplicates:
        logger.warning(f"Ignored {duplicates} duplicate n-gram count(s)", source="LexicalResources")
    logger.info(
        f"Loaded {len(unigrams)} unigram and {len(bigrams)} bigram counts",
        source="LexicalResources"
    )
    return NgramCounts(unigrams=unigrams, bigrams=bigrams)


def ngram_significance(counts: NgramCounts, term: str, att: str) -> float:
    """
    10 + log10(#(term, att) + 1) - log10((#(term) + 1e5) * (#(att) + 1e5))
    """
    pair = counts.bigram(term, att)
    return (
        NGRAM_OFFSET
        + math.log10(pair + 1)
        - math.log10((counts.unigram(term) + NGRAM_UNIGRAM_PRIOR) * (counts.unigram(att) + NGRAM_UNIGRAM_PRIOR))
    )
