import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from core.embeddings import EmbeddingStore, load_embeddings
from core.features import ResourceBundle
from core.lexical_resources import load_lead_sections, load_lexicon, load_ngram_counts
from core.sme import (
    FEATURE_RELATIONS, RELATION_DIM, KnowledgeGraph, RelationSchema, RelationSpec, SmeModel
)


TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"
GOLDEN_DIR = FIXTURES / "golden"
MICRO_DIR = FIXTURES / "micro"
MINI_DIR = TESTS_DIR.parent / "data" / "mini"

# Kept small so the end-to-end tests stay fast; the shipped config uses more
MINI_TEST_SME_ITERATIONS = 3000


def pytest_addoption(parser):
    parser.addoption(
        "--update-golden", action="store_true", default=False,
        help="Rewrite the files under tests/fixtures/golden instead of comparing"
    )


@pytest.fixture
def golden(request):
    """
    check(name, text): compare text with tests/fixtures/golden/<name>.

    A missing golden file fails the test; --update-golden writes it instead.
    """
    update = request.config.getoption("--update-golden")

    def check(name: str, text: str):
        path = GOLDEN_DIR / name
        if update:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            return
        if not path.exists():
            pytest.fail(f"missing golden file {name}; run pytest --update-golden to record it")
        assert text == path.read_text(encoding="utf-8"), f"output differs from golden file {name}"

    return check


# ============================================================
# Knowledge graphs
# ============================================================

@pytest.fixture
def toy_schema() -> RelationSchema:
    return RelationSchema([
        RelationSpec("IsA", entails=("RelatedTo",)),
        RelationSpec("RelatedTo", symmetric=True),
    ])


@pytest.fixture
def toy_kg(toy_schema) -> KnowledgeGraph:
    edges = [
        ("IsA", "frog", "amphibian"),
        ("IsA", "toad", "amphibian"),
        ("IsA", "amphibian", "animal"),
        ("IsA", "snail", "animal"),
        ("IsA", "slug", "animal"),
        ("RelatedTo", "frog", "toad"),
        ("RelatedTo", "snail", "slug"),
        ("IsA", "frog", "animal"),
    ]
    return KnowledgeGraph.from_edges(edges, toy_schema)


@pytest.fixture
def three_relation_schema() -> RelationSchema:
    return RelationSchema([
        RelationSpec("IsA", entails=("RelatedTo",)),
        RelationSpec("HasA", entails=("RelatedTo",)),
        RelationSpec("RelatedTo", symmetric=True),
    ])


@pytest.fixture
def three_relation_kg(three_relation_schema) -> KnowledgeGraph:
    edges = [
        ("IsA", "frog", "animal"),
        ("IsA", "snail", "animal"),
        ("HasA", "frog", "legs"),
        ("HasA", "snail", "shell"),
        ("RelatedTo", "frog", "pond"),
        ("IsA", "pond", "animal"),
    ]
    return KnowledgeGraph.from_edges(edges, three_relation_schema)


# ============================================================
# Micro fixture (hand-computable features)
# ============================================================

def micro_sme_model() -> SmeModel:
    """Dt = 1; only HasA is non-trivial: energy(HasA, frog, legs) = 2."""
    terms = ("frog", "legs", "snail")
    relations = FEATURE_RELATIONS
    model = SmeModel.zeros(terms, relations, term_dim=1)
    term_embeddings = np.array([[1.0], [1.0], [0.0]])
    relation_embeddings = np.zeros((len(relations), RELATION_DIM))
    relation_embeddings[relations.index("HasA"), 0] = 1.0
    tensor = np.zeros((1, 1, RELATION_DIM))
    tensor[0, 0, 0] = 2.0
    return SmeModel(
        terms=model.terms,
        relations=model.relations,
        term_embeddings=term_embeddings,
        relation_embeddings=relation_embeddings,
        interaction_tensor=tensor,
        relation_bias=np.zeros(len(relations)),
    )


@pytest.fixture
def micro_model() -> SmeModel:
    return micro_sme_model()


@pytest.fixture
def micro_bundle() -> ResourceBundle:
    return ResourceBundle(
        embeddings=load_embeddings(MICRO_DIR / "embeddings.txt"),
        leads=load_lead_sections(MICRO_DIR / "leads.tsv"),
        lexicon=load_lexicon(MICRO_DIR / "lexicon.jsonl"),
        ngrams=load_ngram_counts(MICRO_DIR / "unigrams.tsv", MICRO_DIR / "bigrams.tsv"),
        sme_model=micro_sme_model(),
    )


@pytest.fixture
def micro_expected():
    with open(MICRO_DIR / "expected_features.json", "r", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def plane_store() -> EmbeddingStore:
    """2-D store with hand-picked angles."""
    return EmbeddingStore.from_dict({
        "x": [1.0, 0.0],
        "y": [0.0, 1.0],
        "diag": [1.0, 1.0],
        "neg": [-1.0, 0.0],
        "zero": [0.0, 0.0],
        "big_x": [5.0, 0.0],
    })


# ============================================================
# Mini dataset
# ============================================================

def copy_mini_dataset(target: Path, iterations: int = MINI_TEST_SME_ITERATIONS) -> Path:
    """Copy data/mini into target and return the config path (output_dir = target/out)."""
    shutil.copytree(MINI_DIR, target)
    config_path = target / "config.json"
    with open(config_path, "r", encoding="utf-8") as f:
        config = json.load(f)
    config["output_dir"] = "out"
    config["sme"]["iterations"] = iterations
    with open(config_path, "w", encoding="utf-8") as f:
        json.dump(config, f, indent=2)
    return config_path


@pytest.fixture
def mini_config(tmp_path) -> Path:
    return copy_mini_dataset(tmp_path / "mini")
