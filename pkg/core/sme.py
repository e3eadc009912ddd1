"""
Relational inference over a knowledge graph (compact Semantic Matching Energy).

Terms get Dt-dimensional embeddings, relations get 10-dimensional embeddings,
and a Dt x Dt x 10 interaction tensor combines them:

    score(rel, head, tail) = logistic(e_head . M_rel . e_tail + bias_rel)
    M_rel = sum_k rel_embedding[k] * tensor[:, :, k]

Training separates expanded positive edges from corrupted negatives with
binary cross-entropy and plain SGD, so a fixed seed reproduces the model
bit for bit.
"""

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.embeddings import EmbeddingStore, lookup, normalization_candidates
from core.errors import (
    ConfigError, CorruptionExhaustedError, DataError, NumericalError,
    ResourceFormatError, SchemaError, UnknownRelationError
)
from models.triple import Triple
from utils.logger import logger


RELATION_DIM = 10
INIT_RANGE = 0.05
RELATION_INIT_RANGE = 0.5
MAX_RESAMPLES = 100
LOSS_WINDOW = 1000

# Energies beyond this are clamped when scoring so the score stays inside (0, 1)
SCORE_ENERGY_LIMIT = 30.0

RELATED_TO = "RelatedTo"

# Relations used as attribute features, in feature order
FEATURE_RELATIONS = (
    "RelatedTo", "IsA", "HasA", "PartOf", "CapableOf",
    "UsedFor", "HasContext", "HasProperty", "AtLocation",
)

EdgeTuple = Tuple[str, str, str]  # (relation, head, tail)


# ============================================================
# Relation schema
# ============================================================

@dataclass(frozen=True)
class RelationSpec:
    name: str
    symmetric: bool = False
    entails: Tuple[str, ...] = ()


class RelationSchema:
    """
    Ordered relation declarations with symmetry flags and entailment.

    Entailment is closed transitively; a relation may not entail itself,
    directly or through a cycle.
    """

    def __init__(self, relations: Sequence[RelationSpec]):
        self.relations: Tuple[RelationSpec, ...] = tuple(relations)
        self._index: Dict[str, int] = {}

        for spec in self.relations:
            if not spec.name:
                raise SchemaError("Relation name must be non-empty")
            if spec.name in self._index:
                raise SchemaError(f"Duplicate relation: {spec.name}")
            self._index[spec.name] = len(self._index)

        for spec in self.relations:
            for target in spec.entails:
                if target not in self._index:
                    raise SchemaError(f"{spec.name} entails undeclared relation {target}")
                if target == spec.name:
                    raise SchemaError(f"{spec.name} entails itself")

        self._closure: Dict[str, Tuple[str, ...]] = {
            spec.name: self._entailment_closure(spec.name) for spec in self.relations
        }

    def _entailment_closure(self, name: str) -> Tuple[str, ...]:
        reached = set()
        stack = list(self.spec(name).entails)
        while stack:
            target = stack.pop()
            if target == name:
                raise SchemaError(f"Entailment cycle through {name}")
            if target in reached:
                continue
            reached.add(target)
            stack.extend(self.spec(target).entails)
        # Schema order keeps expansion deterministic
        return tuple(spec.name for spec in self.relations if spec.name in reached)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(spec.name for spec in self.relations)

    def __len__(self) -> int:
        return len(self.relations)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownRelationError(name)

    def spec(self, name: str) -> RelationSpec:
        return self.relations[self.index(name)]

    def is_symmetric(self, name: str) -> bool:
        return self.spec(name).symmetric

    def entailed(self, name: str) -> Tuple[str, ...]:
        """Every relation `name` entails, directly or transitively."""
        self.index(name)
        return self._closure[name]

    def to_dict(self) -> dict:
        return {
            "relations": [
                {"name": s.name, "symmetric": s.symmetric, "entails": list(s.entails)}
                for s in self.relations
            ]
        }


def default_schema(extra_relations: Iterable[str] = ()) -> RelationSchema:
    """
    The nine feature relations plus any extras; everything entails RelatedTo,
    and RelatedTo is the only symmetric relation.
    """
    names = list(FEATURE_RELATIONS)
    for name in extra_relations:
        if name not in names:
            names.append(name)

    specs = []
    for name in names:
        if name == RELATED_TO:
            specs.append(RelationSpec(name=name, symmetric=True))
        else:
            specs.append(RelationSpec(name=name, entails=(RELATED_TO,)))
    return RelationSchema(specs)


def load_schema(path: Path) -> RelationSchema:
    """
    Load {"relations": [{"name": str, "symmetric": bool, "entails": [str]}]}.

    Raises:
        SchemaError: malformed JSON or invariant violations
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(f"Invalid JSON: {e.msg}", path, e.lineno)

    relations = raw.get("relations") if isinstance(raw, dict) else None
    if not isinstance(relations, list):
        raise SchemaError("Schema needs a 'relations' list", path)

    specs = []
    for item in relations:
        if not isinstance(item, dict) or not isinstance(item.get("name"), str):
            raise SchemaError(f"Relation entry needs a string 'name': {item!r}", path)
        entails = item.get("entails", [])
        if not isinstance(entails, list) or not all(isinstance(e, str) for e in entails):
            raise SchemaError(f"'entails' of {item['name']} must be a list of names", path)
        specs.append(RelationSpec(
            name=item["name"],
            symmetric=bool(item.get("symmetric", False)),
            entails=tuple(entails),
        ))

    schema = RelationSchema(specs)
    logger.info(f"Loaded schema with {len(schema)} relations from {path.name}", source="SME")
    return schema


# ============================================================
# Knowledge graph
# ============================================================

@dataclass(frozen=True)
class KnowledgeGraph:
    """Edges (relation, head, tail); nodes are the sorted set of endpoints."""
    edges: Tuple[EdgeTuple, ...]
    nodes: Tuple[str, ...] = ()

    @classmethod
    def from_edges(cls, edges: Iterable[EdgeTuple], schema: Optional[RelationSchema] = None) -> "KnowledgeGraph":
        edges = tuple((rel, head, tail) for rel, head, tail in edges)
        if schema is not None:
            for rel, _, _ in edges:
                if rel not in schema:
                    raise UnknownRelationError(rel)
        nodes = tuple(sorted({n for _, head, tail in edges for n in (head, tail)}))
        return cls(edges=edges, nodes=nodes)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def relations(self) -> Tuple[str, ...]:
        """Relations used by the edges, in first-appearance order."""
        return tuple(dict.fromkeys(rel for rel, _, _ in self.edges))


def load_edges(path: Path) -> List[EdgeTuple]:
    """
    Read "relation<TAB>head<TAB>tail" lines; '#' lines and blank lines are skipped.

    Raises:
        ResourceFormatError: line without exactly three non-empty fields
    """
    path = Path(path)
    edges: List[EdgeTuple] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = [part.strip() for part in line.split("\t")]
            if len(fields) != 3 or not all(fields):
                raise ResourceFormatError("Expected 'relation<TAB>head<TAB>tail'", path, line_number)
            edges.append((fields[0], fields[1], fields[2]))

    logger.info(f"Loaded {len(edges)} edges from {path.name}", source="SME")
    return edges


def load_knowledge_graph(edge_path: Path, schema_path: Optional[Path] = None) -> Tuple[KnowledgeGraph, RelationSchema]:
    """Load edges and their schema (the default schema when no schema file is given)."""
    edges = load_edges(edge_path)
    if schema_path is not None:
        schema = load_schema(schema_path)
    else:
        schema = default_schema(rel for rel, _, _ in edges)
    return KnowledgeGraph.from_edges(edges, schema), schema


# ============================================================
# Model
# ============================================================

@dataclass(frozen=True)
class SmeHyperparams:
    learning_rate: float = 0.05
    iterations: int = 50000
    negatives_per_positive: int = 3
    term_dim: int = 32
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError("sme.learning_rate must be positive")
        if not isinstance(self.iterations, int) or self.iterations < 0:
            raise ConfigError("sme.iterations must be a non-negative integer")
        if not isinstance(self.negatives_per_positive, int) or self.negatives_per_positive < 1:
            raise ConfigError("sme.negatives_per_positive must be at least 1")
        if not isinstance(self.term_dim, int) or self.term_dim < 1:
            raise ConfigError("sme.term_dim must be a positive integer")


@dataclass(frozen=True, eq=False)
class SmeModel:
    """Trained parameters; treat as immutable once built."""
    terms: Tuple[str, ...]
    relations: Tuple[str, ...]
    term_embeddings: np.ndarray      # (len(terms), Dt)
    relation_embeddings: np.ndarray  # (len(relations), 10)
    interaction_tensor: np.ndarray   # (Dt, Dt, 10)
    relation_bias: np.ndarray        # (len(relations),)

    def __post_init__(self):
        dt = self.term_embeddings.shape[1]
        if self.term_embeddings.shape[0] != len(self.terms):
            raise DataError("term_embeddings rows must match terms")
        if self.relation_embeddings.shape != (len(self.relations), RELATION_DIM):
            raise DataError(f"relation_embeddings must have shape ({len(self.relations)}, {RELATION_DIM})")
        if self.interaction_tensor.shape != (dt, dt, RELATION_DIM):
            raise DataError(f"interaction_tensor must have shape ({dt}, {dt}, {RELATION_DIM})")
        if self.relation_bias.shape != (len(self.relations),):
            raise DataError("relation_bias must have one entry per relation")

    @classmethod
    def zeros(cls, terms: Sequence[str], relations: Sequence[str], term_dim: int) -> "SmeModel":
        """All-zero model; every score is 0.5."""
        return cls(
            terms=tuple(terms),
            relations=tuple(relations),
            term_embeddings=np.zeros((len(terms), term_dim)),
            relation_embeddings=np.zeros((len(relations), RELATION_DIM)),
            interaction_tensor=np.zeros((term_dim, term_dim, RELATION_DIM)),
            relation_bias=np.zeros(len(relations)),
        )

    @property
    def term_dim(self) -> int:
        return int(self.term_embeddings.shape[1])

    @cached_property
    def term_index(self) -> Dict[str, int]:
        return {term: i for i, term in enumerate(self.terms)}

    @cached_property
    def relation_index(self) -> Dict[str, int]:
        return {rel: i for i, rel in enumerate(self.relations)}

    @cached_property
    def _relation_matrices(self) -> np.ndarray:
        # (R, Dt, Dt): M_rel for every relation
        return np.einsum("ijk,rk->rij", self.interaction_tensor, self.relation_embeddings)

    def relation_id(self, rel: str) -> int:
        try:
            return self.relation_index[rel]
        except KeyError:
            raise UnknownRelationError(rel)

    def term_vector(self, term: str) -> np.ndarray:
        """Embedding of a term (normalisation chain applied); zeros when unknown."""
        for candidate in normalization_candidates(term):
            idx = self.term_index.get(candidate)
            if idx is not None:
                return self.term_embeddings[idx]
        return np.zeros(self.term_dim)

    def energy(self, rel: str, head: str, tail: str) -> float:
        r = self.relation_id(rel)
        h = self.term_vector(head)
        t = self.term_vector(tail)
        return float(h @ self._relation_matrices[r] @ t + self.relation_bias[r])

    def parameters_equal(self, other: "SmeModel") -> bool:
        """Exact (bitwise) equality of vocabularies and parameters."""
        return (
            self.terms == other.terms
            and self.relations == other.relations
            and np.array_equal(self.term_embeddings, other.term_embeddings)
            and np.array_equal(self.relation_embeddings, other.relation_embeddings)
            and np.array_equal(self.interaction_tensor, other.interaction_tensor)
            and np.array_equal(self.relation_bias, other.relation_bias)
        )


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    z = np.exp(x)
    return z / (1.0 + z)


def score_triple(model: SmeModel, rel: str, head: str, tail: str) -> float:
    """Confidence in (0, 1) that (rel, head, tail) holds."""
    energy = model.energy(rel, head, tail)
    energy = min(SCORE_ENERGY_LIMIT, max(-SCORE_ENERGY_LIMIT, energy))
    return float(_logistic(energy))


# ============================================================
# Positive expansion and negative sampling
# ============================================================

def expand_positives(kg: KnowledgeGraph, schema: RelationSchema) -> List[EdgeTuple]:
    """
    Edges plus everything they entail: generalised relations and reversed
    symmetric edges, closed under both rules, deduplicated, in discovery order.
    """
    result: Dict[EdgeTuple, None] = {}
    queue = deque(kg.edges)

    while queue:
        triple = queue.popleft()
        if triple in result:
            continue
        result[triple] = None

        rel, head, tail = triple
        for general in schema.entailed(rel):
            queue.append((general, head, tail))
        if schema.is_symmetric(rel):
            queue.append((rel, tail, head))

    return list(result)


class NegativeSampler:
    """
    Builds negatives by corrupting positives.

    Corruption kinds: replace head, replace tail, replace the relation with one
    the original does not entail, flip an asymmetric relation.
    """

    KINDS = ("head", "tail", "relation", "flip")

    def __init__(
            self,
            kg: KnowledgeGraph,
            schema: RelationSchema,
            positives: Optional[Iterable[EdgeTuple]] = None
    ):
        if len(kg.nodes) < 2 or len(schema) < 2:
            raise CorruptionExhaustedError(
                "Negative sampling needs at least 2 nodes and 2 relations"
            )
        self.nodes = kg.nodes
        self.schema = schema
        if positives is None:
            positives = expand_positives(kg, schema)
        self.positive_set: FrozenSet[EdgeTuple] = frozenset(positives)
        self._node_index = {node: i for i, node in enumerate(self.nodes)}
        self._replacements: Dict[str, Tuple[str, ...]] = {}

    def relation_replacements(self, rel: str) -> Tuple[str, ...]:
        """Relations a corruption may switch `rel` to."""
        if rel not in self._replacements:
            entailed = set(self.schema.entailed(rel))
            self._replacements[rel] = tuple(
                name for name in self.schema.names if name != rel and name not in entailed
            )
        return self._replacements[rel]

    def applicable_kinds(self, rel: str) -> Tuple[str, ...]:
        kinds = ["head", "tail"]
        if self.relation_replacements(rel):
            kinds.append("relation")
        if not self.schema.is_symmetric(rel):
            kinds.append("flip")
        return tuple(kinds)

    def _other_node(self, node: str, rng: np.random.Generator) -> str:
        # Uniform over nodes != node (node may be outside the graph)
        skip = self._node_index.get(node)
        if skip is None:
            return self.nodes[int(rng.integers(len(self.nodes)))]
        pick = int(rng.integers(len(self.nodes) - 1))
        if pick >= skip:
            pick += 1
        return self.nodes[pick]

    def _apply(self, kind: str, positive: EdgeTuple, rng: np.random.Generator) -> EdgeTuple:
        rel, head, tail = positive
        if kind == "head":
            return (rel, self._other_node(head, rng), tail)
        if kind == "tail":
            return (rel, head, self._other_node(tail, rng))
        if kind == "relation":
            options = self.relation_replacements(rel)
            return (options[int(rng.integers(len(options)))], head, tail)
        return (rel, tail, head)

    def corrupt(self, positive: EdgeTuple, rng: np.random.Generator) -> EdgeTuple:
        """
        One negative for `positive`, never a member of the positive set.

        Raises:
            CorruptionExhaustedError: no term replacement escapes the positive set
        """
        rel, head, tail = positive
        kinds = self.applicable_kinds(rel)

        for _ in range(MAX_RESAMPLES):
            kind = kinds[int(rng.integers(len(kinds)))]
            candidate = self._apply(kind, positive, rng)
            if candidate not in self.positive_set:
                return candidate

        # Fallback: try every term replacement in a random order
        candidates = [(rel, n, tail) for n in self.nodes if n != head]
        candidates += [(rel, head, n) for n in self.nodes if n != tail]
        for i in rng.permutation(len(candidates)):
            candidate = candidates[int(i)]
            if candidate not in self.positive_set:
                return candidate

        raise CorruptionExhaustedError(f"No negative found for {positive}")


def corrupt(
        positive: EdgeTuple,
        kg: KnowledgeGraph,
        schema: RelationSchema,
        rng: np.random.Generator,
        positives: Optional[Iterable[EdgeTuple]] = None
) -> EdgeTuple:
    """Single-shot corruption; use NegativeSampler when sampling repeatedly."""
    return NegativeSampler(kg, schema, positives).corrupt(positive, rng)


# ============================================================
# Loss and gradients
# ============================================================

@dataclass
class SmeGradients:
    """Gradients of one sample's cross-entropy."""
    loss: float
    head: np.ndarray
    tail: np.ndarray
    relation: np.ndarray
    tensor: np.ndarray
    bias: float


def _sample_gradients(
        h: np.ndarray, t: np.ndarray, r: np.ndarray,
        tensor: np.ndarray, bias: float, target: float
) -> SmeGradients:
    m = np.tensordot(tensor, r, axes=([2], [0]))
    m_t = m @ t
    energy = float(h @ m_t + bias)

    # Cross-entropy on logistic(energy); d loss / d energy = p - target
    loss = float(np.logaddexp(0.0, -energy)) if target == 1.0 else float(np.logaddexp(0.0, energy))
    delta = _logistic(energy) - target

    return SmeGradients(
        loss=loss,
        head=delta * m_t,
        tail=delta * (m.T @ h),
        relation=delta * np.einsum("i,ijk,j->k", h, tensor, t),
        tensor=delta * np.multiply.outer(np.outer(h, t), r),
        bias=delta,
    )


def sme_loss_and_gradients(model: SmeModel, rel: str, head: str, tail: str, target: int) -> SmeGradients:
    """
    Cross-entropy of one triple against a 0/1 target with analytic gradients.

    head/tail gradients refer to the head and tail embeddings separately,
    even when head == tail.
    """
    r = model.relation_id(rel)
    return _sample_gradients(
        model.term_vector(head), model.term_vector(tail),
        model.relation_embeddings[r], model.interaction_tensor,
        float(model.relation_bias[r]), float(target)
    )


# ============================================================
# Training
# ============================================================

class SmeTrainer:
    """
    Stochastic trainer.

    Each step draws one expanded positive uniformly and
    `negatives_per_positive` corruptions of it, sums their gradients at the
    current parameters and takes one SGD step.
    """

    def __init__(
            self,
            kg: KnowledgeGraph,
            schema: RelationSchema,
            hp: SmeHyperparams,
            init_store: Optional[EmbeddingStore] = None
    ):
        if len(kg) == 0:
            raise DataError("Cannot train on an empty knowledge graph")
        self.kg = kg
        self.schema = schema
        self.hp = hp
        self.init_store = init_store
        self.positives = expand_positives(kg, schema)
        self.sampler = NegativeSampler(kg, schema, self.positives)
        self.loss_log: List[Tuple[int, float]] = []

    def initial_model(self) -> SmeModel:
        """Model before any step (deterministic in the seed)."""
        rng = np.random.default_rng(self.hp.seed)
        return self._initialize(rng)

    def _initialize(self, rng: np.random.Generator) -> SmeModel:
        dt = self.hp.term_dim
        terms = self.kg.nodes
        relations = self.schema.names

        term_embeddings = rng.uniform(-INIT_RANGE, INIT_RANGE, size=(len(terms), dt))
        relation_embeddings = rng.uniform(
            -RELATION_INIT_RANGE, RELATION_INIT_RANGE, size=(len(relations), RELATION_DIM)
        )
        # Tensor scaled by 1/sqrt(Dt) so M_rel entries stay O(1) at any Dt
        tensor_range = 1.0 / np.sqrt(dt)
        tensor = rng.uniform(-tensor_range, tensor_range, size=(dt, dt, RELATION_DIM))

        if self.init_store is not None:
            copied = 0
            width = min(dt, self.init_store.dim)
            for i, term in enumerate(terms):
                found = lookup(self.init_store, term)
                if found.found:
                    term_embeddings[i, :width] = found.values[:width]
                    copied += 1
            logger.debug(f"Initialized {copied}/{len(terms)} term rows from embeddings", source="SmeTrainer")

        return SmeModel(
            terms=terms,
            relations=relations,
            term_embeddings=term_embeddings,
            relation_embeddings=relation_embeddings,
            interaction_tensor=tensor,
            relation_bias=np.zeros(len(relations)),
        )

    def train(self) -> SmeModel:
        hp = self.hp
        rng = np.random.default_rng(hp.seed)
        model = self._initialize(rng)

        # Work on private copies; the returned model wraps them
        E = model.term_embeddings.copy()
        R = model.relation_embeddings.copy()
        T = model.interaction_tensor.copy()
        b = model.relation_bias.copy()
        term_idx = model.term_index
        rel_idx = model.relation_index

        logger.info(
            f"Training SME: {len(self.kg.nodes)} terms, {len(R)} relations, "
            f"{len(self.positives)} expanded positives, Dt={hp.term_dim}, "
            f"{hp.iterations} iterations",
            source="SmeTrainer"
        )

        self.loss_log = []
        window_loss = 0.0
        window_samples = 0
        lr = hp.learning_rate

        for step in range(1, hp.iterations + 1):
            positive = self.positives[int(rng.integers(len(self.positives)))]
            samples = [(positive, 1.0)]
            for _ in range(hp.negatives_per_positive):
                samples.append((self.sampler.corrupt(positive, rng), 0.0))

            grad_E: Dict[int, np.ndarray] = {}
            grad_R: Dict[int, np.ndarray] = {}
            grad_T = np.zeros_like(T)
            grad_b: Dict[int, float] = {}

            for (rel, head, tail), target in samples:
                hi, ti, ri = term_idx[head], term_idx[tail], rel_idx[rel]
                g = _sample_gradients(E[hi], E[ti], R[ri], T, b[ri], target)
                window_loss += g.loss
                window_samples += 1

                grad_E[hi] = grad_E.get(hi, 0.0) + g.head
                grad_E[ti] = grad_E.get(ti, 0.0) + g.tail
                grad_R[ri] = grad_R.get(ri, 0.0) + g.relation
                grad_T += g.tensor
                grad_b[ri] = grad_b.get(ri, 0.0) + g.bias

            for i, g in grad_E.items():
                E[i] -= lr * g
            for i, g in grad_R.items():
                R[i] -= lr * g
            T -= lr * grad_T
            for i, g in grad_b.items():
                b[i] -= lr * g

            if step % LOSS_WINDOW == 0:
                mean_loss = window_loss / window_samples
                self.loss_log.append((step, mean_loss))
                window_loss = 0.0
                window_samples = 0
                if not np.isfinite(mean_loss):
                    raise NumericalError(f"SME loss became non-finite at step {step}")
                logger.debug(f"step {step}: mean loss {mean_loss:.5f}", source="SmeTrainer")

        if window_samples:
            self.loss_log.append((hp.iterations, window_loss / window_samples))

        for name, array in (("term embeddings", E), ("relation embeddings", R), ("tensor", T), ("bias", b)):
            if not np.all(np.isfinite(array)):
                raise NumericalError(f"SME {name} contain non-finite values")

        if self.loss_log:
            logger.success(
                f"SME training finished: final window loss {self.loss_log[-1][1]:.5f}",
                source="SmeTrainer"
            )

        return SmeModel(
            terms=model.terms,
            relations=model.relations,
            term_embeddings=E,
            relation_embeddings=R,
            interaction_tensor=T,
            relation_bias=b,
        )


def train_sme(
        kg: KnowledgeGraph,
        schema: RelationSchema,
        hp: SmeHyperparams,
        init_store: Optional[EmbeddingStore] = None
) -> SmeModel:
    """Train an SME model; see SmeTrainer for the loss log."""
    return SmeTrainer(kg, schema, hp, init_store).train()


# ============================================================
# Features
# ============================================================

# (relation, attribute-first) pairs for entries 2..11
_DIRECTED_FEATURES = tuple((rel, False) for rel in FEATURE_RELATIONS[1:]) + (
    ("PartOf", True),
    ("AtLocation", True),
)

SME_FEATURE_COUNT = 1 + len(_DIRECTED_FEATURES)


def sme_features(model: SmeModel, triple: Triple) -> np.ndarray:
    """
    The 11 relational differences between term1 and term2 for the attribute.

    Entry 0 is RelatedTo in both directions summed; entries 1-8 score
    (term, rel, att) for IsA..AtLocation; entries 9-10 score PartOf and
    AtLocation with the attribute first.
    """
    t1, t2, att = triple.term1, triple.term2, triple.attribute

    def s(rel: str, head: str, tail: str) -> float:
        return score_triple(model, rel, head, tail)

    values = [
        (s(RELATED_TO, t1, att) + s(RELATED_TO, att, t1)) - (s(RELATED_TO, t2, att) + s(RELATED_TO, att, t2))
    ]
    for rel, attribute_first in _DIRECTED_FEATURES:
        if attribute_first:
            values.append(s(rel, att, t1) - s(rel, att, t2))
        else:
            values.append(s(rel, t1, att) - s(rel, t2, att))

    return np.asarray(values, dtype=np.float64)
