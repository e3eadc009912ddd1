"""
Run configuration

One UTF-8 JSON file drives every command. Values resolve in the order
command-line flag, then config file, then the built-in default. Relative
paths resolve against the config file's directory (flag paths against the
working directory). No environment variables are read.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Tuple

from core.classifier import SvmHyperparams
from core.errors import ConfigError
from core.evaluation import DEFAULT_BOOTSTRAP_SAMPLES
from core.sme import SmeHyperparams
from utils.logger import logger


class ConfigKeys:
    """
    Dotted names of every config value.

    Used in error messages and by the override mapping, so a typo fails loudly
    instead of silently falling back to a default.
    """

    SEED = "seed"
    OUTPUT_DIR = "output_dir"

    # Paths category
    EMBEDDINGS = "paths.embeddings"
    LEADS = "paths.leads"
    LEXICON = "paths.lexicon"
    UNIGRAMS = "paths.unigrams"
    BIGRAMS = "paths.bigrams"
    EDGES = "paths.edges"
    SCHEMA = "paths.schema"
    TRAIN = "paths.train"
    VALIDATION = "paths.validation"
    TEST = "paths.test"
    SME_MODEL = "paths.sme_model"

    # SME category
    SME_LEARNING_RATE = "sme.learning_rate"
    SME_ITERATIONS = "sme.iterations"
    SME_NEGATIVES = "sme.negatives_per_positive"
    SME_TERM_DIM = "sme.term_dim"
    SME_INIT_FROM_EMBEDDINGS = "sme.init_from_embeddings"

    # Classifier category
    CLASSIFIER_C = "classifier.C"
    CLASSIFIER_TOLERANCE = "classifier.tolerance"
    CLASSIFIER_MAX_ITERATIONS = "classifier.max_iterations"

    # Evaluation category
    BOOTSTRAP_SAMPLES = "evaluation.bootstrap_samples"
    MAX_WORKERS = "evaluation.max_workers"


# Input files read by commands; sme_model is excluded because commands also write it
INPUT_PATH_KEYS: Tuple[str, ...] = (
    ConfigKeys.EMBEDDINGS, ConfigKeys.LEADS, ConfigKeys.LEXICON,
    ConfigKeys.UNIGRAMS, ConfigKeys.BIGRAMS, ConfigKeys.EDGES,
    ConfigKeys.SCHEMA, ConfigKeys.TRAIN, ConfigKeys.VALIDATION, ConfigKeys.TEST,
)
RESOURCE_PATH_KEYS: Tuple[str, ...] = (
    ConfigKeys.EMBEDDINGS, ConfigKeys.LEADS, ConfigKeys.LEXICON,
    ConfigKeys.UNIGRAMS, ConfigKeys.BIGRAMS,
)
SPLIT_KEYS: Tuple[str, ...] = (ConfigKeys.TRAIN, ConfigKeys.VALIDATION, ConfigKeys.TEST)

DEFAULT_SEED = 42
DEFAULT_OUTPUT_DIR = "out"
DEFAULT_MAX_WORKERS = 4
SME_MODEL_FILENAME = "sme_model.bin"

_KNOWN_SECTIONS = {
    "seed", "output_dir", "paths", "sme", "classifier", "evaluation",
}


def _short(key: str) -> str:
    return key.split(".", 1)[1]


def _require_int(key: str, value: Any, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{key} must be at least {minimum}, got {value}")
    return value


def _require_positive_float(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if not value > 0:
        raise ConfigError(f"{key} must be positive, got {value}")
    return float(value)


def _section(raw: Mapping[str, Any], name: str) -> Dict[str, Any]:
    value = raw.get(name, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"'{name}' must be a JSON object")
    return dict(value)


@dataclass(frozen=True)
class RunConfig:
    """Effective configuration of one command invocation."""
    seed: int
    output_dir: Path
    paths: Dict[str, Optional[Path]]
    sme: SmeHyperparams
    init_from_embeddings: bool
    classifier: SvmHyperparams
    bootstrap_samples: int
    max_workers: int
    base_dir: Path = field(default_factory=Path.cwd)
    source: Optional[Path] = None

    # ============================================================
    # Paths
    # ============================================================

    def path(self, key: str) -> Optional[Path]:
        if key not in self.paths:
            raise ConfigError(f"Unknown path key {key}")
        return self.paths[key]

    def require(self, *keys: str) -> Tuple[Path, ...]:
        """The paths of keys a command cannot run without."""
        missing = [k for k in keys if self.paths.get(k) is None]
        if missing:
            raise ConfigError(f"Missing required path(s): {', '.join(missing)}")
        return tuple(self.paths[k] for k in keys)

    @property
    def sme_model_path(self) -> Path:
        return self.paths.get(ConfigKeys.SME_MODEL) or self.output_dir / SME_MODEL_FILENAME

    # ============================================================
    # Seeds and hashing
    # ============================================================

    def sub_seed(self, name: str) -> int:
        """32-bit seed for one component, derived from the run seed."""
        digest = hashlib.sha256(f"{self.seed}:{name}".encode("utf-8")).digest()
        return int.from_bytes(digest[:4], "little")

    def sme_hyperparams(self) -> SmeHyperparams:
        """SME settings with the component sub-seed filled in."""
        return SmeHyperparams(
            learning_rate=self.sme.learning_rate,
            iterations=self.sme.iterations,
            negatives_per_positive=self.sme.negatives_per_positive,
            term_dim=self.sme.term_dim,
            seed=self.sub_seed("sme"),
        )

    def display_path(self, path: Path) -> str:
        try:
            return Path(os.path.relpath(path, self.base_dir)).as_posix()
        except ValueError:
            return path.as_posix()

    def canonical(self) -> Dict[str, Any]:
        """Effective settings as plain JSON; output locations are left out."""
        return {
            "seed": self.seed,
            "paths": {
                _short(key): (self.display_path(self.paths[key]) if self.paths.get(key) else None)
                for key in INPUT_PATH_KEYS
            },
            "sme": {
                "learning_rate": self.sme.learning_rate,
                "iterations": self.sme.iterations,
                "negatives_per_positive": self.sme.negatives_per_positive,
                "term_dim": self.sme.term_dim,
                "init_from_embeddings": self.init_from_embeddings,
            },
            "classifier": {
                "C": self.classifier.C,
                "tolerance": self.classifier.tolerance,
                "max_iterations": self.classifier.max_iterations,
            },
            "evaluation": {"bootstrap_samples": self.bootstrap_samples},
        }

    def config_hash(self, extra_inputs: Sequence[Path] = ()) -> str:
        """
        First 16 hex digits of sha256 over the canonical config, the content
        digest of every declared input file and the content digest of every
        file in extra_inputs (the per-command inputs such as a predicted
        split, a classifier or an SME model).

        Extra inputs contribute their content only, so moving a file does not
        change the hash but editing it does.
        """
        h = hashlib.sha256()
        h.update(json.dumps(self.canonical(), sort_keys=True, separators=(",", ":")).encode("utf-8"))
        for key in INPUT_PATH_KEYS:
            path = self.paths.get(key)
            if path is None:
                continue
            h.update(key.encode("utf-8"))
            h.update(_file_digest(path).encode("ascii"))
        for path in extra_inputs:
            h.update(b"input")
            h.update(_file_digest(Path(path)).encode("ascii"))
        return h.hexdigest()[:16]

    def stamp(self, extra_inputs: Sequence[Path] = ()) -> Dict[str, Any]:
        """Fields written into every artifact."""
        return {"seed": self.seed, "config_hash": self.config_hash(extra_inputs)}

    def sme_fingerprint(self) -> str:
        """
        16 hex digits identifying what the SME model is trained from: its
        sub-seed, hyperparameters and the content of the edge, schema and
        (when initialising from them) embedding files.
        """
        settings = {
            "seed": self.sub_seed("sme"),
            "learning_rate": self.sme.learning_rate,
            "iterations": self.sme.iterations,
            "negatives_per_positive": self.sme.negatives_per_positive,
            "term_dim": self.sme.term_dim,
            "init_from_embeddings": self.init_from_embeddings,
        }
        h = hashlib.sha256()
        h.update(json.dumps(settings, sort_keys=True, separators=(",", ":")).encode("utf-8"))
        keys = [ConfigKeys.EDGES, ConfigKeys.SCHEMA]
        if self.init_from_embeddings:
            keys.append(ConfigKeys.EMBEDDINGS)
        for key in keys:
            path = self.paths.get(key)
            if path is None:
                continue
            h.update(key.encode("utf-8"))
            h.update(_file_digest(path).encode("ascii"))
        return h.hexdigest()[:16]


def _file_digest(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def load_run_config(
        config_path: Optional[Path] = None,
        seed: Optional[int] = None,
        output_dir: Optional[Path] = None,
        path_overrides: Optional[Mapping[str, Optional[Path]]] = None
) -> RunConfig:
    """
    Build the effective config from the JSON file plus flag overrides.

    Args:
        config_path: JSON config; None means defaults plus flags only
        seed: --seed override
        output_dir: --out override
        path_overrides: ConfigKeys path key -> flag value (None entries ignored)

    Raises:
        ConfigError: unreadable JSON, unknown keys, bad values, missing input files
    """
    raw: Dict[str, Any] = {}
    base_dir = Path.cwd()

    if config_path is not None:
        config_path = Path(config_path)
        if not config_path.is_file():
            raise ConfigError(f"Config file not found: {config_path}")
        try:
            with open(config_path, "r", encoding="utf-8") as f:
                raw = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{config_path}:{e.lineno}: invalid JSON: {e.msg}")
        if not isinstance(raw, dict):
            raise ConfigError(f"{config_path}: top level must be a JSON object")
        base_dir = config_path.resolve().parent

    unknown = set(raw) - _KNOWN_SECTIONS
    if unknown:
        raise ConfigError(f"Unknown config key(s): {', '.join(sorted(unknown))}")

    # Paths
    raw_paths = _section(raw, "paths")
    known_paths = {_short(k) for k in INPUT_PATH_KEYS + (ConfigKeys.SME_MODEL,)}
    unknown = set(raw_paths) - known_paths
    if unknown:
        raise ConfigError(f"Unknown path key(s): {', '.join('paths.' + k for k in sorted(unknown))}")

    paths: Dict[str, Optional[Path]] = {}
    for key in INPUT_PATH_KEYS + (ConfigKeys.SME_MODEL,):
        value = raw_paths.get(_short(key))
        if value is None:
            paths[key] = None
        elif not isinstance(value, str) or not value:
            raise ConfigError(f"{key} must be a non-empty string")
        else:
            paths[key] = (base_dir / value).resolve()

    for key, value in (path_overrides or {}).items():
        if key not in paths:
            raise ConfigError(f"Unknown path override {key}")
        if value is not None:
            paths[key] = Path(value).resolve()

    missing = [f"{key} -> {paths[key]}" for key in INPUT_PATH_KEYS if paths[key] is not None and not paths[key].is_file()]
    if missing:
        raise ConfigError("Input file(s) not found: " + "; ".join(missing))

    # Scalars
    seed_value = raw.get("seed", DEFAULT_SEED) if seed is None else seed
    seed_value = _require_int(ConfigKeys.SEED, seed_value, 0)

    if output_dir is not None:
        out = Path(output_dir).resolve()
    else:
        out_raw = raw.get("output_dir", DEFAULT_OUTPUT_DIR)
        if not isinstance(out_raw, str) or not out_raw:
            raise ConfigError(f"{ConfigKeys.OUTPUT_DIR} must be a non-empty string")
        out = (base_dir / out_raw).resolve()

    # SME
    sme_raw = _section(raw, "sme")
    defaults = SmeHyperparams()
    init_from_embeddings = sme_raw.get("init_from_embeddings", False)
    if not isinstance(init_from_embeddings, bool):
        raise ConfigError(f"{ConfigKeys.SME_INIT_FROM_EMBEDDINGS} must be true or false")
    sme = SmeHyperparams(
        learning_rate=_require_positive_float(
            ConfigKeys.SME_LEARNING_RATE, sme_raw.get("learning_rate", defaults.learning_rate)),
        iterations=_require_int(ConfigKeys.SME_ITERATIONS, sme_raw.get("iterations", defaults.iterations), 0),
        negatives_per_positive=_require_int(
            ConfigKeys.SME_NEGATIVES, sme_raw.get("negatives_per_positive", defaults.negatives_per_positive), 1),
        term_dim=_require_int(ConfigKeys.SME_TERM_DIM, sme_raw.get("term_dim", defaults.term_dim), 1),
    )
    _reject_unknown("sme", sme_raw, ("learning_rate", "iterations", "negatives_per_positive",
                                     "term_dim", "init_from_embeddings"))

    # Classifier
    clf_raw = _section(raw, "classifier")
    clf_defaults = SvmHyperparams()
    classifier = SvmHyperparams(
        C=_require_positive_float(ConfigKeys.CLASSIFIER_C, clf_raw.get("C", clf_defaults.C)),
        tolerance=_require_positive_float(
            ConfigKeys.CLASSIFIER_TOLERANCE, clf_raw.get("tolerance", clf_defaults.tolerance)),
        max_iterations=_require_int(
            ConfigKeys.CLASSIFIER_MAX_ITERATIONS, clf_raw.get("max_iterations", clf_defaults.max_iterations), 1),
    )
    _reject_unknown("classifier", clf_raw, ("C", "tolerance", "max_iterations"))

    # Evaluation
    eval_raw = _section(raw, "evaluation")
    bootstrap_samples = _require_int(
        ConfigKeys.BOOTSTRAP_SAMPLES, eval_raw.get("bootstrap_samples", DEFAULT_BOOTSTRAP_SAMPLES), 1)
    max_workers = _require_int(ConfigKeys.MAX_WORKERS, eval_raw.get("max_workers", DEFAULT_MAX_WORKERS), 1)
    _reject_unknown("evaluation", eval_raw, ("bootstrap_samples", "max_workers"))

    config = RunConfig(
        seed=seed_value,
        output_dir=out,
        paths=paths,
        sme=sme,
        init_from_embeddings=init_from_embeddings,
        classifier=classifier,
        bootstrap_samples=bootstrap_samples,
        max_workers=max_workers,
        base_dir=base_dir,
        source=config_path,
    )
    logger.debug(
        f"Config loaded from {config_path or '<flags>'}: seed {config.seed}, output {config.output_dir}",
        source="RunConfig"
    )
    return config


def _reject_unknown(section: str, values: Mapping[str, Any], allowed: Iterable[str]) -> None:
    unknown = set(values) - set(allowed)
    if unknown:
        raise ConfigError(f"Unknown key(s) in '{section}': {', '.join(sorted(unknown))}")
