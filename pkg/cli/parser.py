"""
Argument parsing

Global flags are accepted after the subcommand name
(``main.py train --config data/mini/config.json --seed 7``).
"""

import argparse
import sys
from pathlib import Path
from typing import Dict, Optional

from core.run_config import ConfigKeys


# flag name -> config path key
PATH_FLAGS: Dict[str, str] = {
    "embeddings": ConfigKeys.EMBEDDINGS,
    "leads": ConfigKeys.LEADS,
    "lexicon": ConfigKeys.LEXICON,
    "unigrams": ConfigKeys.UNIGRAMS,
    "bigrams": ConfigKeys.BIGRAMS,
    "edges": ConfigKeys.EDGES,
    "schema": ConfigKeys.SCHEMA,
    "train": ConfigKeys.TRAIN,
    "validation": ConfigKeys.VALIDATION,
    "test": ConfigKeys.TEST,
    "sme_model": ConfigKeys.SME_MODEL,
}

USAGE_EXIT_CODE = 1


class ToolkitArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT_CODE, f"{self.prog}: error: {message}\n")


def _global_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--seed", type=int, help="Run seed (overrides the config)")
    common.add_argument("--out", type=Path, help="Output directory (overrides the config)")
    common.add_argument("--verbose", "-v", action="store_true", help="Print DEBUG messages")

    paths = common.add_argument_group("path overrides")
    for flag in PATH_FLAGS:
        paths.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=Path, metavar="PATH")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = ToolkitArgumentParser(
        prog="discrim",
        description="Discriminative attribute detection: features, clipped linear SVM, ablation.",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=ToolkitArgumentParser)
    sub.required = True

    sub.add_parser("train-sme", parents=[common], help="Train the relational inference model")
    sub.add_parser("extract-features", parents=[common], help="Write feature matrices for every declared split")
    sub.add_parser("train", parents=[common], help="Train the classifier and write reports")

    predict = sub.add_parser("predict", parents=[common], help="Predict one split file")
    predict.add_argument("split", type=Path, help="Task CSV to predict (3 or 4 fields per row)")
    predict.add_argument("--classifier", type=Path, help="Classifier JSON (default: <out>/classifier.json)")

    evaluate = sub.add_parser("evaluate", parents=[common], help="Score predictions against gold labels")
    evaluate.add_argument("predictions", type=Path, help="Predictions CSV written by predict")
    evaluate.add_argument("gold", type=Path, help="Labeled task CSV")

    ablate = sub.add_parser("ablate", parents=[common], help="Retrain on all 31 feature-source subsets")
    ablate.add_argument("--workers", type=int, help="Concurrent fits (overrides evaluation.max_workers)")

    return parser


def path_overrides(args: argparse.Namespace) -> Dict[str, Optional[Path]]:
    return {key: getattr(args, flag, None) for flag, key in PATH_FLAGS.items()}
