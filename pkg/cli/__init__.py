"""
Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure.
"""

import sys
from typing import List, Optional

from core.errors import DiscrimError, DataError
from core.run_config import load_run_config
from cli.commands import (
    cmd_ablate, cmd_evaluate, cmd_extract_features, cmd_predict, cmd_train, cmd_train_sme
)
from cli.parser import build_parser, path_overrides
from utils.filename_utils import LOG_FOLDER
from utils.logger import LogLevel, LogMessage, logger
from utils.performance_monitor import PerformanceMonitor


def _console_sink(verbose: bool):
    threshold = LogLevel.DEBUG.rank if verbose else LogLevel.INFO.rank

    def sink(msg: LogMessage):
        if msg.level.rank >= threshold:
            print(str(msg), file=sys.stderr)

    return sink


def _dispatch(args, config):
    if args.command == "train-sme":
        cmd_train_sme(config)
    elif args.command == "extract-features":
        cmd_extract_features(config)
    elif args.command == "train":
        cmd_train(config)
    elif args.command == "predict":
        cmd_predict(config, args.split, args.classifier)
    elif args.command == "evaluate":
        cmd_evaluate(config, args.predictions, args.gold)
    elif args.command == "ablate":
        cmd_ablate(config, args.workers)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one command, return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    sink = _console_sink(args.verbose)
    logger.add_callback(sink)
    try:
        config = load_run_config(args.config, args.seed, args.out, path_overrides(args))
        logger.attach_file(config.output_dir / LOG_FOLDER)
        monitor = PerformanceMonitor()

        logger.info(f"{args.command}: seed {config.seed}, config hash {config.config_hash()}", source="CLI")
        _dispatch(args, config)
        monitor.log_usage(args.command)
        return 0

    except DiscrimError as e:
        logger.error(str(e), source="CLI")
        return e.exit_code
    except OSError as e:
        # Unreadable or vanished input files
        logger.error(f"{e.filename or ''}: {e.strerror or e}", source="CLI")
        return DataError.exit_code
    finally:
        logger.remove_callback(sink)
        logger.detach_file()


__all__ = ['main']
