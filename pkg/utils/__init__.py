from .logger import logger, AppLogger, LogLevel, LogMessage
from .file_utils import load_triples, load_predictions
from .filename_utils import split_name, prediction_output_path, report_output_path
from .performance_monitor import PerformanceMonitor

__all__ = [
    'logger', 'AppLogger', 'LogLevel', 'LogMessage',
    'load_triples', 'load_predictions',
    'split_name', 'prediction_output_path', 'report_output_path',
    'PerformanceMonitor',
]
