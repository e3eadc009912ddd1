from PySide6.QtCore import QObject, QRunnable, Signal, Slot

from core.evaluation import AblationSettings, SplitMatrices, evaluate_subset, subset_label
from utils.logger import logger


class WorkerSignals(QObject):
    """Signals for one subset fit."""
    error = Signal(int, str)     # mask, message
    success = Signal(int, object)  # mask, AblationRow


class AblationWorker(QRunnable):
    """Fits and scores a single feature-source subset on a pool thread."""

    def __init__(self, mask: int, data: SplitMatrices, settings: AblationSettings):
        super().__init__()
        self.mask = mask
        self.data = data
        self.settings = settings
        self.signals = WorkerSignals()
        self.setAutoDelete(False)

    @Slot()
    def run(self):
        try:
            logger.debug(f"Worker fitting subset {subset_label(self.mask)}", source="AblationWorker")
            row = evaluate_subset(self.mask, self.data, self.settings)
            self.signals.success.emit(self.mask, row)
        except Exception as e:
            # evaluate_subset records toolkit errors itself; anything here is a bug
            logger.error(f"Worker exception for mask {self.mask}: {e}", source="AblationWorker")
            self.signals.error.emit(self.mask, str(e))
