"""
Ablation Processor

Runs the subset fits on a private QThreadPool with a concurrency limit and
collects the rows back in mask order. Signals are wired with direct
connections, so no event loop is needed and the processor can block until
the pool drains.
"""

from threading import Lock
from typing import Dict, List, Sequence

from PySide6.QtCore import QObject, Qt, QThreadPool, Signal

from core.evaluation import AblationRow, AblationSettings, SplitMatrices, subset_label
from core.errors import DiscrimError
from workers.ablation_worker import AblationWorker
from utils.logger import logger


class AblationProcessor(QObject):
    """
    Fans subset fits out to worker threads.

    Usage:
        processor = AblationProcessor(data, settings, max_workers=4)
        rows = processor.run(range(1, 32))
    """

    row_finished = Signal(object)       # AblationRow

    def __init__(self, data: SplitMatrices, settings: AblationSettings, max_workers: int = 4):
        super().__init__()
        if max_workers < 1:
            raise ValueError("max_workers must be at least 1")

        self.data = data
        self.settings = settings
        self.max_workers = max_workers

        self.threadpool = QThreadPool()
        self.threadpool.setMaxThreadCount(max_workers)

        self._lock = Lock()
        self._rows: Dict[int, AblationRow] = {}
        self._workers: List[AblationWorker] = []

    def run(self, masks: Sequence[int]) -> List[AblationRow]:
        """Start one worker per mask, wait for all, return rows ordered by mask."""
        masks = list(masks)
        self._rows.clear()
        self._workers.clear()

        logger.info(
            f"Starting {len(masks)} subset fits on {self.max_workers} thread(s)",
            source="AblationProcessor"
        )

        for mask in masks:
            worker = AblationWorker(mask, self.data, self.settings)
            worker.signals.success.connect(self._on_worker_success, Qt.DirectConnection)
            worker.signals.error.connect(self._on_worker_error, Qt.DirectConnection)
            # Pool does not own the runnable; keep it alive until waitForDone
            self._workers.append(worker)
            self.threadpool.start(worker)

        self.threadpool.waitForDone()

        missing = [m for m in masks if m not in self._rows]
        if missing:
            raise DiscrimError(f"Ablation workers returned no row for masks {missing}")

        rows = [self._rows[m] for m in masks]
        self._workers.clear()
        return rows

    def _on_worker_success(self, mask: int, row: AblationRow):
        with self._lock:
            self._rows[mask] = row
        logger.debug(f"Subset {row.subset} done", source="AblationProcessor")
        self.row_finished.emit(row)

    def _on_worker_error(self, mask: int, message: str):
        row = AblationRow(subset_label(mask), None, None, None, None, error=message)
        with self._lock:
            self._rows[mask] = row
        logger.error(f"Subset {row.subset} crashed: {message}", source="AblationProcessor")
        self.row_finished.emit(row)
