"""
Performance Monitor

CPU and memory usage of the current process, reported once per command.
Uses psutil if available, gracefully degrades if not.

CPU is the average over the command's lifetime, as % of total system
capacity (normalized by core count).
"""

import os
import time
from dataclasses import dataclass
from typing import Optional

try:
    import psutil
    PSUTIL_AVAILABLE = True
except ImportError:
    PSUTIL_AVAILABLE = False

from utils.logger import logger


@dataclass(frozen=True)
class UsageSnapshot:
    wall_seconds: float
    cpu_seconds: Optional[float]
    cpu_percent: Optional[float]
    memory_mb: Optional[float]

    def describe(self) -> str:
        parts = [f"{self.wall_seconds:.2f} s wall"]
        if self.cpu_seconds is not None:
            parts.append(f"{self.cpu_seconds:.2f} s CPU")
        if self.cpu_percent is not None:
            parts.append(f"{self.cpu_percent:.1f}% of system")
        if self.memory_mb is not None:
            parts.append(f"RSS {PerformanceMonitor.format_memory(self.memory_mb)}")
        return ", ".join(parts)


class PerformanceMonitor:
    """
    Measures the current process from construction to snapshot().

    Usage:
        monitor = PerformanceMonitor()
        ...  # run the command
        monitor.log_usage("train")
    """

    def __init__(self):
        self.process = None
        self._cpu_count = os.cpu_count() or 1
        self._start_wall = time.perf_counter()
        self._start_cpu: Optional[float] = None

        if PSUTIL_AVAILABLE:
            try:
                self.process = psutil.Process()
                self._start_cpu = self._cpu_time()
            except psutil.Error:
                self.process = None

    def is_available(self) -> bool:
        return PSUTIL_AVAILABLE and self.process is not None

    def _cpu_time(self) -> float:
        times = self.process.cpu_times()
        return times.user + times.system

    def get_memory_mb(self) -> Optional[float]:
        """Resident set size in MB, or None if unavailable."""
        if not self.is_available():
            return None
        try:
            return self.process.memory_info().rss / (1024 * 1024)
        except psutil.Error:
            return None

    def snapshot(self) -> UsageSnapshot:
        wall = time.perf_counter() - self._start_wall
        cpu_seconds = None
        cpu_percent = None
        if self.is_available() and self._start_cpu is not None:
            try:
                cpu_seconds = self._cpu_time() - self._start_cpu
                if wall > 0:
                    cpu_percent = min(100.0, max(0.0, 100.0 * cpu_seconds / wall / self._cpu_count))
            except psutil.Error:
                cpu_seconds = None
        return UsageSnapshot(wall, cpu_seconds, cpu_percent, self.get_memory_mb())

    def log_usage(self, command: str) -> UsageSnapshot:
        usage = self.snapshot()
        logger.info(f"{command}: {usage.describe()}", source="PerformanceMonitor")
        return usage

    @staticmethod
    def format_memory(mb: float) -> str:
        """"234 MB" or "1.2 GB"."""
        if mb >= 1024:
            return f"{mb / 1024:.1f} GB"
        return f"{int(mb)} MB"
