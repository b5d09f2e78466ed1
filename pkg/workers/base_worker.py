"""
Synchronous worker lifecycle shared by the bench sweep and the prediction pool
"""
import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional


class BaseWorker(ABC):
    """
    One unit of CPU-bound work run to completion on the calling thread

    Subclasses implement process(). start() never raises: a failure is
    logged and stored in self.error so callers decide whether to re-raise
    (PredictionPool does) or report it (BenchWorker does).
    """

    def __init__(self, name: str) -> None:
        self.name = name
        self.running = False
        self.error: Optional[BaseException] = None
        self.elapsed_seconds: Optional[float] = None
        self.logger = logging.getLogger(f"worker.{name}")

    @abstractmethod
    def process(self) -> None:
        """Do the work; loops should return early once self.running is False"""

    def start(self) -> None:
        if self.running:
            self.logger.warning(f"{self.name} already running, start ignored")
            return

        self.running = True
        self.error = None
        self.elapsed_seconds = None
        self.logger.debug(f"{self.name} started")
        began = time.perf_counter()
        try:
            self.process()
        except Exception as exc:
            self.error = exc
            self.logger.error(f"{self.name} failed: {type(exc).__name__}: {exc}", exc_info=True)
        finally:
            self.running = False
            self.elapsed_seconds = time.perf_counter() - began
            self.logger.debug(f"{self.name} finished in {self.elapsed_seconds:.3f}s")

    def stop(self) -> None:
        """Ask process() to end after the item in progress"""
        if self.running:
            self.logger.info(f"{self.name} stop requested")
        self.running = False

    def get_status(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "running": self.running,
            "elapsed_seconds": self.elapsed_seconds,
            "error": None if self.error is None else type(self.error).__name__,
        }
