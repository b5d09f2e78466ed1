"""
Benchmark controller

Runs a BenchWorker sweep, streams records to CSV and fits the scaling slopes
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from common.schemas.bench import BenchRecord, RunConfig
from common.schemas.reports import SlopeRow
from services.measures.bootstrap import bprime_study
from utils.reports import BenchCsvWriter
from utils.stats import summarize_slopes
from workers.bench_worker import BenchWorker

logger = logging.getLogger(__name__)


@dataclass
class BenchResult:
    records: List[BenchRecord]
    slopes: List[SlopeRow]
    csv_path: Optional[Path] = None


def run_bench(config: RunConfig, out_path: Optional[Path] = None) -> BenchResult:
    """
    Run every (measure, variant, n, seed) cell

    Args:
        config: sweep parameters
        out_path: CSV file appended to as each cell finishes

    Raises:
        the worker's error, if the sweep itself (not a single cell) failed
    """
    writer = BenchCsvWriter(out_path) if out_path is not None else None
    worker = BenchWorker(config, sink=writer.append if writer is not None else None)
    logger.info(f"Bench sweep: {worker.total_cells} cells", extra={"task": config.task})
    worker.start()
    if worker.error is not None:
        raise worker.error

    slopes = summarize_slopes(worker.records)
    return BenchResult(records=worker.records, slopes=slopes, csv_path=writer.path if writer is not None else None)


def bprime_table(n_grid: Sequence[int], B: int, seeds: Sequence[int]) -> Dict[int, float]:
    """Mean bootstrap draws B' per n"""
    return bprime_study(n_grid, B, seeds)
