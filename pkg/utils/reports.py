"""
Report writers: bench CSV and JSON reports

Schemas are versioned (see docs/REPORT_FORMATS.md).
"""
import csv
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Union

from pydantic import BaseModel

from common.exceptions.dataset import DatasetParseError
from common.schemas.bench import BenchRecord
from config import settings

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def report_path(name: PathLike, report_dir: Optional[PathLike] = None) -> Path:
    """
    Resolve a report file name

    Relative names go under report_dir (settings.REPORT_DIR by default);
    absolute paths are kept. Parent directories are created.
    """
    path = Path(name)
    if not path.is_absolute():
        path = Path(report_dir if report_dir is not None else settings.REPORT_DIR) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _cell(value: object) -> object:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return value


class BenchCsvWriter:
    """
    Appends BenchRecords to a CSV file, one row per cell

    The header is written only when the file is new or empty, so several
    runs can append to the same file.
    """

    def __init__(self, path: PathLike) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.columns = BenchRecord.csv_columns()
        self.rows_written = 0

    def append(self, record: BenchRecord) -> None:
        new_file = not self.path.exists() or self.path.stat().st_size == 0
        row = record.model_dump(mode="json")
        with self.path.open("a", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=self.columns)
            if new_file:
                writer.writeheader()
            writer.writerow({key: _cell(row[key]) for key in self.columns})
        self.rows_written += 1

    def extend(self, records: Iterable[BenchRecord]) -> None:
        for record in records:
            self.append(record)


def read_bench_csv(path: PathLike) -> List[BenchRecord]:
    """
    Parse a bench CSV back into records

    Raises:
        DatasetParseError: on a missing header or an invalid row
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise DatasetParseError("missing header", line=1, path=str(path))
        records: List[BenchRecord] = []
        for line, row in enumerate(reader, start=2):
            values = {key: value for key, value in row.items() if value not in ("", None)}
            try:
                records.append(BenchRecord.model_validate(values))
            except ValueError as exc:
                raise DatasetParseError(f"invalid bench row: {exc}", line=line, path=str(path)) from exc
    logger.debug(f"Read {len(records)} bench records from {path}")
    return records


def write_json_report(report: BaseModel, path: PathLike) -> Path:
    """Write a report model as indented JSON"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Report written: {target}")
    return target
