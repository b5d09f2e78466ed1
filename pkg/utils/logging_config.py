"""
Logging configuration for the CLI

Records go to stderr; stdout is reserved for command output (JSON reports).
Development runs get a compact colored line per record, production runs
one JSON object per line.
"""
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from config import settings

# Attributes every LogRecord has; anything else came in through extra=
_STANDARD_ATTRS = frozenset(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {"message", "run_id"}

# Cell context shown inline by the colored formatter, in this order
_CELL_KEYS = ("task", "measure", "variant", "n", "seed")


def _extras(record: logging.LogRecord) -> Dict[str, Any]:
    return {key: value for key, value in vars(record).items() if key not in _STANDARD_ATTRS}


class JSONFormatter(logging.Formatter):
    """
    One JSON object per record

    Fields passed with ``extra=`` (measure, variant, n, seed, ...) become
    top-level keys next to the run id.
    """

    def format(self, record: logging.LogRecord) -> str:
        payload: Dict[str, Any] = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "run_id": getattr(record, "run_id", None),
            "message": record.getMessage(),
        }
        payload.update(_extras(record))
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


class ColoredFormatter(logging.Formatter):
    """Terminal formatter: time, level, logger, run id and cell context"""

    COLORS = {
        "DEBUG": "\033[36m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[35m",
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, self.RESET)
        stamp = datetime.fromtimestamp(record.created).strftime("%H:%M:%S")
        run_id = getattr(record, "run_id", None)
        line = f"{color}{stamp} {record.levelname:<8}{self.RESET} {record.name}"
        if run_id:
            line += f" [{run_id}]"
        line += f" {record.getMessage()}"

        extras = _extras(record)
        cell = " ".join(f"{key}={extras[key]}" for key in _CELL_KEYS if key in extras)
        if cell:
            line += f"  ({cell})"
        if record.exc_info:
            line += "\n" + self.formatException(record.exc_info)
        return line


def setup_logging(level: Optional[str] = None, environment: Optional[str] = None) -> None:
    """
    Install a single stderr handler on the root logger

    Calling it again (e.g. after --log-level or --config) replaces the
    handler instead of stacking a second one.

    Args:
        level: overrides settings.LOG_LEVEL
        environment: overrides settings.ENVIRONMENT; production selects JSON output
    """
    from middlewares.request_id import RunIdFilter

    level_name = (level or settings.LOG_LEVEL).upper()
    log_level = logging.getLevelName(level_name)
    if not isinstance(log_level, int):
        log_level = logging.INFO

    handler = logging.StreamHandler(sys.stderr)
    handler.addFilter(RunIdFilter())
    env = environment or settings.ENVIRONMENT
    handler.setFormatter(JSONFormatter() if env == "production" else ColoredFormatter())

    root = logging.getLogger()
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(log_level)

    logging.getLogger(__name__).debug(f"Logging configured: level={level_name}, environment={env}")
