"""
Run ID tagging

Adds a unique run ID to every log record emitted during a command
"""
import contextvars
import logging
import uuid
from typing import Optional

_run_id: contextvars.ContextVar[Optional[str]] = contextvars.ContextVar("run_id", default=None)


def new_run_id() -> str:
    """Assign and return a fresh run ID for the current context"""
    run_id = uuid.uuid4().hex[:12]
    _run_id.set(run_id)
    return run_id


def current_run_id() -> Optional[str]:
    return _run_id.get()


class RunIdFilter(logging.Filter):
    """
    Attach the current run ID to each record

    Worker threads started with contextvars.copy_context() inherit it.
    """

    def filter(self, record: logging.LogRecord) -> bool:
        run_id = _run_id.get()
        if run_id is not None:
            record.run_id = run_id
        return True
