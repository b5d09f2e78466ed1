"""
Middleware package

Each middleware has single responsibility and lives in its own module
"""
from .exception_handler import format_error_response, handle_exception
from .logging_middleware import cli_command
from .request_id import RunIdFilter, current_run_id, new_run_id

__all__ = [
    "handle_exception",
    "format_error_response",
    "cli_command",
    "RunIdFilter",
    "current_run_id",
    "new_run_id",
]
