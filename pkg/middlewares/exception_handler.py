"""
Global exception handler

Turns any exception raised by a command into a logged failure, a
one-line message on stderr and a process exit code.
"""
import logging
from typing import Any, Dict, Optional

from pydantic import ValidationError
from rich.console import Console

from common.exceptions.conformal import ConformalException
from common.exceptions.dataset import DatasetException
from config import settings

logger = logging.getLogger(__name__)

_stderr = Console(stderr=True)

EXIT_USAGE = 2
EXIT_IO = 74
EXIT_UNEXPECTED = 70


def handle_exception(exc: Exception, context: Optional[Dict[str, Any]] = None) -> int:
    """
    Convert an exception to an exit code

    PRIORITY ORDER:
    1. Dataset errors (exit code carried by the exception, 65 by default)
    2. Conformal engine errors (exit code carried by the exception)
    3. Pydantic validation errors (2)
    4. OS errors (74)
    5. Unexpected errors (70)
    """
    context = context or {}

    if isinstance(exc, DatasetException):
        logger.warning(f"Dataset error: {exc.message}", extra=context)
        _stderr.print(f"[red]error:[/red] {exc.message}", highlight=False)
        return exc.exit_code

    if isinstance(exc, ConformalException):
        logger.error(f"Engine error: {exc.message}", extra=context)
        _stderr.print(f"[red]error:[/red] {exc.message}", highlight=False)
        return exc.exit_code

    if isinstance(exc, ValidationError):
        logger.warning(f"Validation error: {exc.errors()}", extra=context)
        first = exc.errors()[0] if exc.errors() else {"loc": (), "msg": str(exc)}
        where = ".".join(str(part) for part in first.get("loc", ()))
        _stderr.print(f"[red]invalid parameters:[/red] {where} {first.get('msg', '')}".rstrip(), highlight=False)
        return EXIT_USAGE

    if isinstance(exc, OSError):
        logger.error(f"I/O error: {exc}", extra=context)
        _stderr.print(f"[red]I/O error:[/red] {exc}", highlight=False)
        return EXIT_IO

    logger.error(
        f"Unexpected error: {str(exc)}",
        exc_info=True,  # Include stack trace in logs
        extra=context,
    )

    # In production, never expose internal error details
    if settings.ENVIRONMENT == "production":
        _stderr.print("[red]error:[/red] an unexpected error occurred", highlight=False)
    else:
        _stderr.print(f"[red]error:[/red] {type(exc).__name__}: {exc}", highlight=False)
    return EXIT_UNEXPECTED


def format_error_response(exc: BaseException) -> Dict[str, Any]:
    """
    Format an error consistently for bench rows and JSON reports

    """
    if isinstance(exc, (ConformalException, DatasetException)):
        error_type = type(exc).__name__
        message = exc.message
        exit_code = exc.exit_code
    else:
        error_type = type(exc).__name__
        message = str(exc)
        exit_code = EXIT_UNEXPECTED

    return {
        "error": error_type,
        "message": message,
        "exit_code": exit_code,
    }
