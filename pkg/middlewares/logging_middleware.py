"""
Command logging middleware

Logs every command with its run ID and timing information
"""
import functools
import logging
import time
from typing import Any, Callable, TypeVar

import click
import typer

from middlewares.exception_handler import handle_exception
from middlewares.request_id import new_run_id

logger = logging.getLogger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def cli_command(func: F) -> F:
    """
    Wrap a typer command

    - assigns a run ID picked up by every log record
    - logs start and completion with the duration
    - converts exceptions into typer.Exit with the handler's exit code;
      click usage errors pass through untouched
    """
    name = func.__name__.removeprefix("cmd_")

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        run_id = new_run_id()
        start_time = time.perf_counter()
        logger.info(f"Command started: {name}", extra={"command": name})
        try:
            result = func(*args, **kwargs)
        except (click.exceptions.Exit, click.exceptions.Abort, click.exceptions.ClickException):
            raise
        except Exception as exc:
            duration = time.perf_counter() - start_time
            code = handle_exception(exc, {"command": name, "duration": duration})
            logger.info(f"Command failed: {name} exit={code} duration={duration:.3f}s",
                        extra={"command": name, "exit_code": code, "duration": duration})
            raise typer.Exit(code=code) from exc

        duration = time.perf_counter() - start_time
        logger.info(
            f"Command completed: {name} duration={duration:.3f}s",
            extra={"command": name, "duration": duration, "run": run_id},
        )
        return result

    return wrapper  # type: ignore[return-value]
