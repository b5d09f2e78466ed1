"""
Application factory for creating the Typer app instance

Orchestrates global options, logging setup and command registration
"""
import logging
from pathlib import Path
from typing import Optional

import typer

from commands import register_commands
from config import load_settings, settings
from middlewares.exception_handler import handle_exception
from utils.logging_config import setup_logging

logger = logging.getLogger(__name__)


def create_app() -> typer.Typer:
    """
    Create and configure the CLI application

    Returns:
        typer.Typer: app with gen, predict, bench, validate and fuzziness
    """
    app = typer.Typer(
        name=settings.APP_NAME,
        help="Exact incremental and decremental full conformal prediction.",
        no_args_is_help=True,
        add_completion=False,
    )

    @app.callback()
    def main(
        ctx: typer.Context,
        config: Optional[Path] = typer.Option(
            None, "--config", exists=True, dir_okay=False, help="key=value file overriding the defaults"
        ),
        log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING, ERROR"),
    ) -> None:
        try:
            overrides = {"LOG_LEVEL": log_level} if log_level else {}
            active = load_settings(config, **overrides) if (config or overrides) else settings
        except Exception as exc:
            raise typer.Exit(code=handle_exception(exc, {"option": "--config"})) from exc
        setup_logging(active.LOG_LEVEL, active.ENVIRONMENT)
        ctx.obj = {"settings": active}
        logger.debug(f"Settings loaded (config={config}, environment={active.ENVIRONMENT})")

    register_commands(app)
    return app
