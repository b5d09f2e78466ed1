"""
Commands package

Registers every subcommand on the Typer app
"""
import typer

from commands.bench import cmd_bench
from commands.fuzziness import cmd_fuzziness
from commands.gen import cmd_gen
from commands.predict import cmd_predict
from commands.validate import cmd_validate

COMMANDS = {
    "gen": cmd_gen,
    "predict": cmd_predict,
    "bench": cmd_bench,
    "validate": cmd_validate,
    "fuzziness": cmd_fuzziness,
}


def register_commands(app: typer.Typer) -> None:
    for name, command in COMMANDS.items():
        app.command(name)(command)


__all__ = ["COMMANDS", "register_commands"]
