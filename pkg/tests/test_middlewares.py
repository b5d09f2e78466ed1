"""
Exception handling and run ID tests
"""
import logging

import pytest
import typer
from pydantic import BaseModel, ValidationError

from common.exceptions.conformal import InvalidSplitError, UnknownMeasureError
from common.exceptions.dataset import DatasetParseError
from middlewares import RunIdFilter, cli_command, current_run_id, format_error_response, handle_exception


class _Count(BaseModel):
    value: int


def _validation_error() -> ValidationError:
    try:
        _Count(value="x")
    except ValidationError as exc:
        return exc
    raise AssertionError("expected a validation error")


@pytest.mark.parametrize(
    "exc,code",
    [
        (DatasetParseError("bad row", line=3), 65),
        (InvalidSplitError(t=0, n=4), 1),
        (UnknownMeasureError("measure", "svm"), 2),
        (_validation_error(), 2),
        (FileNotFoundError("missing.csv"), 74),
        (RuntimeError("boom"), 70),
    ],
)
def test_handle_exception_exit_codes(exc, code):
    assert handle_exception(exc) == code


def test_format_error_response():
    payload = format_error_response(InvalidSplitError(t=5, n=5))
    assert payload == {"error": "InvalidSplitError", "message": "Invalid split t=5 for n=5: need 1 <= t <= n-1",
                       "exit_code": 1}
    assert format_error_response(KeyError("x"))["exit_code"] == 70


def test_cli_command_converts_errors():
    @cli_command
    def cmd_fail() -> None:
        raise DatasetParseError("bad row", line=2)

    with pytest.raises(typer.Exit) as exc_info:
        cmd_fail()
    assert exc_info.value.exit_code == 65


def test_cli_command_keeps_usage_errors():
    @cli_command
    def cmd_usage() -> None:
        raise typer.BadParameter("nope")

    with pytest.raises(typer.BadParameter):
        cmd_usage()


def test_cli_command_sets_run_id():
    seen = []

    @cli_command
    def cmd_record() -> str:
        seen.append(current_run_id())
        return "ok"

    assert cmd_record() == "ok"
    assert seen[0] is not None and len(seen[0]) == 12


def test_run_id_filter_tags_records():
    @cli_command
    def cmd_tag() -> logging.LogRecord:
        record = logging.LogRecord("x", logging.INFO, __file__, 1, "m", None, None)
        RunIdFilter().filter(record)
        return record

    record = cmd_tag()
    assert getattr(record, "run_id", None) is not None
