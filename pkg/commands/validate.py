"""
validate: Monte-Carlo coverage check
"""
from pathlib import Path
from typing import List, Optional

import typer
from rich.table import Table

from commands.common import build_run_config, console, get_settings, resolve_report
from common.schemas.scorer import MeasureKind, Variant
from controllers.validate import DEFAULT_EPSILONS, validate_coverage
from middlewares import cli_command
from utils.reports import write_json_report

EXIT_COVERAGE_FAILED = 1


@cli_command
def cmd_validate(
    ctx: typer.Context,
    task: str = typer.Option("classification", "--task", help="classification or regression"),
    measure: List[MeasureKind] = typer.Option([MeasureKind.KNN], "--measure", help="Repeatable"),
    variant: Variant = typer.Option(Variant.OPTIMIZED, "--variant"),
    n: int = typer.Option(500, "--n", min=2, help="Training size"),
    test_points: Optional[int] = typer.Option(None, "--test-points", min=1, help="VALIDATION_TEST_POINTS by default"),
    epsilon: List[float] = typer.Option(list(DEFAULT_EPSILONS), "--epsilon", help="Repeatable"),
    seed: int = typer.Option(0, "--seed"),
    training_sets: Optional[int] = typer.Option(
        None, "--training-sets", min=1, help="Independent training sets (VALIDATION_TRAINING_SETS by default)"
    ),
    p: Optional[int] = typer.Option(None, "--p"),
    classes: int = typer.Option(2, "--classes"),
    k: Optional[int] = typer.Option(None, "--k"),
    h: Optional[float] = typer.Option(None, "--h"),
    rho: Optional[float] = typer.Option(None, "--rho"),
    ensemble: Optional[int] = typer.Option(None, "--B"),
    strict: bool = typer.Option(False, "--strict", help="Exit 1 when any row is outside the band"),
    out: Optional[Path] = typer.Option(None, "--out", help="JSON report (coverage.json under REPORT_DIR by default)"),
) -> None:
    """Empirical error rate per epsilon against the binomial 2-sigma band."""
    cfg = get_settings(ctx)
    config = build_run_config(
        cfg, task=task, measures=tuple(measure), p=p, n_classes=classes, k=k, h=h, rho=rho, B=ensemble,
    )
    trials = test_points if test_points is not None else cfg.VALIDATION_TEST_POINTS
    sets = training_sets if training_sets is not None else min(cfg.VALIDATION_TRAINING_SETS, trials)
    report = validate_coverage(config, n, trials, epsilons=tuple(epsilon), variant=variant, seed=seed,
                               training_sets=sets)
    target = resolve_report(out, "coverage.json", cfg)
    assert target is not None
    write_json_report(report, target)

    table = Table(title=f"coverage (n={n}, {trials} test points over {sets} training sets)")
    for column in ("measure", "variant", "epsilon", "error rate", "band", "result"):
        table.add_column(column)
    for row in report.rows:
        verdict = "[green]pass[/green]" if row.passed else "[red]FAIL[/red]"
        table.add_row(row.measure.value, row.variant.value, f"{row.epsilon:g}", f"{row.error_rate:.4f}",
                      f"{row.upper_band:.4f}", verdict)
    console.print(table)

    if strict and not all(row.passed for row in report.rows):
        raise typer.Exit(code=EXIT_COVERAGE_FAILED)
