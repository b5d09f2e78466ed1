"""
bench: timed scaling sweep, one CSV row per cell
"""
import logging
from pathlib import Path
from typing import List, Optional

import typer
from rich.table import Table

from commands.common import build_run_config, console, get_settings, resolve_report
from common.schemas.bench import log_grid
from common.schemas.scorer import MeasureKind, Variant
from controllers.bench import bprime_table, run_bench
from middlewares import cli_command

logger = logging.getLogger(__name__)


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.2f}"


@cli_command
def cmd_bench(
    ctx: typer.Context,
    task: str = typer.Option("classification", "--task", help="classification or regression"),
    measure: List[MeasureKind] = typer.Option([MeasureKind.SIMPLIFIED_KNN], "--measure", help="Repeatable"),
    variant: List[Variant] = typer.Option([Variant.STANDARD, Variant.OPTIMIZED], "--variant", help="Repeatable"),
    n: List[int] = typer.Option([], "--n", help="Explicit training sizes (repeatable); overrides the log grid"),
    n_min: Optional[int] = typer.Option(None, "--n-min", help="Smallest n of the log grid"),
    n_max: Optional[int] = typer.Option(None, "--n-max", help="Largest n of the log grid"),
    n_points: Optional[int] = typer.Option(None, "--n-points", help="Number of log-spaced values"),
    test_points: Optional[int] = typer.Option(None, "--test-points", help="Test points per cell"),
    timeout: Optional[float] = typer.Option(None, "--timeout", help="Per-cell timeout in seconds"),
    seeds: Optional[int] = typer.Option(None, "--seeds", help="Number of repeat seeds"),
    p: Optional[int] = typer.Option(None, "--p", help="Feature dimension"),
    classes: int = typer.Option(2, "--classes", help="Number of classes"),
    k: Optional[int] = typer.Option(None, "--k"),
    h: Optional[float] = typer.Option(None, "--h"),
    rho: Optional[float] = typer.Option(None, "--rho"),
    ensemble: Optional[int] = typer.Option(None, "--B"),
    batch_size: Optional[int] = typer.Option(None, "--batch-size", help="Test points per timed batch (optimized k-NN/KDE)"),
    parallel: bool = typer.Option(False, "--parallel", help="Parallel prediction (timings no longer single-core)"),
    bprime: bool = typer.Option(False, "--bprime", help="Also report the mean bootstrap draws B' per n"),
    out: Optional[Path] = typer.Option(None, "--out", help="CSV file (bench.csv under REPORT_DIR by default)"),
) -> None:
    """Time training and prediction over an n grid; print log-log slopes."""
    cfg = get_settings(ctx)
    grid = sorted(set(n)) if n else log_grid(
        n_min if n_min is not None else cfg.BENCH_N_MIN,
        n_max if n_max is not None else cfg.BENCH_N_MAX,
        n_points if n_points is not None else cfg.BENCH_N_POINTS,
    )
    config = build_run_config(
        cfg,
        task=task,
        n_grid=tuple(grid),
        test_points=test_points if test_points is not None else cfg.BENCH_TEST_POINTS,
        timeout_seconds=timeout if timeout is not None else cfg.BENCH_TIMEOUT_SECONDS,
        seeds=tuple(range(seeds if seeds is not None else cfg.BENCH_SEEDS)),
        measures=tuple(measure),
        variants=tuple(variant),
        p=p,
        n_classes=classes,
        k=k,
        h=h,
        rho=rho,
        B=ensemble,
        batch_size=batch_size if batch_size is not None else cfg.BENCH_BATCH_SIZE,
        parallel=parallel,
    )
    csv_path = resolve_report(out, "bench.csv", cfg)
    result = run_bench(config, csv_path)

    failed = sum(1 for r in result.records if r.error is not None and not r.timed_out)
    timed_out = sum(1 for r in result.records if r.timed_out)
    console.print(
        f"{len(result.records)} cells written to {result.csv_path} ({timed_out} timed out, {failed} failed)",
        highlight=False,
    )

    table = Table(title="log-log slopes")
    for column in ("task", "measure", "variant", "points", "n range", "predict slope", "train slope"):
        table.add_column(column)
    for row in result.slopes:
        table.add_row(row.task, row.measure.value, row.variant.value, str(row.points),
                      f"{row.n_min}-{row.n_max}", _fmt(row.predict_slope), _fmt(row.train_slope))
    console.print(table)

    if bprime:
        draws = bprime_table(grid, config.B, config.seeds)
        bp = Table(title=f"bootstrap draws B' (B={config.B})")
        bp.add_column("n")
        bp.add_column("mean B'")
        for size, mean in draws.items():
            bp.add_row(str(size), f"{mean:.1f}")
        console.print(bp)
