"""
predict: p-values and prediction sets (or intervals) for a test file
"""
import logging
from pathlib import Path
from typing import Optional, cast

import typer

from commands.common import get_settings, resolve_report
from common.exceptions.dataset import DimensionMismatchError
from common.models import TaskKind
from common.schemas.scorer import MeasureKind, ScorerConfig, Variant
from controllers.predict import predict_classification, predict_regression
from middlewares import cli_command
from services.datagen import load_csv
from utils.reports import write_json_report

logger = logging.getLogger(__name__)


@cli_command
def cmd_predict(
    ctx: typer.Context,
    train: Path = typer.Option(..., "--train", exists=True, dir_okay=False, help="Training CSV"),
    test: Path = typer.Option(..., "--test", exists=True, dir_okay=False, help="Test CSV (labels are ignored)"),
    task: str = typer.Option("classification", "--task", help="classification or regression"),
    measure: MeasureKind = typer.Option(MeasureKind.KNN, "--measure", help="Nonconformity measure"),
    variant: Variant = typer.Option(Variant.OPTIMIZED, "--variant", help="standard, optimized or icp"),
    epsilon: float = typer.Option(0.1, "--epsilon", min=0.0, max=1.0, help="Significance level"),
    k: Optional[int] = typer.Option(None, "--k", help="Neighbour count"),
    h: Optional[float] = typer.Option(None, "--h", help="KDE bandwidth"),
    rho: Optional[float] = typer.Option(None, "--rho", help="LS-SVM regularizer"),
    ensemble: Optional[int] = typer.Option(None, "--B", help="Bootstrap ensemble size"),
    feature_map: str = typer.Option("identity", "--feature-map", help="LS-SVM feature map"),
    seed: int = typer.Option(0, "--seed", help="Seed of randomized measures and smoothing"),
    smoothing: bool = typer.Option(False, "--smoothing", help="Smoothed p-values"),
    t: Optional[int] = typer.Option(None, "--t", help="ICP proper-training size (n // 2 by default)"),
    workers: int = typer.Option(1, "--workers", min=1, help="Threads over (test point, label) pairs"),
    check_grid: bool = typer.Option(False, "--check-grid", help="Compare regression sets with a dense grid"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the JSON report here instead of stdout"),
) -> None:
    """Predict every row of the test file; JSON report on stdout or in --out."""
    cfg = get_settings(ctx)
    if task not in ("classification", "regression"):
        raise typer.BadParameter(f"unknown task {task!r}", param_hint="--task")

    kind = cast(TaskKind, task)
    train_set = load_csv(train, task=kind)
    test_set = load_csv(test, task=kind)
    if test_set.n and test_set.dim != train_set.dim:
        raise DimensionMismatchError(expected=train_set.dim, got=test_set.dim)

    if task == "regression":
        report = predict_regression(
            train_set, test_set.X, k if k is not None else cfg.DEFAULT_K, variant, epsilon,
            t=t, check_grid=check_grid,
        )
    else:
        config = ScorerConfig(
            measure=measure,
            k=k if k is not None else cfg.DEFAULT_K,
            h=h if h is not None else cfg.DEFAULT_BANDWIDTH,
            rho=rho if rho is not None else cfg.DEFAULT_RHO,
            B=ensemble if ensemble is not None else cfg.DEFAULT_ENSEMBLE_SIZE,
            tree_max_depth=cfg.DEFAULT_TREE_MAX_DEPTH,
            feature_map=feature_map,
            seed=seed,
        )
        report = predict_classification(
            train_set, test_set.X, config, variant, epsilon, smoothing=smoothing, t=t, workers=workers
        )

    target = resolve_report(out, None, cfg)
    if target is None:
        typer.echo(report.model_dump_json(indent=2))
    else:
        write_json_report(report, target)
