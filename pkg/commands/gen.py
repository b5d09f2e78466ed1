"""
gen: write a seeded synthetic dataset to CSV
"""
import logging
from pathlib import Path
from typing import Optional, cast

import typer

from commands.common import console, get_settings
from common.models import TaskKind
from common.schemas.datagen import GenSpec
from middlewares import cli_command
from services.datagen import generate, save_csv

logger = logging.getLogger(__name__)


@cli_command
def cmd_gen(
    ctx: typer.Context,
    out: Path = typer.Option(..., "--out", help="Destination CSV file"),
    n: int = typer.Option(..., "--n", help="Number of examples"),
    task: str = typer.Option("classification", "--task", help="classification or regression"),
    p: Optional[int] = typer.Option(None, "--p", help="Feature dimension (FEATURE_DIM by default)"),
    classes: int = typer.Option(2, "--classes", help="Number of classes"),
    class_sep: float = typer.Option(2.0, "--class-sep", help="Distance between class centers"),
    noise_sd: float = typer.Option(0.1, "--noise-sd", help="Regression target noise"),
    seed: int = typer.Option(0, "--seed", help="RNG seed"),
) -> None:
    """Generate a synthetic dataset (header f1..fp,label plus n rows)."""
    cfg = get_settings(ctx)
    spec = GenSpec(
        task=cast(TaskKind, task),
        n=n,
        p=p if p is not None else cfg.FEATURE_DIM,
        n_classes=classes,
        class_sep=class_sep,
        noise_sd=noise_sd,
        seed=seed,
    )
    dataset = generate(spec)
    save_csv(dataset, out)
    logger.info(f"Wrote {dataset.n} examples to {out}", extra={"task": spec.task, "seed": seed})
    console.print(f"wrote {dataset.n} examples ({spec.task}, p={spec.p}) to {out}", highlight=False)
