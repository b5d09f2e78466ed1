"""
fuzziness: CP against ICP with a one-sided Welch test
"""
from pathlib import Path
from typing import List, Optional

import typer
from rich.table import Table

from commands.common import build_run_config, console, get_settings, resolve_report
from common.schemas.scorer import MeasureKind
from controllers.fuzziness import compare_fuzziness
from middlewares import cli_command
from utils.reports import write_json_report


@cli_command
def cmd_fuzziness(
    ctx: typer.Context,
    measure: List[MeasureKind] = typer.Option([MeasureKind.KNN, MeasureKind.KDE], "--measure", help="Repeatable"),
    n: int = typer.Option(400, "--n", min=2, help="Training size"),
    test_points: int = typer.Option(400, "--test-points", min=2),
    classes: int = typer.Option(4, "--classes"),
    seed: int = typer.Option(0, "--seed"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Rejection threshold (WELCH_ALPHA by default)"),
    p: Optional[int] = typer.Option(None, "--p"),
    k: Optional[int] = typer.Option(None, "--k"),
    h: Optional[float] = typer.Option(None, "--h"),
    rho: Optional[float] = typer.Option(None, "--rho"),
    ensemble: Optional[int] = typer.Option(None, "--B"),
    out: Optional[Path] = typer.Option(None, "--out", help="JSON report (fuzziness.json under REPORT_DIR by default)"),
) -> None:
    """Mean fuzziness of CP and ICP; H0 "ICP is better" rejected when p < alpha."""
    cfg = get_settings(ctx)
    config = build_run_config(
        cfg, measures=tuple(measure), n_classes=classes, p=p, k=k, h=h, rho=rho, B=ensemble,
    )
    report = compare_fuzziness(
        config, n, test_points, seed=seed, alpha=alpha if alpha is not None else cfg.WELCH_ALPHA,
    )
    target = resolve_report(out, "fuzziness.json", cfg)
    assert target is not None
    write_json_report(report, target)

    table = Table(title=f"fuzziness ({classes} classes, n={n}, {test_points} test points)")
    for column in ("measure", "CP mean ± sd", "ICP mean ± sd", "t", "df", "p-value", "H0 rejected"):
        table.add_column(column)
    for row in report.rows:
        w = row.welch
        table.add_row(
            row.measure.value,
            f"{row.cp_mean:.4f} ± {row.cp_sd:.4f}",
            f"{row.icp_mean:.4f} ± {row.icp_sd:.4f}",
            f"{w.t_statistic:.3f}",
            f"{w.degrees_of_freedom:.1f}",
            f"{w.p_value:.3g}",
            "yes" if w.reject else "no",
        )
    console.print(table)
