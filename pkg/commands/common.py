"""
Helpers shared by the CLI commands
"""
from pathlib import Path
from typing import Any, Dict, Optional

import typer
from rich.console import Console

from common.schemas.bench import RunConfig
from config import Settings, settings
from utils.reports import report_path

console = Console()


def get_settings(ctx: typer.Context) -> Settings:
    """Settings chosen by the global --config option, module defaults otherwise"""
    root = ctx.find_root()
    if isinstance(root.obj, dict) and isinstance(root.obj.get("settings"), Settings):
        return root.obj["settings"]
    return settings


def resolve_report(out: Optional[Path], default_name: Optional[str], cfg: Settings) -> Optional[Path]:
    """Relative report paths land under REPORT_DIR"""
    if out is None and default_name is None:
        return None
    name = out if out is not None else Path(str(default_name))
    return report_path(name, cfg.REPORT_DIR)


def measure_defaults(cfg: Settings) -> Dict[str, Any]:
    """RunConfig hyperparameter defaults taken from settings"""
    return {
        "p": cfg.FEATURE_DIM,
        "k": cfg.DEFAULT_K,
        "h": cfg.DEFAULT_BANDWIDTH,
        "rho": cfg.DEFAULT_RHO,
        "B": cfg.DEFAULT_ENSEMBLE_SIZE,
        "tree_max_depth": cfg.DEFAULT_TREE_MAX_DEPTH,
        "train_fraction": cfg.ICP_TRAIN_FRACTION,
    }


def build_run_config(cfg: Settings, **overrides: Any) -> RunConfig:
    """RunConfig from settings defaults, with None overrides ignored"""
    values = measure_defaults(cfg)
    values.update({key: value for key, value in overrides.items() if value is not None})
    return RunConfig(**values)
