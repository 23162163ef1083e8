"""Results table: mean ± population std accuracy and parameter count per configuration."""
from pathlib import Path
from typing import Iterable, List, Union

import pandas as pd

from ..utils.error_handler import DataError, UsageError
from ..utils.state_manager import get_state_path, load_state
from ..utils.validation import validate_run_report

TABLE_FORMATS = ("text", "csv")


def expand_run_dirs(paths: Iterable[Union[str, Path]]) -> List[Path]:
    """
    Run directories named directly, or the ``seed-*`` children of a multi-run output.
    """
    found: List[Path] = []
    for raw in paths:
        path = Path(raw)
        if get_state_path(path, "report").exists():
            found.append(path)
            continue
        children = sorted(p for p in path.glob("seed-*") if get_state_path(p, "report").exists())
        if not children:
            raise DataError(f"{path}: no report.json found")
        found.extend(children)
    return found


def collect_reports(run_dirs: Iterable[Union[str, Path]]) -> pd.DataFrame:
    """One row per run: label parts, config hash, best accuracy (%) and parameter count."""
    rows = []
    for run_dir in expand_run_dirs(run_dirs):
        report = load_state(run_dir, "report")
        ok, message = validate_run_report(report or {})
        if not ok:
            raise DataError(f"{run_dir}: invalid report.json ({message})")
        labels = report.get("labels", {})
        rows.append({
            "run": str(run_dir),
            "model": " / ".join(
                labels.get(k, "?") for k in ("dataset", "conv", "pool", "edge_policy")
            ),
            "config_hash": report["config_hash"],
            "acc": 100.0 * float(report["best_val_acc"]),
            "n_params": int(report["n_params"]),
        })
    return pd.DataFrame(rows, columns=["run", "model", "config_hash", "acc", "n_params"])


def summarize(runs: pd.DataFrame) -> pd.DataFrame:
    """
    Group runs by config hash.

    Raises:
        DataError: runs sharing a config hash disagree on parameter count
    """
    rows = []
    for config, group in runs.groupby("config_hash", sort=True):
        if group["n_params"].nunique() != 1:
            raise DataError(f"runs of config {config[:12]} disagree on parameter count")
        rows.append({
            "model": group["model"].iloc[0],
            "config_hash": config,
            "runs": len(group),
            "acc_mean": group["acc"].mean(),
            "acc_std": group["acc"].std(ddof=0),
            "n_params": int(group["n_params"].iloc[0]),
        })
    table = pd.DataFrame(rows, columns=["model", "config_hash", "runs", "acc_mean", "acc_std", "n_params"])
    return table.sort_values(["model", "config_hash"], kind="stable").reset_index(drop=True)


def format_accuracy(mean: float, std: float) -> str:
    return f"{mean:.2f} ± {std:.2f}"


def render_table(table: pd.DataFrame, fmt: str = "text") -> str:
    if fmt not in TABLE_FORMATS:
        raise UsageError(f"unknown table format '{fmt}' (choose from {', '.join(TABLE_FORMATS)})")
    cells = pd.DataFrame({
        "Model": table["model"],
        "Acc.": [format_accuracy(m, s) for m, s in zip(table["acc_mean"], table["acc_std"])],
        "# Model Params.": [f"{n:,}" for n in table["n_params"]],
        "Runs": table["runs"],
    })
    if fmt == "csv":
        return cells.to_csv(index=False, lineterminator="\n")
    return cells.to_string(index=False) + "\n"


def build_table(run_dirs: Iterable[Union[str, Path]], fmt: str = "text") -> str:
    """
    Aggregate run directories into a results table.

    Raises:
        UsageError: no run directories given
    """
    run_dirs = list(run_dirs)
    if not run_dirs:
        raise UsageError("table needs at least one run directory")
    return render_table(summarize(collect_reports(run_dirs)), fmt)
