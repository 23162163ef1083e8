"""Per-epoch metric files and human-readable run summaries."""
from pathlib import Path
from typing import TYPE_CHECKING, Union

import pandas as pd

if TYPE_CHECKING:
    from .trainer import EvalResult, RunReport

EPOCH_COLUMNS = ["epoch", "train_loss", "val_acc", "lr"]


def epochs_frame(report: "RunReport") -> pd.DataFrame:
    return pd.DataFrame({
        "epoch": range(1, len(report.val_acc) + 1),
        "train_loss": report.train_loss[:len(report.val_acc)],
        "val_acc": report.val_acc,
        "lr": report.lr[:len(report.val_acc)],
    }, columns=EPOCH_COLUMNS)


def write_epochs_csv(path: Union[str, Path], report: "RunReport") -> str:
    epochs_frame(report).to_csv(path, index=False, float_format="%.17g")
    return str(path)


def read_epochs_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path)


def format_confusion(result: "EvalResult") -> str:
    """Confusion matrix with true classes as rows."""
    n = result.confusion.shape[0]
    width = max(5, len(str(int(result.confusion.max(initial=0)))) + 1)
    header = "true\\pred" + "".join(f"{c:>{width}}" for c in range(n))
    rows = [f"{r:>9}" + "".join(f"{v:>{width}}" for v in result.confusion[r]) for r in range(n)]
    return "\n".join([header] + rows)
