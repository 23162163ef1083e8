"""Convert external EEG exports into the native manifest + binary format.

Supported inputs:
    .npz   arrays ``X`` (trial, channel, sample) and ``y`` (trial,)
    .csv   long format, one row per (trial, channel): ``trial,label,channel,s0..sT-1``
"""
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..graphs.montage import load_montage
from ..pipeline.trialset import TrialSet, save_trialset
from ..utils.error_handler import DataError, UsageError
from ..utils.logger import get_logger

logger = get_logger("convert")


def read_npz(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    with np.load(path) as archive:
        if "X" not in archive or "y" not in archive:
            raise DataError(f"{path}: expected arrays 'X' and 'y'")
        return np.asarray(archive["X"], dtype=np.float64), np.asarray(archive["y"], dtype=np.int64)


def read_long_csv(path: Path, channel_names: Optional[Tuple[str, ...]] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pivot a long-format CSV into trials.

    ``channel`` may hold electrode indices or, when ``channel_names`` is given, names.
    """
    df = pd.read_csv(path)
    missing = {"trial", "label", "channel"} - set(df.columns)
    if missing:
        raise DataError(f"{path}: missing columns {sorted(missing)}")
    sample_cols = sorted((c for c in df.columns if c.startswith("s") and c[1:].isdigit()), key=lambda c: int(c[1:]))
    if not sample_cols:
        raise DataError(f"{path}: no sample columns s0..sT-1")

    if channel_names is not None and df["channel"].dtype == object:
        lookup = {name: i for i, name in enumerate(channel_names)}
        unknown = sorted(set(df["channel"]) - set(lookup))
        if unknown:
            raise DataError(f"{path}: channels not in montage: {', '.join(unknown)}")
        df["channel"] = df["channel"].map(lookup)

    df = df.sort_values(["trial", "channel"], kind="stable")
    trial_ids = df["trial"].unique()
    n_channels = int(df["channel"].max()) + 1
    counts = df.groupby("trial").size()
    if (counts != n_channels).any():
        raise DataError(f"{path}: every trial needs exactly {n_channels} channel rows")

    trials = df[sample_cols].to_numpy(dtype=np.float64).reshape(len(trial_ids), n_channels, len(sample_cols))
    labels = df.groupby("trial", sort=True)["label"].first().to_numpy(dtype=np.int64)
    return trials, labels


def load_export(
    source: Union[str, Path],
    montage: str,
    sample_rate_hz: float,
    n_classes: Optional[int] = None,
    name: Optional[str] = None,
) -> TrialSet:
    """
    Read an external export into a ``TrialSet`` without writing anything.

    ``n_classes`` defaults to the largest label + 1 (at least 2).
    """
    source = Path(source)
    suffix = source.suffix.lower()
    m = load_montage(montage)
    if suffix == ".npz":
        trials, labels = read_npz(source)
    elif suffix == ".csv":
        trials, labels = read_long_csv(source, m.names)
    else:
        raise UsageError(f"unsupported input '{source.suffix}' (expected .npz or .csv)")

    if trials.ndim != 3 or trials.shape[1] != len(m):
        raise DataError(f"{source}: shape {trials.shape} does not match {len(m)} montage electrodes")
    classes = n_classes or max(2, int(labels.max()) + 1)
    return TrialSet(trials, labels, classes, montage, sample_rate_hz, name=name or source.stem)


def convert(
    source: Union[str, Path],
    manifest_path: Union[str, Path],
    montage: str,
    sample_rate_hz: float,
    n_classes: Optional[int] = None,
    name: Optional[str] = None,
) -> str:
    """Write ``source`` as a native dataset; returns the manifest path."""
    ts = load_export(source, montage, sample_rate_hz, n_classes, name)
    manifest, _, _ = save_trialset(ts, manifest_path)
    logger.info(f"Converted {source} -> {manifest} ({ts.n_trials} trials, {ts.n_classes} classes)")
    return manifest
