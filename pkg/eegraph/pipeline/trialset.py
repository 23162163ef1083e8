"""Trial sets and the native manifest + binary dataset format.

A manifest is JSON naming the shape of the data and two payload files that
sit next to it: trials as f32 little-endian row-major (trial, channel, sample)
and labels as u16 little-endian.
"""
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..graphs.montage import BUILTIN_MONTAGES, Montage, load_montage, resolve_montage_path
from ..utils.error_handler import (
    DataError,
    ManifestError,
    MontageError,
    NonFiniteError,
    PayloadSizeError,
    UnsupportedVersionError,
)
from ..utils.logger import get_logger
from ..utils.validation import MANIFEST_VERSION, validate_manifest

logger = get_logger("pipeline")

MIN_SPLIT_TRIALS = 5
TRAIN_FRACTION_NUM, TRAIN_FRACTION_DEN = 4, 5


@dataclass
class TrialSet:
    """
    EEG trials ``(n_trials, n_channels, n_samples)`` held as float64 with integer labels.

    ``montage`` is a built-in montage name or a path; relative paths resolve against ``base_dir``.
    """
    trials: np.ndarray
    labels: np.ndarray
    n_classes: int
    montage: str
    sample_rate_hz: float
    name: str = "trials"
    base_dir: Optional[Path] = field(default=None, repr=False)

    def __post_init__(self):
        self.trials = np.asarray(self.trials, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.trials.ndim != 3:
            raise DataError(f"trials must be (trial, channel, sample), got shape {self.trials.shape}")
        if self.labels.shape != (self.trials.shape[0],):
            raise DataError(f"{len(self.labels)} labels for {self.trials.shape[0]} trials")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_classes):
            bad = int(np.flatnonzero((self.labels < 0) | (self.labels >= self.n_classes))[0])
            raise DataError(f"label {self.labels[bad]} at trial {bad} outside [0, {self.n_classes})")

    @property
    def n_trials(self) -> int:
        return self.trials.shape[0]

    @property
    def n_channels(self) -> int:
        return self.trials.shape[1]

    @property
    def n_samples(self) -> int:
        return self.trials.shape[2]

    def __len__(self) -> int:
        return self.n_trials

    def load_montage(self) -> Montage:
        m = load_montage(self.montage, self.base_dir)
        if len(m) != self.n_channels:
            raise MontageError(
                f"montage '{self.montage}' has {len(m)} electrodes, dataset has {self.n_channels} channels"
            )
        return m

    def subset(self, indices: Sequence[int]) -> "TrialSet":
        idx = np.asarray(indices, dtype=np.int64)
        return self._replace(self.trials[idx], self.labels[idx])

    def concat(self, other: "TrialSet") -> "TrialSet":
        if other.trials.shape[1:] != self.trials.shape[1:] or other.n_classes != self.n_classes:
            raise DataError("cannot concatenate trial sets of different shape or class count")
        return self._replace(
            np.concatenate([self.trials, other.trials]), np.concatenate([self.labels, other.labels])
        )

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def _replace(self, trials: np.ndarray, labels: np.ndarray) -> "TrialSet":
        return TrialSet(trials, labels, self.n_classes, self.montage, self.sample_rate_hz, self.name, self.base_dir)


def _read_payload(path: Path, what: str, expected: int) -> bytes:
    if not path.exists():
        raise ManifestError(f"{what} file not found: {path}")
    blob = path.read_bytes()
    if len(blob) != expected:
        raise PayloadSizeError(f"{what} {path.name}", expected, len(blob))
    return blob


def load_trialset(manifest_path: Union[str, Path]) -> TrialSet:
    """
    Load a manifest and its payload files.

    Raises:
        ManifestError: unreadable or invalid manifest, missing files, bad labels
        UnsupportedVersionError: manifest version other than 1
        PayloadSizeError: payload byte count disagrees with the manifest shape
        NonFiniteError: NaN or infinite sample values
    """
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {manifest_path}") from None
    except json.JSONDecodeError as e:
        raise ManifestError(f"{manifest_path}: invalid JSON ({e})") from None

    version = manifest.get("version", MANIFEST_VERSION) if isinstance(manifest, dict) else None
    if version != MANIFEST_VERSION:
        raise UnsupportedVersionError(f"{manifest_path}: manifest version {version} (supported: {MANIFEST_VERSION})")
    ok, message = validate_manifest(manifest)
    if not ok:
        raise ManifestError(f"{manifest_path}: {message}")

    base = manifest_path.parent
    n, c, t = manifest["n_trials"], manifest["n_channels"], manifest["n_samples"]
    payload = _read_payload(base / manifest["payload"], "payload", n * c * t * 4)
    label_blob = _read_payload(base / manifest["labels"], "labels", n * 2)

    trials = np.frombuffer(payload, dtype="<f4").reshape(n, c, t)
    finite = np.isfinite(trials)
    if not finite.all():
        trial, channel, sample = (int(i) for i in np.argwhere(~finite)[0])
        raise NonFiniteError(f"{manifest_path}: non-finite value at trial {trial}, channel {channel}, sample {sample}")
    labels = np.frombuffer(label_blob, dtype="<u2").astype(np.int64)

    try:
        ts = TrialSet(
            trials=trials.astype(np.float64),
            labels=labels,
            n_classes=manifest["n_classes"],
            montage=manifest["montage"],
            sample_rate_hz=float(manifest["sample_rate_hz"]),
            name=manifest["name"],
            base_dir=base,
        )
    except DataError as e:
        raise ManifestError(f"{manifest_path}: {e}") from None
    logger.debug(f"Loaded {ts.name}: {ts.n_trials} trials x {ts.n_channels} channels x {ts.n_samples} samples")
    return ts


def _montage_ref_for(ts: TrialSet, target_dir: Path) -> str:
    if ts.montage in BUILTIN_MONTAGES:
        return ts.montage
    source = resolve_montage_path(ts.montage, ts.base_dir).resolve()
    try:
        return os.path.relpath(source, target_dir.resolve())
    except ValueError:
        return str(source)


def save_trialset(ts: TrialSet, manifest_path: Union[str, Path]) -> Tuple[str, str, str]:
    """
    Write ``<stem>.json``, ``<stem>.f32`` and ``<stem>.labels.u16``.

    Values are stored as f32, so only trials already representable in f32
    survive a save/load cycle bit for bit.

    Returns:
        Paths of manifest, payload and labels files
    """
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    base.mkdir(parents=True, exist_ok=True)
    stem = manifest_path.stem
    payload_path = base / f"{stem}.f32"
    labels_path = base / f"{stem}.labels.u16"

    payload_path.write_bytes(np.ascontiguousarray(ts.trials, dtype="<f4").tobytes())
    labels_path.write_bytes(np.ascontiguousarray(ts.labels, dtype="<u2").tobytes())
    manifest = {
        "version": MANIFEST_VERSION,
        "name": ts.name,
        "n_trials": ts.n_trials,
        "n_channels": ts.n_channels,
        "n_samples": ts.n_samples,
        "n_classes": ts.n_classes,
        "sample_rate_hz": ts.sample_rate_hz,
        "montage": _montage_ref_for(ts, base),
        "payload": payload_path.name,
        "labels": labels_path.name,
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return str(manifest_path), str(payload_path), str(labels_path)


def split(ts: TrialSet, seed: int) -> Tuple[TrialSet, TrialSet]:
    """
    Shuffle with ``seed`` and cut at 80%: first part trains, the rest validates.

    Raises:
        DataError: fewer than 5 trials
    """
    if ts.n_trials < MIN_SPLIT_TRIALS:
        raise DataError(f"need at least {MIN_SPLIT_TRIALS} trials to split, have {ts.n_trials}")
    order = np.random.default_rng(seed).permutation(ts.n_trials)
    n_train = ts.n_trials * TRAIN_FRACTION_NUM // TRAIN_FRACTION_DEN
    return ts.subset(order[:n_train]), ts.subset(order[n_train:])
