"""Seeded synthetic datasets for tests and quick end-to-end runs."""
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .trialset import TrialSet, save_trialset
from ..graphs.montage import load_montage
from ..utils.error_handler import UsageError
from ..utils.logger import get_logger

logger = get_logger("fixtures")

FIXTURE_CONFIG = """\
# Synthetic two-class fixture: GIN-0, 1-nearest-neighbour graph, sum readout.
[data]
manifest = "{manifest}"

[graph]
edge_policy = "knng:k=1"
shift = "adjacency"

[model]
conv = "gin"
pool = "sum"
depth = 2
hidden = 32
gin_hidden = 32
mlp_hidden = 32

[compressor]
out_features = 32

[augment]
snr_db = []

[train]
batch_size = 64
epochs = 100
lr = 0.001
lr_halving_period = 50
seed = {seed}
"""


@dataclass
class FixtureFiles:
    manifest: str
    payload: str
    labels: str
    config: str


def class_template(n_samples: int, sample_rate_hz: float) -> np.ndarray:
    """Fixed unit-power waveform: a 6 Hz burst under a Hann window."""
    t = np.arange(n_samples) / sample_rate_hz
    wave = np.sin(2 * np.pi * 6.0 * t) * np.hanning(n_samples)
    return wave / np.sqrt(np.mean(wave ** 2))


def make_fixture_trials(
    n_trials: int = 2000,
    snr_db: float = 0.0,
    n_samples: int = 128,
    seed: int = 0,
    montage: str = "rsvp16",
    sample_rate_hz: float = 128.0,
    side: str = "left",
) -> TrialSet:
    """
    Balanced two-class trials of unit-variance white noise.

    Class 1 adds the template to every electrode of one hemisphere, scaled so
    its power over the noise power equals ``snr_db``; class 0 is noise only.
    """
    if n_trials < 2:
        raise UsageError("a fixture needs at least 2 trials")
    m = load_montage(montage)
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n_trials) % 2)
    trials = rng.standard_normal((n_trials, len(m), n_samples))

    amplitude = np.sqrt(10.0 ** (snr_db / 10.0))
    signal = amplitude * class_template(n_samples, sample_rate_hz)
    channels = m.hemisphere(side)
    trials[np.ix_(labels == 1, channels)] += signal
    # stored as f32 on disk; keep the in-memory copy identical to what a reload yields
    trials = trials.astype(np.float32).astype(np.float64)
    return TrialSet(trials, labels, 2, montage, sample_rate_hz, name=f"fixture-{montage}")


def make_fixture(
    out_dir: Union[str, Path],
    n_trials: int = 2000,
    snr_db: float = 0.0,
    seed: int = 0,
    montage: str = "rsvp16",
    n_samples: int = 128,
) -> FixtureFiles:
    """Write ``fixture.json`` with its payloads plus a ready-to-run ``experiment.toml``."""
    out_dir = Path(out_dir)
    ts = make_fixture_trials(n_trials=n_trials, snr_db=snr_db, n_samples=n_samples, seed=seed, montage=montage)
    manifest, payload, labels = save_trialset(ts, out_dir / "fixture.json")
    config_path = out_dir / "experiment.toml"
    config_path.write_text(FIXTURE_CONFIG.format(manifest="fixture.json", seed=seed), encoding="utf-8")
    logger.info(f"Wrote {n_trials}-trial fixture ({montage}, SNR {snr_db:g} dB) to {out_dir}")
    return FixtureFiles(manifest, payload, labels, str(config_path))
