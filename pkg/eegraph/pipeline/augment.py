"""Additive white Gaussian noise augmentation at target signal-to-noise ratios."""
import math
from typing import Sequence

import numpy as np

from .trialset import TrialSet
from ..utils.error_handler import UsageError
from ..utils.logger import get_logger

logger = get_logger("augment")

DEFAULT_SNR_DB = (10.0, 5.0, 2.0)


def count_zero_power_channels(ts: TrialSet) -> int:
    """Number of (trial, channel) pairs whose mean square is zero."""
    return int(np.count_nonzero(np.mean(ts.trials ** 2, axis=-1) == 0.0))


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent stream per trial so any processing order yields the same noise."""
    return np.random.default_rng([seed, trial_index])


def augment_awgn(ts: TrialSet, snr_db_levels: Sequence[float], seed: int) -> TrialSet:
    """
    Append one noisy copy of every trial per SNR level.

    Noise is zero-mean Gaussian, independent per channel, with variance
    ``channel_power / 10^(snr / 10)`` where channel power is that channel's
    mean square within the trial. The originals come first, then one block
    per level in the given order.

    Args:
        ts: Trials to augment
        snr_db_levels: Target SNRs in dB; empty returns the input unchanged
        seed: Master seed

    Returns:
        Trial set with ``len(ts) * (1 + len(snr_db_levels))`` trials
    """
    levels = [float(s) for s in snr_db_levels]
    for s in levels:
        if not math.isfinite(s):
            raise UsageError(f"SNR level must be finite, got {s}")
    if not levels:
        return ts.subset(np.arange(ts.n_trials))

    power = np.mean(ts.trials ** 2, axis=-1)
    zero_power = count_zero_power_channels(ts)
    if zero_power:
        logger.warning(f"{zero_power} zero-power channel(s); those channels are copied without noise")

    blocks = [np.empty_like(ts.trials) for _ in levels]
    ratios = np.array([10.0 ** (s / 10.0) for s in levels])
    for i in range(ts.n_trials):
        rng = trial_rng(seed, i)
        for block, ratio in zip(blocks, ratios):
            std = np.sqrt(power[i] / ratio)
            noise = rng.standard_normal(ts.trials.shape[1:]) * std[:, None]
            block[i] = ts.trials[i] + noise

    logger.info(
        f"Augmented {ts.n_trials} trials at SNR {', '.join(f'{s:g}' for s in levels)} dB "
        f"-> {ts.n_trials * (1 + len(levels))} trials"
    )
    trials = np.concatenate([ts.trials] + blocks)
    labels = np.tile(ts.labels, 1 + len(levels))
    return ts._replace(trials, labels)
