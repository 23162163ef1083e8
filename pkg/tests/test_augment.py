import numpy as np
import pytest

from eegraph.pipeline.augment import DEFAULT_SNR_DB, augment_awgn, count_zero_power_channels
from eegraph.pipeline.trialset import TrialSet
from eegraph.utils.error_handler import UsageError


def _set(trials, labels=None):
    trials = np.asarray(trials, dtype=np.float64)
    labels = np.zeros(len(trials), dtype=np.int64) if labels is None else labels
    return TrialSet(trials, labels, 2, "rsvp16", 128.0)


def _measured_snr_db(original, augmented):
    noise = augmented - original
    return 10 * np.log10(np.mean(original ** 2, axis=-1) / np.mean(noise ** 2, axis=-1))


def test_default_levels_quadruple_the_set(rng):
    ts = _set(rng.standard_normal((1, 3, 50)), labels=np.array([1]))
    out = augment_awgn(ts, DEFAULT_SNR_DB, seed=0)
    assert out.n_trials == 4
    assert np.array_equal(out.trials[0], ts.trials[0])
    assert list(out.labels) == [1, 1, 1, 1]


def test_blocks_follow_level_order(rng):
    ts = _set(rng.standard_normal((3, 2, 40)), labels=np.array([0, 1, 1]))
    out = augment_awgn(ts, [10.0, 2.0], seed=1)
    assert out.n_trials == 9
    assert list(out.labels) == [0, 1, 1] * 3
    assert np.array_equal(out.trials[:3], ts.trials)


def test_empty_level_list_is_identity(rng):
    ts = _set(rng.standard_normal((2, 2, 10)))
    out = augment_awgn(ts, [], seed=0)
    assert out is not ts
    assert np.array_equal(out.trials, ts.trials)
    assert np.array_equal(out.labels, ts.labels)


@pytest.mark.parametrize("level", [float("nan"), float("inf")])
def test_non_finite_levels_are_rejected(rng, level):
    with pytest.raises(UsageError):
        augment_awgn(_set(rng.standard_normal((1, 1, 4))), [5.0, level], seed=0)


def test_measured_snr_on_long_channels(rng):
    ts = _set(rng.standard_normal((1, 4, 4000)) * np.array([1.0, 3.0, 0.5, 2.0])[None, :, None])
    levels = [10.0, 5.0, 2.0]
    out = augment_awgn(ts, levels, seed=7)
    for block, level in enumerate(levels, start=1):
        measured = _measured_snr_db(ts.trials[0], out.trials[block])
        assert np.all(np.abs(measured - level) < 0.5)


def test_measured_snr_over_many_short_trials(rng):
    ts = _set(rng.standard_normal((100, 4, 250)))
    levels = [10.0, 5.0, 2.0]
    out = augment_awgn(ts, levels, seed=3)
    for block, level in enumerate(levels, start=1):
        added = out.trials[100 * block:100 * (block + 1)]
        signal_power = np.mean(ts.trials ** 2, axis=(0, 2))
        noise_power = np.mean((added - ts.trials) ** 2, axis=(0, 2))
        measured = 10 * np.log10(signal_power / noise_power)
        assert np.all(np.abs(measured - level) < 0.5)


def test_zero_db_on_unit_power_channel_gives_unit_noise_variance():
    t = np.arange(20000)
    channel = np.sqrt(2.0) * np.sin(2 * np.pi * t / 50.0)
    ts = _set(channel[None, None, :])
    out = augment_awgn(ts, [0.0], seed=11)
    assert np.var(out.trials[1] - ts.trials[0]) == pytest.approx(1.0, abs=0.05)


def test_noise_is_independent_across_channels(rng):
    ts = _set(rng.standard_normal((100, 3, 250)))
    out = augment_awgn(ts, [5.0], seed=2)
    noise = (out.trials[100:] - ts.trials).transpose(1, 0, 2).reshape(3, -1)
    r = np.corrcoef(noise)
    assert np.all(np.abs(r[~np.eye(3, dtype=bool)]) < 0.1)


def test_zero_power_channels_are_copied(rng):
    trials = rng.standard_normal((2, 3, 20))
    trials[1, 2] = 0.0
    ts = _set(trials)
    assert count_zero_power_channels(ts) == 1
    out = augment_awgn(ts, [10.0], seed=0)
    assert np.array_equal(out.trials[3, 2], np.zeros(20))
    assert not np.array_equal(out.trials[3, 1], trials[1, 1])


def test_seed_controls_the_noise(rng):
    ts = _set(rng.standard_normal((2, 2, 30)))
    a = augment_awgn(ts, [5.0], seed=4).trials
    b = augment_awgn(ts, [5.0], seed=4).trials
    c = augment_awgn(ts, [5.0], seed=5).trials
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
