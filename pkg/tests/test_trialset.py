import json

import numpy as np
import pytest

from eegraph.graphs.montage import Montage, save_montage
from eegraph.pipeline.trialset import TrialSet, load_trialset, save_trialset, split
from eegraph.utils.error_handler import (
    DataError,
    ManifestError,
    MontageError,
    NonFiniteError,
    PayloadSizeError,
    UnsupportedVersionError,
)


def _trials(rng, n, c, t):
    # f32-representable so a save/load cycle is exact
    return rng.standard_normal((n, c, t)).astype(np.float32).astype(np.float64)


def _saved(tmp_path, rng, n=6, c=16, t=128, n_classes=2, montage="rsvp16"):
    labels = np.arange(n) % n_classes
    ts = TrialSet(_trials(rng, n, c, t), labels, n_classes, montage, 128.0, name="demo")
    manifest, payload, label_file = save_trialset(ts, tmp_path / "demo.json")
    return ts, manifest, payload, label_file


def _edit_manifest(path, **changes):
    data = json.loads(open(path, encoding="utf-8").read())
    data.update(changes)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f)


def test_save_load_is_bit_exact(tmp_path, rng):
    ts, manifest, payload, label_file = _saved(tmp_path, rng)
    assert payload.endswith("demo.f32")
    assert label_file.endswith("demo.labels.u16")
    loaded = load_trialset(manifest)
    assert np.array_equal(loaded.trials, ts.trials)
    assert np.array_equal(loaded.labels, ts.labels)
    assert (loaded.name, loaded.n_classes, loaded.montage) == ("demo", 2, "rsvp16")
    assert len(loaded.load_montage()) == 16


def test_errp_shaped_dataset_has_two_classes(tmp_path, rng):
    ts, manifest, _, _ = _saved(tmp_path, rng, n=3, c=56, t=250, montage="errp56")
    loaded = load_trialset(manifest)
    assert (loaded.n_channels, loaded.n_samples, loaded.n_classes) == (56, 250, 2)


def test_rsvp_shaped_dataset_has_four_classes(tmp_path, rng):
    _, manifest, _, _ = _saved(tmp_path, rng, n=4, n_classes=4)
    loaded = load_trialset(manifest)
    assert loaded.n_classes == 4
    assert list(loaded.class_counts()) == [1, 1, 1, 1]


def test_truncated_payload_names_byte_counts(tmp_path, rng):
    _, manifest, payload, _ = _saved(tmp_path, rng, n=2, c=16, t=4)
    with open(payload, "r+b") as f:
        f.truncate(100)
    with pytest.raises(PayloadSizeError) as info:
        load_trialset(manifest)
    assert info.value.expected == 2 * 16 * 4 * 4
    assert info.value.actual == 100
    assert "512" in str(info.value) and "100" in str(info.value)


def test_unsupported_version(tmp_path, rng):
    _, manifest, _, _ = _saved(tmp_path, rng, n=2)
    _edit_manifest(manifest, version=2)
    with pytest.raises(UnsupportedVersionError):
        load_trialset(manifest)


def test_invalid_manifests(tmp_path, rng):
    _, manifest, _, _ = _saved(tmp_path, rng, n=2)
    _edit_manifest(manifest, n_classes="two")
    with pytest.raises(ManifestError):
        load_trialset(manifest)

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ManifestError, match="invalid JSON"):
        load_trialset(broken)

    with pytest.raises(ManifestError, match="not found"):
        load_trialset(tmp_path / "absent.json")


def test_labels_outside_class_range(tmp_path, rng):
    _, manifest, _, _ = _saved(tmp_path, rng, n=4, n_classes=4)
    _edit_manifest(manifest, n_classes=2)
    with pytest.raises(ManifestError, match="label"):
        load_trialset(manifest)


def test_non_finite_samples_are_located(tmp_path, rng):
    trials = _trials(rng, 3, 16, 8)
    trials[1, 4, 5] = np.nan
    ts = TrialSet(trials, [0, 1, 0], 2, "rsvp16", 128.0)
    manifest, _, _ = save_trialset(ts, tmp_path / "nan.json")
    with pytest.raises(NonFiniteError, match="trial 1, channel 4, sample 5"):
        load_trialset(manifest)


def test_relative_montage_paths_follow_the_manifest(tmp_path, rng):
    montage = Montage([("A", 1.0, 0.0, 0.0), ("B", 0.0, 1.0, 0.0)])
    save_montage(montage, tmp_path / "layouts" / "pair.txt")
    source = TrialSet(_trials(rng, 5, 2, 4), np.zeros(5), 2, "layouts/pair.txt", 100.0, base_dir=tmp_path)
    manifest, _, _ = save_trialset(source, tmp_path / "data" / "pair.json")

    loaded = load_trialset(manifest)
    assert loaded.montage == "../layouts/pair.txt"
    assert loaded.load_montage().names == ("A", "B")


def test_montage_must_match_channel_count(rng):
    ts = TrialSet(_trials(rng, 2, 3, 4), [0, 1], 2, "rsvp16", 128.0)
    with pytest.raises(MontageError):
        ts.load_montage()


def test_trialset_validation():
    with pytest.raises(DataError):
        TrialSet(np.zeros((2, 3)), [0, 1], 2, "rsvp16", 128.0)
    with pytest.raises(DataError):
        TrialSet(np.zeros((2, 3, 4)), [0], 2, "rsvp16", 128.0)
    with pytest.raises(DataError):
        TrialSet(np.zeros((2, 3, 4)), [0, 2], 2, "rsvp16", 128.0)


def test_split_sizes():
    def sized(n):
        return TrialSet(np.zeros((n, 1, 1)), np.zeros(n), 2, "rsvp16", 128.0)

    train, val = split(sized(10), seed=0)
    assert (train.n_trials, val.n_trials) == (8, 2)
    train, val = split(sized(41400), seed=0)
    assert (train.n_trials, val.n_trials) == (33120, 8280)
    with pytest.raises(DataError):
        split(sized(4), seed=0)


def test_split_is_a_seeded_partition(rng):
    ts = TrialSet(np.arange(20.0).reshape(20, 1, 1), np.arange(20) % 2, 2, "rsvp16", 128.0)
    train, val = split(ts, seed=3)
    again, _ = split(ts, seed=3)
    other, _ = split(ts, seed=4)
    assert np.array_equal(train.trials, again.trials)
    assert not np.array_equal(train.trials, other.trials)
    seen = np.concatenate([train.trials, val.trials]).ravel()
    assert sorted(seen) == list(range(20))


def test_subset_and_concat(rng):
    ts = TrialSet(_trials(rng, 4, 2, 3), [0, 1, 1, 0], 2, "rsvp16", 128.0)
    part = ts.subset([3, 1])
    assert np.array_equal(part.labels, [0, 1])
    joined = part.concat(ts)
    assert joined.n_trials == 6
    with pytest.raises(DataError):
        ts.concat(TrialSet(np.zeros((1, 3, 3)), [0], 2, "rsvp16", 128.0))
