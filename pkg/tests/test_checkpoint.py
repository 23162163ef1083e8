import struct
from collections import OrderedDict

import numpy as np
import pytest

from eegraph.core.checkpoint import MAGIC, load_checkpoint, save_checkpoint
from eegraph.core.nn import BatchNorm, Linear, Module
from eegraph.utils.error_handler import CheckpointError, UnsupportedVersionError


class _Pair(Module):
    def __init__(self, rng):
        super().__init__()
        self.fc = Linear(3, 2, rng)
        self.norm = BatchNorm(2)


def test_round_trip_preserves_names_order_and_values(tmp_path, rng):
    tensors = OrderedDict([
        ("b.weight", rng.standard_normal((3, 2))),
        ("a.bias", rng.standard_normal(4)),
        ("scalar", np.array(1.25)),
    ])
    path = save_checkpoint(tmp_path / "model.ckpt", tensors)
    loaded = load_checkpoint(path)
    assert list(loaded) == list(tensors)
    for name, value in tensors.items():
        assert loaded[name].shape == value.shape
        assert np.array_equal(loaded[name], value)


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.ckpt"
    path.write_bytes(b"NOPE" + struct.pack("<II", 1, 0))
    with pytest.raises(CheckpointError, match="magic"):
        load_checkpoint(path)


def test_unsupported_version(tmp_path):
    path = tmp_path / "v2.ckpt"
    path.write_bytes(MAGIC + struct.pack("<II", 2, 0))
    with pytest.raises(UnsupportedVersionError):
        load_checkpoint(path)


def test_truncated_file(tmp_path, rng):
    path = tmp_path / "model.ckpt"
    save_checkpoint(path, {"w": rng.standard_normal((4, 4))})
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(CheckpointError, match="truncated"):
        load_checkpoint(path)


def test_trailing_bytes(tmp_path):
    path = tmp_path / "model.ckpt"
    save_checkpoint(path, {"w": np.zeros(2)})
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(CheckpointError, match="trailing"):
        load_checkpoint(path)


def test_module_state_includes_buffers_and_reloads(tmp_path, rng):
    source = _Pair(rng)
    source.norm.running_mean[...] = [0.5, -0.5]
    save_checkpoint(tmp_path / "pair.ckpt", source.state_dict())

    target = _Pair(np.random.default_rng(123))
    target.load_state_dict(load_checkpoint(tmp_path / "pair.ckpt"))
    assert set(target.state_dict()) == {
        "fc.weight", "fc.bias", "norm.gamma", "norm.beta", "norm.running_mean", "norm.running_var",
    }
    for name, value in source.state_dict().items():
        assert np.array_equal(target.state_dict()[name], value)


def test_load_state_dict_rejects_mismatches(rng):
    module = _Pair(rng)
    state = module.state_dict()
    state.pop("fc.bias")
    with pytest.raises(CheckpointError, match="missing"):
        module.load_state_dict(state)

    state = module.state_dict()
    state["fc.weight"] = np.zeros((2, 3))
    with pytest.raises(CheckpointError, match="shape"):
        module.load_state_dict(state)
