import numpy as np
import pytest

from eegraph.core.nn import Parameter
from eegraph.core.optim import Adam, AdamState, adam_step
from eegraph.utils.error_handler import MissingGradientError


def test_first_step_moves_by_learning_rate_times_sign():
    p = Parameter([1.0, -2.0])
    p.grad = np.array([0.5, -3.0])
    Adam([p], lr=0.001).step()
    assert np.allclose(p.data, [0.999, -1.999], atol=1e-9)


def test_moments_follow_the_update_rule():
    p = Parameter([0.0])
    state = AdamState(lr=0.1)
    for g in (1.0, -1.0):
        p.grad = np.array([g])
        adam_step([p], state)
    assert state.step == 2
    assert state.m[0][0] == pytest.approx(0.9 * 0.1 * 1.0 + 0.1 * -1.0)
    assert state.v[0][0] == pytest.approx(0.999 * 0.001 + 0.001)


def test_missing_gradient_raises():
    a, b = Parameter([1.0]), Parameter([2.0])
    a.grad = np.array([1.0])
    with pytest.raises(MissingGradientError):
        Adam([a, b]).step()


def test_minimizes_a_quadratic():
    p = Parameter([3.0])
    opt = Adam([p], lr=0.01)
    for _ in range(1500):
        opt.zero_grad()
        p.grad = 2.0 * (p.data - 1.0)
        opt.step()
    assert abs(p.data[0] - 1.0) < 0.05


def test_learning_rate_can_change_between_steps():
    p = Parameter([0.0])
    opt = Adam([p], lr=0.01)
    opt.lr = 0.005
    assert opt.state.lr == 0.005
    p.grad = np.array([1.0])
    opt.step()
    assert p.data[0] == pytest.approx(-0.005, abs=1e-9)


def test_rejects_non_positive_learning_rate():
    with pytest.raises(ValueError):
        Adam([Parameter([0.0])], lr=0.0)


def test_zero_gradients_leave_parameters_unchanged():
    p = Parameter([0.25, -4.0])
    opt = Adam([p])
    for _ in range(5):
        p.grad = np.zeros(2)
        opt.step()
    assert np.array_equal(p.data, [0.25, -4.0])


def test_equal_gradients_give_similar_steps():
    p = Parameter([0.0])
    opt = Adam([p])
    p.grad = np.array([1.0])
    opt.step()
    first = -p.data[0]
    p.grad = np.array([1.0])
    opt.step()
    second = -p.data[0] - first
    assert first == pytest.approx(0.001)
    assert abs(second - first) <= 0.1 * first
