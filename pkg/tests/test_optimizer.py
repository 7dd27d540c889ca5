'''
test_optimizer.py: tests for initialization, the line search and training
'''

import math
import numpy as np
import pytest

from taudnn.core import Dataset, NetworkSpec, Theta
from taudnn.exceptions import ArgumentError, InvariantViolation, Stagnation
from taudnn.objective import ObjectiveConfig, objective_value
from taudnn.optimizer import (ArmijoSearch, TrainConfig, clip_taus, descent_step,
                              init_theta, train)


def small_problem(kind = 'resnet', gamma = None, seed = 3):
    rng = np.random.default_rng(seed)
    spec = NetworkSpec(kind, [2, 4, 4, 1], gamma = gamma, eta = 0.01)
    inputs = rng.uniform(-1, 1, (20, 2))
    targets = (inputs[:, :1] * inputs[:, 1:]) + 0.5
    return spec, Dataset(inputs, targets)


class TestInit:
    def test_shapes_and_values(self):
        spec = NetworkSpec('resnet', [7, 10, 10, 3])
        theta = init_theta(spec, TrainConfig(seed = 5))
        theta.check(spec)
        np.testing.assert_array_equal(theta.taus, [1.0, 1.0])
        assert all(not np.any(b) for b in theta.biases)
        for l, W in enumerate(theta.weights):
            assert np.max(np.abs(W)) < math.sqrt(2.0 / spec.widths[l])

    def test_seeded(self):
        spec = NetworkSpec('resnet', [7, 10, 10, 3])
        first = init_theta(spec, TrainConfig(seed = 5)).flatten()
        np.testing.assert_array_equal(first, init_theta(spec, TrainConfig(seed = 5)).flatten())
        assert not np.array_equal(first, init_theta(spec, TrainConfig(seed = 6)).flatten())


class TestTrainConfig:
    def test_bounds(self):
        cfg = TrainConfig()
        assert cfg.tau_bounds(NetworkSpec('resnet', [2, 2, 1])) == (0.0, 10.0)
        assert cfg.tau_bounds(NetworkSpec('fracdnn', [2, 2, 1], gamma = 0.5)) == (1e-6, 10.0)
        assert TrainConfig(tau_min = 0.1).tau_bounds(NetworkSpec('resnet', [2, 2, 1]))[0] == 0.1

    def test_invalid(self):
        with pytest.raises(ArgumentError):
            TrainConfig(shrink = 1.0)
        with pytest.raises(ArgumentError):
            TrainConfig(max_steps = -1)
        with pytest.raises(ArgumentError):
            TrainConfig(tau_min = 2.0, tau_max = 1.0)
        with pytest.raises(ArgumentError):
            TrainConfig(init_weight_scale = 'xavier')
        with pytest.raises(ArgumentError):
            TrainConfig(tau_keep = 1.0)

    def test_clip(self):
        spec = NetworkSpec('fracdnn', [1, 1, 1], gamma = 0.5)
        theta = Theta([[[1.0]], [[1.0]]], [[0.0]], [-0.1])
        assert clip_taus(spec, theta, TrainConfig()).taus[0] == 1e-6


class TestArmijo:
    def test_quadratic(self):
        search = ArmijoSearch()
        x, fx, alpha, halvings = search.search(lambda v: float(v @ v), np.array([1.0]),
                                               1.0, np.array([2.0]), 1.0)
        assert x[0] == 0.0 and fx == 0.0
        assert alpha == 0.5 and halvings == 1

    def test_projection(self):
        search = ArmijoSearch()
        x, _, _, _ = search.search(lambda v: float((v[0] - 3)**2), np.array([1.0]), 4.0,
                                   np.array([-4.0]), 1.0, project = lambda v: np.minimum(v, 2))
        assert x[0] == 2.0

    def test_stagnation(self):
        search = ArmijoSearch(max_halvings = 3)
        with pytest.raises(Stagnation):
            search.search(lambda v: 5.0, np.zeros(2), 1.0, np.ones(2), 1.0)

    def test_projection_without_progress(self):
        search = ArmijoSearch(max_halvings = 5)
        x0 = np.array([2.0])
        with pytest.raises(Stagnation):
            search.search(lambda v: float(v[0]), x0, 2.0, np.array([1.0]), 1.0,
                          project = lambda v: x0.copy())


class TestDescent:
    def test_zero_gradient(self):
        spec = NetworkSpec('resnet', [2, 3, 3, 1])
        theta = Theta([np.zeros((3, 2)), np.zeros((3, 3)), np.zeros((1, 3))],
                      [np.zeros(3), np.zeros(3)], [1.0, 1.0])
        data = Dataset(np.ones((4, 2)), np.zeros((4, 1)))
        cfg = TrainConfig()
        new, info = descent_step(spec, theta, data, cfg, ObjectiveConfig())
        assert new is theta
        assert info.alpha == cfg.init_step
        assert info.J == info.previous_J == 0.0
        assert info.converged

    def test_decreases(self):
        spec, data = small_problem()
        cfg = TrainConfig(seed = 1)
        theta = init_theta(spec, cfg)
        new, info = descent_step(spec, theta, data, cfg, ObjectiveConfig())
        assert info.J < info.previous_J
        assert info.J == pytest.approx(objective_value(spec, new, data, ObjectiveConfig()))

    def test_taus_stay_in_bounds(self):
        spec, data = small_problem('fracdnn', gamma = 0.5)
        cfg = TrainConfig(seed = 2, tau_max = 1.2, init_step = 50.0, max_step = 100.0)
        new, _ = descent_step(spec, init_theta(spec, cfg), data, cfg, ObjectiveConfig())
        assert np.all(new.taus >= 1e-6) and np.all(new.taus <= 1.2)

    def test_step_sizes_keep_distance_to_bound(self):
        spec, data = small_problem()
        cfg = TrainConfig(seed = 1, init_step = 1e3)
        theta = init_theta(spec, cfg)
        new, info = descent_step(spec, theta, data, cfg, ObjectiveConfig())
        assert info.J < info.previous_J
        assert np.all(new.taus >= 0.5)

    def test_pinned_step_size(self):
        spec = NetworkSpec('resnet', [1, 1, 1])
        theta = Theta([[[1.0]], [[1.0]]], [[0.0]], [0.0])
        data = Dataset([[1.0]], [[-1.0]])
        new, info = descent_step(spec, theta, data, TrainConfig(), ObjectiveConfig())
        assert new is theta
        assert info.converged and info.halvings == 0
        assert info.gradient_norms == (0.0, 0.0, 0.0)
        trained, record = train(spec, data, TrainConfig(max_steps = 5), theta = theta)
        assert record.stopped == 'converged' and len(record) == 0
        np.testing.assert_array_equal(trained.flatten(), theta.flatten())


class TestTrain:
    @pytest.mark.parametrize('kind, gamma', [('resnet', None), ('fracdnn', 0.5),
                                             ('feedforward', None)])
    def test_monotone(self, kind, gamma):
        spec, data = small_problem(kind, gamma)
        theta, record = train(spec, data, TrainConfig(max_steps = 30, seed = 4))
        values = [record.initial_J] + record.J_values()
        assert len(record) == 30 or record.stopped in ('converged', 'stagnation')
        assert all(b <= a for a, b in zip(values, values[1:]))
        assert values[-1] < values[0]
        theta.check(spec)

    def test_deterministic(self):
        spec, data = small_problem()
        cfg = TrainConfig(max_steps = 10, seed = 9)
        objcfg = ObjectiveConfig(lambda1 = 1e-3, bias_ordering = True)
        first = train(spec, data, cfg, objcfg)
        second = train(spec, data, cfg, objcfg)
        assert first[1] == second[1]
        np.testing.assert_array_equal(first[0].flatten(), second[0].flatten())

    def test_zero_steps(self):
        spec, data = small_problem()
        cfg = TrainConfig(max_steps = 0, seed = 9)
        theta, record = train(spec, data, cfg)
        assert len(record) == 0
        np.testing.assert_array_equal(theta.flatten(), init_theta(spec, cfg).flatten())

    def test_fixed_taus(self):
        spec, data = small_problem()
        theta, _ = train(spec, data, TrainConfig(max_steps = 10, train_tau = False))
        np.testing.assert_array_equal(theta.taus, [1.0, 1.0])

    def test_resnet_keeps_first_step_size(self):
        spec, data = small_problem()
        theta, record = train(spec, data, TrainConfig(max_steps = 20, seed = 4))
        assert np.all(theta.taus > 0)
        assert all(row.taus[0] > 0 for row in record.rows)

    def test_callback(self):
        spec, data = small_problem()
        rows = []
        _, record = train(spec, data, TrainConfig(max_steps = 5), callback = rows.append)
        assert rows == record.rows

    def test_non_finite_start(self):
        spec, _ = small_problem()
        data = Dataset(np.full((2, 2), np.nan), np.zeros((2, 1)))
        with np.errstate(all = 'ignore'):
            with pytest.raises(InvariantViolation):
                train(spec, data, TrainConfig(max_steps = 1))
