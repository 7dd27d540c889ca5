'''
test_adjoint.py: hand-derived gradients against finite differences
'''

import numpy as np
import pytest

from taudnn.adjoint import (Gradient, _FracContext, adjoint_fracdnn_dto, adjoint_fracdnn_otd,
                            adjoint_mismatch, adjoint_resnet, fd_gradient, grads_fracdnn,
                            grads_resnet)
from taudnn.activation import smooth_relu_prime
from taudnn.core import project
from taudnn.exceptions import ArgumentError, NonFiniteValue, ShapeMismatch
from taudnn.networks import forward, predict
from taudnn.objective import ObjectiveConfig, mse, total_objective


def random_widths(seed):
    rng = np.random.default_rng(1000 + seed)
    depth = int(rng.integers(4, 7))
    return tuple(int(w) for w in rng.integers(3, 9, depth + 1))


def block_errors(analytic, numeric):
    '''Relative max-norm error of the W, b and tau blocks.'''
    def rel(a, n):
        a = np.concatenate([np.ravel(x) for x in a])
        n = np.concatenate([np.ravel(x) for x in n])
        scale = np.max(np.abs(n))
        return np.max(np.abs(a - n)) / scale if scale > 0 else np.max(np.abs(a))
    return (rel(analytic.dW, numeric.dW), rel(analytic.db, numeric.db),
            rel([analytic.dtau], [numeric.dtau]))


def mse_gradients(spec, theta, data, adjoint = 'dto'):
    _, analytic = total_objective(spec, theta, data, ObjectiveConfig(), adjoint)
    numeric = fd_gradient(lambda t: mse(predict(spec, t, data.inputs), data.targets), theta)
    return analytic, numeric


class TestAgainstFiniteDifferences:
    @pytest.mark.parametrize('seed', range(20))
    @pytest.mark.parametrize('kind', ['feedforward', 'resnet', 'fracdnn'])
    def test_random_networks(self, kind, seed, make_instance):
        gamma = (0.3, 0.5, 0.9)[seed % 3] if kind == 'fracdnn' else None
        spec, theta, data = make_instance(kind, random_widths(seed), seed, gamma = gamma)
        analytic, numeric = mse_gradients(spec, theta, data)
        assert max(block_errors(analytic, numeric)) <= 1e-6

    def test_fracdnn_equidistant(self, make_instance):
        spec, theta, data = make_instance('fracdnn', (3, 4, 4, 4, 4, 2), 5, gamma = 0.5)
        theta = theta.with_taus(np.ones(spec.n_taus))
        analytic, numeric = mse_gradients(spec, theta, data)
        assert max(block_errors(analytic, numeric)) <= 1e-6

    def test_optimize_then_discretize_is_not_exact(self, make_instance):
        spec, theta, data = make_instance('fracdnn', (3, 4, 4, 4, 4, 2), 8, gamma = 0.5,
                                          tau_range = (0.2, 1.8))
        analytic, numeric = mse_gradients(spec, theta, data, adjoint = 'otd')
        assert max(block_errors(analytic, numeric)) > 1e-4


class TestAdjointRecursions:
    def test_zero_terminal_value(self, make_instance):
        for kind, solve, grads in [('resnet', adjoint_resnet, grads_resnet),
                                   ('fracdnn', adjoint_fracdnn_dto, grads_fracdnn)]:
            spec, theta, data = make_instance(kind, (3, 4, 4, 2), 1,
                                              gamma = 0.5 if kind == 'fracdnn' else None)
            traj = forward(spec, theta, data.inputs)
            adj = solve(spec, theta, traj, np.zeros_like(traj.output))
            assert all(not np.any(phi) for phi in adj.phis)
            gradient = grads(spec, theta, traj, adj)
            assert not np.any(gradient.flatten())

    @pytest.mark.parametrize('kind', ['feedforward', 'resnet'])
    def test_skip_terms(self, kind, make_instance):
        spec, theta, data = make_instance(kind, (3, 5, 5, 5, 2), 6)
        traj = forward(spec, theta, data.inputs)
        adj = adjoint_resnet(spec, theta, traj, traj.output - data.targets)
        for l in range(1, spec.depth - 1):
            phi_next = adj.phi(l + 1)
            expected = theta.taus[l] * ((phi_next * smooth_relu_prime(traj.pre[l], spec.eta))
                                        @ theta.weights[l])
            if kind == 'resnet':
                expected = expected + project(phi_next, spec.widths[l])
            np.testing.assert_allclose(adj.phi(l), expected, rtol = 1e-12, atol = 1e-15)

    def test_terminal_shape(self, make_instance):
        spec, theta, data = make_instance('resnet', (3, 4, 4, 2), 1)
        traj = forward(spec, theta, data.inputs)
        with pytest.raises(ShapeMismatch):
            adjoint_resnet(spec, theta, traj, np.zeros((3, 3)))

    def test_fracdnn_needs_fracdnn_spec(self, make_instance):
        spec, theta, data = make_instance('resnet', (3, 4, 4, 2), 1)
        traj = forward(spec, theta, data.inputs)
        with pytest.raises(ArgumentError):
            adjoint_fracdnn_dto(spec, theta, traj, np.zeros_like(traj.output))


class TestMismatch:
    def _setup(self, make_instance):
        spec, theta, data = make_instance('fracdnn', (3, 5, 4, 4, 5, 4, 2), 4, gamma = 0.6)
        traj = forward(spec, theta, data.inputs)
        phi_L = traj.output - data.targets
        return spec, theta, traj, phi_L

    def test_step_difference(self, make_instance):
        spec, theta, traj, phi_L = self._setup(make_instance)
        adj = adjoint_fracdnn_dto(spec, theta, traj, phi_L)
        ctx = _FracContext(spec, theta)
        phis = (None,) + adj.phis
        for l in range(1, spec.depth - 1):
            otd, dto = adjoint_mismatch(spec, theta, adj, l)
            np.testing.assert_allclose(ctx.otd_history(phis, l) - ctx.dto_history(phis, l),
                                       otd - dto, rtol = 1e-12, atol = 1e-14)

    def test_last_hidden_layer(self, make_instance):
        spec, theta, traj, phi_L = self._setup(make_instance)
        L = spec.depth
        dto_adj = adjoint_fracdnn_dto(spec, theta, traj, phi_L)
        otd_adj = adjoint_fracdnn_otd(spec, theta, traj, phi_L)
        otd, dto = adjoint_mismatch(spec, theta, dto_adj, L - 2)
        np.testing.assert_allclose(otd_adj.phi(L - 2) - dto_adj.phi(L - 2), otd - dto,
                                   rtol = 1e-10, atol = 1e-14)

    def test_layer_range(self, make_instance):
        spec, theta, traj, phi_L = self._setup(make_instance)
        adj = adjoint_fracdnn_dto(spec, theta, traj, phi_L)
        with pytest.raises(ArgumentError):
            adjoint_mismatch(spec, theta, adj, 0)
        with pytest.raises(ArgumentError):
            adjoint_mismatch(spec, theta, adj, spec.depth - 1)


class TestFiniteDifferences:
    def test_scalar_examples(self):
        assert fd_gradient(lambda x: x * x, 3.0) == pytest.approx(6.0, abs = 1e-8)
        assert fd_gradient(np.sin, 0.0) == pytest.approx(1.0, abs = 1e-9)
        assert fd_gradient(lambda x: 4.0, 1.0) == 0.0

    def test_array(self):
        grad = fd_gradient(lambda v: float(np.sum(v**3)), np.array([[1.0, -2.0]]))
        assert grad.shape == (1, 2)
        np.testing.assert_allclose(grad, [[3.0, 12.0]], rtol = 1e-8)

    def test_non_finite(self):
        with pytest.raises(NonFiniteValue):
            fd_gradient(lambda x: float('nan'), 1.0)

    def test_small_tau_steps(self, make_instance):
        spec, theta, data = make_instance('fracdnn', (3, 4, 4, 2), 3, gamma = 0.5)
        theta = theta.with_taus([1e-7, 0.8])
        numeric = fd_gradient(lambda t: float(np.sum(t.taus)), theta)
        np.testing.assert_allclose(numeric.dtau, [1.0, 1.0], rtol = 1e-9)

    def test_step_size_at_zero(self, make_instance):
        spec, theta, data = make_instance('resnet', (3, 4, 4, 2), 12)
        theta = theta.with_taus([1.0, 0.0])
        analytic, numeric = mse_gradients(spec, theta, data)
        assert max(block_errors(analytic, numeric)) <= 1e-5


class TestGradient:
    def test_flatten_matches_theta(self, make_instance):
        _, theta, _ = make_instance('resnet', (3, 4, 2), 0)
        gradient = Gradient.from_flat(theta, theta.flatten())
        np.testing.assert_array_equal(gradient.flatten(), theta.flatten())

    def test_block_norms(self, make_instance):
        _, theta, _ = make_instance('resnet', (3, 4, 2), 0)
        gradient = Gradient.zeros_like(theta)
        gradient = Gradient(gradient.dW, gradient.db, [3.0])
        assert gradient.block_norms() == (0.0, 0.0, 3.0)
        assert gradient.without_tau().block_norms() == (0.0, 0.0, 0.0)
        assert (gradient + gradient).scaled(0.5).dtau[0] == 3.0
