'''
test_diagnostics.py: tests for layer derivatives, gradient flow and pruning
'''

import math
import numpy as np
import pytest

from taudnn.activation import smooth_relu, smooth_relu_prime
from taudnn.core import NetworkSpec, Theta
from taudnn.exceptions import ArgumentError, PruneError, ShapeMismatch
from taudnn.diagnostics import (example65_closed_form, gradflow_report, layer_derivative,
                                leading_scalar, prunable_layers, prune)
from taudnn.networks import forward, predict


def with_layer(theta, j, vector):
    '''Theta with the parameters of layer j replaced by 'vector'.'''
    rows, cols = theta.weights[j].shape
    weights = list(theta.weights)
    biases = list(theta.biases)
    taus = theta.taus.copy()
    weights[j] = vector[:rows * cols].reshape(rows, cols)
    biases[j] = vector[rows * cols:rows * cols + rows]
    taus[j] = vector[-1]
    return Theta(weights, biases, taus)


def fd_jacobian(spec, theta, u, j, l, h_rel = 1e-6):
    base = theta.layer_vector(j)
    columns = []
    for i in range(base.size):
        h = h_rel * max(1.0, abs(base[i]))
        plus, minus = base.copy(), base.copy()
        plus[i] += h
        minus[i] -= h
        up = forward(spec, with_layer(theta, j, plus), u).states[l]
        down = forward(spec, with_layer(theta, j, minus), u).states[l]
        columns.append((up - down) / (2 * h))
    return np.column_stack(columns)


def equal_width_theta(kind, width, depth, weight, tau = 1.0, gamma = None):
    widths = [width] * (depth + 1)
    spec = NetworkSpec(kind, widths, gamma = gamma)
    weights = [np.full((width, width), weight)] * depth
    return spec, Theta(weights, [np.zeros(width)] * (depth - 1), [tau] * (depth - 1))


KINDS = [('feedforward', None), ('resnet', None), ('densenet', None), ('fracdnn', 0.4)]


class TestLayerDerivative:
    @pytest.mark.parametrize('kind, gamma', KINDS)
    def test_against_finite_differences(self, kind, gamma, make_instance, rel_error):
        spec, theta, data = make_instance(kind, (3, 4, 5, 5, 3, 2), 13, gamma = gamma)
        u = data.inputs[0]
        for j, l in [(0, 1), (0, 4), (1, 3), (2, 4), (3, 4)]:
            analytic = layer_derivative(spec, theta, u, j, l)
            assert analytic.shape == (spec.widths[l], theta.layer_vector(j).size)
            assert rel_error(analytic, fd_jacobian(spec, theta, u, j, l)) <= 1e-6

    def test_scalar_feedforward(self):
        spec = NetworkSpec('feedforward', [1, 1, 1, 1], eta = 0.1)
        theta = Theta([[[0.7]], [[1.3]], [[1.0]]], [[0.2], [-0.1]], [0.9, 1.1])
        traj = forward(spec, theta, [1.5])
        z0, z1 = traj.pre[0][0], traj.pre[1][0]
        G = np.array([0.9 * smooth_relu_prime(z0, 0.1) * 1.5,
                      0.9 * smooth_relu_prime(z0, 0.1),
                      smooth_relu(z0, 0.1)])
        expected = 1.1 * smooth_relu_prime(z1, 0.1) * 1.3 * G
        np.testing.assert_allclose(layer_derivative(spec, theta, [1.5], 0, 2)[0], expected,
                                   rtol = 1e-14)

    def test_resnet_zero_weights(self):
        spec, theta = equal_width_theta('resnet', 2, 5, 0.0, tau = 0.6)
        u = np.array([0.3, -0.4])
        d = 0.6 * smooth_relu_prime(0.0, spec.eta)
        G = np.hstack([np.kron(np.diag([d, d]), u[None, :]), np.diag([d, d]),
                       np.full((2, 1), smooth_relu(0.0, spec.eta))])
        np.testing.assert_allclose(layer_derivative(spec, theta, u, 0, 4), G, rtol = 1e-15)

    def test_one_sample_only(self, make_instance):
        spec, theta, data = make_instance('resnet', (3, 4, 4, 2), 0)
        with pytest.raises(ShapeMismatch):
            layer_derivative(spec, theta, data.inputs, 0, 2)

    def test_layer_order(self, make_instance):
        spec, theta, data = make_instance('resnet', (3, 4, 4, 2), 0)
        for j, l in [(1, 1), (2, 1), (0, 3), (-1, 1)]:
            with pytest.raises(ArgumentError):
                layer_derivative(spec, theta, data.inputs[0], j, l)


class TestClosedForm:
    @pytest.mark.parametrize('kind, gamma', KINDS)
    @pytest.mark.parametrize('widths', [(3, 4, 4, 4, 2), (3, 4, 5, 3, 2), (2, 3, 3, 3, 3, 1)])
    def test_matches_recursion(self, kind, gamma, widths, make_instance, rel_error):
        spec, theta, data = make_instance(kind, widths, 17, gamma = gamma)
        u = data.inputs[1]
        closed = example65_closed_form(spec, theta, u)
        assert rel_error(closed, layer_derivative(spec, theta, u, 0, 3)) <= 1e-12

    def test_densenet_doubles_resnet(self):
        _, theta = equal_width_theta('resnet', 3, 4, 0.0)
        theta = Theta(theta.weights, [np.array([0.1, -0.2, 0.3])] * 3, [0.5, 1.0, 1.5])
        u = np.array([1.0, -1.0, 0.5])
        resnet = example65_closed_form(NetworkSpec('resnet', [3] * 5), theta, u)
        densenet = example65_closed_form(NetworkSpec('densenet', [3] * 5), theta, u)
        np.testing.assert_array_equal(densenet, 2 * resnet)

    def test_fracdnn_leading_scalar(self):
        spec, theta = equal_width_theta('fracdnn', 2, 4, 0.0, gamma = 0.5)
        a10 = a21 = math.sqrt(2) - 1
        a20 = math.sqrt(3) - math.sqrt(2)
        expected = 1 - a10 - a20 + a10 * a21
        assert leading_scalar(spec, theta) == pytest.approx(expected, rel = 1e-14)

        u = np.array([0.5, -0.25])
        closed = example65_closed_form(spec, theta, u)
        G = layer_derivative(spec, theta, u, 0, 1)
        np.testing.assert_allclose(closed[:, :-1], expected * G[:, :-1], rtol = 1e-13)

    def test_needs_four_layers(self, make_instance):
        spec, theta, data = make_instance('resnet', (3, 4, 4, 2), 0)
        with pytest.raises(ArgumentError):
            example65_closed_form(spec, theta, data.inputs[0])
        with pytest.raises(ArgumentError):
            leading_scalar(spec, theta)


class TestGradFlow:
    def test_vanishing(self):
        spec, theta = equal_width_theta('feedforward', 1, 40, 0.5)
        report = gradflow_report(spec, theta, [[1.0]])
        assert len(report) == 39
        assert report.layers[0].classification == 'vanishing'
        assert report.layers[-1].classification == 'ok'

    def test_exploding(self):
        spec, theta = equal_width_theta('feedforward', 1, 40, 2.0)
        report = gradflow_report(spec, theta, [[1.0]])
        assert report.layers[0].classification == 'exploding'
        assert report.layers[0] in report.flagged()

    def test_resnet_zero_weights(self):
        spec, theta = equal_width_theta('resnet', 3, 10, 0.0)
        report = gradflow_report(spec, theta, np.ones((2, 3)))
        assert all(row.classification == 'ok' for row in report.layers)
        assert report.flagged() == []
        assert report.layers[-1].norm == pytest.approx(0.5, rel = 1e-3)

    def test_thresholds(self, make_instance):
        spec, theta, data = make_instance('resnet', (3, 4, 4, 2), 0)
        with pytest.raises(ArgumentError):
            gradflow_report(spec, theta, data.inputs, eps_vanish = 1.0, eps_explode = 0.5)
        report = gradflow_report(spec, theta, data.inputs, eps_vanish = 1e6, eps_explode = 1e7)
        assert all(row.classification == 'vanishing' for row in report.layers)


class TestPrune:
    def test_resnet_is_exact(self, make_instance):
        spec, theta, _ = make_instance('resnet', (3, 5, 5, 5, 5, 2), 23)
        theta = theta.with_taus([0.7, 0.0, 0.9, 0.0])
        assert prunable_layers(spec, theta, 0.05) == [2, 4]
        small_spec, small_theta = prune(spec, theta, 0.05)
        assert small_spec.widths == (3, 5, 5, 2)
        np.testing.assert_array_equal(small_theta.taus, [0.7, 0.9])
        inputs = np.random.default_rng(0).uniform(-1, 1, (100, 3))
        np.testing.assert_array_equal(predict(small_spec, small_theta, inputs),
                                      predict(spec, theta, inputs))

    def test_zero_threshold(self, make_instance):
        spec, theta, _ = make_instance('resnet', (3, 5, 5, 2), 1)
        theta = theta.with_taus([0.0, 0.0])
        small_spec, small_theta = prune(spec, theta, 0.0)
        assert small_spec is spec and small_theta is theta

    def test_nothing_left(self, make_instance):
        spec, theta, _ = make_instance('resnet', (3, 5, 5, 2), 1)
        with pytest.raises(PruneError):
            prune(spec, theta, 10.0)

    def test_architectures(self, make_instance):
        spec, theta, _ = make_instance('feedforward', (3, 5, 5, 2), 1)
        with pytest.raises(ArgumentError):
            prune(spec, theta, 0.1)
        spec, theta, _ = make_instance('resnet', (3, 5, 5, 2), 1)
        with pytest.raises(ArgumentError):
            prune(spec, theta, -0.1)

    def test_width_change_is_kept(self, make_instance):
        spec, theta, _ = make_instance('resnet', (3, 5, 4, 4, 2), 1)
        theta = theta.with_taus([1.0, 0.0, 0.0])
        assert prunable_layers(spec, theta, 0.05) == [3]

    def test_first_layer_is_kept(self, make_instance):
        spec, theta, _ = make_instance('resnet', (3, 5, 5, 2), 1)
        theta = theta.with_taus([0.0, 1.0])
        assert prune(spec, theta, 0.05)[0].widths == (3, 5, 5, 2)

    def test_fracdnn_is_approximate(self, make_instance):
        spec, theta, _ = make_instance('fracdnn', (2, 4, 4, 4, 4, 1), 29, gamma = 0.5,
                                       weight_scale = 0.5)
        inputs = np.random.default_rng(1).uniform(-1, 1, (100, 2))

        def deviation(tau):
            full = theta.with_taus([0.8, tau, 0.9, 1.1])
            small_spec, small_theta = prune(spec, full, 0.05)
            assert small_spec.widths == (2, 4, 4, 4, 1)
            return np.max(np.abs(predict(small_spec, small_theta, inputs)
                                 - predict(spec, full, inputs)))

        coarse, fine = deviation(1e-3), deviation(1e-8)
        assert fine < coarse
        assert fine < 1e-2
