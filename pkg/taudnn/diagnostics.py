'''
diagnostics.py: layer derivatives, gradient-flow reports and pruning

The sensitivity of a hidden feature vector y^[l] to the parameters
theta^[j] = (W^[j](:), b^[j], tau^[j]) of an earlier layer is a product of
per-layer factors.  With A_i = s_i diag(s'(z^[i])) W^[i] (s_i = tau^[i], or
Gamma(2-g) (tau^[i])^g for Fractional-DNNs) the factors are A_i for
feedforward networks and P + A_i for ResNets; DenseNets and Fractional-DNNs
also carry the history of all earlier layers.  Long products of factors
smaller (larger) than one make the derivatives vanish (explode).

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

from   collections import namedtuple
from   dataclasses import dataclass
import numpy as np

from .activation import smooth_relu, smooth_relu_prime
from .core import Kind, Theta, project
from .debug import log
from .exceptions import ArgumentError, ShapeMismatch, PruneError
from .fractional import TauGrid, coeff_a_matrix, dcoeff_a_tensor, gamma_factor
from .networks import forward


# Global constants.
# .............................................................................

EPS_VANISH = 1e-8
EPS_EXPLODE = 1e8


# Report types.
# .............................................................................

LayerFlow = namedtuple('LayerFlow', 'layer norm classification')
LayerFlow.__doc__ = '''Mean spectral norm of d y^[L-1] / d theta^[layer].'''


@dataclass(frozen = True)
class GradFlowReport:
    layers: tuple
    eps_vanish: float
    eps_explode: float

    def __len__(self):
        return len(self.layers)


    def flagged(self):
        '''Layers classified as anything but ok.'''
        return [row for row in self.layers if row.classification != 'ok']


# Internal helpers.
# .............................................................................

class _Linearization():
    '''Forward pass of one sample plus the pieces every derivative needs.'''

    def __init__(self, spec, theta, u):
        u = np.asarray(u, dtype = float)
        if u.ndim != 1:
            raise ShapeMismatch('layer derivatives take one sample at a time')
        self.spec = spec
        self.theta = theta
        self.traj = forward(spec, theta, u)
        taus = theta.taus
        if spec.kind is Kind.FRACDNN:
            c = gamma_factor(spec.gamma)
            self.scale = c * taus**spec.gamma
            self.dscale = spec.gamma * c * taus**(spec.gamma - 1.0)
            grid = TauGrid(taus)
            self.A = coeff_a_matrix(grid, spec.gamma)
            self.dA = dcoeff_a_tensor(grid, spec.gamma)
        else:
            self.scale = taus
            self.dscale = np.ones_like(taus)


    def width(self, i):
        return self.spec.widths[i]


    def param_count(self, j):
        return self.width(j + 1) * self.width(j) + self.width(j + 1) + 1


    def projector(self, to_layer, from_layer):
        '''Matrix of the projection from the width of y^[from] to y^[to].'''
        return project(np.eye(self.width(from_layer)), self.width(to_layer)).T


    def factor(self, i):
        '''A_i = s_i diag(s'(z^[i])) W^[i].'''
        d = self.scale[i] * smooth_relu_prime(self.traj.pre[i], self.spec.eta)
        return d[:, None] * self.theta.weights[i]


    def direct(self, j):
        '''Partial derivative of s_j a(z^[j]) with respect to theta^[j].'''
        z = self.traj.pre[j]
        y = self.traj.states[j]
        d = self.scale[j] * smooth_relu_prime(z, self.spec.eta)
        dtau = self.dscale[j] * smooth_relu(z, self.spec.eta)
        return np.hstack([np.kron(np.diag(d), y[None, :]), np.diag(d), dtau[:, None]])


    def increment(self, to_layer, k):
        '''P y^[k+1] - P y^[k], projected to the width of y^[to_layer].'''
        n = self.width(to_layer)
        states = self.traj.states
        return project(states[k + 1], n) - project(states[k], n)


def _check_layers(spec, j, l):
    if not 0 <= j < l <= spec.depth - 1:
        raise ArgumentError('need 0 <= j < l <= {}, got j = {} and l = {}'
                            .format(spec.depth - 1, j, l))


# Layer derivatives.
# .............................................................................

def layer_derivative(spec, theta, u, j, l):
    '''Return the Jacobian d y^[l] / d theta^[j] at input 'u', an
    n_l x (n_{j+1} n_j + n_{j+1} + 1) matrix whose columns follow the order
    W^[j] row-major, b^[j], tau^[j].
    '''
    _check_layers(spec, j, l)
    lin = _Linearization(spec, theta, u)
    kind = spec.kind
    p = lin.param_count(j)
    D = [np.zeros((lin.width(i), p)) for i in range(l + 1)]
    for i in range(j + 1, l + 1):
        Di = lin.factor(i - 1) @ D[i - 1]
        if i - 1 == j:
            Di = Di + lin.direct(j)
        if kind is Kind.RESNET and i >= 2:
            Di = Di + lin.projector(i, i - 1) @ D[i - 1]
        elif kind is Kind.DENSENET:
            for k in range(i):
                Di = Di + lin.projector(i, k) @ D[k]
        elif kind is Kind.FRACDNN:
            Di = Di + lin.projector(i, i - 1) @ D[i - 1]
            for k in range(i - 1):
                Di = Di - lin.A[i - 1, k] * (lin.projector(i, k + 1) @ D[k + 1]
                                             - lin.projector(i, k) @ D[k])
                Di[:, -1] -= lin.dA[j, i - 1, k] * lin.increment(i, k)
        D[i] = Di
    return D[l]


def example65_closed_form(spec, theta, u):
    '''Evaluate d y^[3] / d theta^[0] from its expanded closed form.

    With G the direct term of layer 0, A_i the layer factors and P_ik the
    projections from width n_k to n_i:

      feedforward  A_2 A_1 G
      resnet       (P_32 P_21 + P_32 A_1 + A_2 P_21 + A_2 A_1) G
      densenet     (P_31 + P_32 P_21 + P_32 A_1 + A_2 P_21 + A_2 A_1) G
      fracdnn      ((1 - a_21) P_32 + A_2) ((1 - a_10) P_21 + A_1) G
                   + (a_21 - a_20) P_31 G
                   - tau column corrections from d a_10 and d a_20

    With equal hidden widths every P is the identity, giving the familiar
    I + A_1 + A_2 + A_2 A_1 (resnet) and 2 I + A_1 + A_2 + A_2 A_1 (densenet).
    '''
    if spec.depth < 4:
        raise ArgumentError('the closed form needs at least 4 layers, got {}'
                            .format(spec.depth))
    lin = _Linearization(spec, theta, u)
    G = lin.direct(0)
    A1, A2 = lin.factor(1), lin.factor(2)
    P21, P32, P31 = lin.projector(2, 1), lin.projector(3, 2), lin.projector(3, 1)
    kind = spec.kind
    if kind is Kind.FEEDFORWARD:
        return A2 @ A1 @ G
    if kind is Kind.RESNET:
        return (P32 @ P21 + P32 @ A1 + A2 @ P21 + A2 @ A1) @ G
    if kind is Kind.DENSENET:
        return (P31 + P32 @ P21 + P32 @ A1 + A2 @ P21 + A2 @ A1) @ G

    a10, a20, a21 = lin.A[1, 0], lin.A[2, 0], lin.A[2, 1]
    outer = (1.0 - a21) * P32 + A2
    result = outer @ ((1.0 - a10) * P21 + A1) @ G + (a21 - a20) * P31 @ G
    # a_10 and a_20 contain tau^[0]; a_21 does not.
    result[:, -1] -= outer @ (lin.dA[0, 1, 0] * lin.increment(2, 0))
    result[:, -1] -= lin.dA[0, 2, 0] * lin.increment(3, 0)
    return result


def leading_scalar(spec, theta):
    '''Coefficient of G in the expanded Fractional-DNN closed form with equal
    hidden widths: 1 - a_10 - a_20 + a_10 a_21.
    '''
    if spec.kind is not Kind.FRACDNN or spec.depth < 4:
        raise ArgumentError('the leading scalar needs a fracdnn of at least 4 layers')
    A = coeff_a_matrix(TauGrid(theta.taus), spec.gamma)
    return 1.0 - A[1, 0] - A[2, 0] + A[1, 0] * A[2, 1]


# Gradient flow.
# .............................................................................

def _classify(norm, eps_vanish, eps_explode):
    if not norm >= eps_vanish:
        return 'vanishing'
    if norm > eps_explode:
        return 'exploding'
    return 'ok'


def gradflow_report(spec, theta, samples, eps_vanish = EPS_VANISH,
                    eps_explode = EPS_EXPLODE):
    '''Average over 'samples' the spectral norm of d y^[L-1] / d theta^[j]
    for every parameterized layer j = 0..L-2 and classify each layer.
    '''
    if not 0 <= eps_vanish < eps_explode:
        raise ArgumentError('need 0 <= eps_vanish < eps_explode')
    samples = np.array(samples, dtype = float, ndmin = 2)
    last = spec.depth - 1
    rows = []
    for j in range(last):
        norms = [np.linalg.norm(layer_derivative(spec, theta, u, j, last), ord = 2)
                 for u in samples]
        norm = float(np.mean(norms))
        rows.append(LayerFlow(j, norm, _classify(norm, eps_vanish, eps_explode)))
        if __debug__: log('layer {}: mean derivative norm {}', j, norm)
    return GradFlowReport(tuple(rows), float(eps_vanish), float(eps_explode))


# Pruning.
# .............................................................................

def prunable_layers(spec, theta, threshold):
    '''Hidden layers l >= 2 whose step size tau^[l-1] is below 'threshold'
    and whose width equals that of the layer before it.
    '''
    if spec.kind not in (Kind.RESNET, Kind.FRACDNN):
        raise ArgumentError('only resnet and fracdnn networks can be pruned')
    if not threshold >= 0:
        raise ArgumentError('the pruning threshold must be non-negative')
    theta.check(spec)
    if theta.taus.size and np.all(theta.taus < threshold):
        raise PruneError('every step size is below {}; nothing would remain'
                         .format(threshold))
    widths = spec.widths
    return [l for l in range(2, spec.depth)
            if theta.taus[l - 1] < threshold and widths[l] == widths[l - 1]]


def prune(spec, theta, threshold):
    '''Remove the hidden layers named by prunable_layers and return the
    reduced (spec, theta).  For ResNets a layer with tau exactly 0 is the
    identity, so removing it leaves the output unchanged.  For
    Fractional-DNNs the history coefficients are recomputed on the shorter
    grid and the output changes slightly.
    '''
    removed = set(prunable_layers(spec, theta, threshold))
    if not removed:
        return spec, theta
    keep = [l for l in range(1, spec.depth) if l not in removed]
    widths = [spec.widths[0]] + [spec.widths[l] for l in keep] + [spec.widths[-1]]
    params = [l - 1 for l in keep]
    weights = [theta.weights[i] for i in params] + [theta.weights[-1]]
    biases = [theta.biases[i] for i in params]
    taus = [theta.taus[i] for i in params]
    if __debug__: log('pruning layers {} from {}', sorted(removed), spec.widths)
    return spec.with_widths(widths), Theta(weights, biases, taus)
