'''
adjoint.py: adjoint recursions and parameter gradients

The adjoints are computed for a whole batch at once.  Pass phi_L as the
derivative of the objective with respect to the network output, one row per
sample; the gradient functions then sum the per-sample contributions in row
order.

For feedforward and ResNet networks

    phi^[L-1] = W^[L-1]^T phi^[L]
    phi^[l]   = P^T phi^[l+1] + tau^[l] W^[l]^T (phi^[l+1] * s'(z^[l])),  l = L-2..1

without the P^T term for feedforward networks.  For Fractional-DNNs the
discretize-then-optimize system (the exact adjoint of the discrete forward
pass) is used for training.  The optimize-then-discretize system, a
discretization of the continuous adjoint equation, is kept for comparison;
the two differ even on equidistant grids.

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

from   dataclasses import dataclass
import math
import numpy as np

from .activation import smooth_relu, smooth_relu_prime
from .core import Kind, Theta, project
from .debug import log
from .exceptions import ArgumentError, ShapeMismatch, NonFiniteValue
from .fractional import TauGrid, coeff_a_matrix, coeff_b, dcoeff_a_tensor, gamma_factor


# Value types.
# .............................................................................

@dataclass(frozen = True)
class AdjointTrajectory:
    '''Adjoint variables phi^[1..L]; phis[0] holds phi^[1].'''
    phis: tuple

    def phi(self, l):
        '''Return phi^[l] for l = 1..L.'''
        return self.phis[l - 1]


@dataclass(frozen = True)
class Gradient:
    '''Derivatives with respect to every W^[l], b^[l] and tau^[l], stored in
    the shapes of the parameters themselves.
    '''
    dW: tuple
    db: tuple
    dtau: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'dW', tuple(np.asarray(w, dtype = float) for w in self.dW))
        object.__setattr__(self, 'db', tuple(np.asarray(b, dtype = float) for b in self.db))
        object.__setattr__(self, 'dtau', np.asarray(self.dtau, dtype = float).reshape(-1))


    @classmethod
    def zeros_like(cls, theta):
        return cls([np.zeros_like(W) for W in theta.weights],
                   [np.zeros_like(b) for b in theta.biases],
                   np.zeros_like(theta.taus))


    def __add__(self, other):
        return Gradient([a + b for a, b in zip(self.dW, other.dW)],
                        [a + b for a, b in zip(self.db, other.db)],
                        self.dtau + other.dtau)


    def scaled(self, factor):
        return Gradient([factor * w for w in self.dW], [factor * b for b in self.db],
                        factor * self.dtau)


    def without_tau(self):
        '''The same gradient with the step-size block set to zero.'''
        return Gradient(self.dW, self.db, np.zeros_like(self.dtau))


    def flatten(self):
        '''One vector in the order used by Theta.flatten().'''
        return np.concatenate([w.ravel() for w in self.dW] + list(self.db) + [self.dtau])


    @classmethod
    def from_flat(cls, theta, vector):
        like = theta.like(vector)
        return cls(like.weights, like.biases, like.taus)


    def block_norms(self):
        '''Euclidean norms of the W, b and tau blocks.'''
        norm_w = math.sqrt(sum(float(np.sum(w * w)) for w in self.dW))
        norm_b = math.sqrt(sum(float(np.sum(b * b)) for b in self.db))
        return norm_w, norm_b, float(np.linalg.norm(self.dtau))


# Helpers.
# .............................................................................

def _outer_sum(left, right):
    '''Sum over samples of the outer products left_i right_i^T.'''
    return np.atleast_2d(left).T @ np.atleast_2d(right)


def _sample_sum(v):
    return np.sum(np.atleast_2d(v), axis = 0)


def _check_phi(spec, traj, phi_L):
    phi_L = np.asarray(phi_L, dtype = float)
    if phi_L.shape != np.shape(traj.output):
        raise ShapeMismatch('phi_L has shape {}, expected {}'
                            .format(phi_L.shape, np.shape(traj.output)))
    if len(traj.states) != spec.depth + 1:
        raise ShapeMismatch('trajectory does not belong to a {}-layer network'
                            .format(spec.depth))
    return phi_L


def _scaled_back(theta, l, phi_next, z, eta, scale):
    '''scale * W^[l]^T (phi^[l+1] * s'(z^[l])), row by row.'''
    return scale * ((phi_next * smooth_relu_prime(z, eta)) @ theta.weights[l])


# ResNet and feedforward.
# .............................................................................

def adjoint_resnet(spec, theta, traj, phi_L):
    '''Adjoint recursion of a ResNet, or of a feedforward network when
    spec.kind is FEEDFORWARD (every skip map is then zero).
    '''
    phi_L = _check_phi(spec, traj, phi_L)
    skip = spec.kind is not Kind.FEEDFORWARD
    L = spec.depth
    phis = [None] * (L + 1)
    phis[L] = phi_L
    phis[L - 1] = phi_L @ theta.weights[L - 1]
    for l in range(L - 2, 0, -1):
        phi = _scaled_back(theta, l, phis[l + 1], traj.pre[l], spec.eta, theta.taus[l])
        if skip:
            phi = phi + project(phis[l + 1], spec.widths[l])
        phis[l] = phi
    return AdjointTrajectory(tuple(phis[1:]))


def grads_resnet(spec, theta, traj, adj):
    '''Gradient of the objective terms behind phi^[L] with respect to every
    parameter of a ResNet or feedforward network.
    '''
    L = spec.depth
    dW = [None] * L
    db = [None] * (L - 1)
    dtau = np.zeros(L - 1)
    dW[L - 1] = _outer_sum(adj.phi(L), traj.states[L - 1])
    for l in range(L - 1):
        phi_next = adj.phi(l + 1)
        z = traj.pre[l]
        g = phi_next * smooth_relu_prime(z, spec.eta)
        dW[l] = theta.taus[l] * _outer_sum(g, traj.states[l])
        db[l] = theta.taus[l] * _sample_sum(g)
        dtau[l] = np.sum(smooth_relu(z, spec.eta) * phi_next)
    return Gradient(dW, db, dtau)


# Fractional-DNN.
# .............................................................................

class _FracContext:
    '''Coefficients shared by the Fractional-DNN adjoint steps.'''

    def __init__(self, spec, theta):
        self.spec  = spec
        self.theta = theta
        self.grid  = TauGrid(theta.taus)
        self.A     = coeff_a_matrix(self.grid, spec.gamma)
        self.c     = gamma_factor(spec.gamma)
        self.scale = self.c * theta.taus**spec.gamma


    def activation_term(self, traj, phis, l):
        return _scaled_back(self.theta, l, phis[l + 1], traj.pre[l], self.spec.eta,
                            self.scale[l])


    def dto_history(self, phis, l):
        '''History part of the discretize-then-optimize step for phi^[l],
        excluding the activation term.
        '''
        A, n, L = self.A, self.spec.widths[l], self.spec.depth
        out = (1.0 - A[l, l - 1]) * project(phis[l + 1], n)
        for j in range(l + 2, L):
            out = out + (A[j - 1, l] - A[j - 1, l - 1]) * project(phis[j], n)
        return out


    def otd_history(self, phis, l):
        '''History part of the optimize-then-discretize step for phi^[l].'''
        n, L, gamma = self.spec.widths[l], self.spec.depth, self.spec.gamma
        out = project(phis[l + 1], n)
        for j in range(l + 1, L - 1):
            b = coeff_b(self.grid, j, l, gamma)
            out = out + b * (project(phis[j + 1], n) - project(phis[j], n))
        return out


def _adjoint_fracdnn(spec, theta, traj, phi_L, history):
    if spec.kind is not Kind.FRACDNN:
        raise ArgumentError('fracdnn adjoints need a fracdnn spec')
    phi_L = _check_phi(spec, traj, phi_L)
    ctx = _FracContext(spec, theta)
    L = spec.depth
    phis = [None] * (L + 1)
    phis[L] = phi_L
    phis[L - 1] = phi_L @ theta.weights[L - 1]
    for l in range(L - 2, 0, -1):
        phis[l] = getattr(ctx, history)(phis, l) + ctx.activation_term(traj, phis, l)
    return AdjointTrajectory(tuple(phis[1:]))


def adjoint_fracdnn_dto(spec, theta, traj, phi_L):
    '''Discretize-then-optimize adjoint of the Fractional-DNN.'''
    theta.check(spec)
    if __debug__: log('discretize-then-optimize adjoint, L = {}', spec.depth)
    return _adjoint_fracdnn(spec, theta, traj, phi_L, 'dto_history')


def adjoint_fracdnn_otd(spec, theta, traj, phi_L):
    '''Optimize-then-discretize adjoint of the Fractional-DNN.'''
    theta.check(spec)
    if __debug__: log('optimize-then-discretize adjoint, L = {}', spec.depth)
    return _adjoint_fracdnn(spec, theta, traj, phi_L, 'otd_history')


def adjoint_mismatch(spec, theta, adj, l):
    '''Return (otd_term, dto_term), the two sides of the comparison between
    the adjoint systems at layer 'l', evaluated on the adjoint values in
    'adj':

        otd_term = sum_{j=l+1}^{L-2} b[j, l] (P^T phi^[j+1] - P^T phi^[j])
        dto_term = sum_{j=l+1}^{L-2} a[j, l] P^T phi^[j+1]
                   - sum_{j=l+1}^{L-1} a[j-1, l-1] P^T phi^[j]

    Given the same phi^[l+1..L], the optimize-then-discretize step minus the
    discretize-then-optimize step equals otd_term - dto_term.
    '''
    L = spec.depth
    if not 1 <= l <= L - 2:
        raise ArgumentError('layer must lie in 1..{}'.format(L - 2))
    ctx = _FracContext(spec, theta)
    phis = (None,) + tuple(adj.phis)
    n = spec.widths[l]
    otd = np.zeros_like(project(phis[l + 1], n))
    dto = np.zeros_like(otd)
    for j in range(l + 1, L - 1):
        b = coeff_b(ctx.grid, j, l, spec.gamma)
        otd = otd + b * (project(phis[j + 1], n) - project(phis[j], n))
        dto = dto + ctx.A[j, l] * project(phis[j + 1], n)
    for j in range(l + 1, L):
        dto = dto - ctx.A[j - 1, l - 1] * project(phis[j], n)
    return otd, dto


def grads_fracdnn(spec, theta, traj, adj):
    '''Gradient of the objective terms behind phi^[L] with respect to every
    parameter of a Fractional-DNN.  The step-size derivatives include the
    dependence of every history coefficient a[k, j] on the grid.
    '''
    ctx = _FracContext(spec, theta)
    gamma = spec.gamma
    L = spec.depth
    dW = [None] * L
    db = [None] * (L - 1)
    dtau = np.zeros(L - 1)
    dW[L - 1] = _outer_sum(adj.phi(L), traj.states[L - 1])
    for l in range(L - 1):
        phi_next = adj.phi(l + 1)
        z = traj.pre[l]
        g = phi_next * smooth_relu_prime(z, spec.eta)
        dW[l] = ctx.scale[l] * _outer_sum(g, traj.states[l])
        db[l] = ctx.scale[l] * _sample_sum(g)
        dtau[l] = (gamma * ctx.c * theta.taus[l]**(gamma - 1)
                   * np.sum(smooth_relu(z, spec.eta) * phi_next))

    # Pairings <P y^[j+1] - P y^[j], phi^[k+1]> for j < k, summed over samples.
    pairing = np.zeros((L - 1, L - 1))
    for k in range(L - 1):
        n = spec.widths[k + 1]
        phi = adj.phi(k + 1)
        for j in range(k):
            diff = project(traj.states[j + 1], n) - project(traj.states[j], n)
            pairing[k, j] = np.sum(diff * phi)
    D = dcoeff_a_tensor(ctx.grid, gamma)
    dtau = dtau - np.einsum('lkj,kj->l', D, pairing)
    return Gradient(dW, db, dtau)


# Finite differences.
# .............................................................................

def fd_gradient(objective, theta, h_rel = 1e-6):
    '''Central finite-difference gradient of 'objective' at 'theta'.

    'theta' may be a Theta, in which case a Gradient is returned, or a number
    or array, in which case the result has the same shape.  Coordinate i uses
    the step h = h_rel * max(1, |theta_i|).  A step size tau below h gets the
    forward difference (J(tau + h) - J(tau)) / h, so no negative tau is
    evaluated.
    '''
    if isinstance(theta, Theta):
        x = theta.flatten()
        rebuild = theta.like
        first_tau = x.size - theta.taus.size
    else:
        x = np.array(theta, dtype = float)
        shape = x.shape
        x = x.reshape(-1)
        rebuild = (lambda v: float(v[0])) if shape == () else (lambda v: v.reshape(shape))
        first_tau = x.size

    def evaluate(v):
        value = objective(rebuild(v))
        if not np.isfinite(value):
            raise NonFiniteValue('objective returned {}'.format(value))
        return float(value)

    grad = np.zeros_like(x)
    for i in range(x.size):
        h = h_rel * max(1.0, abs(x[i]))
        plus = x.copy()
        minus = x.copy()
        plus[i] += h
        if i < first_tau or x[i] - h >= 0:
            minus[i] -= h
        grad[i] = (evaluate(plus) - evaluate(minus)) / (plus[i] - minus[i])

    if isinstance(theta, Theta):
        return Gradient.from_flat(theta, grad)
    return float(grad[0]) if np.ndim(theta) == 0 else grad.reshape(np.shape(theta))
