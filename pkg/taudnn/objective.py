'''
objective.py: loss, regularization and the bias-ordering penalty

The training objective is

    J(theta) = 1/(2N) sum_i |y^[L](u_i) - t_i|^2
               + lambda1/2 sum_l (|W^[l]|_2^2 + |W^[l]|_1 + |b^[l]|_2^2 + |b^[l]|_1)
               + lambda2/2 sum_l ((tau^[l])^2 + |tau^[l]|)
               + beta/2 sum_l sum_j max(0, b^[l]_j - b^[l]_{j+1})^2

where the last term is only present when bias ordering is switched on.  The
l1 parts use the subgradient with sign(0) = 0.

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
import numpy as np

from .adjoint import (Gradient, adjoint_resnet, grads_resnet, adjoint_fracdnn_dto,
                      adjoint_fracdnn_otd, grads_fracdnn)
from .core import Kind
from .debug import log
from .exceptions import ArgumentError, ShapeMismatch
from .networks import forward


# Configuration.
# .............................................................................

DEFAULT_BETA = 10.0

@dataclass(frozen = True)
class ObjectiveConfig:
    lambda1: float = 0.0
    lambda2: float = 0.0
    beta: float = DEFAULT_BETA
    bias_ordering: bool = False

    def __post_init__(self):
        for name in ['lambda1', 'lambda2', 'beta']:
            value = float(getattr(self, name))
            if not value >= 0:
                raise ArgumentError('{} must be non-negative, got {}'.format(name, value))
            object.__setattr__(self, name, value)
        object.__setattr__(self, 'bias_ordering', bool(self.bias_ordering))


@dataclass(frozen = True)
class ObjectiveParts:
    '''The separate terms of J.'''
    mse: float
    regularization: float
    penalty: float

    @property
    def total(self):
        return self.mse + self.regularization + self.penalty


# Terms.
# .............................................................................

def mse(preds, targets):
    '''Mean squared error 1/(2N) sum |pred_i - target_i|^2 over the rows.'''
    preds = np.array(preds, dtype = float, ndmin = 2)
    targets = np.array(targets, dtype = float, ndmin = 2)
    if preds.shape != targets.shape:
        raise ShapeMismatch('predictions {} and targets {} differ in shape'
                            .format(preds.shape, targets.shape))
    if preds.shape[0] < 1:
        raise ArgumentError('mse needs at least one sample')
    residual = preds - targets
    return 0.5 * float(np.sum(residual * residual)) / preds.shape[0]


def elastic_reg(theta, cfg):
    '''Elastic-net value and subgradient for W and b (weight lambda1) and
    the step sizes (weight lambda2).
    '''
    lam1, lam2 = cfg.lambda1, cfg.lambda2
    value = 0.0
    dW, db = [], []
    for W in theta.weights:
        value += 0.5 * lam1 * float(np.sum(W * W) + np.sum(np.abs(W)))
        dW.append(lam1 * W + 0.5 * lam1 * np.sign(W))
    for b in theta.biases:
        value += 0.5 * lam1 * float(np.sum(b * b) + np.sum(np.abs(b)))
        db.append(lam1 * b + 0.5 * lam1 * np.sign(b))
    taus = theta.taus
    value += 0.5 * lam2 * float(np.sum(taus * taus) + np.sum(np.abs(taus)))
    dtau = lam2 * taus + 0.5 * lam2 * np.sign(taus)
    return value, Gradient(dW, db, dtau)


def bias_order_penalty(theta, beta):
    '''Quadratic penalty on decreasing neighbours within each bias vector.'''
    value = 0.0
    db = []
    for b in theta.biases:
        violation = np.maximum(0.0, b[:-1] - b[1:])
        value += 0.5 * beta * float(np.sum(violation * violation))
        grad = np.zeros_like(b)
        grad[:-1] += beta * violation
        grad[1:] -= beta * violation
        db.append(grad)
    grad = Gradient.zeros_like(theta)
    return value, Gradient(grad.dW, db, grad.dtau)


# Assembly.
# .............................................................................

def _adjoint_path(spec, adjoint):
    if spec.kind in (Kind.FEEDFORWARD, Kind.RESNET):
        return adjoint_resnet, grads_resnet
    if spec.kind is Kind.FRACDNN:
        if adjoint == 'otd':
            return adjoint_fracdnn_otd, grads_fracdnn
        return adjoint_fracdnn_dto, grads_fracdnn
    raise ArgumentError('{} networks have no adjoint and cannot be trained'
                        .format(spec.kind.value))


def objective_parts(spec, theta, dataset, cfg):
    '''Evaluate the terms of J without computing a gradient.'''
    preds = forward(spec, theta, dataset.inputs).output
    reg, _ = elastic_reg(theta, cfg)
    penalty = bias_order_penalty(theta, cfg.beta)[0] if cfg.bias_ordering else 0.0
    return ObjectiveParts(mse(preds, dataset.targets), reg, penalty)


def objective_value(spec, theta, dataset, cfg):
    return objective_parts(spec, theta, dataset, cfg).total


def total_objective(spec, theta, dataset, cfg, adjoint = 'dto'):
    '''Return J and its gradient.  For Fractional-DNNs, 'adjoint' selects the
    discretize-then-optimize ('dto', exact) or optimize-then-discretize
    ('otd') adjoint system.
    '''
    solve, grads = _adjoint_path(spec, adjoint)
    traj = forward(spec, theta, dataset.inputs)
    residual = traj.output - dataset.targets
    N = residual.shape[0]
    value = mse(traj.output, dataset.targets)
    adj = solve(spec, theta, traj, residual / N)
    gradient = grads(spec, theta, traj, adj)
    reg, reg_grad = elastic_reg(theta, cfg)
    value += reg
    gradient = gradient + reg_grad
    if cfg.bias_ordering:
        penalty, penalty_grad = bias_order_penalty(theta, cfg.beta)
        value += penalty
        gradient = gradient + penalty_grad
    if __debug__: log('J = {!r} over {} samples', value, N)
    return value, gradient
