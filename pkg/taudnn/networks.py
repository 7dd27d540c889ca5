'''
networks.py: forward propagation with variable step sizes

Every forward function takes a NetworkSpec, a Theta and an input that is a
single sample (shape (n_0,)) or a batch (shape (N, n_0)), and returns the
full Trajectory y^[0] .. y^[L].  Hidden layers l = 1..L-1 are

  feedforward  y^[l] = tau^[l-1] s(z^[l-1])
  resnet       y^[l] = P y^[l-1] + tau^[l-1] s(z^[l-1])        (no skip into y^[1])
  densenet     y^[l] = sum_{i<l} P y^[i] + tau^[l-1] s(z^[l-1])
  fracdnn      y^[l] = P y^[l-1] - sum_{j<=l-2} a[l-1, j] (P y^[j+1] - P y^[j])
                       + Gamma(2-g) (tau^[l-1])^g s(z^[l-1])

with z^[l] = W^[l] y^[l] + b^[l], s the smoothed ReLU and P the projection
to the width of the layer being computed.  The output is y^[L] = W^[L-1] y^[L-1]
for every kind.  Constant step sizes give the classical fixed-step networks.

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

import numpy as np

from .activation import smooth_relu
from .core import Kind, Trajectory, project
from .debug import log
from .exceptions import ShapeMismatch
from .fractional import TauGrid, coeff_a_matrix, gamma_factor


# Helpers.
# .............................................................................

def _prepare(spec, theta, u):
    theta.check(spec)
    u = np.asarray(u, dtype = float)
    if u.ndim not in (1, 2) or u.shape[-1] != spec.widths[0]:
        raise ShapeMismatch('input must have {} entries per sample, got shape {}'
                            .format(spec.widths[0], u.shape))
    return u


def _pre_activation(theta, l, y):
    return y @ theta.weights[l].T + theta.biases[l]


def _finish(theta, states, pre):
    states.append(states[-1] @ theta.weights[-1].T)
    return Trajectory(tuple(states), tuple(pre))


# Forward passes.
# .............................................................................

def forward_feedforward(spec, theta, u):
    '''Forward pass of the feedforward network with step sizes.'''
    states = [_prepare(spec, theta, u)]
    pre = []
    for l in range(1, spec.depth):
        z = _pre_activation(theta, l - 1, states[-1])
        pre.append(z)
        states.append(theta.taus[l - 1] * smooth_relu(z, spec.eta))
    return _finish(theta, states, pre)


def forward_resnet(spec, theta, u):
    '''Forward pass of the ResNet with variable step sizes.'''
    states = [_prepare(spec, theta, u)]
    pre = []
    for l in range(1, spec.depth):
        z = _pre_activation(theta, l - 1, states[-1])
        pre.append(z)
        step = theta.taus[l - 1] * smooth_relu(z, spec.eta)
        if l == 1:
            states.append(step)
        else:
            states.append(project(states[-1], spec.widths[l]) + step)
    return _finish(theta, states, pre)


def forward_densenet(spec, theta, u):
    '''Forward pass of the DenseNet with variable step sizes.'''
    states = [_prepare(spec, theta, u)]
    pre = []
    for l in range(1, spec.depth):
        z = _pre_activation(theta, l - 1, states[-1])
        pre.append(z)
        y = theta.taus[l - 1] * smooth_relu(z, spec.eta)
        for prior in states:
            y = y + project(prior, spec.widths[l])
        states.append(y)
    return _finish(theta, states, pre)


def forward_fracdnn(spec, theta, u):
    '''Forward pass of the Fractional-DNN on the grid given by the step sizes.'''
    states = [_prepare(spec, theta, u)]
    pre = []
    gamma = spec.gamma
    A = coeff_a_matrix(TauGrid(theta.taus), gamma)
    scale = gamma_factor(gamma) * theta.taus**gamma
    for l in range(1, spec.depth):
        n = spec.widths[l]
        z = _pre_activation(theta, l - 1, states[-1])
        pre.append(z)
        y = project(states[l - 1], n) + scale[l - 1] * smooth_relu(z, spec.eta)
        for j in range(l - 1):
            y = y - A[l - 1, j] * (project(states[j + 1], n) - project(states[j], n))
        states.append(y)
    return _finish(theta, states, pre)


_FORWARDS = {
    Kind.FEEDFORWARD : forward_feedforward,
    Kind.RESNET      : forward_resnet,
    Kind.DENSENET    : forward_densenet,
    Kind.FRACDNN     : forward_fracdnn,
}


def forward(spec, theta, u):
    '''Run the forward pass for the architecture named in 'spec'.'''
    if __debug__: log('{} forward, widths {}', spec.kind.value, spec.widths)
    return _FORWARDS[spec.kind](spec, theta, u)


def predict(spec, theta, u):
    '''Return only the network output y^[L] for input 'u'.'''
    return forward(spec, theta, u).output
