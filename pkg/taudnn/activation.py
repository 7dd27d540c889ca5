'''
activation.py: the smoothed ReLU and its derivative

sigma(y) = max(0, y) outside [-eta, eta], and the quadratic
y^2/(4 eta) + y/2 + eta/4 inside it.  Values and first derivatives of the
pieces agree at y = -eta and y = eta.

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

from .core import DEFAULT_ETA


def smooth_relu(y, eta = DEFAULT_ETA):
    '''Apply the smoothed ReLU componentwise to 'y'.'''
    scalar = np.ndim(y) == 0
    y = np.asarray(y, dtype = float)
    blend = y * y / (4.0 * eta) + 0.5 * y + 0.25 * eta
    out = np.where(y > eta, y, np.where(y < -eta, 0.0, blend))
    return float(out) if scalar else out


def smooth_relu_prime(y, eta = DEFAULT_ETA):
    '''Derivative of smooth_relu, componentwise.'''
    scalar = np.ndim(y) == 0
    y = np.asarray(y, dtype = float)
    blend = y / (2.0 * eta) + 0.5
    out = np.where(y > eta, 1.0, np.where(y < -eta, 0.0, blend))
    return float(out) if scalar else out
