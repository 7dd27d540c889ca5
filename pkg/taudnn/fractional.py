'''
fractional.py: L1 coefficients for Caputo derivatives on non-uniform grids

For a grid with step sizes tau[0..M-1] and partial sums
S(p, k) = tau[p] + ... + tau[k] (zero when p > k), the left-sided history
coefficients are

    a[k, j] = tau[k]^g / tau[j] * (S(j, k)^(1-g) - S(j+1, k)^(1-g)),

and the right-sided ones are

    b[j, l] = tau[l]^g / tau[j] * (S(l, j)^(1-g) - S(l, j-1)^(1-g)).

Both equal 1 on the diagonal.  On equidistant grids a[k, j] depends only on
k - j and equals (k-j+1)^(1-g) - (k-j)^(1-g); there a and b coincide.

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

from .exceptions import ArgumentError, InvariantViolation
from .special import gamma as gamma_fn


# Global constants.
# .............................................................................

MIN_TAU = 1e-10
'''Smallest step size a TauGrid accepts.'''


# Grid type.
# .............................................................................

@dataclass(frozen = True)
class TauGrid:
    '''Positive step sizes tau[0..M-1] of a time grid t_0 = 0 < t_1 < ...'''
    taus: np.ndarray

    def __post_init__(self):
        taus = np.array(self.taus, dtype = float).reshape(-1)
        if taus.size == 0:
            raise ArgumentError('a grid needs at least one step')
        if not np.all(np.isfinite(taus)) or np.any(taus < MIN_TAU):
            raise InvariantViolation('grid step sizes must be at least {}'.format(MIN_TAU))
        taus.flags.writeable = False
        prefix = np.concatenate([[0.0], np.cumsum(taus)])
        prefix.flags.writeable = False
        object.__setattr__(self, 'taus', taus)
        object.__setattr__(self, '_prefix', prefix)


    def __len__(self):
        return self.taus.size


    def span(self, p, k):
        '''S(p, k) = tau[p] + ... + tau[k], or 0 when p > k.'''
        if p > k:
            return 0.0
        if p == k:
            return float(self.taus[p])
        return float(self._prefix[k + 1] - self._prefix[p])


    def nodes(self):
        '''Time nodes t_0 .. t_M.'''
        return self._prefix.copy()


def gamma_factor(gamma):
    '''The constant Gamma(2 - gamma) scaling the activation of a Fractional-DNN.'''
    return gamma_fn(2.0 - gamma)


# Coefficients.
# .............................................................................

def _check_index(grid, *indices):
    for i in indices:
        if not 0 <= i < len(grid):
            raise ArgumentError('index {} is outside a grid of {} steps'.format(i, len(grid)))


def coeff_a(grid, l, j, gamma):
    '''History coefficient a[l, j] of the left-sided L1 scheme, j <= l.'''
    _check_index(grid, l, j)
    if j > l:
        raise ArgumentError('coeff_a needs j <= l, got l = {}, j = {}'.format(l, j))
    if j == l:
        return 1.0
    e = 1.0 - gamma
    taus = grid.taus
    return (taus[l]**gamma / taus[j]) * (grid.span(j, l)**e - grid.span(j + 1, l)**e)


def coeff_b(grid, j, l, gamma):
    '''Coefficient b[j, l] of the right-sided L1 scheme, l <= j.'''
    _check_index(grid, l, j)
    if l > j:
        raise ArgumentError('coeff_b needs l <= j, got j = {}, l = {}'.format(j, l))
    if j == l:
        return 1.0
    e = 1.0 - gamma
    taus = grid.taus
    return (taus[l]**gamma / taus[j]) * (grid.span(l, j)**e - grid.span(l, j - 1)**e)


def dcoeff_a_dtau(grid, k, j, l, gamma):
    '''Partial derivative of a[k, j] with respect to tau[l].'''
    _check_index(grid, k, j, l)
    if j > k:
        raise ArgumentError('dcoeff_a_dtau needs j <= k, got k = {}, j = {}'.format(k, j))
    if j == k or l < j or l > k:
        return 0.0
    e = 1.0 - gamma
    taus = grid.taus
    outer = grid.span(j, k)
    inner = grid.span(j + 1, k)
    scale = taus[k]**gamma / taus[j]
    if l == j:
        # tau[j] sits in the divisor and in the first partial sum only.
        return (-scale / taus[j] * (outer**e - inner**e)
                + scale * e * outer**(-gamma))
    sums = scale * e * (outer**(-gamma) - inner**(-gamma))
    if l == k:
        return gamma * taus[k]**(gamma - 1) / taus[j] * (outer**e - inner**e) + sums
    return sums


def coeff_a_matrix(grid, gamma):
    '''Return the lower triangular matrix A with A[k, j] = a[k, j].'''
    M = len(grid)
    A = np.zeros((M, M))
    for k in range(M):
        for j in range(k + 1):
            A[k, j] = coeff_a(grid, k, j, gamma)
    return A


def dcoeff_a_tensor(grid, gamma):
    '''Return D with D[l, k, j] = d a[k, j] / d tau[l].'''
    M = len(grid)
    D = np.zeros((M, M, M))
    for k in range(M):
        for j in range(k):
            for l in range(j, k + 1):
                D[l, k, j] = dcoeff_a_dtau(grid, k, j, l, gamma)
    return D


# Discrete Caputo derivatives.
# .............................................................................

def caputo_l1(values, grid, gamma, side = 'left'):
    '''Approximate the Caputo derivative of order 'gamma' of the grid function
    'values' = y(t_0) .. y(t_M).  The left-sided derivative is returned at
    t_1 .. t_M, the right-sided one at t_0 .. t_{M-1}.  The scheme is exact
    for piecewise linear y.
    '''
    values = np.asarray(values, dtype = float)
    M = len(grid)
    if values.shape != (M + 1,):
        raise ArgumentError('need {} values for a grid of {} steps, got {}'
                            .format(M + 1, M, values.shape[0] if values.ndim else 1))
    if side not in ('left', 'right'):
        raise ArgumentError('side must be "left" or "right", not "{}"'.format(side))
    e = 1.0 - gamma
    scale = 1.0 / gamma_factor(gamma)
    slopes = np.diff(values) / grid.taus
    out = np.zeros(M)
    if side == 'left':
        for l in range(M):
            weights = np.array([grid.span(j, l)**e - grid.span(j + 1, l)**e
                                for j in range(l + 1)])
            out[l] = scale * np.dot(weights, slopes[:l + 1])
    else:
        for l in range(M):
            weights = np.array([grid.span(l, j)**e - grid.span(l, j - 1)**e
                                for j in range(l, M)])
            out[l] = -scale * np.dot(weights, slopes[l:])
    return out
