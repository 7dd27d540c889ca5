'''
core.py: value types, layer projections and the seeded random source

A network with L layers has feature vectors y^[0] .. y^[L] of widths
n_0 .. n_L.  Its trainable parameters are the weights W^[l] (l = 0..L-1),
the biases b^[l] and the step sizes tau^[l] (l = 0..L-2); the last layer is
the linear map y^[L] = W^[L-1] y^[L-1].

States are numpy arrays holding either one sample, shape (n,), or a batch of
samples, shape (N, n).  Functions in this package apply their per-sample
formulas to every row of a batch.

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

from   dataclasses import dataclass, replace
from   enum import Enum
import math
import numpy as np

from .exceptions import ArgumentError, ShapeMismatch, InvariantViolation


# Global constants.
# .............................................................................

DEFAULT_ETA = 1e-4
'''Default width of the quadratic blend of the smoothed ReLU.'''

_MAX_SEED = 2**64


# Architecture kinds.
# .............................................................................

class Kind(Enum):
    FEEDFORWARD = 'feedforward'
    RESNET      = 'resnet'
    DENSENET    = 'densenet'
    FRACDNN     = 'fracdnn'

    @classmethod
    def from_name(cls, name):
        '''Return the Kind named by 'name', ignoring case, dashes and
        underscores.  Accepts the long form "fractionaldnn" as well.
        '''
        if isinstance(name, Kind):
            return name
        key = str(name).strip().lower().replace('-', '').replace('_', '')
        if key == 'fractionaldnn':
            key = 'fracdnn'
        for kind in cls:
            if kind.value == key:
                return kind
        raise ArgumentError('unknown architecture "{}"'.format(name))


# Value types.
# .............................................................................

def _frozen_array(values, dtype = float):
    arr = np.array(values, dtype = dtype)
    arr.flags.writeable = False
    return arr


@dataclass(frozen = True)
class NetworkSpec:
    '''Architecture kind, layer widths n_0..n_L, fractional order and the
    smoothing width of the activation.
    '''
    kind: Kind
    widths: tuple
    gamma: float = None
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        object.__setattr__(self, 'kind', Kind.from_name(self.kind))
        try:
            widths = tuple(int(w) for w in self.widths)
        except (TypeError, ValueError):
            raise ArgumentError('widths must be a list of integers')
        if len(widths) < 3:
            raise ArgumentError('a network needs at least 2 layers (3 widths)')
        if any(w < 1 for w in widths):
            raise ArgumentError('all widths must be at least 1')
        object.__setattr__(self, 'widths', widths)
        if self.kind is Kind.FRACDNN:
            if self.gamma is None or not 0 < float(self.gamma) < 1:
                raise ArgumentError('fracdnn needs a gamma in (0, 1)')
            object.__setattr__(self, 'gamma', float(self.gamma))
        elif self.gamma is not None:
            raise ArgumentError('gamma applies only to fracdnn networks')
        if not float(self.eta) > 0:
            raise ArgumentError('eta must be positive')
        object.__setattr__(self, 'eta', float(self.eta))


    @property
    def depth(self):
        '''The number of layers L.'''
        return len(self.widths) - 1


    @property
    def n_taus(self):
        return len(self.widths) - 2


    def weight_shape(self, l):
        return (self.widths[l + 1], self.widths[l])


    def with_widths(self, widths):
        return replace(self, widths = tuple(widths))


@dataclass(frozen = True)
class Theta:
    '''All trainables: weights W^[0..L-1], biases b^[0..L-2] and step
    sizes tau^[0..L-2].  The arrays are read-only.
    '''
    weights: tuple
    biases: tuple
    taus: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'weights', tuple(_frozen_array(w) for w in self.weights))
        object.__setattr__(self, 'biases', tuple(_frozen_array(b) for b in self.biases))
        object.__setattr__(self, 'taus', _frozen_array(self.taus).reshape(-1))


    def check(self, spec):
        '''Raise ShapeMismatch if the shapes do not fit 'spec', and
        InvariantViolation if a step size is not admissible.
        '''
        L = spec.depth
        if len(self.weights) != L or len(self.biases) != L - 1 or len(self.taus) != L - 1:
            raise ShapeMismatch('parameter count does not match a {}-layer network'.format(L))
        for l, W in enumerate(self.weights):
            if W.shape != spec.weight_shape(l):
                raise ShapeMismatch('W[{}] has shape {}, expected {}'
                                    .format(l, W.shape, spec.weight_shape(l)))
        for l, b in enumerate(self.biases):
            if b.shape != (spec.widths[l + 1],):
                raise ShapeMismatch('b[{}] has shape {}, expected ({},)'
                                    .format(l, b.shape, spec.widths[l + 1]))
        if not np.all(np.isfinite(self.taus)):
            raise InvariantViolation('step sizes must be finite')
        if spec.kind is Kind.FRACDNN:
            if np.any(self.taus <= 0):
                raise InvariantViolation('fracdnn step sizes must be positive')
        elif np.any(self.taus < 0):
            raise InvariantViolation('step sizes must be non-negative')


    @property
    def size(self):
        return (sum(W.size for W in self.weights) + sum(b.size for b in self.biases)
                + self.taus.size)


    def flatten(self):
        '''Return all parameters as one vector: every W row-major, then every
        b, then the step sizes.
        '''
        parts = [W.ravel() for W in self.weights] + [b for b in self.biases] + [self.taus]
        return np.concatenate(parts)


    def like(self, vector):
        '''Return a Theta with the shapes of this one and values from 'vector'
        (in the order used by flatten()).
        '''
        vector = np.asarray(vector, dtype = float)
        if vector.shape != (self.size,):
            raise ShapeMismatch('expected a vector of length {}'.format(self.size))
        pos = 0
        weights, biases = [], []
        for W in self.weights:
            weights.append(vector[pos:pos + W.size].reshape(W.shape))
            pos += W.size
        for b in self.biases:
            biases.append(vector[pos:pos + b.size])
            pos += b.size
        return Theta(weights, biases, vector[pos:])


    def with_taus(self, taus):
        return Theta(self.weights, self.biases, taus)


    def layer_vector(self, j):
        '''Flattened theta^[j] = (W^[j](:), b^[j], tau^[j]) for j <= L-2.'''
        return np.concatenate([self.weights[j].ravel(), self.biases[j], [self.taus[j]]])


@dataclass(frozen = True)
class Trajectory:
    '''Feature vectors y^[0..L] of one forward pass, plus the pre-activations
    z^[l] = W^[l] y^[l] + b^[l] for l = 0..L-2 that the adjoints reuse.
    '''
    states: tuple
    pre: tuple = ()

    @property
    def output(self):
        return self.states[-1]


@dataclass(frozen = True)
class Dataset:
    '''Paired inputs (N x n_0) and targets (N x n_L).'''
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        inputs = np.array(self.inputs, dtype = float, ndmin = 2)
        targets = np.array(self.targets, dtype = float, ndmin = 2)
        if inputs.ndim != 2 or targets.ndim != 2:
            raise ShapeMismatch('dataset arrays must be 2-dimensional')
        if inputs.shape[0] != targets.shape[0]:
            raise ShapeMismatch('inputs have {} rows but targets have {}'
                                .format(inputs.shape[0], targets.shape[0]))
        inputs.flags.writeable = False
        targets.flags.writeable = False
        object.__setattr__(self, 'inputs', inputs)
        object.__setattr__(self, 'targets', targets)


    def __len__(self):
        return self.inputs.shape[0]


    def rows(self, index):
        '''Return the Dataset made of the rows selected by 'index'.'''
        return Dataset(self.inputs[index], self.targets[index])


# Projections.
# .............................................................................

def project(v, to_width):
    '''Truncate or zero-pad the last axis of 'v' to 'to_width' entries.

    The map is linear, and its transpose is the projection back to the
    original width, so the same function serves the adjoint recursions.
    '''
    if to_width < 1:
        raise ArgumentError('projection width must be at least 1')
    v = np.asarray(v, dtype = float)
    width = v.shape[-1]
    if to_width == width:
        return v
    if to_width < width:
        return v[..., :to_width].copy()
    pad = np.zeros(v.shape[:-1] + (to_width - width,))
    return np.concatenate([v, pad], axis = -1)


# Counter-based random numbers.
# .............................................................................
# Each draw builds a Philox generator from (key, counter) and the returned
# state has the counter moved past every block the draw consumed.  A Philox
# block holds 4 64-bit words and each double uses one word.

@dataclass(frozen = True)
class RngState:
    key: int
    counter: int = 0

    @classmethod
    def from_seed(cls, seed):
        seed = int(seed)
        if not 0 <= seed < _MAX_SEED:
            raise ArgumentError('seed must be a 64-bit unsigned integer')
        return cls(key = seed, counter = 0)


def _generator(state):
    return np.random.Generator(np.random.Philox(key = state.key, counter = state.counter))


def _advanced(state, words):
    return replace(state, counter = state.counter + max(1, math.ceil(words / 4)))


def rng_uniform(state, lo = 0.0, hi = 1.0):
    '''Return a value drawn uniformly from [lo, hi) and the advanced state.'''
    if not lo < hi:
        raise ArgumentError('need lo < hi, got lo = {} and hi = {}'.format(lo, hi))
    value = lo + (hi - lo) * _generator(state).random()
    return float(min(value, np.nextafter(hi, lo))), _advanced(state, 1)


def rng_uniform_array(state, lo, hi, shape):
    '''Return an array of the given 'shape' with entries uniform on [lo, hi)
    and the advanced state.
    '''
    if not lo < hi:
        raise ArgumentError('need lo < hi, got lo = {} and hi = {}'.format(lo, hi))
    shape = (int(shape),) if np.isscalar(shape) else tuple(int(s) for s in shape)
    count = int(np.prod(shape)) if shape else 1
    values = lo + (hi - lo) * _generator(state).random(shape)
    values = np.minimum(values, np.nextafter(hi, lo))
    return values, _advanced(state, count)
