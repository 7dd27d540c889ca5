'''
checkpoint.py: plain-text network checkpoints

Layout:

    TAUDNN-CKPT v1
    architecture = resnet
    widths = 7, 10, 10, 3
    gamma = none
    eta = 0.0001
    W 0 10 7
    <70 values, one per line, row-major>
    ...
    b 0 10
    <10 values>
    ...
    tau 2
    <2 values>

Values are written with repr(), which round-trips float64 exactly, so
saving a loaded checkpoint reproduces the file byte for byte.

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

from .core import NetworkSpec, Theta
from .debug import log
from .exceptions import ArgumentError, CheckpointError, InvariantViolation


# Global constants.
# .............................................................................

MAGIC = 'TAUDNN-CKPT v1'

_SPEC_KEYS = ['architecture', 'widths', 'gamma', 'eta']


# Writing.
# .............................................................................

def checkpoint_text(spec, theta):
    '''Return the checkpoint of (spec, theta) as a string.'''
    theta.check(spec)
    lines = [MAGIC,
             'architecture = {}'.format(spec.kind.value),
             'widths = {}'.format(', '.join(str(w) for w in spec.widths)),
             'gamma = {}'.format('none' if spec.gamma is None else repr(spec.gamma)),
             'eta = {!r}'.format(spec.eta)]
    for l, W in enumerate(theta.weights):
        lines.append('W {} {} {}'.format(l, *W.shape))
        lines += [repr(float(v)) for v in W.ravel()]
    for l, b in enumerate(theta.biases):
        lines.append('b {} {}'.format(l, b.size))
        lines += [repr(float(v)) for v in b]
    lines.append('tau {}'.format(theta.taus.size))
    lines += [repr(float(v)) for v in theta.taus]
    return '\n'.join(lines) + '\n'


def save_checkpoint(dest, spec, theta):
    '''Write the checkpoint of (spec, theta) to the file 'dest'.'''
    with open(dest, 'w', newline = '') as f:
        f.write(checkpoint_text(spec, theta))
    if __debug__: log('wrote checkpoint {}', dest)


# Reading.
# .............................................................................

class _Lines():
    def __init__(self, text, source):
        self.lines = text.split('\n')
        if self.lines and self.lines[-1] == '':
            self.lines.pop()
        self.pos = 0
        self.source = source


    def next(self):
        if self.pos >= len(self.lines):
            raise CheckpointError('{} ends unexpectedly'.format(self.source))
        line = self.lines[self.pos]
        self.pos += 1
        return line


    def floats(self, count):
        try:
            return np.array([float(self.next()) for _ in range(count)])
        except ValueError as ex:
            raise CheckpointError('{}: {}'.format(self.source, ex))


    def header(self, name, index, dims):
        fields = self.next().split()
        try:
            numbers = [int(f) for f in fields[1:]]
        except ValueError:
            numbers = []
        expected = ([index] if index is not None else []) + list(dims)
        if not fields or fields[0] != name or numbers != expected:
            raise CheckpointError('{}: expected a block "{}" at line {}'
                                  .format(self.source, ' '.join([name] + [str(n) for n in expected]),
                                          self.pos))


def _spec_from(lines):
    values = {}
    for key in _SPEC_KEYS:
        name, sep, value = lines.next().partition('=')
        if not sep or name.strip() != key:
            raise CheckpointError('{}: expected "{} = ..." at line {}'
                                  .format(lines.source, key, lines.pos))
        values[key] = value.strip()
    try:
        gamma = None if values['gamma'] == 'none' else float(values['gamma'])
        widths = [int(w) for w in values['widths'].split(',')]
        return NetworkSpec(values['architecture'], widths, gamma, float(values['eta']))
    except (ArgumentError, ValueError) as ex:
        raise CheckpointError('{}: invalid network description: {}'.format(lines.source, ex))


def parse_checkpoint(text, source = 'checkpoint'):
    '''Return (spec, theta) from the checkpoint 'text'.'''
    lines = _Lines(text, source)
    first = lines.next() if lines.lines else ''
    if first != MAGIC:
        if first.startswith('TAUDNN-CKPT'):
            raise CheckpointError('{}: unsupported checkpoint version "{}"'.format(source, first))
        raise CheckpointError('{} is not a taudnn checkpoint'.format(source))
    spec = _spec_from(lines)
    weights, biases = [], []
    for l in range(spec.depth):
        rows, cols = spec.weight_shape(l)
        lines.header('W', l, (rows, cols))
        weights.append(lines.floats(rows * cols).reshape(rows, cols))
    for l in range(spec.depth - 1):
        lines.header('b', l, (spec.widths[l + 1],))
        biases.append(lines.floats(spec.widths[l + 1]))
    lines.header('tau', None, (spec.n_taus,))
    taus = lines.floats(spec.n_taus)
    if lines.pos != len(lines.lines):
        raise CheckpointError('{}: unexpected content after line {}'.format(source, lines.pos))
    theta = Theta(weights, biases, taus)
    try:
        theta.check(spec)
    except InvariantViolation as ex:
        raise CheckpointError('{}: {}'.format(source, ex))
    return spec, theta


def load_checkpoint(source):
    '''Read the checkpoint file 'source' and return (spec, theta).'''
    try:
        with open(source, 'r', newline = '') as f:
            text = f.read()
    except OSError as ex:
        raise CheckpointError('cannot read checkpoint {}: {}'.format(source, ex))
    if __debug__: log('reading checkpoint {}', source)
    return parse_checkpoint(text, source)
