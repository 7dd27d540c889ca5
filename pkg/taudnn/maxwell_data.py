'''
maxwell_data.py: synthetic data for the ill-posed Maxwell regression

The exact field on the cylinder  x1^2 + x2^2 <= 1, 0 <= x3 <= 1  is

    u(x)   = I1(r) e_theta,          e_theta = (-x2, x1, 0) / r,
    phi(x) = (x1^2 + x2^2 + 1) / 2,
    f(x)   = -(r I0(r) + phi(x) I1(r)) e_theta,

with r = sqrt(x1^2 + x2^2).  u is divergence free and u3 is identically 0.
At r = 0 both u and f take their limit value 0.  A network learns the map
(x, f(x), phi(x)) -> u(x), so inputs have 7 entries and targets 3.

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

import csv
import math
import numpy as np

from .core import Dataset, RngState, rng_uniform_array
from .debug import log
from .exceptions import ArgumentError, DataFormatError
from .networks import predict
from .special import bessel_i


# Global constants.
# .............................................................................

CSV_COLUMNS = ['x1', 'x2', 'x3', 'f1', 'f2', 'f3', 'phi', 'u1', 'u2', 'u3']

DEFAULT_SAMPLES = 12000
DEFAULT_SPLIT = 0.8

INPUT_WIDTH = 7
TARGET_WIDTH = 3


# Exact fields.
# .............................................................................

def _points(x):
    x = np.asarray(x, dtype = float)
    if x.shape[-1] != 3:
        raise ArgumentError('points must have 3 coordinates')
    return x


def _azimuthal(x, radial):
    '''radial(r) / r * (-x2, x1, 0), with the value 0 where r = 0.'''
    x1, x2 = x[..., 0], x[..., 1]
    r = np.hypot(x1, x2)
    safe = np.where(r > 0, r, 1.0)
    factor = np.where(r > 0, radial(r) / safe, 0.0)
    return np.stack([-x2 * factor, x1 * factor, np.zeros_like(r)], axis = -1)


def exact_u(x):
    '''Exact field u = I1(r) e_theta at the point(s) 'x'.'''
    return _azimuthal(_points(x), lambda r: bessel_i(1, r))


def exact_phi(x):
    '''Coefficient phi = (x1^2 + x2^2 + 1) / 2.'''
    x = _points(x)
    value = 0.5 * (x[..., 0]**2 + x[..., 1]**2 + 1.0)
    return float(value) if np.ndim(value) == 0 else value


def exact_f(x):
    '''Source term f = -(r I0(r) + phi I1(r)) e_theta.'''
    x = _points(x)
    phi = 0.5 * (x[..., 0]**2 + x[..., 1]**2 + 1.0)
    return _azimuthal(x, lambda r: -(r * bessel_i(0, r) + phi * bessel_i(1, r)))


# Sampling.
# .............................................................................

def sample_cylinder(n, seed):
    '''Return n points drawn uniformly from the unit-disk x [0, 1] cylinder.
    (x1, x2) come from rejection sampling of the square [-1, 1]^2.
    '''
    if int(n) < 1:
        raise ArgumentError('need at least one sample, got {}'.format(n))
    n = int(n)
    state = RngState.from_seed(seed)
    accepted = []
    count = 0
    while count < n:
        # pi/4 of the square lies in the disk; oversample to finish in one pass.
        batch = max(16, int(1.3 * (n - count)) + 8)
        pairs, state = rng_uniform_array(state, -1.0, 1.0, (batch, 2))
        inside = pairs[np.sum(pairs * pairs, axis = 1) <= 1.0]
        accepted.append(inside)
        count += inside.shape[0]
    disk = np.concatenate(accepted)[:n]
    heights, state = rng_uniform_array(state, 0.0, 1.0, (n,))
    if __debug__: log('sampled {} points with seed {}', n, seed)
    return np.column_stack([disk, heights])


def make_dataset(points):
    '''Dataset of inputs (x, f(x), phi(x)) and targets u(x) at 'points'.'''
    points = np.atleast_2d(_points(points))
    inputs = np.column_stack([points, exact_f(points), exact_phi(points)])
    return Dataset(inputs, exact_u(points))


def split_dataset(dataset, split = DEFAULT_SPLIT):
    '''Return (train, test): the first round(split * N) rows and the rest.'''
    if not 0 < split < 1:
        raise ArgumentError('split must lie in (0, 1), got {}'.format(split))
    cut = int(round(split * len(dataset)))
    return dataset.rows(slice(0, cut)), dataset.rows(slice(cut, None))


def gen_dataset(n = DEFAULT_SAMPLES, seed = 0, split = DEFAULT_SPLIT):
    '''Generate n samples and split them into training and test sets.'''
    if not 0 < split < 1:
        raise ArgumentError('split must lie in (0, 1), got {}'.format(split))
    return split_dataset(make_dataset(sample_cylinder(n, seed)), split)


def extrapolation_grid(resolution, cube = False):
    '''Regular grid of resolution^2 points on [-1, 1]^2 x {0.5}, or with
    cube = True, of resolution^3 points on [0, 1]^3.  The first coordinate
    varies slowest.
    '''
    if int(resolution) < 2:
        raise ArgumentError('grid resolution must be at least 2')
    resolution = int(resolution)
    if cube:
        axis = np.linspace(0.0, 1.0, resolution)
        mesh = np.meshgrid(axis, axis, axis, indexing = 'ij')
        return np.column_stack([m.ravel() for m in mesh])
    axis = np.linspace(-1.0, 1.0, resolution)
    mesh = np.meshgrid(axis, axis, indexing = 'ij')
    return np.column_stack([mesh[0].ravel(), mesh[1].ravel(),
                            np.full(resolution * resolution, 0.5)])


def inside_cylinder(points):
    '''Boolean mask of the points lying in the training cylinder.'''
    points = np.atleast_2d(_points(points))
    radial = points[:, 0]**2 + points[:, 1]**2
    return (radial <= 1.0) & (points[:, 2] >= 0.0) & (points[:, 2] <= 1.0)


# Evaluation.
# .............................................................................

def relative_errors(preds, targets):
    '''Return (global, mean): |P - T|_2 / |T|_2 over the whole matrices, and
    the mean over samples of |p_i - t_i| / |t_i| (samples with t_i = 0 are
    left out of the mean).
    '''
    preds = np.atleast_2d(np.asarray(preds, dtype = float))
    targets = np.atleast_2d(np.asarray(targets, dtype = float))
    diff = np.linalg.norm(preds - targets)
    scale = np.linalg.norm(targets)
    overall = float(diff / scale) if scale > 0 else math.inf
    rows = np.linalg.norm(targets, axis = 1)
    keep = rows > 0
    if not np.any(keep):
        return overall, math.inf
    per_sample = np.linalg.norm(preds - targets, axis = 1)[keep] / rows[keep]
    return overall, float(np.mean(per_sample))


def pointwise_errors(spec, theta, points):
    '''|u(x) - u_NN(x)| at every point.'''
    data = make_dataset(points)
    return np.linalg.norm(predict(spec, theta, data.inputs) - data.targets, axis = 1)


def max_abs_u3(spec, theta, points):
    '''Largest |u3| of the network prediction over 'points'; the exact u3
    vanishes, so this measures how far the network is from Gauss's law.
    '''
    data = make_dataset(points)
    return float(np.max(np.abs(predict(spec, theta, data.inputs)[:, 2])))


def cube_l2_errors(spec, theta, levels):
    '''L2 error |u - u_NN| over the unit cube (0, 1)^3 by the midpoint rule
    on cubes refined uniformly to h = 2^-k, k = 1..levels.  Returns a list of
    (k, h, number of cells, error).
    '''
    if int(levels) < 1:
        raise ArgumentError('need at least one refinement level')
    results = []
    for k in range(1, int(levels) + 1):
        m = 2**k
        h = 1.0 / m
        axis = (np.arange(m) + 0.5) * h
        mesh = np.meshgrid(axis, axis, axis, indexing = 'ij')
        mids = np.column_stack([g.ravel() for g in mesh])
        err = pointwise_errors(spec, theta, mids)
        results.append((k, h, m**3, math.sqrt(h**3 * float(np.sum(err * err)))))
        if __debug__: log('cube level {}: error {}', k, results[-1][3])
    return results


# File format.
# .............................................................................

def _format(value):
    return '{:.17g}'.format(value)


def write_dataset_csv(dest, dataset):
    '''Write 'dataset' (inputs of width 7, targets of width 3) as CSV.'''
    if dataset.inputs.shape[1] != INPUT_WIDTH or dataset.targets.shape[1] != TARGET_WIDTH:
        raise DataFormatError('only Maxwell datasets (7 inputs, 3 targets) can be written')
    with open(dest, 'w', newline = '') as f:
        sheet = csv.writer(f, delimiter = ',', lineterminator = '\n')
        sheet.writerow(CSV_COLUMNS)
        for row in np.hstack([dataset.inputs, dataset.targets]):
            sheet.writerow([_format(v) for v in row])
    if __debug__: log('wrote {} rows to {}', len(dataset), dest)


def read_dataset_csv(source):
    '''Read a dataset written by write_dataset_csv.'''
    with open(source, newline = '') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != CSV_COLUMNS:
            raise DataFormatError('{} does not start with the header {}'
                                  .format(source, ','.join(CSV_COLUMNS)))
        try:
            rows = [[float(v) for v in row] for row in reader if row]
        except ValueError as ex:
            raise DataFormatError('{}: {}'.format(source, ex))
    if not rows:
        raise DataFormatError('{} contains no data rows'.format(source))
    if any(len(row) != len(CSV_COLUMNS) for row in rows):
        raise DataFormatError('{} has rows with the wrong number of fields'.format(source))
    table = np.array(rows)
    if __debug__: log('read {} rows from {}', table.shape[0], source)
    return Dataset(table[:, :INPUT_WIDTH], table[:, INPUT_WIDTH:])
