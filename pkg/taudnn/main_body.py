'''
main_body.py: main body logic for the taudnn commands

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

from   collections import OrderedDict
import csv
from   dataclasses import replace
from   os import path
import sys

import numpy as np

from .adjoint import fd_gradient
from .checkpoint import load_checkpoint, save_checkpoint
from .config import load_run_config
from .core import Dataset, Kind, NetworkSpec, RngState, Theta, rng_uniform_array
from .debug import log
from .diagnostics import example65_closed_form, gradflow_report, layer_derivative, prune
from .exceptions import *
from .files import ensure_directory, readable, rename_existing, writable
from .maxwell_data import (cube_l2_errors, extrapolation_grid, inside_cylinder,
                           make_dataset, max_abs_u3, pointwise_errors, read_dataset_csv,
                           relative_errors, sample_cylinder, split_dataset, write_dataset_csv)
from .networks import predict
from .objective import ObjectiveConfig, objective_value, total_objective
from .optimizer import train
from .ui import inform, progress, warn, alert_fatal


# Global constants.
# .............................................................................

EXIT_OK        = 0
EXIT_ERROR     = 1
EXIT_USAGE     = 2
EXIT_GRADCHECK = 3

GRADCHECK_TOL = 1e-6
CLOSED_FORM_TOL = 1e-12
TAU_CANDIDATE = 0.05
PROGRESS_EVERY = 100

CHECKPOINT_FILE = 'checkpoint.txt'
METRICS_FILE = 'metrics.csv'

# The order of the entries determines the order of the columns written.

GRADFLOW_COLUMNS = OrderedDict([
    ('layer',          lambda row: row.layer),
    ('norm',           lambda row: repr(row.norm)),
    ('classification', lambda row: row.classification),
])

GRID_COLUMNS = OrderedDict([
    ('x1',  lambda point, err: repr(float(point[0]))),
    ('x2',  lambda point, err: repr(float(point[1]))),
    ('x3',  lambda point, err: repr(float(point[2]))),
    ('err', lambda point, err: repr(float(err))),
])

CUBE_COLUMNS = OrderedDict([
    ('level',    lambda level, h, points, error: level),
    ('h',        lambda level, h, points, error: repr(h)),
    ('points',   lambda level, h, points, error: points),
    ('l2_error', lambda level, h, points, error: repr(error)),
])


# Class definitions.
# .............................................................................

class MainBody(object):
    '''Main body of taudnn: runs one command with its options.'''

    def __init__(self, command, options):
        # Callers inspect "exception" and "exit_code" after run() returns.
        self.exception = None
        self.exit_code = EXIT_OK
        self._command = command
        self._options = options


    def run(self):
        '''Run the command.  Exceptions are reported to the user and kept in
        self.exception; they are not propagated.
        '''
        if __debug__: log('starting {}', self._command)
        worker = getattr(self, '_do_' + self._command.replace('-', '_'), None)
        if worker is None:
            raise InternalError('unknown command "{}"'.format(self._command))
        try:
            self.exit_code = worker(**self._options)
        except (KeyboardInterrupt, UserCancelled) as ex:
            if __debug__: log('got {} exception', type(ex).__name__)
            inform('User cancelled operation -- stopping.')
            self.exit_code = EXIT_ERROR
        except Exception as ex:
            if __debug__: log('exception in main body: {}', str(ex))
            self.exception = sys.exc_info()
            self.exit_code = EXIT_ERROR
            alert_fatal('Error: {}', type(ex).__name__, details = str(ex))
        if __debug__: log('finished {} with exit code {}', self._command, self.exit_code)
        return self.exit_code


    # Commands ----------------------------------------------------------------

    def _do_gen_data(self, n, seed, out):
        if not writable(out):
            raise ArgumentError('cannot write to {}'.format(out))
        inform('Generating {} samples with seed {} ...', n, seed)
        data = make_dataset(sample_cylinder(n, seed))
        rename_existing(out)
        write_dataset_csv(out, data)
        inform('Wrote {} rows to {}', len(data), out)
        return EXIT_OK


    def _do_train(self, config, out_dir):
        run = load_run_config(config, out_dir)
        train_set, test_set = self._dataset_for(run)
        ensure_directory(run.out_dir)
        inform('Training {} network {} on {} samples ...', run.spec.kind.value,
               list(run.spec.widths), len(train_set))
        theta, record = train(run.spec, train_set, run.training, run.objective,
                              callback = _report_step)
        self._save_run(run, theta, record, run.out_dir)
        if record.stopped == 'stagnation':
            warn('Line search stagnated after {} steps', len(record))
        elif record.stopped == 'converged':
            inform('Reached a stationary point after {} steps', len(record))
        self._summarize(run.spec, theta, train_set, test_set)
        _summarize_taus(theta)
        return EXIT_OK


    def _do_compare(self, config, out_dir):
        run = load_run_config(config, out_dir)
        train_set, test_set = self._dataset_for(run)
        ensure_directory(run.out_dir)
        results = {}
        for label, train_tau in [('fixed', False), ('variable', True)]:
            cfg = replace(run.training, train_tau = train_tau)
            inform('Training with {} step sizes ...', label)
            theta, record = train(run.spec, train_set, cfg, run.objective)
            dest = path.join(run.out_dir, 'metrics_{}.csv'.format(label))
            rename_existing(dest)
            record.write_csv(dest)
            mse = objective_value(run.spec, theta, train_set, ObjectiveConfig())
            results[label] = (mse, theta)
            inform('{} tau: final training MSE {!r}', label, mse)
        inform('Learned step sizes: {}', _tau_text(results['variable'][1].taus))
        if results['variable'][0] <= results['fixed'][0]:
            inform('Variable step sizes reached the lower training MSE.')
        else:
            warn('Fixed step sizes reached the lower training MSE.')
        return EXIT_OK


    def _do_gradcheck(self, arch, gamma, seed, otd):
        spec, theta, data = gradcheck_instance(arch, gamma, seed)
        objcfg = ObjectiveConfig()
        adjoint = 'otd' if otd else 'dto'
        if otd and spec.kind is not Kind.FRACDNN:
            raise ArgumentError('the optimize-then-discretize adjoint exists only for fracdnn')
        _, analytic = total_objective(spec, theta, data, objcfg, adjoint)
        numeric = fd_gradient(lambda t: objective_value(spec, t, data, objcfg), theta)
        errors = gradient_errors(analytic, numeric)
        for block, error in errors.items():
            inform('{:>3} block: max relative error {:.3e}', block, error)
        if max(errors.values()) <= GRADCHECK_TOL:
            inform('PASS ({} adjoint, {})', adjoint, spec.kind.value)
            return EXIT_OK
        warn('FAIL ({} adjoint, {}): errors exceed {}', adjoint, spec.kind.value, GRADCHECK_TOL)
        return EXIT_GRADCHECK


    def _do_prune(self, checkpoint, threshold, data, out, split):
        spec, theta = load_checkpoint(checkpoint)
        _, test_set = split_dataset(_read_data(data), split)
        before = relative_errors(predict(spec, theta, test_set.inputs), test_set.targets)[0]
        new_spec, new_theta = prune(spec, theta, threshold)
        removed = len(spec.widths) - len(new_spec.widths)
        if removed == 0:
            inform('No layer has a step size below {}', threshold)
        else:
            inform('Removed {} hidden layer(s): widths {} -> {}', removed,
                   list(spec.widths), list(new_spec.widths))
        after = relative_errors(predict(new_spec, new_theta, test_set.inputs),
                                test_set.targets)[0]
        inform('Relative test error before {!r}, after {!r}', before, after)
        out = out or path.join(path.dirname(checkpoint), 'pruned_' + CHECKPOINT_FILE)
        rename_existing(out)
        save_checkpoint(out, new_spec, new_theta)
        inform('Wrote reduced network to {}', out)
        return EXIT_OK


    def _do_diagnose(self, checkpoint, data, out, samples):
        spec, theta = load_checkpoint(checkpoint)
        inputs = _read_data(data).inputs[:samples]
        report = gradflow_report(spec, theta, inputs)
        out = out or 'gradflow.csv'
        rename_existing(out)
        with open(out, 'w', newline = '') as f:
            sheet = csv.writer(f, delimiter = ',', lineterminator = '\n')
            sheet.writerow(GRADFLOW_COLUMNS.keys())
            for row in report.layers:
                sheet.writerow([value(row) for value in GRADFLOW_COLUMNS.values()])
        for row in report.layers:
            inform('layer {:>3}: {:.3e} {}', row.layer, row.norm, row.classification)
        inform('Wrote gradient-flow report to {}', out)
        if spec.depth >= 4:
            status, error = closed_form_check(spec, theta, inputs[0])
            inform('Closed-form check of d y[3] / d theta[0]: {} (relative difference {:.3e})',
                   status, error)
        return EXIT_OK


    def _do_eval(self, checkpoint, data, grid, cube, out, split):
        spec, theta = load_checkpoint(checkpoint)
        if data:
            _, test_set = split_dataset(_read_data(data), split)
            overall, mean = relative_errors(predict(spec, theta, test_set.inputs),
                                            test_set.targets)
            inform('Relative test error {!r} (mean per sample {!r})', overall, mean)
        if grid:
            points = extrapolation_grid(grid)
            errors = pointwise_errors(spec, theta, points)
            out_grid = out or 'grid_errors.csv'
            _write_rows(out_grid, GRID_COLUMNS, zip(points, errors))
            inform('Wrote {} grid points to {}', len(points), out_grid)
            inside = points[inside_cylinder(points)]
            if len(inside):
                inform('Largest |u3| of the network inside the cylinder: {!r}',
                       max_abs_u3(spec, theta, inside))
        if cube:
            results = cube_l2_errors(spec, theta, cube)
            out_cube = out or 'cube_errors.csv'
            _write_rows(out_cube, CUBE_COLUMNS, results)
            for level, h, points, error in results:
                inform('h = {}: L2 error {!r}', h, error)
            inform('Wrote cube errors to {}', out_cube)
        return EXIT_OK


    # Helpers -----------------------------------------------------------------

    def _dataset_for(self, run):
        if not run.dataset:
            raise ConfigError('the configuration does not name a dataset')
        return split_dataset(_read_data(run.dataset), run.split)


    def _save_run(self, run, theta, record, out_dir):
        ckpt = path.join(out_dir, CHECKPOINT_FILE)
        metrics = path.join(out_dir, METRICS_FILE)
        rename_existing(ckpt)
        rename_existing(metrics)
        save_checkpoint(ckpt, run.spec, theta)
        record.write_csv(metrics)
        inform('Wrote {} and {}', ckpt, metrics)


    def _summarize(self, spec, theta, train_set, test_set):
        train_mse = objective_value(spec, theta, train_set, ObjectiveConfig())
        overall, mean = relative_errors(predict(spec, theta, test_set.inputs),
                                        test_set.targets)
        inform('Final training MSE {!r}; relative test error {!r} (mean per sample {!r})',
               train_mse, overall, mean)


# Miscellaneous utility functions
# .............................................................................

def gradcheck_instance(arch, gamma, seed):
    '''Random small network, parameters and 3-sample dataset for gradient
    checks.  Step sizes lie in [0.5, 1.5) so fracdnn grids are not equidistant.
    '''
    kind = Kind.from_name(arch)
    if kind is Kind.DENSENET:
        raise ArgumentError('densenet networks have no adjoint to check')
    widths = (3, 5, 5, 4, 2)
    spec = NetworkSpec(kind, widths, gamma if kind is Kind.FRACDNN else None, eta = 0.1)
    state = RngState.from_seed(seed)
    weights, biases = [], []
    for l in range(spec.depth):
        W, state = rng_uniform_array(state, -0.8, 0.8, spec.weight_shape(l))
        weights.append(W)
    for l in range(spec.depth - 1):
        b, state = rng_uniform_array(state, -0.3, 0.3, widths[l + 1])
        biases.append(b)
    taus, state = rng_uniform_array(state, 0.5, 1.5, spec.n_taus)
    inputs, state = rng_uniform_array(state, -1.0, 1.0, (3, widths[0]))
    targets, state = rng_uniform_array(state, -1.0, 1.0, (3, widths[-1]))
    return spec, Theta(weights, biases, taus), Dataset(inputs, targets)


def gradient_errors(analytic, numeric):
    '''Max relative error per block: max |g - fd| / max |fd|.'''
    pairs = OrderedDict([('W', (analytic.dW, numeric.dW)),
                         ('b', (analytic.db, numeric.db)),
                         ('tau', ([analytic.dtau], [numeric.dtau]))])
    errors = OrderedDict()
    for block, (left, right) in pairs.items():
        g = np.concatenate([np.ravel(x) for x in left])
        fd = np.concatenate([np.ravel(x) for x in right])
        scale = np.max(np.abs(fd))
        errors[block] = float(np.max(np.abs(g - fd)) / scale) if scale > 0 else float(np.max(np.abs(g)))
    return errors


def closed_form_check(spec, theta, u):
    '''Compare the closed form of d y^[3] / d theta^[0] with the recursion.'''
    recursion = layer_derivative(spec, theta, u, 0, 3)
    closed = example65_closed_form(spec, theta, u)
    scale = np.max(np.abs(recursion))
    error = float(np.max(np.abs(closed - recursion)) / scale) if scale > 0 else 0.0
    return ('PASS' if error <= CLOSED_FORM_TOL else 'FAIL'), error


def _read_data(data):
    if not data or not readable(data):
        raise DataFormatError('cannot read dataset {}'.format(data))
    return read_dataset_csv(data)


def _write_rows(dest, columns, rows):
    rename_existing(dest)
    with open(dest, 'w', newline = '') as f:
        sheet = csv.writer(f, delimiter = ',', lineterminator = '\n')
        sheet.writerow(columns.keys())
        for row in rows:
            sheet.writerow([value(*row) for value in columns.values()])


def _report_step(row):
    if row.step % PROGRESS_EVERY == 0:
        progress('step {:>5}: J = {:.6e}, alpha = {:.3e}', row.step, row.J, row.alpha)


def _tau_text(taus):
    return ', '.join('{:.4g}'.format(t) for t in taus)


def _summarize_taus(theta):
    inform('Learned step sizes: {}', _tau_text(theta.taus))
    small = [l for l, t in enumerate(theta.taus) if t < TAU_CANDIDATE]
    if small:
        inform('Step sizes below {} (pruning candidates): {}', TAU_CANDIDATE,
               ', '.join('tau_{}'.format(l) for l in small))
