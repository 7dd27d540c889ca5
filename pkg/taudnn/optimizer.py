'''
optimizer.py: steepest descent with backtracking and step-size clipping

Each step moves along the negative full-batch gradient.  Step sizes tau that
sit on a bound of the box tau_min <= tau <= tau_max with the gradient pushing
them outward are held fixed; the remaining coordinates form the direction d.
The trial point theta - alpha d is projected onto the box and accepted under
the Armijo condition

    J(theta') <= J(theta) - c alpha |d|^2.

Failed trials halve alpha (more generally, multiply it by 'shrink').  The
next step starts from the accepted length divided by 'shrink'.  When d is
zero the current point is stationary on the box and training stops.

A single trial keeps at least the fraction tau_keep of the distance between
each step size and its lower bound, so no step size reaches that bound in one
step.  (A ResNet whose first step size is 0 ignores its input.)

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

from .adjoint import Gradient
from .core import Kind, Theta, RngState, rng_uniform_array
from .debug import log
from .exceptions import ArgumentError, InvariantViolation, Stagnation
from .objective import ObjectiveConfig, objective_value, objective_parts, total_objective
from .record import StepRow, TrainRecord


# Global constants.
# .............................................................................

FRACDNN_TAU_MIN = 1e-6
'''Default lower bound on step sizes of Fractional-DNNs.'''

MAX_HALVINGS = 60

TAU_KEEP = 0.5
'''Fraction of the distance to the lower bound a step size keeps in one step.'''

INIT_RULES = ('he-uniform',)


# Configuration.
# .............................................................................

@dataclass(frozen = True)
class TrainConfig:
    max_steps: int = 1000
    armijo_c: float = 1e-4
    shrink: float = 0.5
    init_step: float = 1.0
    max_step: float = 1e4
    tau_min: float = None
    tau_max: float = 10.0
    seed: int = 0
    init_weight_scale: str = 'he-uniform'
    train_tau: bool = True
    warm_start: bool = True
    max_halvings: int = MAX_HALVINGS
    tau_keep: float = TAU_KEEP

    def __post_init__(self):
        if int(self.max_steps) < 0:
            raise ArgumentError('max_steps must be non-negative')
        if not 0 < self.shrink < 1:
            raise ArgumentError('shrink must lie in (0, 1)')
        if not 0 < self.armijo_c < 1:
            raise ArgumentError('armijo_c must lie in (0, 1)')
        if not 0 < self.init_step <= self.max_step:
            raise ArgumentError('need 0 < init_step <= max_step')
        if self.tau_min is not None and not self.tau_min >= 0:
            raise ArgumentError('tau_min must be non-negative')
        if not self.tau_max > (self.tau_min or 0.0):
            raise ArgumentError('tau_max must exceed tau_min')
        if self.init_weight_scale not in INIT_RULES:
            raise ArgumentError('unknown initialization rule "{}"'
                                .format(self.init_weight_scale))
        if int(self.max_halvings) < 1:
            raise ArgumentError('max_halvings must be at least 1')
        if not 0 <= self.tau_keep < 1:
            raise ArgumentError('tau_keep must lie in [0, 1)')
        RngState.from_seed(self.seed)

    def tau_bounds(self, spec):
        '''Lower and upper clipping bounds for the step sizes of 'spec'.'''
        low = self.tau_min
        if low is None:
            low = FRACDNN_TAU_MIN if spec.kind is Kind.FRACDNN else 0.0
        return low, self.tau_max


@dataclass(frozen = True)
class StepInfo:
    alpha: float
    J: float
    previous_J: float
    halvings: int
    gradient_norms: tuple
    converged: bool = False


# Line search.
# .............................................................................

class ArmijoSearch():
    '''Backtracking line search along a descent direction of a function of a
    flat parameter vector, with an optional projection of trial points.
    '''

    def __init__(self, c = 1e-4, shrink = 0.5, max_halvings = MAX_HALVINGS):
        self.c = c
        self.shrink = shrink
        self.max_halvings = max_halvings


    def search(self, fun, x, fx, g, alpha, project = None):
        '''Return (x_new, f_new, alpha, halvings) for the first trial length,
        starting at 'alpha', that passes the Armijo test.  Raises Stagnation
        when none does within max_halvings reductions.
        '''
        decrease = float(np.dot(g, g))
        for halvings in range(self.max_halvings + 1):
            trial = x - alpha * g
            if project is not None:
                trial = project(trial)
            f_trial = fun(trial)
            if __debug__: log('alpha = {!r}, J = {!r}', alpha, f_trial)
            if math.isfinite(f_trial) and f_trial <= fx - self.c * alpha * decrease:
                return trial, f_trial, alpha, halvings
            alpha *= self.shrink
        raise Stagnation('no acceptable step after {} reductions'.format(self.max_halvings))


# Exported functions.
# .............................................................................

def init_theta(spec, cfg, rng = None):
    '''Initial parameters: W^[l] uniform on (-s, s) with s = sqrt(2 / n_l),
    zero biases and unit step sizes.  The generator state defaults to one
    seeded with cfg.seed.
    '''
    state = rng if rng is not None else RngState.from_seed(cfg.seed)
    weights = []
    for l in range(spec.depth):
        s = math.sqrt(2.0 / spec.widths[l])
        W, state = rng_uniform_array(state, -s, s, spec.weight_shape(l))
        weights.append(W)
    biases = [np.zeros(spec.widths[l + 1]) for l in range(spec.depth - 1)]
    return Theta(weights, biases, np.ones(spec.n_taus))


def clip_taus(spec, theta, cfg):
    low, high = cfg.tau_bounds(spec)
    return theta.with_taus(np.clip(theta.taus, low, high))


def free_direction(spec, theta, gradient, cfg):
    '''The flat gradient with the entries of pinned step sizes set to 0.  A
    step size is pinned when it sits on a bound and its gradient entry points
    out of the box.'''
    g = gradient.flatten()
    low, high = cfg.tau_bounds(spec)
    taus = np.asarray(theta.taus)
    first_tau = g.size - taus.size
    g_tau = g[first_tau:]
    pinned = ((taus <= low) & (g_tau > 0)) | ((taus >= high) & (g_tau < 0))
    g[first_tau:] = np.where(pinned, 0.0, g_tau)
    return g


def descent_step(spec, theta, dataset, cfg, objcfg, value = None, gradient = None,
                 alpha = None):
    '''Take one projected steepest-descent step from 'theta'.  'value' and
    'gradient' may be passed in when already known at 'theta'; 'alpha' is the
    first trial length (default cfg.init_step).  When the direction is zero,
    'theta' itself comes back with info.converged set.
    '''
    if value is None or gradient is None:
        value, gradient = total_objective(spec, theta, dataset, objcfg)
    if not cfg.train_tau:
        gradient = gradient.without_tau()
    g = free_direction(spec, theta, gradient, cfg)
    norms = Gradient.from_flat(theta, g).block_norms()
    if not np.any(g):
        if __debug__: log('direction is zero at J = {!r}', value)
        return theta, StepInfo(cfg.init_step, value, value, 0, norms, converged = True)

    low, high = cfg.tau_bounds(spec)
    first_tau = g.size - theta.taus.size
    taus = np.asarray(theta.taus)
    floor = low + cfg.tau_keep * (taus - low)

    def project(v):
        v = v.copy()
        v[first_tau:] = np.clip(v[first_tau:], floor, high)
        return v

    def fun(v):
        return objective_value(spec, theta.like(v), dataset, objcfg)

    search = ArmijoSearch(cfg.armijo_c, cfg.shrink, cfg.max_halvings)
    start = cfg.init_step if alpha is None else alpha
    try:
        x, fx, accepted, halvings = search.search(fun, theta.flatten(), value, g,
                                                  start, project)
    except Stagnation as ex:
        raise Stagnation(str(ex), theta)
    return theta.like(x), StepInfo(accepted, fx, value, halvings, norms)


def train(spec, dataset, cfg, objcfg = None, theta = None, callback = None):
    '''Run up to cfg.max_steps descent steps from 'theta' (default: the
    initialization of init_theta) and return the final Theta and the
    TrainRecord.  The record's 'stopped' attribute tells why the run ended:
    'max_steps', 'converged' (the projected gradient vanished) or
    'stagnation' (the line search found no acceptable length).  'callback',
    if given, is called with each new StepRow.
    '''
    objcfg = objcfg or ObjectiveConfig()
    theta = clip_taus(spec, theta if theta is not None else init_theta(spec, cfg), cfg)
    value, gradient = total_objective(spec, theta, dataset, objcfg)
    if not math.isfinite(value):
        raise InvariantViolation('objective is not finite at the initial point')
    parts = objective_parts(spec, theta, dataset, objcfg)
    record = TrainRecord(spec.n_taus, initial_J = value, initial_mse = parts.mse)
    if __debug__: log('training {} {} for {} steps', spec.kind.value, spec.widths,
                      cfg.max_steps)

    alpha = cfg.init_step
    for step in range(1, cfg.max_steps + 1):
        try:
            new_theta, info = descent_step(spec, theta, dataset, cfg, objcfg,
                                           value, gradient, alpha)
        except Stagnation as ex:
            if __debug__: log('stopping at step {}: {}', step, str(ex))
            record.stopped = 'stagnation'
            break
        if info.converged:
            if __debug__: log('stationary point reached before step {}', step)
            record.stopped = 'converged'
            break
        theta = new_theta
        value, gradient = total_objective(spec, theta, dataset, objcfg)
        parts = objective_parts(spec, theta, dataset, objcfg)
        row = StepRow(step, value, parts.mse, info.alpha, tuple(float(t) for t in theta.taus),
                      *info.gradient_norms)
        record.append(row)
        if callback:
            callback(row)
        if cfg.warm_start:
            alpha = min(info.alpha / cfg.shrink, cfg.max_step)
    return theta, record
