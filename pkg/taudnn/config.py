'''
config.py: run configuration files

A run configuration is an INI file with the sections [network],
[objective], [training] and [data].  Every key is optional except the
architecture and the layer widths (given either as 'widths' or as
'hidden_layers' plus 'hidden_width' for the 7-to-3 Maxwell map).

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

import configparser
from   dataclasses import dataclass
from   os import path

from .core import DEFAULT_ETA, Kind, NetworkSpec
from .debug import log
from .exceptions import ArgumentError, ConfigError
from .files import readable
from .maxwell_data import DEFAULT_SPLIT, INPUT_WIDTH, TARGET_WIDTH
from .objective import ObjectiveConfig
from .optimizer import TrainConfig


# Global constants.
# .............................................................................

_KEYS = {
    'network'   : {'architecture', 'widths', 'hidden_layers', 'hidden_width',
                   'gamma', 'eta'},
    'objective' : {'lambda1', 'lambda2', 'beta', 'bias_ordering'},
    'training'  : {'max_steps', 'seed', 'tau_min', 'tau_max', 'train_tau',
                   'armijo_c', 'shrink', 'init_step', 'tau_keep'},
    'data'      : {'dataset', 'split', 'out_dir'},
}
'''Sections and the keys each of them accepts.'''

_INTEGERS = {'max_steps', 'seed', 'hidden_layers', 'hidden_width'}
_BOOLEANS = {'bias_ordering', 'train_tau'}


# Class definitions.
# .............................................................................

@dataclass(frozen = True)
class RunConfig:
    spec: NetworkSpec
    objective: ObjectiveConfig
    training: TrainConfig
    dataset: str = None
    split: float = DEFAULT_SPLIT
    out_dir: str = '.'


# Exported functions.
# .............................................................................

def load_run_config(config_file, out_dir = None):
    '''Read and validate the run configuration in 'config_file'.  Relative
    paths in the [data] section are taken relative to the file's directory.
    A non-empty 'out_dir' replaces the one in the file.
    '''
    if not readable(config_file):
        raise ConfigError('cannot read config file {}'.format(config_file))
    parser = configparser.ConfigParser(inline_comment_prefixes = ('#', ';'))
    try:
        with open(config_file, 'r') as f:
            parser.read_file(f)
    except configparser.Error as ex:
        raise ConfigError('{}: {}'.format(config_file, ex))
    if __debug__: log('read config file {}', config_file)
    values = _values(parser)
    base = path.dirname(path.abspath(config_file))

    if 'widths' in values and 'hidden_layers' in values:
        raise ConfigError('give either widths or hidden_layers, not both')
    spec = _make(NetworkSpec, _spec_args(values))
    objective = _make(ObjectiveConfig, {k: values[k] for k in _KEYS['objective']
                                        if k in values})
    training = _make(TrainConfig, {k: values[k] for k in _KEYS['training']
                                   if k in values})
    if spec.kind is Kind.DENSENET:
        raise ConfigError('densenet networks have no adjoint and cannot be trained')
    low, _ = training.tau_bounds(spec)
    if spec.kind is Kind.FRACDNN and not low > 0:
        raise ConfigError('tau_min must be positive for fracdnn networks')

    split = values.get('split', DEFAULT_SPLIT)
    if not 0 < split < 1:
        raise ConfigError('split must lie in (0, 1), got {}'.format(split))
    dataset = values.get('dataset')
    if dataset:
        dataset = path.join(base, dataset)
    dest = out_dir or values.get('out_dir') or '.'
    if not out_dir:
        dest = path.join(base, dest)
    return RunConfig(spec, objective, training, dataset, split, path.normpath(dest))


# Helpers.
# .............................................................................

def _values(parser):
    values = {}
    for section in parser.sections():
        if section not in _KEYS:
            raise ConfigError('unknown section [{}]'.format(section))
        for key, text in parser.items(section):
            if key not in _KEYS[section]:
                raise ConfigError('unknown key "{}" in section [{}]'.format(key, section))
            values[key] = _convert(parser, section, key, text)
    if 'architecture' not in values:
        raise ConfigError('the [network] section must name an architecture')
    return values


def _convert(parser, section, key, text):
    try:
        if key in _BOOLEANS:
            return parser.getboolean(section, key)
        if key in _INTEGERS:
            return int(text)
        if key == 'widths':
            return tuple(int(w) for w in text.replace(',', ' ').split())
        if key in ('architecture', 'dataset', 'out_dir'):
            return text.strip()
        return float(text)
    except ValueError:
        raise ConfigError('cannot parse the value "{}" of key "{}"'.format(text, key))


def _spec_args(values):
    if 'widths' in values:
        widths = values['widths']
    elif 'hidden_layers' in values and 'hidden_width' in values:
        widths = ((INPUT_WIDTH,) + (values['hidden_width'],) * values['hidden_layers']
                  + (TARGET_WIDTH,))
    else:
        raise ConfigError('the [network] section needs widths, or hidden_layers'
                          ' and hidden_width')
    try:
        kind = Kind.from_name(values['architecture'])
    except ArgumentError as ex:
        raise ConfigError(str(ex))
    return {'kind': kind, 'widths': widths, 'gamma': values.get('gamma'),
            'eta': values.get('eta', DEFAULT_ETA)}


def _make(cls, args):
    try:
        return cls(**args)
    except ArgumentError as ex:
        raise ConfigError('invalid configuration: {}'.format(ex))
