'''
__main__: main command-line interface to taudnn

taudnn trains deep networks whose per-layer step sizes are optimization
variables.  It is used as "taudnn COMMAND [options]" where COMMAND is one of
gen-data, train, compare, gradcheck, prune, diagnose and eval.  Run
"taudnn COMMAND -h" for the options of a command.

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
import plac
import sys

from taudnn import print_version
from taudnn.debug import set_debug, log
from taudnn.main_body import MainBody, EXIT_OK, EXIT_USAGE
from taudnn.maxwell_data import DEFAULT_SAMPLES, DEFAULT_SPLIT
from taudnn.ui import UI, alert


# Shared setup.
# ......................................................................

def _run(command, no_color, quiet, debug, **options):
    '''Set up the UI and debugging, then run 'command' in a MainBody.'''
    if debug != 'OUT':
        set_debug(debug)
        import faulthandler
        faulthandler.enable()
    UI(use_color = not no_color, be_quiet = quiet)
    if __debug__: log('running {} with {}', command, options)
    body = MainBody(command, options)
    body.run()
    if body.exception:
        from traceback import format_exception
        details = ''.join(format_exception(*body.exception))
        if __debug__: log('Exception: {}\n{}', str(body.exception[1]), details)
    return body.exit_code


def _usage(text, *args):
    UI.instance().alert(text, *args)
    return EXIT_USAGE


# Commands.
# ......................................................................

@plac.annotations(
    n        = ('number of samples to draw',                            'option', 'n', int),
    seed     = ('seed of the random source (default: 0)',               'option', 's', int),
    out      = ('output CSV file',                                      'option', 'o'),
    no_color = ('do not color-code terminal output',                    'flag',   'C'),
    quiet    = ('only print important diagnostic messages',             'flag',   'q'),
    debug    = ('write detailed trace to "OUT" ("-" means console)',    'option', '@'),
)

def gen_data(n = DEFAULT_SAMPLES, seed = 0, out = 'O', no_color = False,
             quiet = False, debug = 'OUT'):
    '''Sample the Maxwell training data and write it as CSV.'''
    if n < 1:
        return _usage('The number of samples must be at least 1, got {}', n)
    if seed < 0:
        return _usage('The seed must be non-negative')
    out = 'maxwell.csv' if out == 'O' else out
    return _run('gen-data', no_color, quiet, debug, n = n, seed = seed, out = out)


@plac.annotations(
    config   = ('run configuration file',                               'option', 'c'),
    out_dir  = ('output directory (default: from the config file)',    'option', 'd'),
    no_color = ('do not color-code terminal output',                    'flag',   'C'),
    quiet    = ('only print important diagnostic messages',             'flag',   'q'),
    debug    = ('write detailed trace to "OUT" ("-" means console)',    'option', '@'),
)

def train(config = 'F', out_dir = 'D', no_color = False, quiet = False, debug = 'OUT'):
    '''Train the network described by a run configuration.'''
    if config == 'F':
        return _usage('A configuration file is required (option -c)')
    out_dir = None if out_dir == 'D' else out_dir
    return _run('train', no_color, quiet, debug, config = config, out_dir = out_dir)


@plac.annotations(
    config   = ('run configuration file',                               'option', 'c'),
    out_dir  = ('output directory (default: from the config file)',    'option', 'd'),
    no_color = ('do not color-code terminal output',                    'flag',   'C'),
    quiet    = ('only print important diagnostic messages',             'flag',   'q'),
    debug    = ('write detailed trace to "OUT" ("-" means console)',    'option', '@'),
)

def compare(config = 'F', out_dir = 'D', no_color = False, quiet = False, debug = 'OUT'):
    '''Train with fixed and with trainable step sizes and compare the results.'''
    if config == 'F':
        return _usage('A configuration file is required (option -c)')
    out_dir = None if out_dir == 'D' else out_dir
    return _run('compare', no_color, quiet, debug, config = config, out_dir = out_dir)


@plac.annotations(
    arch     = ('architecture: feedforward, resnet or fracdnn',          'option', 'a'),
    gamma    = ('fractional order for fracdnn (default: 0.5)',          'option', 'g', float),
    seed     = ('seed of the random instance (default: 0)',             'option', 's', int),
    otd      = ('use the optimize-then-discretize adjoint (fracdnn)',   'flag',   'O'),
    no_color = ('do not color-code terminal output',                    'flag',   'C'),
    quiet    = ('only print important diagnostic messages',             'flag',   'q'),
    debug    = ('write detailed trace to "OUT" ("-" means console)',    'option', '@'),
)

def gradcheck(arch = 'resnet', gamma = 0.5, seed = 0, otd = False, no_color = False,
              quiet = False, debug = 'OUT'):
    '''Compare analytic and finite-difference gradients on a random network.'''
    if seed < 0:
        return _usage('The seed must be non-negative')
    return _run('gradcheck', no_color, quiet, debug, arch = arch, gamma = gamma,
                seed = seed, otd = otd)


@plac.annotations(
    checkpoint = ('checkpoint file of a trained network',               'option', 'k'),
    threshold  = ('remove layers with step size below this value',      'option', 't', float),
    data       = ('dataset CSV used for the before/after test error',   'option', 'd'),
    out        = ('file for the reduced checkpoint',                    'option', 'o'),
    split      = ('fraction of the data used for training',             'option', 'p', float),
    no_color   = ('do not color-code terminal output',                  'flag',   'C'),
    quiet      = ('only print important diagnostic messages',           'flag',   'q'),
    debug      = ('write detailed trace to "OUT" ("-" means console)',  'option', '@'),
)

def prune(checkpoint = 'K', threshold = 0.05, data = 'D', out = 'O', split = DEFAULT_SPLIT,
          no_color = False, quiet = False, debug = 'OUT'):
    '''Delete hidden layers whose learned step size is close to 0.'''
    if checkpoint == 'K' or data == 'D':
        return _usage('Both a checkpoint (-k) and a dataset (-d) are required')
    if threshold < 0:
        return _usage('The threshold must be non-negative')
    out = None if out == 'O' else out
    return _run('prune', no_color, quiet, debug, checkpoint = checkpoint,
                threshold = threshold, data = data, out = out, split = split)


@plac.annotations(
    checkpoint = ('checkpoint file of a network',                       'option', 'k'),
    data       = ('dataset CSV providing the sample inputs',            'option', 'd'),
    out        = ('output CSV file (default: gradflow.csv)',            'option', 'o'),
    samples    = ('number of samples to average over (default: 10)',    'option', 'n', int),
    no_color   = ('do not color-code terminal output',                  'flag',   'C'),
    quiet      = ('only print important diagnostic messages',           'flag',   'q'),
    debug      = ('write detailed trace to "OUT" ("-" means console)',  'option', '@'),
)

def diagnose(checkpoint = 'K', data = 'D', out = 'O', samples = 10, no_color = False,
             quiet = False, debug = 'OUT'):
    '''Report the layer-derivative norms of a network.'''
    if checkpoint == 'K' or data == 'D':
        return _usage('Both a checkpoint (-k) and a dataset (-d) are required')
    if samples < 1:
        return _usage('Need at least one sample')
    out = None if out == 'O' else out
    return _run('diagnose', no_color, quiet, debug, checkpoint = checkpoint,
                data = data, out = out, samples = samples)


@plac.annotations(
    checkpoint = ('checkpoint file of a network',                       'option', 'k'),
    data       = ('dataset CSV for the relative test error',            'option', 'd'),
    grid       = ('resolution of the extrapolation grid on the plane',  'option', 'g', int),
    cube       = ('number of refinement levels of the unit-cube error', 'option', 'c', int),
    out        = ('output CSV file for the grid or cube errors',        'option', 'o'),
    split      = ('fraction of the data used for training',             'option', 'p', float),
    no_color   = ('do not color-code terminal output',                  'flag',   'C'),
    quiet      = ('only print important diagnostic messages',           'flag',   'q'),
    debug      = ('write detailed trace to "OUT" ("-" means console)',  'option', '@'),
)

def evaluate(checkpoint = 'K', data = 'D', grid = 0, cube = 0, out = 'O', split = DEFAULT_SPLIT,
             no_color = False, quiet = False, debug = 'OUT'):
    '''Evaluate a network on test data, a grid or the unit cube.'''
    if checkpoint == 'K':
        return _usage('A checkpoint (-k) is required')
    if data == 'D' and not grid and not cube:
        return _usage('Give a dataset (-d), a grid resolution (-g) or cube levels (-c)')
    if grid and cube and out != 'O':
        return _usage('Options -g and -c cannot share one output file')
    if grid < 0 or grid == 1 or cube < 0:
        return _usage('The grid resolution must be at least 2 and the levels positive')
    return _run('eval', no_color, quiet, debug, checkpoint = checkpoint,
                data = None if data == 'D' else data, grid = grid, cube = cube,
                out = None if out == 'O' else out, split = split)


COMMANDS = OrderedDict([
    ('gen-data',  gen_data),
    ('train',     train),
    ('compare',   compare),
    ('gradcheck', gradcheck),
    ('prune',     prune),
    ('diagnose',  diagnose),
    ('eval',      evaluate),
])


# Main program.
# ......................................................................

def main(argv = None):
    '''Dispatch to the command named by the first argument and return the
    exit status.
    '''
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] in ['-V', '--version']:
        print_version()
        return EXIT_OK
    if not argv or argv[0] in ['-h', '--help']:
        print(__doc__.split('\n\n')[1])
        print('\nCommands: ' + ', '.join(COMMANDS))
        return EXIT_OK if argv else EXIT_USAGE
    command = COMMANDS.get(argv[0])
    if command is None:
        UI(use_color = False)
        alert('Unknown command "{}"; expected one of {}', argv[0], ', '.join(COMMANDS))
        return EXIT_USAGE
    try:
        return plac.call(command, argv[1:])
    except SystemExit as ex:
        # argparse exits with 2 on bad options and 0 after printing help.
        if ex.code is None:
            return EXIT_OK
        return ex.code if isinstance(ex.code, int) else EXIT_USAGE


def console_main():
    '''Entry point of the installed "taudnn" command.'''
    sys.exit(main())


# Main entry point.
# ......................................................................

# The following allows users to invoke this using "python3 -m taudnn".
if __name__ == '__main__':
    console_main()


# For Emacs users
# ......................................................................
# Local Variables:
# mode: python
# python-indent-offset: 4
# End:
