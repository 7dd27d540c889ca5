'''
exceptions.py: exceptions for this package

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

class UserCancelled(Exception):
    '''The user elected to cancel/quit the program.'''
    pass

class ArgumentError(ValueError):
    '''An argument is outside the range an operation accepts.'''
    pass

class ShapeMismatch(ArgumentError):
    '''Array shapes are inconsistent with each other or with a network spec.'''
    pass

class DomainError(ValueError):
    '''A special function was evaluated outside its supported domain.'''
    pass

class InvariantViolation(Exception):
    '''A value breaks a structural invariant, such as a non-positive step size.'''
    pass

class NonFiniteValue(ArithmeticError):
    '''A computation produced NaN or an infinity where a finite value is needed.'''
    pass

class Stagnation(Exception):
    '''The line search could not find an acceptable step.'''

    def __init__(self, message, theta = None):
        super().__init__(message)
        self.theta = theta

class PruneError(Exception):
    '''The requested network reduction cannot be carried out.'''
    pass

class ConfigError(Exception):
    '''Problem with a run configuration file or one of its values.'''
    pass

class CheckpointError(Exception):
    '''A checkpoint file is malformed or has an unsupported version.'''
    pass

class DataFormatError(Exception):
    '''A dataset file does not have the expected layout.'''
    pass

class InternalError(Exception):
    '''Unrecoverable problem involving taudnn itself.'''
    pass
