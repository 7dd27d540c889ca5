'''
ui.py: user interface

The library modules of taudnn never print.  Everything the user sees goes
through the functions below, which delegate to a single UI object created by
the command-line entry point.  The object decides about color and about
whether informational messages are shown at all.

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

import sys

from .debug import log
from .styled import Styled


# Exported functions
# .............................................................................
# These get the UI instance by themselves, so callers can use them much like
# they would use print().

def inform(text, *args):
    '''Print an informational message to the user.  The 'text' can contain
    string format placeholders such as "{}", and the additional arguments in
    args are values to use in those placeholders.
    '''
    UI.instance().inform(text, *args)


def progress(text, *args):
    '''Print a line of progress output, e.g. one step of a training run.'''
    UI.instance().progress(text, *args)


def warn(text, *args):
    '''Warn the user that something is not right but work can continue.'''
    UI.instance().warn(text, *args)


def alert(text, *args):
    '''Alert the user to an error that prevents normal execution.'''
    UI.instance().alert(text, *args)


def alert_fatal(text, *args, **kwargs):
    '''Print a message reporting a fatal error.  The keyword argument
    'details' can carry a longer explanation printed after the message.
    '''
    UI.instance().alert_fatal(text, *args, **kwargs)


# Exported classes.
# .............................................................................
# UI is a singleton: UI(...) and UI.instance() return the same object, and
# each call to UI(...) applies the settings it is given.

class UI(Styled):
    '''Command-line user interface.'''

    __instance = None

    def __new__(cls, *args, **kwargs):
        if cls.__instance is None:
            cls.__instance = super().__new__(cls)
        return cls.__instance


    def __init__(self, use_color = True, be_quiet = False):
        Styled.__init__(self, use_color = use_color)
        self._be_quiet = be_quiet


    @classmethod
    def instance(cls):
        '''Return the UI object, creating a plain uncolored one if the program
        has not set one up (for example when the library is used from Python).
        '''
        if cls.__instance is None:
            UI(use_color = False)
        return cls.__instance


    @classmethod
    def reset(cls):
        '''Forget the current instance so the next UI(...) builds a new one.'''
        cls.__instance = None


    def inform(self, text, *args):
        '''Print an informational message.'''
        if __debug__: log(text, *args)
        if not self._be_quiet:
            print(self.info_text(text, *args), flush = True)


    def progress(self, text, *args):
        '''Print a progress line.'''
        if __debug__: log(text, *args)
        if not self._be_quiet:
            print(self.progress_text(text, *args), flush = True)


    def warn(self, text, *args):
        '''Print a nonfatal, noncritical warning message.'''
        if __debug__: log(text, *args)
        print(self.warning_text(text, *args), flush = True)


    def alert(self, text, *args):
        '''Print a message reporting an error.'''
        if __debug__: log(text, *args)
        print(self.error_text(text, *args), file = sys.stderr, flush = True)


    def alert_fatal(self, text, *args, **kwargs):
        '''Print a message reporting a fatal error.  This returns normally;
        exiting is left to the caller.
        '''
        if __debug__: log(text, *args)
        if kwargs.get('details'):
            # Details are shown verbatim, not used as a format string.
            text += '\n' + kwargs['details'].replace('{', '{{').replace('}', '}}')
        print(self.fatal_text(text, *args), file = sys.stderr, flush = True)
