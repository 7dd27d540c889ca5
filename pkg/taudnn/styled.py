'''
styled.py: styling text strings

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

import colorful
colorful.use_256_ansi_colors()


# Exported classes.
# .............................................................................

class Styled():
    '''Mixin with methods for styling messages, from informational notes
    and progress lines up to fatal errors.
    '''

    def __init__(self, use_color = True):
        self._colorize = use_color


    def info_text(self, text_with_fields, *args):
        '''Return an informational message.'''
        return styled(text_with_fields.format(*args), 'info', self._colorize)


    def progress_text(self, text_with_fields, *args):
        '''Return a progress line, such as one row of a training log.'''
        return styled(text_with_fields.format(*args), 'progress', self._colorize)


    def warning_text(self, text_with_fields, *args):
        '''Return a nonfatal, noncritical warning message.'''
        return styled(text_with_fields.format(*args), 'warn', self._colorize)


    def error_text(self, text_with_fields, *args):
        '''Return a message reporting an error.'''
        return styled(text_with_fields.format(*args), 'error', self._colorize)


    def fatal_text(self, text_with_fields, *args):
        '''Return a message reporting a fatal error.  This does not exit the
        program; the caller decides what to do next.
        '''
        text = 'FATAL: ' + text_with_fields.format(*args)
        return styled(text, 'fatal', self._colorize)


# Utility functions
# .............................................................................

def styled(text, style, colorize = True):
    '''Style the 'text' with the named 'style' if 'colorize' is True.  The
    styles are 'info', 'progress', 'warn', 'error' and 'fatal'.
    '''
    if not colorize:
        return text
    # The palette is loaded on first use.
    from .text_styles import STYLES
    return STYLES[style] | text
