'''
debug.py: lightweight debug logging facility

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

# Callers guard every use with "if __debug__:", so running Python with -O
# removes the tracing calls along with the work of formatting their messages.


# Logger configuration.
# .............................................................................

if __debug__:
    import inspect
    import logging
    from   os import path
    import sys

    # Checking a module attribute is much cheaper than asking the logger
    # whether DEBUG is enabled on every call to log().
    setattr(sys.modules[__package__], '_debugging', False)


# Exported functions.
# .............................................................................

def set_debug(dest = '-'):
    '''Turns on debug logging.  The destination 'dest' can be a file path, or
    a single dash ('-') to indicate the console (standard error).  Calling
    this function again with a different destination switches to it.
    '''
    if __debug__:
        setattr(sys.modules[__package__], '_debugging', True)
        logger = logging.getLogger(__package__)
        for h in list(logger.handlers):
            logger.removeHandler(h)
        if dest in ['-', '', None]:
            handler = logging.StreamHandler()
        else:
            handler = logging.FileHandler(dest)
        handler.setFormatter(logging.Formatter('%(name)s %(message)s'))
        handler.setLevel(logging.DEBUG)
        logger.addHandler(handler)
        logger.setLevel(logging.DEBUG)


def log(s, *other_args):
    '''Logs a debug message. 's' can contain format directives, and the
    remaining arguments are the arguments to the format string.
    '''
    if __debug__:
        # Skip the string formatting entirely unless tracing is on.
        if getattr(sys.modules[__package__], '_debugging'):
            func = inspect.currentframe().f_back.f_code.co_name
            file_path = inspect.currentframe().f_back.f_code.co_filename
            filename = path.basename(file_path)
            logging.getLogger(__package__).debug('{} {}(): '.format(filename, func)
                                                 + s.format(*other_args))
