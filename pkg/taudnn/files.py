'''
files.py: utilities for working with files.

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

import os
from   os import path
import tempfile

from .debug import log


# Main functions.
# .............................................................................

def readable(dest):
    '''Returns True if the given 'dest' is accessible and readable.'''
    return os.access(dest, os.F_OK | os.R_OK)


def writable(dest):
    '''Returns True if a file can be written at 'dest'.  A directory is not
    a file destination.'''
    if path.isdir(dest):
        return False
    if path.exists(dest):
        return os.access(dest, os.W_OK)
    try:
        # The parent must exist and accept new files.
        tempfile.TemporaryFile(dir = path.dirname(dest) or '.').close()
    except OSError:
        return False
    return True


def ensure_directory(dir):
    '''Create 'dir' (and its parents) unless it exists.  Returns the path.'''
    if not path.isdir(dir):
        if __debug__: log('creating directory {}', dir)
        os.makedirs(dir, exist_ok = True)
    return dir


def rename_existing(file):
    '''Renames 'file' to 'file.bak', replacing an older backup.'''
    if not path.exists(file):
        return
    backup = file + '.bak'
    try:
        os.replace(file, backup)
        if __debug__: log('renamed {} to {}', file, backup)
    except OSError:
        # If we fail, we just give up instead of throwing an exception.
        if __debug__: log('failed to rename {} to {}', file, backup)
