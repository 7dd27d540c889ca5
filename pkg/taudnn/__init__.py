'''
taudnn -- deep networks with trainable per-layer step sizes

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

from os import path
import sys

# Set module-level dunder variables like __version__
# .............................................................................
# The following code reads from ../setup.cfg (if running from a source
# directory) or the installed package metadata (if installed normally).  It
# reads config vars and sets the corresponding module-level variables with
# '__' surrounding their names.

keys = ['version', 'description', 'license', 'url', 'keywords',
        'author', 'author_email', 'maintainer', 'maintainer_email']

this_module = sys.modules[__package__]
setup_cfg = path.join(path.dirname(__file__), '..', 'setup.cfg')

if path.exists(setup_cfg):
    # If setup.cfg is directly available, use that.
    import configparser
    conf = configparser.ConfigParser()
    conf.read(setup_cfg)
    if conf.has_section('metadata'):
        for name in [key for key in keys if conf.has_option('metadata', key)]:
            setattr(this_module, '__' + name + '__', conf.get('metadata', name).strip())
else:
    # If we are not running from the source directory, we read from the
    # package metadata written at installation time.
    try:
        from importlib.metadata import metadata, PackageNotFoundError
        meta = metadata(__package__)
        names = {'url': 'Home-page', 'author_email': 'Author-email',
                 'maintainer_email': 'Maintainer-email', 'description': 'Summary'}
        for name in keys:
            field = names.get(name, name.capitalize())
            if meta.get(field):
                setattr(this_module, '__' + name + '__', meta.get(field))
    except (ImportError, PackageNotFoundError):
        pass

for name in keys:
    if not hasattr(this_module, '__' + name + '__'):
        setattr(this_module, '__' + name + '__', 'unknown')


# Miscellaneous utilities.
# .............................................................................

def print_version():
    this_module = sys.modules[__package__]
    print('{} version {}'.format(this_module.__name__, this_module.__version__))
    print('Authors: {}'.format(this_module.__author__))
    print('URL: {}'.format(this_module.__url__))
    print('License: {}'.format(this_module.__license__))
