'''
text_styles: color & style definitions for use with Python colorful.

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
from   os import path

from .debug import log

# Older releases of colorful did not load their X11 color name palette, so
# load it directly when the file is present and define the two named colors
# we rely on otherwise.

rgb_file = path.join(colorful.__path__[0], 'data/rgb.txt')
if path.exists(rgb_file):
    if __debug__: log('loading colorful colors from {}', rgb_file)
    colorful.setup(colorpalette = rgb_file)
else:
    if __debug__: log('cannot find colorful rgb.txt file')
    colorful.update_palette({
        'springGreen4' : (  0, 139,  69),
        'steelBlue'    : ( 70, 130, 180),
    })

# These have to be defined after the palette is loaded, or the color names
# will not resolve.

STYLES = {
    'info'     : colorful.springGreen4,
    'progress' : colorful.steelBlue,
    'warn'     : colorful.orange,
    'error'    : colorful.red,
    'fatal'    : colorful.red & colorful.bold,
}
