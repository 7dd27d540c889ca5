'''
special.py: Euler's Gamma function and modified Bessel functions I0, I1

Only the arguments the package needs are supported: Gamma on the positive
axis (the fractional coefficients use Gamma(2 - gamma) with gamma in (0, 1)),
and I0, I1 on non-negative reals of moderate size (the Maxwell fields need
radii up to sqrt(2)).

Authors
-------

The taudnn developers

Copyright
---------

Copyright (c) 2022 by the taudnn authors.  This code is open-source software
released under a 3-clause BSD license.  Please see the file "LICENSE" for
more information.
'''

import math
import numpy as np

from .exceptions import DomainError


# Global constants.
# .............................................................................

# Lanczos approximation with g = 7 and 9 coefficients; relative error below
# 1e-15 for x >= 0.5.
_LANCZOS_G = 7
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SERIES_TOLERANCE = 1e-16
_SERIES_MAX_TERMS = 500


# Exported functions.
# .............................................................................

def gamma(x):
    '''Return Gamma(x) for x > 0.'''
    x = float(x)
    if not math.isfinite(x) or x <= 0:
        raise DomainError('gamma is only supported for finite x > 0, got {}'.format(x))
    if x < 0.5:
        # Gamma(x) = Gamma(x + 1) / x keeps the Lanczos sum in its good range.
        return gamma(x + 1.0) / x
    x -= 1.0
    series = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        series += _LANCZOS_COEFFS[i] / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t**(x + 0.5) * math.exp(-t) * series


def bessel_i(order, x):
    '''Return the modified Bessel function of the first kind I_order(x) for
    order 0 or 1 and x >= 0.  'x' may be a number or a numpy array; the
    result has the same shape.

    The power series sum_k (x/2)^(2k+order) / (k! (k+order)!) is summed until
    the newest term drops below 1e-16 of the partial sum.
    '''
    if order not in (0, 1):
        raise DomainError('bessel_i supports orders 0 and 1, got {}'.format(order))
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype = float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError('bessel_i needs x >= 0')
    half = x / 2.0
    quarter_sq = half * half
    term = np.ones_like(x) if order == 0 else half.copy()
    total = term.copy()
    for k in range(_SERIES_MAX_TERMS):
        term = term * quarter_sq / ((k + 1) * (k + 1 + order))
        total = total + term
        if np.all(term <= _SERIES_TOLERANCE * total):
            break
    return float(total) if scalar else total
