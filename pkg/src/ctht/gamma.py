"""Complex log-gamma by the Lanczos approximation (g = 7, 9 terms).

Only the right half-plane is evaluated directly; arguments with real part
below 1/2 are shifted up with the recurrence ``Gamma(z) = Gamma(z+1)/z``
rather than reflected, which keeps large imaginary parts well conditioned.
"""

import numpy as np

from .errors import DomainError

_G = 7.0
_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


def _lanczos_right(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    acc = np.full(z.shape, _COEF[0], dtype=complex)
    for i in range(1, len(_COEF)):
        acc = acc + _COEF[i] / (z + i)
    t = z + _G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def log_gamma(z):
    """Logarithm of the Gamma function for complex ``z``.

    The imaginary part is only defined modulo 2*pi, which is all that is
    needed when the result is exponentiated. Poles (nonpositive integers)
    raise :class:`DomainError`.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z).copy()
    if not np.all(np.isfinite(z)):
        raise DomainError("log_gamma needs finite arguments")
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(pole):
        raise DomainError("log_gamma has poles at nonpositive integers")

    shift = np.zeros(z.shape, dtype=complex)
    low = z.real < 0.5
    while np.any(low):
        shift[low] -= np.log(z[low])
        z[low] += 1.0
        low = z.real < 0.5
    out = _lanczos_right(z) + shift
    return out[0] if scalar else out


def gamma(z):
    """Gamma function for complex ``z`` (overflows for large arguments)."""
    return np.exp(log_gamma(z))
