"""Gauss hypergeometric function 2F1(a, b; c; z) on the negative real axis.

Strategy
--------
* ``z`` in (-1/2, 0] with moderate parameters: the defining series.
* otherwise the Pfaff transformation
  ``2F1(a, b; c; z) = (1 - z)**(-a) 2F1(a, c - b; c; w)``, ``w = z / (z - 1)``
  maps the argument into [0, 1). The transformed series is summed only
  inside a disc where it does not cancel catastrophically, and the
  function is then carried to ``w`` by Taylor re-expansion of the
  hypergeometric ODE (analytic continuation along [0, 1)).

The continuation tracks ``d = 1 - w`` directly, so arguments extremely
close to the singular point w = 1 (large |z|) keep full relative precision.
Hop lengths are capped at half the distance to the nearest singular point
and by the local oscillation scale of the solution, which bounds the size of
the Taylor terms relative to the result.
"""

import numpy as np

from .errors import AccuracyError, DomainError

SERIES_TOL = 1e-16
MAX_SERIES_TERMS = 10000
MAX_HOP_TERMS = 400
# largest "2*sqrt(|ab| x)" accepted for a power series at argument x;
# the peak term is then at most ~e**3 times the sum.
_CANCEL_LIMIT = 3.0
# hop length in units of the local oscillation length
_HOP_KAPPA = 1.0


def _check_c(c):
    c = np.asarray(c, dtype=complex)
    bad = (c.imag == 0) & (c.real <= 0) & (c.real == np.round(c.real))
    if np.any(bad):
        raise DomainError("2F1 is undefined when c is zero or a negative integer")


def series(a, b, c, x, with_derivative=False, skip_constant=False):
    """Sum the hypergeometric series at real ``x`` with ``|x| < 1``.

    Arrays broadcast against each other. Returns ``(value, derivative,
    terms)``; ``derivative`` is None unless requested. With
    ``skip_constant`` the leading 1 is omitted, which gives ``2F1 - 1``
    without cancellation for small arguments.
    """
    a, b, c, x = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, x)))
    x = x.real
    coef = np.ones(a.shape, dtype=complex)
    xpow = np.ones(x.shape)  # x**(n-1)
    total = np.zeros(a.shape, dtype=complex) if skip_constant else coef.copy()
    dtotal = np.zeros(a.shape, dtype=complex)
    done = np.zeros(a.shape, dtype=bool)
    n = 0
    while True:
        coef = coef * ((a + n) * (b + n) / ((c + n) * (n + 1.0)))
        n += 1
        if n > 1:
            xpow = xpow * x
        term = coef * xpow * x
        total = total + np.where(done, 0.0, term)
        if with_derivative:
            dtotal = dtotal + np.where(done, 0.0, n * coef * xpow)
        rnext = np.abs((a + n) * (b + n) / ((c + n) * (n + 1.0)) * x)
        small = np.abs(coef * xpow) * (1.0 + n) <= SERIES_TOL * np.maximum(np.abs(total), 1e-300)
        done |= small & (rnext < 0.9)
        if np.all(done):
            break
        if n >= MAX_SERIES_TERMS:
            raise AccuracyError(
                f"hypergeometric series did not converge in {n} terms",
                partial=total, estimate=float(np.max(np.abs(term))))
    return total, (dtotal if with_derivative else None), n


def _wavenumber(a, b, c, w, d):
    """Local oscillation scale of solutions of the 2F1 ODE near ``w``."""
    p = np.abs(c - (a + b + 1.0) * w)
    q = np.abs(a * b)
    wd = w * d
    return np.max(p / wd + np.sqrt(q / wd))


def _hop(a, b, c, w0, d0, y, dy, h):
    """Carry (y, y') from ``w0`` to ``w0 + h`` along the real axis.

    Coefficients of the Taylor expansion about ``w0`` obey
    y[n+2] = ((n+a)(n+b) y[n] - (n+1)((1-2w0)n + c - (a+b+1)w0) y[n+1])
             / (w0 (1-w0) (n+1)(n+2)),
    which follows from w(1-w)y'' + (c - (a+b+1)w)y' - ab y = 0. The
    coefficients are scaled by h**n to keep them O(1).
    """
    wd = w0 * d0
    one_m_2w = 2.0 * d0 - 1.0
    lin = c - (a + b + 1.0) * w0
    hh = h * h
    u0 = y
    u1 = dy * h
    val = u0 + u1
    der = u1.copy()
    # convergence is judged against the local size of (y, h y')
    inv_scale = 1.0 / np.maximum(np.maximum(np.abs(u0), np.abs(u1)), 1e-300)
    quiet = 0
    for n in range(0, MAX_HOP_TERMS):
        u2 = ((n + a) * (n + b) * (u0 * hh)
              - ((n + 1.0) * h) * (one_m_2w * n + lin) * u1) / (wd * (n + 1.0) * (n + 2.0))
        val += u2
        der += (n + 2.0) * u2
        if np.max(np.abs(u2) * inv_scale) * (n + 3.0) <= SERIES_TOL:
            quiet += 1
            if quiet >= 2:
                return val, der / h
        else:
            quiet = 0
        u0, u1 = u1, u2
    raise AccuracyError("Taylor continuation of 2F1 did not converge",
                        partial=val, estimate=float(np.max(np.abs(u2))))


def start_point(a, b):
    """Largest argument in [0, 1/2] where the series is cancellation-safe."""
    q = float(np.max(np.abs(np.asarray(a) * np.asarray(b)))) if np.size(a) else 0.0
    if q == 0.0:
        return 0.5
    return min(0.5, (_CANCEL_LIMIT / 2.0) ** 2 / q)


def continue_along(a, b, c, d_targets):
    """Evaluate 2F1(a, b; c; w) at ``w = 1 - d`` for every target ``d``.

    ``a``, ``b``, ``c`` are 1-d arrays of equal length M (one parameter set
    per row); ``d_targets`` is a 1-d array of T values in (0, 1]. All rows
    share one continuation path, so rows should have comparable parameter
    sizes. Returns an (M, T) complex array.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    c = np.broadcast_to(np.asarray(c, dtype=complex), a.shape)
    d_targets = np.atleast_1d(np.asarray(d_targets, dtype=float))
    out = np.empty((a.size, d_targets.size), dtype=complex)
    if d_targets.size == 0:
        return out

    ws = start_point(a, b)
    w_targets = 1.0 - d_targets
    inner = w_targets <= ws
    if np.any(inner):
        vals, _, _ = series(a[:, None], b[:, None], c[:, None], w_targets[None, inner])
        out[:, inner] = vals
    outer_idx = np.flatnonzero(~inner)
    if outer_idx.size == 0:
        return out

    order = outer_idx[np.argsort(d_targets[outer_idx])[::-1]]
    y, dy, _ = series(a, b, c, np.full(a.shape, ws), with_derivative=True)
    w0, d0 = ws, 1.0 - ws
    for idx in order:
        d_goal = d_targets[idx]
        while d0 > d_goal:
            limit = 0.5 * min(w0, d0)
            k = _wavenumber(a, b, c, w0, d0)
            h = min(limit, _HOP_KAPPA / k, d0 - d_goal)
            if d0 - d_goal - h < 1e-15 * d_goal:
                h = d0 - d_goal
            y, dy = _hop(a, b, c, w0, d0, y, dy, h)
            if h == d0 - d_goal:
                d0 = d_goal
                w0 = 1.0 - d_goal
            else:
                d0 = d0 - h
                w0 = w0 + h
        out[:, idx] = y
    return out


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real ``z <= 0``.

    Parameters may be complex and broadcast against ``z``. Returns a complex
    array (or complex scalar for scalar input).

    >>> round(gauss_2f1(1, 1, 2, -1.0).real, 12)
    0.69314718056
    """
    a, b, c, z = np.broadcast_arrays(*(np.asarray(v) for v in (a, b, c, z)))
    if np.iscomplexobj(z) and np.any(np.asarray(z).imag != 0):
        raise DomainError("gauss_2f1 is implemented for real z <= 0 only")
    z = np.asarray(z).real.astype(float)
    if not np.all(np.isfinite(z)) or np.any(z > 0):
        raise DomainError("gauss_2f1 needs finite z <= 0")
    _check_c(c)
    scalar = z.ndim == 0
    a, b, c = (np.atleast_1d(np.asarray(v, dtype=complex)) for v in (a, b, c))
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    for i in np.ndindex(z.shape):
        out[i] = _single(a[i], b[i], c[i], z[i])
    return out[0] if scalar else out


def _single(a, b, c, z):
    if z == 0.0:
        return 1.0 + 0.0j
    direct_ok = 2.0 * np.sqrt(abs(a * b) * abs(z)) <= _CANCEL_LIMIT
    if z > -0.5 and direct_ok:
        val, _, _ = series(a, b, c, z)
        return complex(val)
    # Pfaff: (1 - z)^(-a) 2F1(a, c - b; c; z / (z - 1))
    d = 1.0 / (1.0 - z)
    val = continue_along(np.array([a]), np.array([c - b]), np.array([c]), np.array([d]))[0, 0]
    return complex(np.exp(a * np.log(d)) * val)
