"""Jacobi functions (the hypergroup characters) and their checks.

``phi(lam, t) = 2F1((rho + i lam)/2, (rho - i lam)/2; alpha + 1; -sinh(t)**2)``

Grids are evaluated through :func:`phi_matrix`, which continues the Pfaff
transformed series along sorted ``t`` for a whole block of frequencies at
once. That is the path every transform in :mod:`ctht.spectral` goes
through, so it carries a small cache keyed by the exact grids.
"""

from __future__ import annotations

import csv
import hashlib
import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from . import hypergeometric as hyp
from .errors import AccuracyError, ConfigurationError, DomainError
from .hypergroup import JacobiParams, log_derivative_A

_BLOCK = 1024
_CACHE_SIZE = 48
_CACHE_BYTES = 400 * 2**20
_cache: OrderedDict = OrderedDict()


@dataclass(frozen=True)
class CharacterEval:
    lam: complex
    t: float
    value: float
    series_terms_used: int
    est_error: float


def _log_cosh(t):
    return np.logaddexp(t, -t) - math.log(2.0)


def _phi_block(params, lams, ts):
    # lams: (L,) complex, ts: (T,) distinct positive sorted ascending
    a = (params.rho + 1j * lams) / 2.0
    bw = (params.alpha - params.beta + 1.0 + 1j * lams) / 2.0
    c = np.full(lams.shape, params.alpha + 1.0, dtype=complex)
    logc = _log_cosh(ts)
    d = np.exp(-2.0 * logc)
    vals = hyp.continue_along(a, bw, c, d)
    return np.exp(-2.0 * a[:, None] * logc[None, :]) * vals


def _key(params, lams, ts):
    h = hashlib.sha1()
    h.update(np.asarray([params.alpha, params.beta]).tobytes())
    h.update(np.ascontiguousarray(lams).tobytes())
    h.update(b"|")
    h.update(np.ascontiguousarray(ts).tobytes())
    return h.hexdigest()


def phi_matrix(params: JacobiParams, lams, ts, cache=True):
    """Matrix ``phi[i, j] = phi_{lams[i]}(ts[j])``.

    Real (or purely imaginary) frequencies give a real matrix; anything
    else is returned complex. Rows are processed in blocks of similar
    |lam| so that each block shares one continuation path.
    """
    lams_in = np.atleast_1d(np.asarray(lams))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(~np.isfinite(ts)) or np.any(ts < 0):
        raise DomainError("character arguments t must be finite and >= 0")
    lams_c = lams_in.astype(complex)
    if np.any(~np.isfinite(lams_c)):
        raise DomainError("frequencies must be finite")
    real_out = bool(np.all((lams_c.imag == 0) | (lams_c.real == 0)))

    key = _key(params, lams_c, ts) if cache else None
    if key is not None and key in _cache:
        _cache.move_to_end(key)
        return _cache[key]

    # evenness in lam: use |Re lam| with the same imaginary part sign convention
    lams_e = np.where(lams_c.real < 0, -lams_c, lams_c)
    uniq_t, t_inv = np.unique(ts, return_inverse=True)
    pos = uniq_t > 0
    out_u = np.ones((lams_c.size, uniq_t.size), dtype=complex)
    if np.any(pos):
        tpos = uniq_t[pos]
        order = np.argsort(np.abs(lams_e))
        for start in range(0, order.size, _BLOCK):
            rows = order[start:start + _BLOCK]
            out_u[np.ix_(rows, np.flatnonzero(pos))] = _phi_block(params, lams_e[rows], tpos)
    out = out_u[:, t_inv]
    if real_out:
        out = out.real.copy()
    out.setflags(write=False)
    if key is not None:
        _cache[key] = out
        while len(_cache) > 1 and (len(_cache) > _CACHE_SIZE
                                   or sum(v.nbytes for v in _cache.values()) > _CACHE_BYTES):
            _cache.popitem(last=False)
    return out


def jacobi_phi(params: JacobiParams, lam, t):
    """The character ``phi_lam(t)``; ``lam`` and ``t`` broadcast.

    Returns floats for real or purely imaginary ``lam`` and complex values
    otherwise. ``phi_lam(0) == 1`` exactly.
    """
    lam = np.asarray(lam)
    t = np.asarray(t, dtype=float)
    bl, bt = np.broadcast_arrays(lam, t)
    shape = bl.shape
    if np.any(~np.isfinite(bt)) or np.any(bt < 0):
        raise DomainError("jacobi_phi needs finite t >= 0")
    flat_l = bl.ravel().astype(complex)
    flat_t = bt.ravel()
    ul, linv = np.unique(flat_l, return_inverse=True)
    ut, tinv = np.unique(flat_t, return_inverse=True)
    if ul.size * ut.size <= max(4 * flat_l.size, 4096):
        mat = phi_matrix(params, ul, ut, cache=False)
        out = mat[linv, tinv]
    else:
        out = np.empty(flat_l.size, dtype=mat_dtype(ul))
        for i, lv in enumerate(ul):
            sel = linv == i
            out[sel] = phi_matrix(params, np.array([lv]), flat_t[sel], cache=False)[0]
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def mat_dtype(lams):
    lams = np.asarray(lams, dtype=complex)
    return float if np.all((lams.imag == 0) | (lams.real == 0)) else complex


def one_minus_phi(params: JacobiParams, lams, t: float):
    """``1 - phi_lam(t)`` for a vector of real ``lams`` at one ``t``.

    For small ``t`` the series is summed without its constant term, which
    avoids the cancellation in ``1 - phi`` when ``lam * t`` is small.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    t = float(t)
    if t < 0 or not math.isfinite(t):
        raise DomainError("one_minus_phi needs finite t >= 0")
    if t == 0:
        return np.zeros(lams.shape)
    z = -math.sinh(t) ** 2
    a = (params.rho + 1j * lams) / 2.0
    b = (params.rho - 1j * lams) / 2.0
    direct = (z > -0.5) & (2.0 * np.sqrt(np.abs(a * b) * abs(z)) <= 1.0)
    out = np.empty(lams.shape)
    if np.any(direct):
        s, _, _ = hyp.series(a[direct], b[direct], params.alpha + 1.0, z, skip_constant=True)
        out[direct] = -s.real
    if np.any(~direct):
        out[~direct] = 1.0 - phi_matrix(params, lams[~direct], np.array([t]), cache=False)[:, 0]
    return out


def evaluate(params: JacobiParams, lam, t) -> CharacterEval:
    """Single evaluation with bookkeeping (terms, error estimate)."""
    lam = complex(lam)
    t = float(t)
    if t == 0:
        return CharacterEval(lam, t, 1.0, 0, 0.0)
    z = -math.sinh(t) ** 2
    a = (params.rho + 1j * lam) / 2.0
    b = (params.rho - 1j * lam) / 2.0
    if z > -0.5 and 2.0 * math.sqrt(abs(a * b) * abs(z)) <= 3.0:
        val, _, n = hyp.series(a, b, params.alpha + 1.0, z)
        val = complex(val)
    else:
        val = complex(jacobi_phi(params, lam, t))
        n = -1  # continued, not a single series
    value = val.real if (lam.imag == 0 or lam.real == 0) else val
    return CharacterEval(lam, t, value, n, abs(val) * 1e-14 + 1e-16)


def write_phi_csv(path, params: JacobiParams, lams, ts):
    """Batch evaluation exported as CSV columns lambda, t, phi, est_error."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    mat = phi_matrix(params, lams, ts, cache=False)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lambda", "t", "phi", "est_error"])
        for i, lv in enumerate(lams):
            for j, tv in enumerate(ts):
                v = float(mat[i, j])
                err = 0.0 if tv == 0 else 1e-14 * max(abs(v), 1e-300) + 1e-16
                writer.writerow([format(lv, ".17g"), format(tv, ".17g"),
                                 format(v, ".17g"), format(err, ".17g")])
    return path


def ode_residual(params: JacobiParams, lam: float, t_grid, phi_values) -> float:
    """Max residual of ``u'' + (A'/A) u' + (lam**2 + rho**2) u`` on a grid.

    Centered second-order differences on a uniform grid with spacing
    ``h <= 1e-2``; interior points only. ``lam`` may be complex (e.g.
    ``i rho``), in which case the eigenvalue ``lam**2 + rho**2`` is used
    as is.
    """
    t = np.asarray(t_grid, dtype=float)
    u = np.asarray(phi_values)
    if t.ndim != 1 or t.size < 3 or u.shape != t.shape:
        raise ConfigurationError("ode_residual needs matching 1-d grids of at least 3 points")
    if np.any(t <= 0):
        raise ConfigurationError("ode_residual grid must avoid the singular point t = 0")
    steps = np.diff(t)
    h = float(steps.mean())
    if h > 1e-2 * (1 + 1e-9) or h <= 0:
        raise ConfigurationError(f"grid spacing {h:g} outside (0, 1e-2]")
    if np.max(np.abs(steps - h)) > 1e-9 * max(h, 1.0):
        raise ConfigurationError("ode_residual needs a uniform grid")
    d2 = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h ** 2
    d1 = (u[2:] - u[:-2]) / (2.0 * h)
    eig = complex(lam) ** 2 + params.rho ** 2
    res = d2 + log_derivative_A(params, t[1:-1]) * d1 + eig * u[1:-1]
    return float(np.max(np.abs(res)))


def ode_residual_bound(params: JacobiParams, lam: float, t_grid) -> float:
    """Truncation bound for :func:`ode_residual` on the same grid.

    With ``u ~ cos(omega t)``, ``omega**2 = lam**2 + rho**2``, the centered
    differences err by ``h**2/12 |u''''|`` and ``h**2/6 |u'''|``; the second
    is multiplied by ``A'/A``, which is largest at the left end.
    """
    t = np.asarray(t_grid, dtype=float)
    h = float(np.mean(np.diff(t)))
    omega2 = abs(complex(lam) ** 2 + params.rho ** 2)
    drift = float(log_derivative_A(params, t[1]))
    return h ** 2 * (omega2 ** 2 / 12.0 + drift * omega2 ** 1.5 / 6.0)


def bound_ratios(params: JacobiParams, lambda_grid, t_grid, min_product=1e-4):
    """Ratios ``|1 - phi_lam(t)| / min(1, (lam t)**2)`` on the grid product.

    Products ``lam * t`` below ``min_product`` are masked with NaN: there the
    ratio is governed by the Taylor limit and dominated by rounding.
    """
    lams = np.atleast_1d(np.asarray(lambda_grid, dtype=float))
    ts = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if lams.size == 0 or ts.size == 0:
        raise ConfigurationError("character bound grids must be nonempty")
    if np.any(lams <= 0) or np.any(ts <= 0):
        raise ConfigurationError("character bound grids must be positive")
    gap = np.empty((lams.size, ts.size))
    for j, tv in enumerate(ts):
        gap[:, j] = np.abs(one_minus_phi(params, lams, tv))
    prod = lams[:, None] * ts[None, :]
    ratio = gap / np.minimum(1.0, prod ** 2)
    ratio[prod < min_product] = np.nan
    return ratio


def character_bound_constant(params: JacobiParams, lambda_grid, t_grid, min_product=1e-4) -> float:
    """Empirical infimum of ``|1 - phi_lam(t)| / min(1, (lam t)**2)``.

    Raises :class:`AccuracyError` if the ratio vanishes anywhere on the
    grid: that would contradict the lower bound, and is reported rather
    than clamped.
    """
    ratio = bound_ratios(params, lambda_grid, t_grid, min_product)
    if np.all(np.isnan(ratio)):
        raise ConfigurationError("no grid point has lam * t above the evaluation floor")
    c_hat = float(np.nanmin(ratio))
    if not c_hat > 0:
        idx = np.unravel_index(np.nanargmin(ratio), ratio.shape)
        raise AccuracyError(f"character bound ratio vanishes at grid index {idx}", partial=c_hat)
    return c_hat


def taylor_coefficient(params: JacobiParams, lam: float) -> float:
    """Limit of ``(1 - phi_lam(t)) / (lam t)**2`` as ``t -> 0``.

    From the ODE with u(0) = 1, u'(0) = 0: u''(0) (1 + 2a + 1) = -(lam**2 + rho**2),
    so ``1 - phi ~ (lam**2 + rho**2) t**2 / (4 (alpha + 1))``.
    """
    return (lam ** 2 + params.rho ** 2) / (4.0 * (params.alpha + 1.0) * lam ** 2)
