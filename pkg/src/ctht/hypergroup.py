"""The Jacobi hypergroup instance: parameters, weight and Plancherel density.

The weight ``A`` defines the Haar measure ``A(x) dx`` on [0, inf). The
Plancherel density ``|c(lam)|**-2`` is given by the Harish-Chandra
c-function of the Jacobi hypergroup,

    c(lam) = 2**(rho - i lam) Gamma(alpha+1) Gamma(i lam)
             / (Gamma((rho + i lam)/2) Gamma((alpha - beta + 1 + i lam)/2)),

and the density returned by :func:`plancherel_density` is
``|c(lam)|**-2 / (2 pi)``, the normalisation under which
``int |f|**2 A dx == int |F f|**2 density dlam`` holds exactly.
"""

from __future__ import annotations

import abc
import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DomainError
from .gamma import log_gamma

DEFAULT_K_THRESHOLD = 1.0
_LOG_2PI = math.log(2.0 * math.pi)


class HypergroupWeight(abc.ABC):
    """Contract for a Chebli-Trimeche weight.

    Anything implementing this can stand in for the Jacobi weight in the
    norm and density code; the characters themselves are family specific.
    """

    @property
    @abc.abstractmethod
    def rho(self) -> float:
        """Half the limit of A'/A at infinity."""

    @abc.abstractmethod
    def weight(self, x):
        """The weight A(x)."""

    @abc.abstractmethod
    def log_derivative(self, x):
        """A'(x) / A(x)."""

    @abc.abstractmethod
    def density(self, lam):
        """Plancherel density with respect to dlam on (0, inf)."""


@dataclass(frozen=True)
class JacobiParams(HypergroupWeight):
    alpha: float
    beta: float
    k_threshold: float = DEFAULT_K_THRESHOLD
    _rho: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ConfigurationError("alpha and beta must be finite")
        if not (a >= b >= -0.5) or a == -0.5:
            raise ConfigurationError(
                f"Jacobi parameters need alpha >= beta >= -1/2 and alpha != -1/2, got ({a}, {b})")
        if not (self.k_threshold > 0 and math.isfinite(self.k_threshold)):
            raise ConfigurationError("k_threshold must be a positive number")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "k_threshold", float(self.k_threshold))
        object.__setattr__(self, "_rho", a + b + 1.0)

    @property
    def rho(self) -> float:
        return self._rho

    def weight(self, x):
        return weight_A(self, x)

    def log_derivative(self, x):
        return log_derivative_A(self, x)

    def density(self, lam):
        return plancherel_density(self, lam)

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "k_threshold": self.k_threshold}

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(float(data["alpha"]), float(data["beta"]),
                       float(data.get("k_threshold", DEFAULT_K_THRESHOLD)))
        except KeyError as exc:
            raise ConfigurationError(f"missing parameter key {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad parameter value: {exc}") from None

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class DensityBounds:
    k: float
    k1: float
    k2: float

    def __post_init__(self):
        if not (0 < self.k1 <= self.k2):
            raise ConfigurationError("density bounds need 0 < k1 <= k2")


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def log_weight_A(params: JacobiParams, x):
    """log A(x) for x > 0, free of overflow for large x."""
    x, scalar = _as_array(x)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("log_weight_A needs finite x > 0")
    # log sinh x and log cosh x written to avoid overflow
    log_sinh = x + np.log(-np.expm1(-2.0 * x)) - math.log(2.0)
    log_cosh = np.logaddexp(x, -x) - math.log(2.0)
    out = (2.0 * params.rho * math.log(2.0) + (2.0 * params.alpha + 1.0) * log_sinh
           + (2.0 * params.beta + 1.0) * log_cosh)
    return float(out) if scalar else out


def weight_A(params: JacobiParams, x):
    """Jacobi weight ``2**(2 rho) sinh(x)**(2a+1) cosh(x)**(2b+1)``."""
    x, scalar = _as_array(x)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise DomainError("weight_A needs finite x >= 0")
    out = np.zeros(x.shape)
    pos = x > 0
    out[pos] = np.exp(log_weight_A(params, x[pos]))
    return float(out) if scalar else out


def log_derivative_A(params: JacobiParams, x):
    """A'(x)/A(x) = (2a+1) coth x + (2b+1) tanh x, for x > 0."""
    x, scalar = _as_array(x)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("log_derivative_A needs finite x > 0 (singular at 0)")
    out = (2.0 * params.alpha + 1.0) / np.tanh(x) + (2.0 * params.beta + 1.0) * np.tanh(x)
    return float(out) if scalar else out


def log_c_function(params: JacobiParams, lam):
    """Complex logarithm of the c-function at real nonzero ``lam``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(~np.isfinite(lam)) or np.any(lam == 0):
        raise DomainError("the c-function is evaluated at finite nonzero lambda")
    il = 1j * lam
    a, b, rho = params.alpha, params.beta, params.rho
    # Gamma(i lam) = Gamma(1 + i lam) / (i lam) keeps the argument in Re >= 1/2
    return ((rho - il) * math.log(2.0) + log_gamma(a + 1.0).real
            + log_gamma(1.0 + il) - np.log(il)
            - log_gamma((rho + il) / 2.0) - log_gamma((a - b + 1.0 + il) / 2.0))


def c_function(params: JacobiParams, lam):
    """Harish-Chandra c-function c(lam) for real nonzero lam."""
    return np.exp(log_c_function(params, lam))


def plancherel_density(params: JacobiParams, lam):
    """Plancherel density ``|c(lam)|**-2 / (2 pi)`` for lam > 0."""
    lam, scalar = _as_array(lam)
    if np.any(~np.isfinite(lam)) or np.any(lam <= 0):
        raise DomainError("plancherel_density needs finite lambda > 0")
    out = np.exp(-2.0 * log_c_function(params, lam).real - _LOG_2PI)
    return float(out) if scalar else out


def density_envelope(params: JacobiParams, lam, k=None):
    """Power envelope: lam**2 below the threshold k, lam**(2a+1) above."""
    k = params.k_threshold if k is None else k
    lam = np.asarray(lam, dtype=float)
    return np.where(lam <= k, lam ** 2, lam ** (2.0 * params.alpha + 1.0))


def check_density_bounds(params: JacobiParams, lambda_grid, k=None) -> DensityBounds:
    """Fit the two-regime constants k1 <= density/envelope <= k2 over a grid."""
    grid = np.asarray(lambda_grid, dtype=float)
    k = params.k_threshold if k is None else float(k)
    if grid.ndim != 1 or grid.size < 2:
        raise ConfigurationError("density bound fit needs a grid of at least two points")
    if np.any(grid <= 0) or np.any(~np.isfinite(grid)):
        raise ConfigurationError("density bound grid must be finite and positive")
    if not (grid.min() <= k < grid.max()):
        raise ConfigurationError(f"grid must span both regimes around k = {k}")
    ratio = plancherel_density(params, grid) / density_envelope(params, grid, k)
    k1, k2 = float(np.min(ratio)), float(np.max(ratio))
    if not k1 > 0:
        raise ConfigurationError("fitted lower constant is not positive")
    return DensityBounds(k=k, k1=k1, k2=k2)


def write_two_column_csv(path, header, xs, ys):
    """Two numeric columns, 17 significant digits, newline line endings."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for x, y in zip(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)):
            writer.writerow([format(float(x), ".17g"), format(float(y), ".17g")])
    return path
