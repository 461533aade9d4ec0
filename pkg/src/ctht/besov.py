"""Besov-type seminorms built from the modulus of continuity.

For ``q < inf`` the seminorm is ``(int_0^inf (omega(delta)/delta**gamma)**q ddelta/delta)**(1/q)``
and for ``q = inf`` it is ``sup_delta omega(delta)/delta**gamma``. Only a
finite delta grid can be evaluated, so both ends are extrapolated: below
the grid with the power law fitted to the small-delta readings, above it
with the a priori bound ``omega <= 2 ||f||``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral as sp
from .errors import AccuracyError, ConfigurationError, DomainError
from .hypergroup import JacobiParams, write_two_column_csv
from .quadrature import QuadratureSpec

DEFAULT_DELTA_GRID = np.logspace(-3, 1, 25)
MIN_GRID_POINTS = 8
MIN_PROFILE_POINTS = 12
# deltas at or below this are used for the small-delta power-law fit
SMALL_DELTA = 0.1
VERDICT_TOLERANCE = 0.1


@dataclass(frozen=True)
class BesovSpec:
    p: float
    q: float
    gamma: float

    def __post_init__(self):
        q = math.inf if self.q in ("inf", math.inf) else float(self.q)
        if not 1.0 <= float(self.p) <= 2.0:
            raise ConfigurationError(f"Besov p must lie in [1, 2], got {self.p}")
        if not q >= 1.0:
            raise ConfigurationError(f"Besov q must be >= 1 or inf, got {self.q}")
        if not (float(self.gamma) > 0 and math.isfinite(self.gamma)):
            raise ConfigurationError(f"Besov gamma must be positive, got {self.gamma}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "gamma", float(self.gamma))


@dataclass(frozen=True, eq=False)
class DecayProfile:
    """omega(f, delta) readings with the fitted power law ``omega ~ C delta**e``."""

    deltas: np.ndarray
    omegas: np.ndarray
    fitted_exponent: float
    fit_residual: float
    noise_floor: float = 0.0
    fitted_log_constant: float = float("nan")
    censored: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=float)
        w = np.asarray(self.omegas, dtype=float)
        if d.ndim != 1 or d.shape != w.shape:
            raise DomainError("deltas and omegas must be matching 1-d arrays")
        if np.any(d <= 0) or np.any(np.diff(d) <= 0):
            raise DomainError("deltas must be positive and strictly increasing")
        object.__setattr__(self, "deltas", d)
        object.__setattr__(self, "omegas", w)
        cens = np.zeros(d.shape, bool) if self.censored is None else np.asarray(self.censored, bool)
        object.__setattr__(self, "censored", cens)

    def model(self, delta):
        return np.exp(self.fitted_log_constant) * np.asarray(delta, dtype=float) ** self.fitted_exponent

    def summary(self) -> dict:
        return {"exponent": self.fitted_exponent, "residual": self.fit_residual,
                "noise_floor": self.noise_floor, "log_constant": self.fitted_log_constant,
                "censored": int(np.sum(self.censored)), "points": int(self.deltas.size),
                "meta": self.meta}

    def to_csv(self, path):
        return write_two_column_csv(path, ("delta", "omega"), self.deltas, self.omegas)

    def to_json(self, path):
        with open(path, "w", newline="\n") as fh:
            json.dump(self.summary(), fh, sort_keys=True, indent=2)
            fh.write("\n")
        return path


def _fit_power_law(deltas, omegas):
    ld, lw = np.log(deltas), np.log(omegas)
    (slope, icpt), res, *_ = np.polyfit(ld, lw, 1, full=True)
    rms = math.sqrt(float(res[0]) / ld.size) if res.size else 0.0
    return float(slope), float(icpt), rms


def omega_profile(f, p, params, deltas, quad=None, spectral_quad=None, spectrum=None):
    """omega(f, delta) on every delta of the grid, sharing one forward transform."""
    S = spectrum if spectrum is not None else sp.forward_transform(
        f, params, spectral_quad or sp.DEFAULT_SPECTRAL_QUAD, quad)
    return np.array([sp.modulus_of_continuity(f, d, p, params, quad, spectral_quad, spectrum=S)
                     for d in deltas]), S


def profile_from_readings(f, p, params, deltas, omegas, floor, meta, fit_mask=None):
    """Censor readings at or below ``floor`` and fit the power law to the rest."""
    censored = omegas <= floor
    use = ~censored if fit_mask is None else (~censored & fit_mask)
    if censored.sum() * 2 > deltas.size:
        raise AccuracyError(
            f"modulus below the noise floor {floor:.3e} at {int(censored.sum())} of {deltas.size} deltas",
            estimate=floor)
    if use.sum() < 3:
        raise AccuracyError("fewer than three usable modulus readings for the power-law fit")
    slope, icpt, rms = _fit_power_law(deltas[use], omegas[use])
    return DecayProfile(deltas, omegas, slope, rms, floor, icpt, censored, meta)


def decay_exponent(f: sp.GridFunction, p, params: JacobiParams, delta_range=(1e-3, 1e-1),
                   quad: QuadratureSpec | None = None, spectral_quad: QuadratureSpec | None = None,
                   points: int = 16) -> DecayProfile:
    """Least-squares slope of log omega against log delta."""
    lo, hi = (float(v) for v in delta_range)
    if not (1e-4 <= lo < hi <= 1.0):
        raise ConfigurationError(f"delta range {delta_range} must lie inside [1e-4, 1]")
    if points < MIN_PROFILE_POINTS:
        raise ConfigurationError(f"decay fit needs at least {MIN_PROFILE_POINTS} points")
    deltas = np.logspace(math.log10(lo), math.log10(hi), int(points))
    omegas, S = omega_profile(f, p, params, deltas, quad, spectral_quad)
    floor = sp.noise_floor(f, params, p, quad, spectral_quad)
    meta = {"function": f.name, "p": float(p), "params": params.to_dict()}
    return profile_from_readings(f, p, params, deltas, omegas, floor, meta)


def _check_grid(delta_grid):
    d = np.asarray(delta_grid, dtype=float)
    if d.ndim != 1 or d.size < MIN_GRID_POINTS:
        raise ConfigurationError(f"delta grid needs at least {MIN_GRID_POINTS} points for the tail fits")
    if np.any(d <= 0) or np.any(np.diff(d) <= 0):
        raise ConfigurationError("delta grid must be positive and strictly increasing")
    if d[0] > 1e-3 * (1 + 1e-9) or d[-1] < 10.0 * (1 - 1e-9):
        raise ConfigurationError("delta grid must span at least [1e-3, 10]")
    return d


@dataclass(frozen=True)
class SeminormResult:
    value: float
    grid_part: float
    small_tail: float
    large_tail: float
    profile: DecayProfile


def besov_seminorm_detail(f: sp.GridFunction, spec: BesovSpec, params: JacobiParams, delta_grid=None,
                          quad: QuadratureSpec | None = None,
                          spectral_quad: QuadratureSpec | None = None) -> SeminormResult:
    d = _check_grid(DEFAULT_DELTA_GRID if delta_grid is None else delta_grid)
    norm = sp.lp_norm_weighted(f, params, spec.p, quad)
    if norm == 0.0:
        empty = DecayProfile(d, np.zeros(d.size), float("nan"), 0.0, 0.0)
        return SeminormResult(0.0, 0.0, 0.0, 0.0, empty)
    omegas, _ = omega_profile(f, spec.p, params, d, quad, spectral_quad)
    floor = sp.noise_floor(f, params, spec.p, quad, spectral_quad)
    meta = {"function": f.name, "p": spec.p, "params": params.to_dict()}
    prof = profile_from_readings(f, spec.p, params, d, omegas, floor, meta, fit_mask=d <= SMALL_DELTA)
    # censored readings are replaced by the fitted model
    w = np.where(prof.censored, prof.model(d), omegas)
    g, q, e = spec.gamma, spec.q, prof.fitted_exponent
    big = 2.0 * norm
    if q == math.inf:
        grid_part = float(np.max(w / d ** g))
        small = math.inf if e < g else float(np.exp(prof.fitted_log_constant) * d[0] ** (e - g))
        large = big / d[-1] ** g
        return SeminormResult(float(max(grid_part, small, large)), grid_part, small, float(large), prof)
    vals = (w / d ** g) ** q
    ld = np.log(d)
    grid_part = float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(ld)))
    if e <= g:
        small = math.inf
    else:
        small = float(np.exp(q * prof.fitted_log_constant) * d[0] ** ((e - g) * q) / ((e - g) * q))
    large = big ** q * d[-1] ** (-g * q) / (g * q)
    total = grid_part + small + large
    value = math.inf if math.isinf(total) else float(total ** (1.0 / q))
    return SeminormResult(value, float(grid_part ** (1.0 / q)), small, float(large), prof)


def besov_seminorm(f: sp.GridFunction, spec: BesovSpec, params: JacobiParams, delta_grid=None,
                   quad: QuadratureSpec | None = None, spectral_quad: QuadratureSpec | None = None) -> float:
    """Besov-type seminorm; ``math.inf`` when the fitted small-delta tail diverges."""
    return besov_seminorm_detail(f, spec, params, delta_grid, quad, spectral_quad).value


@dataclass(frozen=True)
class Verdict:
    verdict: str
    margin: float
    seminorm: float
    fitted_exponent: float

    def to_dict(self):
        return {"verdict": self.verdict, "margin": self.margin,
                "seminorm": None if math.isinf(self.seminorm) else self.seminorm,
                "fitted_exponent": self.fitted_exponent}


def membership(f: sp.GridFunction, spec: BesovSpec, params: JacobiParams,
               quad: QuadratureSpec | None = None, delta_grid=None,
               spectral_quad: QuadratureSpec | None = None, tolerance=VERDICT_TOLERANCE) -> Verdict:
    """"in", "out" or "inconclusive" with margin |fitted exponent - gamma|."""
    res = besov_seminorm_detail(f, spec, params, delta_grid, quad, spectral_quad)
    e = res.profile.fitted_exponent
    if res.value == 0.0:
        return Verdict("in", math.inf, 0.0, e)
    margin = abs(e - spec.gamma)
    if margin <= tolerance:
        verdict = "inconclusive"
    else:
        verdict = "in" if math.isfinite(res.value) else "out"
    return Verdict(verdict, margin, res.value, e)
