"""Scenario runner checking the transform inequalities numerically.

Each check produces an :class:`InequalityReport` with the two sides of an
inequality ``lhs <= C * rhs``. The constants are never assumed; a scenario
fits ``C`` as the largest ratio over its family and then asks whether the
ratios stay bounded (max/min within ``ratio_spread``) across the deltas of
each function.

Frequency integrals use one composite Gauss-Legendre rule per function
whose panel edges include the regime threshold ``k`` and every ``1/delta``,
so the truncated integrands are smooth on each panel.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import spectral as sp
from .besov import decay_exponent
from .characters import bound_ratios
from .errors import AccuracyError, ConfigurationError, DomainError
from .families import make_function, spectral_quadrature_for
from .hypergroup import JacobiParams
from .quadrature import QuadratureSpec, composite_gauss_legendre, compensated_sum

CHECKS = ("character-bound", "hardy-littlewood", "lemma2", "riemann-lebesgue",
          "low-frequency", "eq12", "theorems")
DELTA_CHECKS = ("lemma2", "riemann-lebesgue", "low-frequency", "eq12")
THEOREM_CUTOFFS = (10.0, 20.0, 40.0, 80.0)
GEOMETRIC_RATIO = 0.5
# relative size of |F| treated as transform noise in the partial integrals
SPECTRUM_NOISE = 1e-13
HL_TAIL_LIMIT = 0.01
# the shared frequency rule reaches 2/delta_min, but never past this multiple of the cutoff
MAX_RULE_FACTOR = 4.0


# -- configuration -----------------------------------------------------------

@dataclass(frozen=True)
class FunctionSpec:
    name: str
    scale: float = 1.0
    dilation: float = 1.0

    @property
    def label(self):
        out = self.name if self.dilation == 1.0 else f"{self.name}@{self.dilation:g}"
        return out if self.scale == 1.0 else f"{self.scale:g}*{out}"

    def build(self) -> sp.GridFunction:
        return make_function(self.name, scale=self.scale, dilation=self.dilation)

    def spectral_quadrature(self, base: QuadratureSpec) -> QuadratureSpec:
        return spectral_quadrature_for(self.name, self.dilation, base)

    @classmethod
    def parse(cls, item):
        if isinstance(item, FunctionSpec):
            return item
        if isinstance(item, str):
            return cls(item)
        if isinstance(item, dict):
            return cls(str(item["name"]), float(item.get("scale", 1.0)), float(item.get("dilation", 1.0)))
        raise ConfigurationError(f"cannot read function descriptor {item!r}")

    def to_dict(self):
        return {"name": self.name, "scale": self.scale, "dilation": self.dilation}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: str
    params: JacobiParams
    functions: tuple = ()
    p: float = 2.0
    checks: tuple | None = None
    quadrature: QuadratureSpec | None = None
    spectral_quadrature: QuadratureSpec = sp.DEFAULT_SPECTRAL_QUAD
    delta_grid: tuple = (0.03, 0.1, 0.3)
    lambda_grid: tuple = tuple(np.logspace(-2, 2, 50))
    t_grid: tuple = tuple(np.logspace(-2, 0, 50))
    k_threshold: float | None = None
    s_values: tuple | None = None
    ratio_spread: float = 10.0
    slack: float = 1e-9
    output_dir: str | None = None

    def __post_init__(self):
        if not self.scenario_id or any(c in self.scenario_id for c in "/\\"):
            raise ConfigurationError("scenario_id must be a nonempty file-name-safe string")
        p = float(self.p)
        if not 1.0 <= p <= 2.0:
            raise ConfigurationError(f"scenario p must lie in [1, 2], got {p}")
        object.__setattr__(self, "p", p)
        if self.checks is None:
            # the default drops the checks that need p > 1
            default = CHECKS if p > 1.0 else tuple(c for c in CHECKS if c not in ("hardy-littlewood", "eq12"))
            object.__setattr__(self, "checks", default)
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise ConfigurationError(f"unknown checks {bad}; choose from {list(CHECKS)}")
        if p == 1.0 and any(c in ("hardy-littlewood", "eq12") for c in self.checks):
            raise ConfigurationError("hardy-littlewood and eq12 need 1 < p <= 2")
        if any(not d > 0 for d in self.delta_grid):
            raise ConfigurationError("delta grid must be positive")
        if self.k_threshold is not None and not self.k_threshold > 0:
            raise ConfigurationError("k_threshold must be positive")
        if not self.ratio_spread >= 1:
            raise ConfigurationError("ratio_spread must be >= 1")
        object.__setattr__(self, "functions", tuple(FunctionSpec.parse(f) for f in self.functions))
        object.__setattr__(self, "checks", tuple(self.checks))
        object.__setattr__(self, "delta_grid", tuple(sorted(float(d) for d in self.delta_grid)))

    @property
    def k(self) -> float:
        return self.params.k_threshold if self.k_threshold is None else float(self.k_threshold)

    @property
    def p_conj(self) -> float:
        return math.inf if self.p == 1.0 else self.p / (self.p - 1.0)

    @classmethod
    def from_dict(cls, data):
        try:
            params = JacobiParams.from_dict(data["params"])
            kw = {"scenario_id": str(data["scenario_id"]), "params": params}
        except KeyError as exc:
            raise ConfigurationError(f"scenario is missing {exc}") from None
        for key in ("p", "ratio_spread", "slack", "k_threshold"):
            if data.get(key) is not None:
                kw[key] = float(data[key])
        for key in ("functions", "checks", "delta_grid", "lambda_grid", "t_grid", "s_values"):
            if data.get(key) is not None:
                kw[key] = tuple(data[key])
        if data.get("quadrature") is not None:
            kw["quadrature"] = QuadratureSpec.from_dict(data["quadrature"])
        if data.get("spectral_quadrature") is not None:
            kw["spectral_quadrature"] = QuadratureSpec.from_dict(data["spectral_quadrature"])
        if data.get("output_dir") is not None:
            kw["output_dir"] = str(data["output_dir"])
        return cls(**kw)

    def to_dict(self):
        return {
            "scenario_id": self.scenario_id, "params": self.params.to_dict(),
            "functions": [f.to_dict() for f in self.functions], "p": self.p,
            "checks": list(self.checks),
            "quadrature": None if self.quadrature is None else self.quadrature.to_dict(),
            "spectral_quadrature": self.spectral_quadrature.to_dict(),
            "delta_grid": list(self.delta_grid), "lambda_grid": [float(v) for v in self.lambda_grid],
            "t_grid": [float(v) for v in self.t_grid], "k_threshold": self.k,
            "s_values": None if self.s_values is None else list(self.s_values),
            "ratio_spread": self.ratio_spread, "slack": self.slack,
        }


def load_scenarios(source) -> list[ScenarioConfig]:
    """Scenarios from a bundled name, a dict, or a JSON file path.

    A document either is one scenario or holds a ``scenarios`` list; a
    top-level ``output_dir`` is inherited by scenarios that lack one.
    """
    if isinstance(source, str) and source in BUNDLED:
        data = BUNDLED[source]
    elif isinstance(source, dict):
        data = source
    else:
        try:
            with open(source) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {source}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {source} is not valid JSON: {exc}") from None
    items = data.get("scenarios", [data])
    out = []
    for item in items:
        if "output_dir" not in item and "output_dir" in data:
            item = dict(item, output_dir=data["output_dir"])
        out.append(ScenarioConfig.from_dict(item))
    return out


# -- reports -------------------------------------------------------------------

def _clean(v):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def _unclean(v):
    if isinstance(v, str) and v in ("nan", "inf", "-inf"):
        return float(v)
    return v


@dataclass
class InequalityReport:
    scenario_id: str
    lhs: float
    rhs: float
    ratio: float
    fitted_constant: float
    passed: bool
    metadata: dict = field(default_factory=dict)

    def to_dict(self):
        return _clean({"scenario_id": self.scenario_id, "lhs": self.lhs, "rhs": self.rhs,
                       "ratio": self.ratio, "fitted_constant": self.fitted_constant,
                       "pass": self.passed, "metadata": self.metadata})

    @classmethod
    def from_dict(cls, data):
        return cls(data["scenario_id"], _unclean(data["lhs"]), _unclean(data["rhs"]),
                   _unclean(data["ratio"]), _unclean(data["fitted_constant"]), bool(data["pass"]),
                   data.get("metadata", {}))


def _ratio(lhs, rhs):
    if rhs == 0:
        return 0.0 if lhs == 0 else math.inf
    return lhs / rhs


def _report(sid, lhs, rhs, slack, **meta):
    lhs, rhs = float(lhs), float(rhs)
    r = _ratio(lhs, rhs)
    ok = math.isfinite(r) and r >= 0 and lhs <= r * rhs * (1.0 + slack) + 0.0
    return InequalityReport(sid, lhs, rhs, r, r, bool(ok), dict(meta, slack=slack))


# -- per-function analysis -------------------------------------------------------

def g_weight(params: JacobiParams, x, k=None):
    """x**3 for x <= k and x**(2(alpha+1)) for x > k."""
    k = params.k_threshold if k is None else float(k)
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa <= 0):
        raise DomainError("g_weight needs finite x > 0")
    if not k > 0:
        raise DomainError("g_weight needs k > 0")
    out = np.where(xa <= k, xa ** 3, xa ** (2.0 * (params.alpha + 1.0)))
    return float(out) if out.ndim == 0 else out


class FunctionAnalysis:
    """Shared data for all checks on one function: spectrum on a frequency
    rule with kinks at panel edges, norms, modulus readings and noise floor."""

    def __init__(self, cfg: ScenarioConfig, f: sp.GridFunction, spectral_quad=None, extra_deltas=()):
        self.cfg = cfg
        self.f = f
        self.params = cfg.params
        self.spec_quad = spectral_quad or cfg.spectral_quadrature
        deltas = sorted(set(cfg.delta_grid) | set(float(d) for d in extra_deltas))
        self.deltas = deltas
        base = self.spec_quad
        top = base.truncation_radius
        if deltas:
            top = min(max(top, 2.0 / deltas[0]), MAX_RULE_FACTOR * base.truncation_radius)
        panels = int(math.ceil(base.panels * top / base.truncation_radius))
        first = top / panels
        # geometric edges resolve the algebraic singularity of g**(p-2) at 0
        grading = [first * 0.5 ** j for j in range(1, 25)]
        breaks = [cfg.k] + [1.0 / d for d in deltas] + grading
        self.lam, self.w = composite_gauss_legendre(0.0, top, panels, base.points_per_panel, breaks)
        self.dens = self.params.density(self.lam)
        self.top = top
        self.is_zero = not np.any(f.values)
        if self.is_zero:
            self.F = np.zeros(self.lam.shape)
        else:
            self.F = sp.forward_transform(f, self.params, self.lam, cfg.quadrature).values
        self._spectrum = None
        self._omega = {}
        self._floor = {}

    def norm(self, p):
        return sp.lp_norm_weighted(self.f, self.params, p, self.cfg.quadrature)

    @property
    def spectrum(self):
        if self._spectrum is None:
            self._spectrum = sp.forward_transform(self.f, self.params, self.spec_quad, self.cfg.quadrature)
        return self._spectrum

    def omega(self, delta, p):
        key = (float(delta), float(p))
        if key not in self._omega:
            self._omega[key] = sp.modulus_of_continuity(
                self.f, delta, p, self.params, self.cfg.quadrature, self.spec_quad, spectrum=self.spectrum)
        return self._omega[key]

    def noise_floor(self, p):
        if p not in self._floor:
            self._floor[p] = sp.noise_floor(self.f, self.params, p, self.cfg.quadrature, self.spec_quad)
        return self._floor[p]

    def integral(self, values, mask=None):
        terms = self.w * values * self.dens
        if mask is not None:
            terms = np.where(mask, terms, 0.0)
        return float(compensated_sum(terms))

    def rhs_omega(self, delta, p, check):
        """omega(f, delta), refusing readings at or below the noise floor."""
        om = self.omega(delta, p)
        floor = self.noise_floor(p)
        if om <= floor:
            raise AccuracyError(
                f"{check}: modulus {om:.3e} at delta={delta:g} is below the noise floor {floor:.3e}",
                partial=om, estimate=floor)
        return om, floor


def _analysis(cfg, f, ctx, delta=None):
    if ctx is not None and (delta is None or float(delta) in ctx.deltas):
        return ctx
    return FunctionAnalysis(cfg, f, extra_deltas=() if delta is None else (delta,))


def _sid(cfg, check, f, delta=None, extra=""):
    out = f"{cfg.scenario_id}/{check}/{f.name or 'f'}"
    if delta is not None:
        out += f"/delta={delta:g}"
    return out + extra


# -- checks ------------------------------------------------------------------------

def hardy_littlewood_check(cfg: ScenarioConfig, f: sp.GridFunction, ctx=None) -> InequalityReport:
    """int g**(p-2) |F f|**p dlam/|c|**2  against  ||f||_{A,p}**p."""
    p = cfg.p
    if not 1.0 < p <= 2.0:
        raise ConfigurationError("hardy-littlewood needs 1 < p <= 2")
    a = _analysis(cfg, f, ctx)
    sid = _sid(cfg, "hardy-littlewood", f)
    if a.is_zero:
        return _report(sid, 0.0, 0.0, cfg.slack, p=p)
    gw = g_weight(a.params, a.lam, cfg.k) ** (p - 2.0)
    vals = gw * np.abs(a.F) ** p
    lhs = a.integral(vals)
    tail = a.integral(vals, a.lam >= 0.9 * a.top)
    if tail > HL_TAIL_LIMIT * lhs:
        raise AccuracyError(f"hardy-littlewood: spectral tail {tail:.3e} exceeds 1% of {lhs:.3e}",
                            partial=lhs, estimate=tail)
    rhs = a.norm(p) ** p
    return _report(sid, lhs, rhs, cfg.slack, p=p, k=cfg.k, tail=tail, cutoff=a.top)


def lemma2_check(cfg: ScenarioConfig, f: sp.GridFunction, delta: float, ctx=None) -> InequalityReport:
    """(int min(1, (delta lam)**(2p')) |F f|**p' dmu)**(1/p') against omega(f, delta).

    At p = 1 the left side is the grid maximum of min(1, (delta lam)**2) |F f|.
    """
    a = _analysis(cfg, f, ctx, delta)
    sid = _sid(cfg, "lemma2", f, delta)
    if a.is_zero:
        return _report(sid, 0.0, 0.0, cfg.slack, p=cfg.p, delta=delta)
    rhs, floor = a.rhs_omega(delta, cfg.p, "lemma2")
    damp = np.minimum(1.0, (delta * a.lam) ** 2)
    q = cfg.p_conj
    if math.isinf(q):
        lhs = float(np.max(damp * np.abs(a.F)))
    else:
        lhs = a.integral(damp ** q * np.abs(a.F) ** q) ** (1.0 / q)
    return _report(sid, lhs, rhs, cfg.slack, p=cfg.p, delta=delta, noise_floor=floor)


def riemann_lebesgue_check(cfg: ScenarioConfig, f: sp.GridFunction, delta: float, ctx=None) -> InequalityReport:
    """High-frequency tail (int_{1/delta} |F f|**p' dmu)**(1/p') against omega(f, delta)."""
    a = _analysis(cfg, f, ctx, delta)
    sid = _sid(cfg, "riemann-lebesgue", f, delta)
    if a.is_zero:
        return _report(sid, 0.0, 0.0, cfg.slack, p=cfg.p, delta=delta)
    rhs, floor = a.rhs_omega(delta, cfg.p, "riemann-lebesgue")
    high = a.lam >= 1.0 / delta
    q = cfg.p_conj
    if math.isinf(q):
        lhs = float(np.max(np.abs(a.F[high]))) if np.any(high) else 0.0
    else:
        lhs = a.integral(np.abs(a.F) ** q, high) ** (1.0 / q)
    return _report(sid, lhs, rhs, cfg.slack, p=cfg.p, delta=delta, noise_floor=floor,
                   lower_frequency=1.0 / delta, cutoff=a.top)


def low_frequency_check(cfg: ScenarioConfig, f: sp.GridFunction, delta: float, ctx=None) -> InequalityReport:
    """delta**2 (int_0^{1/delta} lam**(2p') |F f|**p' dmu)**(1/p') against omega(f, delta).

    At p = 1: the maximum of (delta lam)**2 |F f| over 0 < lam < 1/delta.
    """
    a = _analysis(cfg, f, ctx, delta)
    sid = _sid(cfg, "low-frequency", f, delta)
    if a.is_zero:
        return _report(sid, 0.0, 0.0, cfg.slack, p=cfg.p, delta=delta)
    rhs, floor = a.rhs_omega(delta, cfg.p, "low-frequency")
    low = a.lam < 1.0 / delta
    q = cfg.p_conj
    if math.isinf(q):
        lhs = float(np.max(((delta * a.lam) ** 2 * np.abs(a.F))[low]))
    else:
        lhs = delta ** 2 * a.integral(a.lam ** (2 * q) * np.abs(a.F) ** q, low) ** (1.0 / q)
    return _report(sid, lhs, rhs, cfg.slack, p=cfg.p, delta=delta, noise_floor=floor)


def weighted_estimate_check(cfg: ScenarioConfig, f: sp.GridFunction, delta: float, ctx=None) -> InequalityReport:
    """delta**(2p) int_0^{1/delta} lam**(2p) |F f|**p g**(p-2) dmu against omega(f, delta)**p.

    The metadata carries the same integral without ``g**(p-2)`` and the
    extreme values of ``g**(p-2)`` on the rule, which bracket the left side.
    """
    p = cfg.p
    if not 1.0 < p <= 2.0:
        raise ConfigurationError("eq12 needs 1 < p <= 2")
    a = _analysis(cfg, f, ctx, delta)
    sid = _sid(cfg, "eq12", f, delta)
    if a.is_zero:
        return _report(sid, 0.0, 0.0, cfg.slack, p=p, delta=delta)
    om, floor = a.rhs_omega(delta, p, "eq12")
    low = a.lam < 1.0 / delta
    gw = g_weight(a.params, a.lam, cfg.k) ** (p - 2.0)
    base = a.lam ** (2 * p) * np.abs(a.F) ** p
    lhs = delta ** (2 * p) * a.integral(base * gw, low)
    plain = delta ** (2 * p) * a.integral(base, low)
    return _report(sid, lhs, om ** p, cfg.slack, p=p, delta=delta, noise_floor=floor,
                   unweighted=plain, g_factor_min=float(np.min(gw[low])),
                   g_factor_max=float(np.max(gw[low])))


def character_bound_check(cfg: ScenarioConfig) -> InequalityReport:
    """min(1, (lam t)**2) <= C |1 - phi_lam(t)| on the configured grids; C = 1/c_hat."""
    ratios = bound_ratios(cfg.params, cfg.lambda_grid, cfg.t_grid)
    sid = f"{cfg.scenario_id}/character-bound"
    if np.all(np.isnan(ratios)):
        raise ConfigurationError("character-bound: no grid point above the evaluation floor")
    c_hat = float(np.nanmin(ratios))
    if not c_hat > 0:
        return InequalityReport(sid, 1.0, 0.0, math.inf, math.inf, False, {"c_hat": c_hat})
    i, j = np.unravel_index(np.nanargmin(ratios), ratios.shape)
    lam, t = float(cfg.lambda_grid[i]), float(cfg.t_grid[j])
    envelope = min(1.0, (lam * t) ** 2)
    return _report(sid, envelope, c_hat * envelope, cfg.slack, c_hat=c_hat, argmin_lambda=lam,
                   argmin_t=t)


# -- theorem-level integrability -----------------------------------------------------

def integrability_threshold(alpha, gamma, p):
    """Lower endpoint 2(alpha+1)p / (gamma p + 2(alpha+1)(p-1)) of the predicted s-range."""
    return 2.0 * (alpha + 1.0) * p / (gamma * p + 2.0 * (alpha + 1.0) * (p - 1.0))


def synthetic_decay(alpha, gamma, p):
    """Decay exponent m with threshold s0: |S|**s is integrable against
    lam**(2 alpha + 1) exactly when m s > 2(alpha+1), i.e. s > s0."""
    p_conj = math.inf if p == 1 else p / (p - 1.0)
    return gamma + (0.0 if math.isinf(p_conj) else 2.0 * (alpha + 1.0) / p_conj)


def synthetic_spectrum(alpha, gamma, p):
    m = synthetic_decay(alpha, gamma, p)
    return lambda lam: (1.0 + np.asarray(lam, dtype=float) ** 2) ** (-m / 2.0)


def partial_integral_verdict(increments, noise):
    """"convergent", "divergent" or "inconclusive" from increments over doubling ranges."""
    inc = [float(v) for v in increments]
    negligible = [d <= 10.0 * n for d, n in zip(inc, noise)]
    steps = range(1, len(inc))
    if all(inc[i] <= GEOMETRIC_RATIO * inc[i - 1] or negligible[i] for i in steps):
        return "convergent"
    if all(inc[i] >= inc[i - 1] and not negligible[i] for i in steps):
        return "divergent"
    return "inconclusive"


def theorem_integrability_check(cfg: ScenarioConfig, f: sp.GridFunction | None, s: float,
                                gamma_hat: float | None = None, spectrum_fn=None,
                                label=None) -> InequalityReport:
    """Partial integrals I(T) = int_0^T |F f|**s dmu for T in 10, 20, 40, 80.

    ``spectrum_fn`` replaces the transform of ``f`` by a prescribed
    function of lam (then ``gamma_hat`` must be given). The report's lhs is
    the last increment, rhs the first, and ``pass`` says whether the
    verdict agrees with the predicted range s0 < s <= p' (inconclusive
    verdicts pass and are flagged).
    """
    s = float(s)
    if not s > 0:
        raise ConfigurationError("integrability exponent s must be positive")
    params, p = cfg.params, cfg.p
    if spectrum_fn is None and f is None:
        raise ConfigurationError("theorem check needs a function or a spectrum")
    name = label or (f.name if f is not None else "synthetic")
    sid = f"{cfg.scenario_id}/theorems/{name}/s={s:g}"
    top = THEOREM_CUTOFFS[-1]
    base = cfg.spectral_quadrature
    panels = int(math.ceil(base.panels * top / base.truncation_radius))
    lam, w = composite_gauss_legendre(0.0, top, panels, base.points_per_panel, THEOREM_CUTOFFS[:-1])
    dens = params.density(lam)
    if spectrum_fn is not None:
        if gamma_hat is None:
            raise ConfigurationError("a prescribed spectrum needs its gamma")
        F = np.asarray(spectrum_fn(lam), dtype=float)
        eps = 1e-16 * float(np.max(np.abs(F)))
    else:
        if gamma_hat is None:
            gamma_hat = decay_exponent(f, p, params, (1e-3, 1e-1), cfg.quadrature, cfg.spectral_quadrature,
                                       points=12).fitted_exponent
        F = sp.forward_transform(f, params, lam, cfg.quadrature).values
        eps = SPECTRUM_NOISE * float(np.max(np.abs(F))) if F.size else 0.0
    terms = w * np.abs(F) ** s * dens
    noise_terms = w * eps ** s * dens
    edges = (0.0,) + THEOREM_CUTOFFS
    partial, increments, noise = [], [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (lam >= lo) & (lam < hi)
        increments.append(float(compensated_sum(np.where(sel, terms, 0.0))))
        noise.append(float(compensated_sum(np.where(sel, noise_terms, 0.0))))
        partial.append(sum(increments))
    # increments over [T, 2T] for the doubling cutoffs
    doubling = increments[1:]
    verdict = partial_integral_verdict(doubling, noise[1:])
    s0 = integrability_threshold(params.alpha, gamma_hat, p)
    p_conj = math.inf if p == 1.0 else p / (p - 1.0)
    predicted = bool(s0 < s <= p_conj)
    if verdict == "inconclusive":
        agree = None
        ok = True
    else:
        agree = (verdict == "convergent") == predicted
        ok = agree
    meta = {
        "s": s, "p": p, "gamma_hat": gamma_hat, "threshold": s0, "p_conj": p_conj,
        "predicted_convergent": predicted, "verdict": verdict, "agrees": agree,
        "cutoffs": list(THEOREM_CUTOFFS), "partial_integrals": partial[1:],
        "increments": doubling, "noise": noise[1:],
        "synthetic": spectrum_fn is not None,
        "hypothesis_L1": bool(gamma_hat > max(2.0 * (params.alpha + 1.0) / p, 3.0 / p)),
        "hypothesis_sup": bool(gamma_hat > max(3.0, 2.0 * (params.alpha + 1.0))),
    }
    last, first = doubling[-1], doubling[0]
    return InequalityReport(sid, last, first, _ratio(last, first), _ratio(last, first), bool(ok), meta)


# -- scenario runner -------------------------------------------------------------------

_DELTA_FUNCS = {
    "lemma2": lemma2_check,
    "riemann-lebesgue": riemann_lebesgue_check,
    "low-frequency": low_frequency_check,
    "eq12": weighted_estimate_check,
}


def _finalize(group, cfg, spread_key=None):
    """Family constant = max ratio; spread = max/min over a function's deltas."""
    if not group:
        return
    ratios = [r.ratio for r in group]
    finite = all(math.isfinite(r) and r >= 0 for r in ratios)
    c = max(ratios) if finite else math.inf
    spreads = {}
    if spread_key is not None:
        by_fn = {}
        for r in group:
            by_fn.setdefault(r.metadata.get(spread_key), []).append(r.ratio)
        for key, vals in by_fn.items():
            pos = [v for v in vals if v > 0]
            if len(pos) != len(vals) or not pos:
                spreads[key] = 1.0 if all(v == 0 for v in vals) else math.inf
            else:
                spreads[key] = max(pos) / min(pos)
    for r in group:
        r.fitted_constant = c
        spread = spreads.get(r.metadata.get(spread_key), 1.0) if spread_key else 1.0
        r.metadata["family_constant"] = c
        if spread_key:
            r.metadata["delta_spread"] = spread
            r.metadata["spread_ok"] = bool(spread <= cfg.ratio_spread)
        bound_ok = finite and r.lhs <= c * r.rhs * (1.0 + cfg.slack)
        r.passed = bool(r.passed and bound_ok and (spread <= cfg.ratio_spread))


def run_scenario(cfg: ScenarioConfig, checks=None, write=True) -> list[InequalityReport]:
    """Run the configured checks over the family; optionally write reports.

    Reports are ordered by check, function and delta. With ``write`` and an
    ``output_dir``, one JSON report and plot-ready CSVs are written.
    """
    checks = tuple(cfg.checks if checks is None else checks)
    for c in checks:
        if c not in CHECKS:
            raise ConfigurationError(f"unknown check {c!r}")
    reports: list[InequalityReport] = []
    if "character-bound" in checks:
        reports.append(character_bound_check(cfg))
    if not cfg.functions:
        if write and cfg.output_dir:
            write_reports(cfg, reports)
        return reports
    funcs = [(spec, spec.build()) for spec in cfg.functions]
    contexts = {}

    def ctx(spec, f):
        if spec.label not in contexts:
            contexts[spec.label] = FunctionAnalysis(cfg, f, spec.spectral_quadrature(cfg.spectral_quadrature))
        return contexts[spec.label]

    for check in checks:
        if check == "character-bound":
            continue
        group = []
        try:
            if check == "hardy-littlewood":
                if cfg.p == 1.0:
                    continue
                for spec, f in funcs:
                    r = hardy_littlewood_check(cfg, f, ctx(spec, f))
                    r.metadata["function"] = spec.label
                    group.append(r)
                _finalize(group, cfg)
            elif check in _DELTA_FUNCS:
                if check == "eq12" and cfg.p == 1.0:
                    continue
                for spec, f in funcs:
                    for d in cfg.delta_grid:
                        r = _DELTA_FUNCS[check](cfg, f, d, ctx(spec, f))
                        r.metadata["function"] = spec.label
                        group.append(r)
                _finalize(group, cfg, spread_key="function")
            elif check == "theorems":
                for spec, f in funcs:
                    fcfg = replace(cfg, spectral_quadrature=spec.spectral_quadrature(cfg.spectral_quadrature))
                    gamma_hat = decay_exponent(f, cfg.p, cfg.params, (1e-3, 1e-1), cfg.quadrature,
                                               fcfg.spectral_quadrature, points=12).fitted_exponent
                    s_values = cfg.s_values or _default_s_values(cfg)
                    for s in s_values:
                        r = theorem_integrability_check(fcfg, f, s, gamma_hat)
                        r.metadata["function"] = spec.label
                        group.append(r)
        except ConfigurationError as exc:
            raise ConfigurationError(f"check {check!r} in scenario {cfg.scenario_id!r}: {exc}") from None
        except AccuracyError as exc:
            raise AccuracyError(f"check {check!r} in scenario {cfg.scenario_id!r}: {exc}",
                                exc.partial, exc.estimate) from None
        reports.extend(group)
    if write and cfg.output_dir:
        write_reports(cfg, reports)
    return reports


def _default_s_values(cfg):
    out = [1.0]
    if cfg.p > 1.0:
        out.insert(0, cfg.p_conj)
    return out


def _fmt(v):
    return format(float(v), ".17g")


def write_reports(cfg: ScenarioConfig, reports, output_dir=None) -> list[Path]:
    """One JSON file per scenario plus CSVs (delta, lhs, rhs) / (cutoff, partial integral)."""
    out = Path(output_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {"scenario_id": cfg.scenario_id, "params": cfg.params.to_dict(), "config": cfg.to_dict(),
           "checks": [r.to_dict() for r in reports]}
    path = out / f"{cfg.scenario_id}.json"
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False))
        fh.write("\n")
    written = [path]
    rows = {}
    for r in reports:
        parts = r.scenario_id.split("/")
        if len(parts) < 3:
            continue
        check, fname = parts[1], r.metadata.get("function", parts[2])
        if check in DELTA_CHECKS:
            rows.setdefault((check, fname), []).append((r.metadata["delta"], r.lhs, r.rhs))
        elif check == "theorems":
            key = (check, f"{fname}_s{r.metadata['s']:g}")
            rows[key] = list(zip(r.metadata["cutoffs"][1:], r.metadata["partial_integrals"]))
    for (check, fname), data in sorted(rows.items()):
        safe = "".join(ch if ch.isalnum() or ch in "._-@" else "_" for ch in fname)
        p = out / f"{cfg.scenario_id}__{check}__{safe}.csv"
        header = "delta,lhs,rhs" if check in DELTA_CHECKS else "cutoff,partial_integral"
        with open(p, "w", newline="\n") as fh:
            fh.write(header + "\n")
            for row in data:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        written.append(p)
    return written


def read_report_file(path):
    with open(path) as fh:
        doc = json.load(fh)
    return doc, [InequalityReport.from_dict(d) for d in doc["checks"]]


# -- bundled scenarios -------------------------------------------------------------------

_SMOOTH = ["gauss_wide", "gauss_narrow", "cosine_wide", "cosine_narrow", "shifted_energy",
           "mollified_indicator"]
_HALF = {"alpha": 0.5, "beta": 0.5}

BUNDLED = {
    "all-lemmas": {
        "scenarios": [
            {"scenario_id": "p2", "params": _HALF, "p": 2.0, "functions": _SMOOTH + ["cubic_spline_tent"],
             "checks": ["character-bound", "hardy-littlewood", "lemma2", "riemann-lebesgue",
                        "low-frequency", "eq12", "theorems"]},
            {"scenario_id": "p1", "params": _HALF, "p": 1.0, "functions": _SMOOTH,
             "checks": ["lemma2", "riemann-lebesgue", "low-frequency"]},
            {"scenario_id": "p1.5", "params": _HALF, "p": 1.5, "functions": _SMOOTH,
             "checks": ["hardy-littlewood", "eq12"]},
        ],
    },
}


def run_all(source, checks=None, output_dir=None) -> dict:
    """Run every scenario of a config; returns {scenario_id: reports}."""
    results = {}
    for cfg in load_scenarios(source):
        if output_dir is not None:
            cfg = replace(cfg, output_dir=os.fspath(output_dir))
        use = cfg.checks if checks is None else tuple(c for c in checks if c in CHECKS)
        results[cfg.scenario_id] = run_scenario(cfg, use)
    return results
