"""Weighted norms, the generalized Fourier transform and translation.

Forward transform  F f(lam) = int f(x) phi_lam(x) A(x) dx
Inverse transform  f(x)     = int F f(lam) phi_lam(x) density(lam) dlam

Both are computed by composite Gauss-Legendre quadrature with the kernel
matrix from :func:`ctht.characters.phi_matrix`. Translation is done on the
spectral side, ``F(tau_x f)(lam) = phi_lam(x) F f(lam)``, and never through
explicit convolution measures.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .characters import one_minus_phi, phi_matrix
from .errors import AccuracyError, ConfigurationError, DomainError
from .hypergroup import JacobiParams
from .quadrature import QuadratureSpec, compensated_sum

SMOOTHNESS_TAGS = ("bump_infinitely_smooth", "lipschitz", "piecewise_constant")
DEFAULT_SPECTRAL_CUTOFF = 40.0
DEFAULT_SPECTRAL_QUAD = QuadratureSpec(DEFAULT_SPECTRAL_CUTOFF, 64, 16)
# sample spacing used when a transform result is turned back into a GridFunction
SAMPLE_SPACING = 2e-3
# tail mass fraction (last tenth of the frequency range) above which a
# spectrum counts as non-decaying for inversion
TAIL_TOLERANCE = 1e-2


@dataclass(frozen=True, eq=False)
class GridFunction:
    """An even function on [0, inf) given by samples.

    Values between samples come from a clamped cubic spline
    (``interpolation="cubic"``) or linear interpolation; the function is
    zero beyond the last sample and beyond ``support_radius``.
    """

    x_grid: np.ndarray
    values: np.ndarray
    support_radius: float | None = None
    smoothness_tag: str = "bump_infinitely_smooth"
    interpolation: str = "cubic"
    name: str = ""

    def __post_init__(self):
        x = np.asarray(self.x_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.size == 0:
            raise DomainError("GridFunction needs a nonempty 1-d grid")
        if v.shape != x.shape:
            raise DomainError("grid and values must have the same length")
        if np.any(~np.isfinite(x)) or np.any(~np.isfinite(v)):
            raise DomainError("GridFunction samples must be finite")
        if x[0] < 0 or np.any(np.diff(x) <= 0):
            raise DomainError("grid must be nonnegative and strictly increasing")
        if self.smoothness_tag not in SMOOTHNESS_TAGS:
            raise ConfigurationError(f"unknown smoothness tag {self.smoothness_tag!r}")
        if self.interpolation not in ("cubic", "linear"):
            raise ConfigurationError(f"unknown interpolation {self.interpolation!r}")
        r = self.support_radius
        if r is not None:
            r = float(r)
            if not r > 0:
                raise DomainError("support_radius must be positive")
            if np.any(v[x > r] != 0):
                raise DomainError("values must vanish beyond the declared support radius")
        x.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "x_grid", x)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "support_radius", r)

    @classmethod
    def from_callable(cls, fn, support_radius, n=4001, **kwargs):
        x = np.linspace(0.0, float(support_radius), int(n))
        return cls(x, np.asarray(fn(x), dtype=float), float(support_radius), **kwargs)

    @property
    def extent(self) -> float:
        """Right end of the region where the function can be nonzero."""
        top = float(self.x_grid[-1])
        return top if self.support_radius is None else min(top, self.support_radius)

    @property
    def max_spacing(self) -> float:
        return float(np.max(np.diff(self.x_grid))) if self.x_grid.size > 1 else 0.0

    @cached_property
    def _spline(self):
        x, v = self.x_grid, self.values
        if x.size < 4:
            return None
        bc_left = (1, 0.0) if x[0] == 0.0 else "not-a-knot"
        return CubicSpline(x, v, bc_type=(bc_left, "not-a-knot"))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        inside = (x >= self.x_grid[0]) & (x <= self.extent)
        if self.interpolation == "cubic" and self._spline is not None:
            out[inside] = self._spline(x[inside])
        else:
            out[inside] = np.interp(x[inside], self.x_grid, self.values)
        return out

    def scaled(self, factor):
        return GridFunction(self.x_grid, factor * self.values, self.support_radius,
                            self.smoothness_tag, self.interpolation, self.name)

    def combine(self, other, a=1.0, b=1.0):
        """``a*self + b*other`` sampled on this grid."""
        if not np.array_equal(self.x_grid, other.x_grid):
            raise ConfigurationError("combine needs identical grids")
        r = None if self.support_radius is None or other.support_radius is None else max(
            self.support_radius, other.support_radius)
        return GridFunction(self.x_grid, a * self.values + b * other.values, r,
                            self.smoothness_tag, self.interpolation, self.name)

    def to_csv(self, path):
        _write_csv(path, ("x", "value"), self.x_grid, self.values)
        return path


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Transform values on a frequency grid.

    When the grid is a quadrature rule its ``weights`` are attached and
    spectral integrals use them directly; ``density`` holds the Plancherel
    density at the grid points.
    """

    lambda_grid: np.ndarray
    values: np.ndarray
    density: np.ndarray | None = None
    weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lam = np.asarray(self.lambda_grid, dtype=float)
        val = np.asarray(self.values, dtype=float)
        if lam.ndim != 1 or lam.shape != val.shape:
            raise DomainError("spectrum grid and values must be matching 1-d arrays")
        if lam.size and (lam[0] <= 0 or np.any(np.diff(lam) <= 0)):
            raise DomainError("spectrum grid must be positive and strictly increasing")
        object.__setattr__(self, "lambda_grid", lam)
        object.__setattr__(self, "values", val)
        for name in ("density", "weights"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != lam.shape:
                    raise DomainError(f"{name} must match the spectrum grid")
                object.__setattr__(self, name, arr)

    @property
    def density_attached(self) -> bool:
        return self.density is not None

    def with_values(self, values):
        return Spectrum(self.lambda_grid, values, self.density, self.weights, dict(self.meta))

    def to_csv(self, path):
        _write_csv(path, ("lambda", "value"), self.lambda_grid, self.values)
        return path


# -- serialization -----------------------------------------------------------

def _write_csv(path, header, xs, ys):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for a, b in zip(xs, ys):
            writer.writerow([format(float(a), ".17g"), format(float(b), ".17g")])


def read_two_column_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return data[:, 0], data[:, 1]


def provenance_hash(*arrays, extra=None) -> str:
    h = hashlib.sha256()
    for arr in arrays:
        h.update(np.ascontiguousarray(np.asarray(arr, dtype=float)).tobytes())
    if extra is not None:
        h.update(json.dumps(extra, sort_keys=True).encode())
    return h.hexdigest()


def envelope(obj, params: JacobiParams, quad: QuadratureSpec | None = None) -> dict:
    """JSON envelope for a GridFunction or Spectrum with its metadata."""
    if isinstance(obj, GridFunction):
        kind, grid, extra = "grid_function", obj.x_grid, {
            "support_radius": obj.support_radius, "smoothness_tag": obj.smoothness_tag,
            "interpolation": obj.interpolation, "name": obj.name}
    elif isinstance(obj, Spectrum):
        kind, grid, extra = "spectrum", obj.lambda_grid, {
            "density_attached": obj.density_attached, "meta": obj.meta}
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    out = {
        "kind": kind,
        "params": params.to_dict(),
        "quadrature": None if quad is None else quad.to_dict(),
        "grid": [float(v) for v in grid],
        "values": [float(v) for v in obj.values],
        "provenance": provenance_hash(grid, obj.values, extra={"params": params.to_dict()}),
    }
    out.update(extra)
    return out


def grid_function_from_envelope(data) -> GridFunction:
    if data.get("kind") != "grid_function":
        raise ConfigurationError("envelope does not hold a grid function")
    return GridFunction(np.array(data["grid"]), np.array(data["values"]), data.get("support_radius"),
                        data.get("smoothness_tag", "bump_infinitely_smooth"),
                        data.get("interpolation", "cubic"), data.get("name", ""))


def spectrum_from_envelope(data, params: JacobiParams) -> Spectrum:
    if data.get("kind") != "spectrum":
        raise ConfigurationError("envelope does not hold a spectrum")
    lam = np.array(data["grid"])
    quad = data.get("quadrature")
    weights = None
    if quad is not None:
        spec = QuadratureSpec.from_dict(quad)
        nodes, w = spec.nodes()
        if nodes.shape == lam.shape and np.allclose(nodes, lam, rtol=0, atol=0):
            weights = w
    return Spectrum(lam, np.array(data["values"]), params.density(lam), weights, data.get("meta", {}))


# -- quadrature helpers --------------------------------------------------------

def default_quadrature(f: GridFunction, radius=None) -> QuadratureSpec:
    return QuadratureSpec(float(radius if radius is not None else f.extent))


def x_nodes(quad: QuadratureSpec, params: JacobiParams | None = None):
    """Nodes and weights of ``quad``, graded towards x = 0 when A(x) ~ x**(2 alpha + 1)
    has a non-integer exponent (a singular derivative at the origin)."""
    if params is None or float(2.0 * params.alpha + 1.0).is_integer():
        return quad.nodes()
    first = quad.truncation_radius / quad.panels
    return quad.nodes(breakpoints=[first * 0.5 ** j for j in range(1, 31)])


def _x_rule(f: GridFunction, quad: QuadratureSpec | None, params: JacobiParams | None = None):
    quad = default_quadrature(f) if quad is None else quad
    if quad.truncation_radius < f.extent * (1 - 1e-12):
        raise ConfigurationError(
            f"truncation radius {quad.truncation_radius} is below the support radius {f.extent}")
    x, w = x_nodes(quad, params)
    keep = x <= f.extent
    return x[keep], w[keep]


def spectral_rule(params: JacobiParams, quad: QuadratureSpec | None = None, lower=0.0, upper=None,
                  breakpoints=()):
    """Nodes, weights and density values for a frequency integral."""
    from .quadrature import composite_gauss_legendre

    quad = DEFAULT_SPECTRAL_QUAD if quad is None else quad
    upper = quad.truncation_radius if upper is None else float(upper)
    # same panel density as the base rule
    panels = max(1, int(math.ceil(quad.panels * (upper - lower) / quad.truncation_radius)))
    lam, w = composite_gauss_legendre(lower, upper, panels, quad.points_per_panel, breakpoints)
    return lam, w, params.density(lam)


# -- norms ------------------------------------------------------------------------

def _check_p(p, top=math.inf):
    if p == "inf" or p == math.inf:
        return math.inf
    p = float(p)
    if not 1.0 <= p <= top:
        raise DomainError(f"exponent p = {p} outside [1, {top}]")
    return p


def lp_norm_weighted(f: GridFunction, params: JacobiParams, p, quad: QuadratureSpec | None = None) -> float:
    """``(int |f|**p A(x) dx)**(1/p)``; ``p = inf`` gives the sample maximum."""
    p = _check_p(p)
    if f.x_grid.size == 0:
        raise DomainError("empty grid")
    if p == math.inf:
        return float(np.max(np.abs(f.values)))
    x, w = _x_rule(f, quad, params)
    return weighted_norm_at_nodes(f(x), x, w, params, p)


def weighted_norm_at_nodes(values, x, w, params: JacobiParams, p) -> float:
    vals = np.abs(np.asarray(values, dtype=float))
    if p == math.inf:
        return float(np.max(vals)) if vals.size else 0.0
    total = float(compensated_sum(w * vals ** p * params.weight(x)))
    return total ** (1.0 / p)


def lp_norm_spectral(S: Spectrum, params: JacobiParams, p, quad: QuadratureSpec | None = None) -> float:
    """Norm in ``L^p(dlam / |c(lam)|**2)``; ``p = inf`` is the grid maximum."""
    p = _check_p(p)
    if p == math.inf:
        return float(np.max(np.abs(S.values))) if S.values.size else 0.0
    lam, w, dens, vals = _on_rule(S, params, quad)
    total = float(compensated_sum(w * np.abs(vals) ** p * dens))
    return total ** (1.0 / p)


def _on_rule(S: Spectrum, params, quad):
    """Spectrum values on a quadrature rule (interpolating if necessary)."""
    if S.weights is not None:
        dens = S.density if S.density is not None else params.density(S.lambda_grid)
        return S.lambda_grid, S.weights, dens, S.values
    lam, w, dens = spectral_rule(params, quad, upper=min(
        (quad or DEFAULT_SPECTRAL_QUAD).truncation_radius, float(S.lambda_grid[-1])))
    if S.lambda_grid.size < 4:
        raise ConfigurationError("spectrum without quadrature weights needs at least 4 points")
    vals = CubicSpline(S.lambda_grid, S.values)(np.clip(lam, S.lambda_grid[0], S.lambda_grid[-1]))
    vals[lam < S.lambda_grid[0]] = S.values[0]
    return lam, w, dens, vals


# -- transforms -------------------------------------------------------------------

def _forward_values(f: GridFunction, params, lams, quad):
    x, w = _x_rule(f, quad, params)
    fa = w * f(x) * params.weight(x)
    nz = fa != 0
    if not np.any(nz):
        return np.zeros(np.shape(lams))
    kern = phi_matrix(params, lams, x)
    return compensated_sum(kern[:, nz] * fa[None, nz], axis=1)


def forward_transform(f: GridFunction, params: JacobiParams, lambdas=None,
                      quad: QuadratureSpec | None = None) -> Spectrum:
    """Generalized Fourier transform of ``f`` at positive frequencies.

    ``lambdas`` is either an array of frequencies or a QuadratureSpec for the
    frequency axis (default: [0, 40], 64 x 16 nodes); in the latter case the
    quadrature weights travel with the spectrum.
    """
    weights = None
    spec_quad = None
    if lambdas is None or isinstance(lambdas, QuadratureSpec):
        spec_quad = DEFAULT_SPECTRAL_QUAD if lambdas is None else lambdas
        lams, weights, dens = spectral_rule(params, spec_quad)
    else:
        lams = np.atleast_1d(np.asarray(lambdas, dtype=float))
        if np.any(lams <= 0) or np.any(~np.isfinite(lams)):
            raise DomainError("transform frequencies must be finite and positive")
        dens = params.density(lams)
    vals = _forward_values(f, params, lams, quad)
    meta = {"function": f.name}
    if spec_quad is not None:
        meta["spectral_quadrature"] = spec_quad.to_dict()
    return Spectrum(lams, vals, dens, weights, meta)


def tail_estimate(S: Spectrum, params: JacobiParams, quad=None) -> tuple[float, float]:
    """(tail, total): mass of |S| density over the last tenth of the grid."""
    lam, w, dens, vals = _on_rule(S, params, quad)
    mass = w * np.abs(vals) * dens
    top = lam[-1]
    tail = float(np.sum(mass[lam >= 0.9 * top]))
    return tail, float(np.sum(mass))


def inverse_transform(S: Spectrum, params: JacobiParams, xs, quad: QuadratureSpec | None = None,
                      check_tail=True, support_radius=None, name="",
                      tail_tolerance=TAIL_TOLERANCE) -> GridFunction:
    """``x -> int S(lam) phi_lam(x) density(lam) dlam`` sampled at ``xs``.

    Raises :class:`AccuracyError` when the spectrum has not decayed by the
    end of its grid: the mass of ``|S| density`` over the last tenth of the
    range exceeds ``tail_tolerance`` of the total.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    lam, w, dens, vals = _on_rule(S, params, quad)
    if check_tail:
        tail, total = tail_estimate(S, params, quad)
        if tail > tail_tolerance * total and tail > 1e-300:
            raise AccuracyError(
                f"spectrum does not decay: tail mass {tail:.3e} of total {total:.3e}",
                estimate=tail)
    out = inverse_at(lam, w * dens * vals, params, xs)
    return GridFunction(xs, out, support_radius, "bump_infinitely_smooth", "cubic", name)


def inverse_at(lam, coeff, params, xs):
    """``sum_j coeff_j phi_{lam_j}(x)`` for every x (fixed-order sums)."""
    nz = coeff != 0
    if not np.any(nz):
        return np.zeros(np.shape(xs))
    kern = phi_matrix(params, lam[nz], xs)
    return compensated_sum(kern * coeff[nz][:, None], axis=0)


def _sample_grid(top):
    n = int(math.ceil(top / SAMPLE_SPACING)) + 1
    return np.linspace(0.0, top, max(n, 8))


def translate(f: GridFunction, x0: float, params: JacobiParams, quad: QuadratureSpec | None = None,
              spectral_quad: QuadratureSpec | None = None, xs=None) -> GridFunction:
    """Generalized translate ``tau_{x0} f`` computed on the spectral side.

    Sampled by default on a uniform grid of [0, x0 + r], r the support
    radius of ``f``; the translate vanishes beyond x0 + r.
    """
    x0 = float(x0)
    if not (x0 >= 0 and math.isfinite(x0)):
        raise DomainError("translation distance must be finite and >= 0")
    S = forward_transform(f, params, spectral_quad or DEFAULT_SPECTRAL_QUAD, quad)
    top = x0 + f.extent
    if xs is None:
        xs = _sample_grid(top)
    if x0 == 0:
        shifted = S
    else:
        shifted = S.with_values(phi_matrix(params, S.lambda_grid, np.array([x0]))[:, 0] * S.values)
    g = inverse_transform(shifted, params, xs, spectral_quad, name=f"tau_{x0:g}({f.name})")
    vals = np.where(g.x_grid <= top, g.values, 0.0)
    return GridFunction(g.x_grid, vals, top, f.smoothness_tag,
                        "cubic" if f.interpolation == "cubic" else "linear", g.name)


def translate_norm(f: GridFunction, x0: float, p, params: JacobiParams, quad: QuadratureSpec | None = None,
                   spectral_quad: QuadratureSpec | None = None, spectrum: Spectrum | None = None,
                   tail_tolerance=TAIL_TOLERANCE) -> float:
    """``||tau_{x0} f||_{A,p}`` with the translate synthesised at quadrature nodes.

    Avoids re-interpolating a sampled translate, whose interpolation error
    would swamp a contraction check.
    """
    p = _check_p(p)
    x0 = float(x0)
    if not (x0 >= 0 and math.isfinite(x0)):
        raise DomainError("translation distance must be finite and >= 0")
    S = spectrum if spectrum is not None else forward_transform(
        f, params, spectral_quad or DEFAULT_SPECTRAL_QUAD, quad)
    shifted = S.with_values(phi_matrix(params, S.lambda_grid, np.array([x0]))[:, 0] * S.values)
    tail, total = tail_estimate(shifted, params, spectral_quad)
    if tail > tail_tolerance * total and tail > 1e-300:
        raise AccuracyError(f"spectrum does not decay: tail mass {tail:.3e} of total {total:.3e}",
                            estimate=tail)
    base = default_quadrature(f) if quad is None else quad
    top = x0 + f.extent
    rule = QuadratureSpec(top, int(math.ceil(base.panels * top / base.truncation_radius)),
                          base.points_per_panel, base.rel_tolerance)
    x, w = x_nodes(rule, params)
    lam, lw, dens, vals = _on_rule(shifted, params, spectral_quad)
    return weighted_norm_at_nodes(inverse_at(lam, lw * dens * vals, params, x), x, w, params, p)


def support_leakage(tf: GridFunction, x0: float, radius: float, eps=0.05) -> float:
    """Largest |tau_{x0} f(y)| for y outside [x0 - r - eps, x0 + r + eps]."""
    lo, hi = x0 - radius - eps, x0 + radius + eps
    outside = (tf.x_grid < lo) | (tf.x_grid > hi)
    return float(np.max(np.abs(tf.values[outside]))) if np.any(outside) else 0.0


def difference_spectrum(S: Spectrum, params: JacobiParams, delta: float) -> Spectrum:
    """Spectrum of ``tau_delta f - f``: ``(phi_lam(delta) - 1) F f(lam)``."""
    return S.with_values(-one_minus_phi(params, S.lambda_grid, delta) * S.values)


def modulus_of_continuity(f: GridFunction, delta: float, p, params: JacobiParams,
                          quad: QuadratureSpec | None = None,
                          spectral_quad: QuadratureSpec | None = None,
                          spectrum: Spectrum | None = None) -> float:
    """``||tau_delta f - f||_{A,p}`` for p in [1, 2].

    The difference is formed on the spectral side, so no subtraction of two
    nearly equal functions happens. For p = 2 the norm is taken there too
    (Plancherel); otherwise the difference is synthesised at quadrature
    nodes of [0, delta + r] and integrated against A.
    """
    p = _check_p(p, 2.0)
    delta = float(delta)
    if not (delta > 0 and math.isfinite(delta)):
        raise DomainError("delta must be positive")
    S = spectrum if spectrum is not None else forward_transform(
        f, params, spectral_quad or DEFAULT_SPECTRAL_QUAD, quad)
    D = difference_spectrum(S, params, delta)
    if p == 2.0:
        return lp_norm_spectral(D, params, 2.0, spectral_quad)
    base = default_quadrature(f) if quad is None else quad
    rule = base.with_radius(delta + f.extent)
    x, w = x_nodes(rule, params)
    lam, lw, dens, vals = _on_rule(D, params, spectral_quad)
    diff = inverse_at(lam, lw * dens * vals, params, x)
    return weighted_norm_at_nodes(diff, x, w, params, p)


def round_trip_error(f: GridFunction, params: JacobiParams, quad: QuadratureSpec | None = None,
                     spectral_quad: QuadratureSpec | None = None) -> float:
    """Relative weighted L2 error of inverse(forward(f)) at quadrature nodes."""
    x, w = _x_rule(f, quad, params)
    S = forward_transform(f, params, spectral_quad or DEFAULT_SPECTRAL_QUAD, quad)
    lam, lw, dens, vals = _on_rule(S, params, spectral_quad)
    back = inverse_at(lam, lw * dens * vals, params, x)
    ref = f(x)
    num = weighted_norm_at_nodes(back - ref, x, w, params, 2.0)
    den = weighted_norm_at_nodes(ref, x, w, params, 2.0)
    return num / den if den > 0 else 0.0


def noise_floor(f: GridFunction, params: JacobiParams, p, quad=None, spectral_quad=None) -> float:
    """Smallest modulus reading treated as signal.

    10x the relative round-trip error times ``||f||_{A,p}``. A round trip
    that closes better than the quadrature's declared tolerance only shows
    self-consistency, so the tolerance is used as a lower bound.
    """
    norm = lp_norm_weighted(f, params, p, quad)
    if norm == 0:
        return 0.0
    tol = (spectral_quad or DEFAULT_SPECTRAL_QUAD).rel_tolerance
    return 10.0 * max(round_trip_error(f, params, quad, spectral_quad), tol) * norm
