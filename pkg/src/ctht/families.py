"""Bundled test functions with declared support and smoothness."""

from __future__ import annotations

import numpy as np
from scipy.special import erfc

from .errors import ConfigurationError
from .quadrature import QuadratureSpec
from .spectral import DEFAULT_SPECTRAL_QUAD, GridFunction

DEFAULT_SAMPLES = 4001


def _gauss(sigma):
    return lambda x: np.exp(-(x / sigma) ** 2)


def _cos_gauss(sigma, omega):
    return lambda x: np.exp(-(x / sigma) ** 2) * np.cos(omega * x)


def _energy(sigma):
    return lambda x: (x / sigma) ** 2 * np.exp(-(x / sigma) ** 2)


def _mollified_indicator(x):
    return 0.5 * erfc((x - 0.8) / 0.25)


def _cubic_tent(x, r=1.5):
    # cardinal cubic B-spline stretched to [-r, r]; C2 and piecewise cubic
    u = 2.0 * np.abs(x) / r
    out = np.where(u < 1, 4.0 - 6.0 * u ** 2 + 3.0 * u ** 3, 0.0)
    out = np.where((u >= 1) & (u < 2), (2.0 - u) ** 3, out)
    return out / 4.0


def _step(x, r=1.0):
    return np.where(x <= r, 1.0, 0.0)


# name -> (callable, support radius, smoothness tag, interpolation)
FAMILY = {
    "gauss_wide": (_gauss(0.4), 2.5, "bump_infinitely_smooth", "cubic"),
    "gauss_narrow": (_gauss(0.25), 1.6, "bump_infinitely_smooth", "cubic"),
    "cosine_wide": (_cos_gauss(0.45, 3.0), 2.8, "bump_infinitely_smooth", "cubic"),
    "cosine_narrow": (_cos_gauss(0.3, 5.0), 1.9, "bump_infinitely_smooth", "cubic"),
    "shifted_energy": (_energy(0.35), 2.5, "bump_infinitely_smooth", "cubic"),
    "mollified_indicator": (_mollified_indicator, 2.35, "bump_infinitely_smooth", "cubic"),
    "cubic_spline_tent": (_cubic_tent, 1.5, "lipschitz", "linear"),
    "step": (_step, 1.2, "piecewise_constant", "linear"),
}

# frequency cutoffs for functions whose spectra decay only algebraically
SPECTRAL_CUTOFF = {"cubic_spline_tent": 80.0, "step": 160.0}

BUMP_FAMILY = ("gauss_wide", "gauss_narrow", "cosine_wide", "cosine_narrow", "shifted_energy")
SMOOTH_FAMILY = BUMP_FAMILY + ("mollified_indicator",)


def make_function(name: str, n: int = DEFAULT_SAMPLES, scale: float = 1.0, dilation: float = 1.0) -> GridFunction:
    """Sample a bundled function; ``dilation`` a gives x -> f(a x)."""
    try:
        fn, radius, tag, interp = FAMILY[name]
    except KeyError:
        raise ConfigurationError(f"unknown function {name!r}; choose from {sorted(FAMILY)}") from None
    if not dilation > 0:
        raise ConfigurationError("dilation must be positive")
    r = radius / dilation
    x = np.linspace(0.0, r, int(n))
    vals = scale * fn(dilation * x)
    vals[-1] = 0.0
    label = name if dilation == 1.0 else f"{name}@{dilation:g}"
    return GridFunction(x, vals, r, tag, interp, label)


def spectral_quadrature_for(name: str, dilation: float = 1.0,
                            base: QuadratureSpec = DEFAULT_SPECTRAL_QUAD) -> QuadratureSpec:
    """Frequency-side layout wide enough for the named function.

    Dilating by ``a`` stretches the spectrum by ``a``; the panel width of
    ``base`` is kept.
    """
    cutoff = max(base.truncation_radius, SPECTRAL_CUTOFF.get(name, 0.0)) * max(1.0, dilation)
    panels = int(np.ceil(base.panels * cutoff / base.truncation_radius))
    return QuadratureSpec(cutoff, panels, base.points_per_panel, base.rel_tolerance)


def zero_function(radius: float = 1.0, n: int = 101) -> GridFunction:
    x = np.linspace(0.0, radius, n)
    return GridFunction(x, np.zeros(n), radius, "bump_infinitely_smooth", "cubic", "zero")
