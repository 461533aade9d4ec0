"""Composite Gauss-Legendre rules and compensated summation."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class QuadratureSpec:
    """Panel layout for integrals over [0, truncation_radius].

    ``rel_tolerance`` is the accuracy the layout is expected to deliver; it
    is also used as the admissible relative size of truncated tails.
    """

    truncation_radius: float
    panels: int = 64
    points_per_panel: int = 16
    rel_tolerance: float = 1e-8

    def __post_init__(self):
        if not (self.truncation_radius > 0 and math.isfinite(self.truncation_radius)):
            raise ConfigurationError("truncation_radius must be a positive number")
        if int(self.panels) != self.panels or self.panels < 1:
            raise ConfigurationError("panels must be a positive integer")
        if int(self.points_per_panel) != self.points_per_panel or not 1 <= self.points_per_panel <= 100:
            raise ConfigurationError("points_per_panel must be an integer in [1, 100]")
        if not self.rel_tolerance > 0:
            raise ConfigurationError("rel_tolerance must be positive")

    def nodes(self, breakpoints=()):
        """Nodes and weights on [0, truncation_radius]."""
        return composite_gauss_legendre(0.0, self.truncation_radius, self.panels,
                                        self.points_per_panel, breakpoints)

    def with_radius(self, radius):
        return replace(self, truncation_radius=float(radius))

    def refined(self, factor=2):
        return replace(self, panels=self.panels * factor)

    def to_dict(self):
        return {"truncation_radius": self.truncation_radius, "panels": self.panels,
                "points_per_panel": self.points_per_panel, "rel_tolerance": self.rel_tolerance}

    @classmethod
    def from_dict(cls, data):
        return cls(float(data["truncation_radius"]), int(data.get("panels", 64)),
                   int(data.get("points_per_panel", 16)), float(data.get("rel_tolerance", 1e-8)))


@lru_cache(maxsize=32)
def _leggauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_gauss_legendre(lower, upper, panels, order, breakpoints=()):
    """Gauss-Legendre nodes on ``panels`` equal panels of [lower, upper].

    Interior ``breakpoints`` split the panel that contains them, so
    integrands with a kink there keep full order.
    """
    lower, upper = float(lower), float(upper)
    if not upper > lower:
        raise ConfigurationError(f"empty integration interval [{lower}, {upper}]")
    edges = np.linspace(lower, upper, int(panels) + 1)
    extra = [b for b in breakpoints if lower < b < upper]
    if extra:
        edges = np.unique(np.concatenate([edges, extra]))
    ref_x, ref_w = _leggauss(int(order))
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    w = (half[:, None] * ref_w[None, :]).ravel()
    return x, w


def compensated_sum(terms, axis=-1):
    """Neumaier-compensated sum along ``axis`` in ascending index order."""
    terms = np.moveaxis(np.asarray(terms), axis, -1)
    total = np.zeros(terms.shape[:-1], dtype=terms.dtype)
    comp = np.zeros_like(total)
    for i in range(terms.shape[-1]):
        x = terms[..., i]
        t = total + x
        big = np.abs(total) >= np.abs(x)
        comp += np.where(big, (total - t) + x, (x - t) + total)
        total = t
    return total + comp
