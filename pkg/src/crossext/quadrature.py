"""
Boundary quadrature rules on the unit circle.

Full-circle rules are trapezoidal (spectrally accurate for periodic data).
Arc rules are composite Gauss-Legendre with panels refined geometrically
toward every arc endpoint, where the Carleman weights exp(-N g) oscillate
without bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import TWO_PI, BoundaryArcSet


@lru_cache(maxsize=32)
def _gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@dataclass(frozen=True)
class Rule:
    """Nodes ``theta`` with weights in d(theta) and the local node spacing."""

    theta: np.ndarray
    weights: np.ndarray
    spacing: np.ndarray
    full: bool

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @property
    def size(self) -> int:
        return self.theta.size


def trapezoid_circle(n: int, offset: float = 0.0) -> Rule:
    theta = offset + TWO_PI * np.arange(n) / n - math.pi
    w = np.full(n, TWO_PI / n)
    return Rule(theta, w, w.copy(), True)


def graded_breaks(lo: float, hi: float, panels: int, ratio: float = 0.5, floor: float = 1e-13) -> np.ndarray:
    """Panel breakpoints on [lo, hi]: uniform in the middle, geometric at both ends.

    Up to half of the ``panels`` are spent on grading; grading stops once the
    smallest end panel is narrower than ``floor * (hi - lo)``.
    """
    length = hi - lo
    levels = 0
    while 2 * (levels + 1) <= panels // 2:
        h0 = length / (panels - 2 * levels)
        if h0 * ratio**levels < floor * length:
            break
        levels += 1
    uniform = panels - 2 * levels
    h0 = length / uniform
    inner = lo + h0 * np.arange(uniform + 1)
    k = np.arange(1, levels + 1)
    left = lo + h0 * ratio**k
    right = hi - h0 * ratio**k
    br = np.unique(np.concatenate([inner, left, right]))
    br[0], br[-1] = lo, hi
    return br


def panel_rule(breaks: np.ndarray, order: int):
    x, w = _gauss_legendre(order)
    a, b = breaks[:-1], breaks[1:]
    half = (b - a) / 2
    theta = ((a + b) / 2)[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    spacing = np.repeat((b - a) / order, order)
    return theta.ravel(), weights.ravel(), spacing


def arc_rule(arcs: BoundaryArcSet, nodes: int = 512, order: int = 16, ratio: float = 0.5,
             floor: float = 1e-13) -> Rule:
    """Composite graded Gauss-Legendre rule on an arc set, about ``nodes`` nodes in total.

    Panels are shared out in proportion to arc length; each arc gets at least
    four panels.  A full circle falls back to the trapezoid rule.
    """
    if arcs.is_full:
        return trapezoid_circle(nodes)
    if arcs.is_empty:
        raise ValueError("empty boundary set")
    total = arcs.length
    panels = max(nodes // order, 4)
    parts = []
    for lo, hi in arcs.arcs:
        npan = max(int(round(panels * (hi - lo) / total)), 4)
        parts.append(panel_rule(graded_breaks(lo, hi, npan, ratio, floor), order))
    theta = np.concatenate([p[0] for p in parts])
    weights = np.concatenate([p[1] for p in parts])
    spacing = np.concatenate([p[2] for p in parts])
    return Rule(theta, weights, spacing, False)
