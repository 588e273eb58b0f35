"""
Planar primitives: arc sets on the unit circle, Stolz regions and angular
Jordan domains with their shrunken contours.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
# Tolerance for classifying points on the boundary of open sets.
BOUNDARY_TOL = 1e-12


def wrap_angle(theta):
    """Map angles into (-pi, pi]."""
    t = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
    t = np.where(t == -math.pi, math.pi, t)
    return float(t) if t.ndim == 0 else t


@dataclass(frozen=True)
class BoundaryArcSet:
    """Finite union of arcs of the unit circle.

    ``pieces`` holds disjoint sorted sub-intervals of [-pi, pi]; an arc that
    crosses theta = pi is stored as two pieces and merged again by
    :attr:`arcs`.  ``closed`` distinguishes a closed set from its relative
    interior.
    """

    pieces: tuple[tuple[float, float], ...]
    closed: bool = True

    @property
    def is_full(self) -> bool:
        return len(self.pieces) == 1 and self.pieces[0] == (-math.pi, math.pi)

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def length(self) -> float:
        return float(sum(hi - lo for lo, hi in self.pieces))

    @property
    def normalized_length(self) -> float:
        return self.length / TWO_PI

    @property
    def arcs(self) -> list[tuple[float, float]]:
        """Merged arcs ``(lo, hi)`` with ``lo`` in (-pi, pi] and ``hi = lo + length``."""
        if self.is_full:
            return [(-math.pi, math.pi)]
        p = list(self.pieces)
        if len(p) >= 2 and p[0][0] == -math.pi and p[-1][1] == math.pi:
            first, last = p.pop(0), p.pop()
            p.append((last[0], first[1] + TWO_PI))
        out = []
        for lo, hi in p:
            if lo == -math.pi:
                lo, hi = math.pi, hi + TWO_PI
            out.append((lo, hi))
        out.sort()
        return out

    def contains(self, theta):
        """Membership of boundary points ``e^{i theta}`` (vectorized)."""
        theta = np.asarray(theta, dtype=float)
        if self.is_full:
            return np.ones(theta.shape, dtype=bool)
        inside = np.zeros(theta.shape, dtype=bool)
        for lo, hi in self.arcs:
            d = np.mod(theta - lo, TWO_PI)
            if self.closed:
                inside |= (d <= hi - lo) | np.isclose(d, TWO_PI, rtol=0, atol=1e-15)
            else:
                inside |= (d > 0) & (d < hi - lo)
        return inside

    def endpoints(self) -> list[float]:
        if self.is_full:
            return []
        return [a for arc in self.arcs for a in (arc[0], wrap_angle(arc[1]))]

    def complement(self) -> "BoundaryArcSet":
        """Complementary arcs; open when ``self`` is closed and vice versa."""
        if self.is_empty:
            return BoundaryArcSet(((-math.pi, math.pi),), closed=not self.closed)
        if self.is_full:
            return BoundaryArcSet((), closed=not self.closed)
        arcs = self.arcs
        gaps = []
        for (lo, hi), (nlo, _) in zip(arcs, arcs[1:] + [(arcs[0][0] + TWO_PI, 0.0)]):
            if nlo > hi:
                gaps.append((hi, nlo))
        return _from_arcs(gaps, closed=not self.closed)

    def rotate(self, phi: float) -> "BoundaryArcSet":
        return _from_arcs([(lo + phi, hi + phi) for lo, hi in self.arcs], self.closed)

    def diameter(self) -> float:
        """sup |x - y| over points of the set (chord length)."""
        if self.is_empty:
            return 0.0
        if self.is_full:
            return 2.0
        pts = self.endpoints()
        best = 0.0
        for a in pts:
            if self.contains(a + math.pi):
                return 2.0
            for b in pts:
                best = max(best, abs(2.0 * math.sin((a - b) / 2.0)))
        return best

    def to_json(self) -> str:
        return json.dumps([[float(f"{lo:.17g}"), float(f"{hi:.17g}")] for lo, hi in self.arcs])

    @classmethod
    def from_json(cls, text: str) -> "BoundaryArcSet":
        return arc_set_normalize(json.loads(text))


def _from_arcs(arcs: Iterable[Sequence[float]], closed: bool) -> BoundaryArcSet:
    pieces = []
    for lo, hi in arcs:
        length = hi - lo
        if length >= TWO_PI:
            return BoundaryArcSet(((-math.pi, math.pi),), closed)
        lo = float(np.mod(lo + math.pi, TWO_PI) - math.pi)
        hi = lo + length
        if hi > math.pi:
            pieces.append((lo, math.pi))
            pieces.append((-math.pi, hi - TWO_PI))
        else:
            pieces.append((lo, hi))
    pieces.sort()
    merged: list[list[float]] = []
    for lo, hi in pieces:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return BoundaryArcSet(tuple((lo, hi) for lo, hi in merged), closed)


def arc_set_normalize(intervals: Iterable[Sequence[float]]) -> BoundaryArcSet:
    """Merge angular intervals ``[lo, hi]`` (radians) into a closed arc set.

    Intervals with ``hi < lo`` are not reinterpreted as wraparound arcs;
    write a wraparound arc either as ``[lo, lo + length]`` or as two pieces.
    """
    intervals = [tuple(map(float, iv)) for iv in intervals]
    if not intervals:
        raise ValueError("empty boundary set")
    for lo, hi in intervals:
        if not hi > lo:
            raise ValueError(f"interval [{lo}, {hi}] has non-positive length")
    return _from_arcs(intervals, closed=True)


def regular_interior(s: BoundaryArcSet) -> BoundaryArcSet:
    """Relative interior of an arc union (endpoints removed, same length)."""
    if s.is_empty:
        raise ValueError("empty boundary set")
    return BoundaryArcSet(s.pieces, closed=False)


# --- Stolz regions --------------------------------------------------------


def stolz_contains(zeta: complex, alpha: float, z) -> np.ndarray | bool:
    """True iff ``|arg((zeta - z)/zeta)| < alpha``."""
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise ValueError("vertex must lie on the unit circle")
    if not 0.0 < alpha < math.pi / 2:
        raise ValueError("half-angle must lie in (0, pi/2)")
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("not interior")
    res = np.abs(np.angle((zeta - z) / zeta)) < alpha
    return bool(res) if res.ndim == 0 else res


@dataclass(frozen=True)
class StolzRegion:
    vertex: complex
    half_angle: float

    def __contains__(self, z) -> bool:
        return bool(stolz_contains(self.vertex, self.half_angle, z))

    def rotate(self, phi: float) -> "StolzRegion":
        return StolzRegion(self.vertex * np.exp(1j * phi), self.half_angle)


# --- contours -------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def points(self, t):
        return self.start + (self.end - self.start) * np.asarray(t)


@dataclass(frozen=True)
class CircleArc:
    """Arc of the circle ``|z| = radius`` from angle ``theta0`` to ``theta1``.

    Orientation follows the sign of ``theta1 - theta0``.
    """

    radius: float
    theta0: float
    theta1: float

    @property
    def start(self) -> complex:
        return self.radius * np.exp(1j * self.theta0)

    @property
    def end(self) -> complex:
        return self.radius * np.exp(1j * self.theta1)

    @property
    def length(self) -> float:
        return self.radius * abs(self.theta1 - self.theta0)

    def points(self, t):
        return self.radius * np.exp(1j * (self.theta0 + (self.theta1 - self.theta0) * np.asarray(t)))


@dataclass(frozen=True)
class ContourPolyline:
    """Closed piecewise-smooth contour made of labelled pieces."""

    pieces: tuple
    labels: tuple[str, ...]

    @property
    def length(self) -> float:
        return float(sum(p.length for p in self.pieces))

    def is_closed(self, tol: float = 1e-12) -> bool:
        ends = [p.end for p in self.pieces]
        starts = [p.start for p in self.pieces[1:]] + [self.pieces[0].start]
        return all(abs(e - s) <= tol for e, s in zip(ends, starts))

    def sample(self, spacing: float = 1e-3) -> np.ndarray:
        """Points along the contour (each piece sampled including its start)."""
        out = []
        for p in self.pieces:
            n = max(int(math.ceil(p.length / spacing)), 2)
            out.append(p.points(np.arange(n) / n))
        return np.concatenate(out)

    def piece(self, label: str):
        return self.pieces[self.labels.index(label)]

    def contains(self, z) -> np.ndarray:
        """Even-odd point-in-region test against a fine discretization."""
        poly = self.sample(spacing=min(1e-3, self.length / 2000))
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        x, y = z.real[:, None], z.imag[:, None]
        p, q = poly, np.roll(poly, -1)
        x1, y1, x2, y2 = p.real[None], p.imag[None], q.real[None], q.imag[None]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        return np.count_nonzero(crosses & (x < xint), axis=1) % 2 == 1


# --- angular Jordan domains -----------------------------------------------

_HEIGHT_CAP = 1.0 - math.sqrt(2.0) / 2.0
_EDGE = np.exp(0.75j * math.pi)  # cone edge direction e^{3i pi/4}, relative to the vertex


def _edge_exit(h: float) -> float:
    """Distance from a unit vertex along a cone edge to the circle |z| = 1 - h."""
    disc = 4.0 * (1.0 - h) ** 2 - 2.0
    return (math.sqrt(2.0) - math.sqrt(max(disc, 0.0))) / 2.0


def _segment_circle_hit(p: complex, q: complex, radius: float) -> complex:
    """Point of segment [p, q] on ``|z| = radius`` nearest to ``q``."""
    d = q - p
    a = abs(d) ** 2
    b = 2.0 * (p.conjugate() * d).real
    c = abs(p) ** 2 - radius**2
    roots = np.roots([a, b, c])
    roots = sorted(float(t.real) for t in roots if abs(t.imag) < 1e-12 and -1e-12 <= t.real <= 1 + 1e-12)
    return p + roots[-1] * d


@dataclass(frozen=True)
class AngularJordanDomain:
    """Union of truncated pi/4 cones over a closed base ``F`` of small diameter."""

    base: BoundaryArcSet
    height: float
    zeta1: complex = field(init=False)
    zeta2: complex = field(init=False)

    def __post_init__(self):
        arcs = self.base.arcs
        # arcs sorted by lo; the span starts after the largest gap
        gaps = self.base.complement().arcs
        big = max(gaps, key=lambda g: g[1] - g[0])
        t1, t2 = big[1], big[0] + TWO_PI
        object.__setattr__(self, "zeta1", complex(np.exp(1j * t1)))
        object.__setattr__(self, "zeta2", complex(np.exp(1j * t2)))
        object.__setattr__(self, "_span", (t1, t2))
        object.__setattr__(self, "_arcs", arcs)

    @property
    def span(self) -> tuple[float, float]:
        """Angles of zeta1 < zeta2 (counterclockwise, unwrapped)."""
        return self._span

    def gaps(self) -> list[tuple[float, float]]:
        t1, t2 = self.span
        return [(lo, hi) for lo, hi in _unwrap_into(self.base.complement().arcs, t1) if hi <= t2 + 1e-15 and lo >= t1 - 1e-15]

    def base_arcs(self) -> list[tuple[float, float]]:
        return _unwrap_into(self.base.arcs, self.span[0])

    def notch_apex(self, lo: float, hi: float) -> complex:
        """Apex c of the isosceles notch over the gap (e^{i lo}, e^{i hi})."""
        a, b = np.exp(1j * lo), np.exp(1j * hi)
        da, db = a * _EDGE, b * np.conj(_EDGE)
        m = np.array([[da.real, -db.real], [da.imag, -db.imag]])
        s, _ = np.linalg.solve(m, [(b - a).real, (b - a).imag])
        return complex(a + s * da)

    def __contains__(self, z) -> bool:
        return bool(self.contains(z))

    def contains(self, z):
        """Point-in-domain test; boundary points are classified outside."""
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        psi = np.angle(z)
        inside = np.zeros(z.shape, dtype=bool)
        ok_r = (r > 1.0 - self.height + BOUNDARY_TOL) & (r < 1.0 - BOUNDARY_TOL)
        for lo, hi in self.base.arcs:
            # closest point of the arc in angle
            d = np.mod(psi - lo, TWO_PI)
            phi = np.where(d <= hi - lo, psi, np.where(d - (hi - lo) < TWO_PI - d, hi, lo))
            zeta = np.exp(1j * phi)
            ang = np.abs(np.angle((zeta - z) / zeta))
            cone = ang < math.pi / 4 - BOUNDARY_TOL
            inside |= cone & self._near_piece(zeta, z)
        res = inside & ok_r
        return bool(res) if res.ndim == 0 else res

    def _near_piece(self, zeta, z):
        # segment [zeta, z] must stay outside the closed disc of radius 1 - h
        d = z - zeta
        n2 = np.abs(d) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.clip(-(np.conj(zeta) * d).real / n2, 0.0, 1.0)
        t = np.where(n2 > 0, t, 0.0)
        return np.abs(zeta + t * d) > 1.0 - self.height

    def boundary(self) -> ContourPolyline:
        """The contour F1, F0, F2, F3 of the domain itself (epsilon = 0)."""
        return self._contour(0.0)

    def _contour(self, eps: float) -> ContourPolyline:
        h = self.height
        scale = 1.0 - eps
        r_in = (1.0 + eps) * (1.0 - h)
        s = _edge_exit(h)
        eta1 = self.zeta1 + s * self.zeta1 * np.conj(_EDGE)
        eta2 = self.zeta2 + s * self.zeta2 * _EDGE
        pieces, labels = [], []
        # F1: eta1 -> zeta1
        p1 = _segment_circle_hit(scale * self.zeta1, scale * eta1, r_in) if eps > 0 else eta1
        pieces.append(Segment(complex(p1), complex(scale * self.zeta1)))
        labels.append("F1")
        # F0: arcs of F and notches, counterclockwise
        arcs = self.base_arcs()
        for k, (lo, hi) in enumerate(arcs):
            pieces.append(CircleArc(scale, lo, hi))
            labels.append("F0")
            if k + 1 < len(arcs):
                nlo = arcs[k + 1][0]
                c = self.notch_apex(hi, nlo)
                pieces.append(Segment(complex(scale * np.exp(1j * hi)), complex(scale * c)))
                pieces.append(Segment(complex(scale * c), complex(scale * np.exp(1j * nlo))))
                labels += ["F0", "F0"]
        # F2: zeta2 -> eta2
        p2 = _segment_circle_hit(scale * self.zeta2, scale * eta2, r_in) if eps > 0 else eta2
        pieces.append(Segment(complex(scale * self.zeta2), complex(p2)))
        labels.append("F2")
        # F3: clockwise arc back to the start of F1
        a2 = float(np.angle(p2))
        a1 = a2 - float(np.mod(a2 - np.angle(p1), TWO_PI))
        pieces.append(CircleArc(abs(p2) if eps == 0 else r_in, a2, a1))
        labels.append("F3")
        return ContourPolyline(tuple(pieces), tuple(labels))


def _unwrap_into(arcs, start: float) -> list[tuple[float, float]]:
    """Shift arcs by multiples of 2 pi so they begin at or after ``start``."""
    out = []
    for lo, hi in arcs:
        k = math.floor((lo - start + 1e-12) / TWO_PI)
        out.append((lo - k * TWO_PI, hi - k * TWO_PI))
    out.sort()
    return out


def angular_jordan_domain(F: BoundaryArcSet, h: float) -> AngularJordanDomain:
    if F.is_empty or F.length <= 0 or not F.closed:
        raise ValueError("base must be a closed arc set of positive length")
    if F.is_full:
        raise ValueError("height constraint violated")
    if not (F.diameter() < h < _HEIGHT_CAP):
        raise ValueError("height constraint violated")
    return AngularJordanDomain(F, float(h))


def ajd_contour(omega: AngularJordanDomain, eps: float) -> ContourPolyline:
    """Boundary of the shrunken domain (1 - eps) Omega minus the disc of radius (1 + eps)(1 - h)."""
    if not 0.0 < eps < omega.height / 4.0:
        raise ValueError("eps must lie in (0, h/4)")
    return omega._contour(float(eps))


def projected_length(points: np.ndarray) -> float:
    """Length of the radial projection z/|z| of a sampled curve onto the circle."""
    ang = np.unwrap(np.angle(points))
    lo = np.minimum(ang[:-1], ang[1:])
    hi = np.maximum(ang[:-1], ang[1:])
    keep = hi > lo
    if not np.any(keep):
        return 0.0
    return arc_set_normalize(np.column_stack([lo[keep], hi[keep]])).length
