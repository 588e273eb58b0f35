"""
Monte Carlo harmonic measure on planar domains.

Walks are walk-on-spheres: from x jump to a uniform point on the largest
circle about x inside the domain, until within ``eps_abs`` of the boundary.
The nearest boundary piece decides the absorbed value (1 off A, 0 on A).
Each jump stays inside the domain, so slit sides are attributed by which
side of the slit the walker sits on when absorbed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .geometry import BoundaryArcSet
from .harmonic import poisson_omega

BLOCK = 8192
MAX_JUMPS = 100_000


def _segment_distance(z: np.ndarray, p: complex, q: complex):
    d = q - p
    t = np.clip(((z - p) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return np.abs(z - (p + t * d))


@dataclass(frozen=True)
class WalkDomain:
    """Planar domain with boundary pieces labelled in-A / not-in-A.

    kind ``disc``: unit disc, the circle labelled by ``A``.
    kind ``polygon``: polygon ``vertices`` (counterclockwise) minus ``slits``;
    ``edge_in_A[k]`` labels edge k, ``slit_in_A[k] = (upper, lower)`` labels the
    two sides of slit k (left/right of its direction).
    kind ``disc_cut``: unit disc intersected with one side of a cut which is a
    circle ``(center, radius)`` or a line ``(point, normal)``; the kept side
    is the one containing ``keep``; the cut is labelled by ``cut_in_A``.
    """

    kind: str
    A: BoundaryArcSet | None = None
    vertices: tuple = ()
    edge_in_A: tuple = ()
    slits: tuple = ()
    slit_in_A: tuple = ()
    cut: tuple | None = None
    keep: complex = 0j
    cut_in_A: bool = False
    eps_abs: float = 1e-3
    _cut_sign: float = field(default=1.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in ("disc", "polygon", "disc_cut"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "disc_cut":
            sign = float(np.sign(self._cut_signed(np.asarray(self.keep))))
            if sign == 0:
                raise ValueError("keep point lies on the cut")
            object.__setattr__(self, "_cut_sign", sign)

    # --- factories ---
    @classmethod
    def disc(cls, A: BoundaryArcSet, eps_abs: float = 1e-3) -> "WalkDomain":
        return cls("disc", A=A, eps_abs=eps_abs)

    @classmethod
    def slit_square(cls, eps_abs: float = 1e-3, slit_in_A: tuple = (False, False)) -> "WalkDomain":
        """Open square with vertices +-1 +- i minus the slit [-1/2, 1/2]; outer boundary in A."""
        verts = (-1 - 1j, 1 - 1j, 1 + 1j, -1 + 1j)
        return cls("polygon", vertices=verts, edge_in_A=(True,) * 4,
                   slits=((-0.5 + 0j, 0.5 + 0j),), slit_in_A=(tuple(slit_in_A),), eps_abs=eps_abs)

    @classmethod
    def half_disc(cls, A: BoundaryArcSet, eps_abs: float = 1e-3) -> "WalkDomain":
        """Right half disc; the diameter [-i, i] is labelled not-in-A."""
        return cls("disc_cut", A=A, cut=("line", 0j, 1 + 0j), keep=0.5 + 0j, eps_abs=eps_abs)

    @classmethod
    def level_set(cls, A: BoundaryArcSet, eps: float, eps_abs: float = 1e-3) -> "WalkDomain":
        """Level set {omega(., A) < 1 - eps} of a single-arc A, cut labelled not-in-A.

        Level curves of the harmonic measure of one arc are circular arcs
        through its endpoints, so the cut is that circle.
        """
        comp = A.complement().arcs
        if len(comp) != 1:
            raise ValueError("level-set domains need A to be a single arc")
        if eps == 0:
            return cls.disc(A, eps_abs)
        a, b = comp[0]
        p, q = np.exp(1j * a), np.exp(1j * b)
        u = np.exp(0.5j * (a + b))
        level = 1.0 - eps
        t = brentq(lambda s: poisson_omega(s * u, A) - level, -1 + 1e-12, 1 - 1e-12, xtol=1e-15)
        x = t * u
        keep = 0.999 * np.exp(1j * np.mean(A.arcs[0]))
        cut = _circle_through(p, q, x)
        return cls("disc_cut", A=A, cut=cut, keep=complex(keep), eps_abs=eps_abs)

    # --- geometry ---
    def _cut_signed(self, z):
        kind = self.cut[0]
        if kind == "circle":
            _, c, r = self.cut
            return np.abs(z - c) - r
        _, p, n = self.cut
        return ((z - p) * np.conj(n)).real / abs(n)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.kind == "disc":
            return np.abs(z) < 1
        if self.kind == "disc_cut":
            return (np.abs(z) < 1) & (self._cut_signed(z) * self._cut_sign > 0)
        inside = _in_polygon(z, np.array(self.vertices))
        for p, q in self.slits:
            inside &= _segment_distance(z, p, q) > 0
        return inside

    def distance(self, z: np.ndarray):
        """Distance to the boundary and the boundary value at the nearest piece."""
        if self.kind == "disc":
            d = 1.0 - np.abs(z)
            return d, np.where(self.A.contains(np.angle(z)), 0.0, 1.0)
        if self.kind == "disc_cut":
            d_circ = 1.0 - np.abs(z)
            d_cut = np.abs(self._cut_signed(z))
            on_circle = np.where(self.A.contains(np.angle(z)), 0.0, 1.0)
            value = np.where(d_circ <= d_cut, on_circle, 0.0 if self.cut_in_A else 1.0)
            return np.minimum(d_circ, d_cut), value
        best = np.full(z.shape, np.inf)
        value = np.zeros(z.shape)
        verts = self.vertices
        for k in range(len(verts)):
            d = _segment_distance(z, verts[k], verts[(k + 1) % len(verts)])
            closer = d < best
            best = np.where(closer, d, best)
            value = np.where(closer, 0.0 if self.edge_in_A[k] else 1.0, value)
        for (p, q), (upper, lower) in zip(self.slits, self.slit_in_A):
            d = _segment_distance(z, p, q)
            side = ((z - p) * np.conj(q - p)).imag > 0
            v = np.where(side, 0.0 if upper else 1.0, 0.0 if lower else 1.0)
            closer = d < best
            best = np.where(closer, d, best)
            value = np.where(closer, v, value)
        return best, value


def _circle_through(p: complex, q: complex, x: complex) -> tuple:
    """Circle (or line) through three points, as a cut description."""
    ax, ay = p.real, p.imag
    bx, by = q.real, q.imag
    cx, cy = x.real, x.imag
    det = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(det) < 1e-14:
        d = q - p
        return ("line", complex(p), complex(1j * d / abs(d)))
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / det
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / det
    c = complex(ux, uy)
    return ("circle", c, abs(p - c))


def _in_polygon(z: np.ndarray, verts: np.ndarray) -> np.ndarray:
    x, y = z.real[..., None], z.imag[..., None]
    p, q = verts, np.roll(verts, -1)
    crosses = (p.imag > y) != (q.imag > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = p.real + (y - p.imag) * (q.real - p.real) / (q.imag - p.imag)
    return np.count_nonzero(crosses & (x < xint), axis=-1) % 2 == 1


def _walk_block(dom: WalkDomain, z: complex, n: int, seed: int, block: int) -> float:
    rng = np.random.default_rng(np.random.SeedSequence([seed, block]))
    pos = np.full(n, z, dtype=complex)
    total = 0.0
    for _ in range(MAX_JUMPS):
        d, value = dom.distance(pos)
        done = d < dom.eps_abs
        total += float(value[done].sum())
        pos, d = pos[~done], d[~done]
        if pos.size == 0:
            return total
        pos = pos + d * np.exp(2j * math.pi * rng.random(pos.size))
    raise RuntimeError("walks did not terminate")


def mc_omega(dom: WalkDomain, z: complex, n_walks: int, seed: int, workers: int = 1) -> tuple[float, float]:
    """Fraction of walks from ``z`` absorbed off A, with its binomial standard error.

    Walks are split into fixed blocks of 8192, each seeded from
    ``(seed, block index)``, so the result does not depend on ``workers``.
    """
    if n_walks < 1000:
        raise ValueError("n_walks must be at least 1000")
    z = complex(z)
    if not bool(dom.contains(np.asarray(z))):
        raise ValueError("start point outside the domain")
    d0, _ = dom.distance(np.asarray([z]))
    if d0[0] < dom.eps_abs:
        raise ValueError("start too close to boundary")
    sizes = [BLOCK] * (n_walks // BLOCK)
    if n_walks % BLOCK:
        sizes.append(n_walks % BLOCK)
    jobs = [(dom, z, n, seed, k) for k, n in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            totals = list(ex.map(lambda a: _walk_block(*a), jobs))
    else:
        totals = [_walk_block(*a) for a in jobs]
    p = sum(totals) / n_walks
    return p, math.sqrt(p * (1.0 - p) / n_walks)

