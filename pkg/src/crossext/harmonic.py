"""
Harmonic measure of the unit disc and its analytic completion.

``omega(z, A)`` is the harmonic measure of the complement of A, i.e. the
Poisson integral of the indicator of the circle minus A.  Every evaluator
here is closed-form: the Schwarz integral of an arc indicator is

    (1/2pi) int_a^b (e^{it} + z)/(e^{it} - z) dt
        = (1/(pi i)) log((e^{ib} - z)/(e^{ia} - z)) - (b - a)/(2pi),

whose real part is the Poisson integral and whose imaginary part is the
conjugate function vanishing at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import BoundaryArcSet, arc_set_normalize


def _interior(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(~(np.abs(z) < 1.0)):
        raise ValueError("not interior")
    return z


def _arc_schwarz(z: np.ndarray, a: float, b: float) -> np.ndarray:
    # requires b - a <= pi so that the subtended angle lies in (-pi/2, 3pi/2)
    za = np.exp(1j * a) - z
    zb = np.exp(1j * b) - z
    turn = np.angle(zb / za)
    turn = np.where(turn < -math.pi / 2, turn + 2 * math.pi, turn)
    return turn / math.pi - (b - a) / (2 * math.pi) - 1j / math.pi * np.log(np.abs(zb) / np.abs(za))


def _split(arcs):
    for a, b in arcs:
        n = max(int(math.ceil((b - a) / math.pi)), 1)
        edges = np.linspace(a, b, n + 1)
        yield from zip(edges[:-1], edges[1:])


def _schwarz_complement(z: np.ndarray, A: BoundaryArcSet) -> np.ndarray:
    out = np.zeros(z.shape, dtype=complex)
    for a, b in _split(A.complement().arcs):
        out += _arc_schwarz(z, a, b)
    return out


def poisson_omega(z, A: BoundaryArcSet):
    """Harmonic measure at ``z`` of the circle minus ``A`` (exact)."""
    z = _interior(z)
    val = np.clip(_schwarz_complement(z, A).real, 0.0, 1.0)
    return float(val) if val.ndim == 0 else val


def schwarz_g(z, A: BoundaryArcSet, z0: complex = 0.0):
    """``g1 = omega + i * conj(omega)`` normalized so that ``Im g1(z0) = 0``."""
    z = _interior(z)
    z0 = _interior(z0)
    g = _schwarz_complement(z, A)
    if z0 != 0:
        g = g - 1j * _schwarz_complement(z0, A).imag
    g = g.real.clip(0.0, 1.0) + 1j * g.imag
    return complex(g) if g.ndim == 0 else g


def schwarz_g_boundary(theta, A: BoundaryArcSet, z0: complex = 0.0) -> np.ndarray:
    """Boundary values of ``g1`` at points ``e^{i theta}`` inside ``A``.

    The real part is exactly 0 there; the imaginary part is the continuous
    extension of the conjugate function, written with half-angle sines so it
    stays accurate next to the arc endpoints.
    """
    theta = np.asarray(theta, dtype=float)
    im = np.zeros(theta.shape)
    for a, b in A.complement().arcs:
        im -= (np.log(np.abs(np.sin((b - theta) / 2))) - np.log(np.abs(np.sin((a - theta) / 2)))) / math.pi
    if z0 != 0:
        im -= _schwarz_complement(_interior(z0), A).imag
    return 1j * im


@dataclass(frozen=True)
class HarmonicMeasureField:
    """omega(., A, E): vanishes on A and tends to 1 on the rest of the circle."""

    A: BoundaryArcSet

    def __call__(self, z):
        return poisson_omega(z, self.A)

    def level_set(self, eps: float) -> "LevelSet":
        return LevelSet(self, eps)


@dataclass(frozen=True)
class AnalyticCompletion:
    A: BoundaryArcSet
    z0: complex = 0.0

    def __call__(self, z):
        return schwarz_g(z, self.A, self.z0)

    def boundary(self, theta):
        return schwarz_g_boundary(theta, self.A, self.z0)


@dataclass(frozen=True)
class LevelSet:
    """D_eps = {omega < 1 - eps} together with the rescaled measure omega/(1 - eps)."""

    field: HarmonicMeasureField
    eps: float

    def __post_init__(self):
        if not 0.0 <= self.eps < 1.0:
            raise ValueError("eps must lie in [0, 1)")

    def contains(self, z):
        return np.asarray(self.field(z)) < 1.0 - self.eps

    def omega_eps(self, z):
        return self.field(z) / (1.0 - self.eps)


def level_membership(z: complex, field: HarmonicMeasureField, eps: float) -> tuple[bool, float]:
    """``(z in D_eps, omega(z)/(1 - eps))``; outside D_eps the ratio is still reported."""
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    w = float(field(z))
    return w < 1.0 - eps, w / (1.0 - eps)


def two_constant_bound(m: float, M: float, omega_eps: float) -> float:
    """Right side m(1 - w) + M w of the two-constant inequality."""
    if m > M:
        raise ValueError("require m <= M")
    if not 0.0 <= omega_eps <= 1.0:
        raise ValueError("omega must lie in [0, 1]")
    return m * (1.0 - omega_eps) + M * omega_eps


def exhaustion_omega(z, A: BoundaryArcSet, k: int) -> float:
    """omega(z, A_k, D_k) with A_k = A shrunk by 1/k at every endpoint and D_k the disc of radius 1 - 1/k.

    D_k is rescaled onto the unit disc, so this is poisson_omega(z / (1 - 1/k), A_k).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if A.is_full:
        Ak = A
    else:
        shrunk = [(lo + 1.0 / k, hi - 1.0 / k) for lo, hi in A.arcs if hi - lo > 2.0 / k]
        if not shrunk:
            raise ValueError("arcs vanish at this k")
        Ak = arc_set_normalize(shrunk)
    rho = 1.0 - 1.0 / k
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= rho):
        raise ValueError("not interior")
    return poisson_omega(z / rho, Ak)
