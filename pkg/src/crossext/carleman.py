"""
One-variable boundary machinery: Cauchy integrals of boundary traces,
moment checks, the radial maximal function and the Carleman recovery of a
holomorphic function from its values on an arc set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import BoundaryArcSet
from .harmonic import schwarz_g, schwarz_g_boundary
from .quadrature import Rule, arc_rule, trapezoid_circle

POLE_GUARD = 10.0


class PoleGuardError(ValueError):
    """Evaluation point too close to the quadrature nodes."""


@dataclass(frozen=True)
class BoundaryTrace:
    """Samples ``values`` of a boundary function at the nodes of ``rule``."""

    rule: Rule
    values: np.ndarray

    @property
    def theta(self):
        return self.rule.theta

    @property
    def weights(self):
        return self.rule.weights

    @property
    def full(self) -> bool:
        return self.rule.full

    @property
    def points(self):
        return self.rule.points

    @classmethod
    def full_circle(cls, func: Callable, n: int) -> "BoundaryTrace":
        """Trace of ``func(zeta)`` on the whole circle (trapezoid rule)."""
        rule = trapezoid_circle(n)
        return cls(rule, np.asarray(func(rule.points), dtype=complex))

    @classmethod
    def on_arcs(cls, func: Callable, A: BoundaryArcSet, nodes: int = 512, order: int = 16) -> "BoundaryTrace":
        rule = arc_rule(A, nodes=nodes, order=order)
        return cls(rule, np.asarray(func(rule.points), dtype=complex))

    def with_values(self, values) -> "BoundaryTrace":
        return BoundaryTrace(self.rule, np.asarray(values, dtype=complex))


def check_pole_guard(rule: Rule, z, guard: float = POLE_GUARD) -> None:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    dist = np.abs(rule.points[None, :] - z[:, None])
    if np.any(dist < guard * rule.spacing[None, :]):
        raise PoleGuardError("too close to contour")


def cauchy_eval(trace: BoundaryTrace, z, guard: float = POLE_GUARD):
    """(1/2 pi i) sum f_k w_k (d zeta/d theta)_k / (zeta_k - z) over the full circle."""
    if not trace.full:
        raise ValueError("Cauchy integral needs a full-circle trace")
    return _contour_sum(trace, trace.values, z, guard)


def _contour_sum(trace: BoundaryTrace, weighted_values, z, guard):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise ValueError("not interior")
    check_pole_guard(trace.rule, z, guard)
    zeta = trace.points
    dz = 1j * zeta * trace.weights
    kern = dz[None, :] / (zeta[None, :] - np.atleast_1d(z)[:, None])
    out = kern @ weighted_values / (2j * math.pi)
    return complex(out[0]) if z.ndim == 0 else out.reshape(z.shape)


def moment_residuals(trace: BoundaryTrace, n_max: int) -> np.ndarray:
    """|(1/2 pi) int zeta^n f(zeta) d zeta| for n = 0..n_max."""
    if not trace.full:
        raise ValueError("moments need a full-circle trace")
    zeta = trace.points
    dz = 1j * zeta * trace.weights
    powers = zeta[None, :] ** np.arange(n_max + 1)[:, None]
    return np.abs(powers @ (trace.values * dz)) / (2 * math.pi)


def radial_maximal(evaluator: Callable, zeta: complex, r_grid: Sequence[float]) -> float:
    """max over the radii of |evaluator(r zeta)|.

    The evaluator is called once on the whole ray; scalar-only evaluators
    fall back to one call per radius.
    """
    r = np.asarray(r_grid, dtype=float)
    if np.any((r < 0) | (r >= 1)):
        raise ValueError("radii must lie in [0, 1)")
    pts = r * complex(zeta)
    try:
        vals = np.broadcast_to(np.asarray(evaluator(pts)), pts.shape)
    except (TypeError, ValueError):
        vals = np.array([evaluator(complex(p)) for p in pts])
    return float(np.abs(vals).max())


def carleman1d(trace: BoundaryTrace, A: BoundaryArcSet, z, N: float, z0: complex = 0.0,
               guard: float = POLE_GUARD):
    """Carleman recovery of f(z) from its trace on ``A`` with regularization ``N``.

    (1/2 pi i) int_A exp(-N (g1(a) - g1(z))) f(a) da / (a - z), g1 the
    analytic completion of omega(., A).  With A the full circle g1 = 0 and
    this is the Cauchy integral.
    """
    if N < 0:
        raise ValueError("N must be non-negative")
    if trace.full or A.is_full:
        return _contour_sum(trace, trace.values, z, guard)
    ga = schwarz_g_boundary(trace.theta, A, z0)
    gz = np.asarray(schwarz_g(z, A, z0))
    z = np.asarray(z, dtype=complex)
    vals = _contour_sum(trace, trace.values * np.exp(-N * ga), z, guard)
    return vals * np.exp(N * gz)


class CarlemanSweep:
    """Precomputed pieces for evaluating the Carleman value at many N."""

    def __init__(self, trace: BoundaryTrace, A: BoundaryArcSet, z: complex, z0: complex = 0.0,
                 guard: float = POLE_GUARD):
        z = complex(z)
        if abs(z) >= 1:
            raise ValueError("not interior")
        check_pole_guard(trace.rule, z, guard)
        zeta = trace.points
        self.terms = trace.values * 1j * zeta * trace.weights / (zeta - z) / (2j * math.pi)
        if trace.full or A.is_full:
            self.ga = np.zeros(zeta.shape, dtype=complex)
            self.gz = 0j
        else:
            self.ga = schwarz_g_boundary(trace.theta, A, z0)
            self.gz = complex(schwarz_g(z, A, z0))

    def __call__(self, N) -> np.ndarray:
        N = np.atleast_1d(np.asarray(N, dtype=float))
        return np.exp(-N[:, None] * self.ga[None, :]) @ self.terms * np.exp(N * self.gz)

    def condition(self) -> float:
        """sum |terms| / |sum terms|: cancellation factor at N = 0."""
        return float(np.sum(np.abs(self.terms)) / max(abs(np.sum(self.terms)), 1e-300))


@dataclass
class ConvergenceTrace:
    """Values v_N of a regularized sequence and their convergence diagnostics.

    ``diffs[k] = |v[k] - v[k-1]|`` (``diffs[0]`` is NaN).  The plateau is the
    first index k with three consecutive diffs ``diffs[k..k+2] < tol``; the
    plateau value is ``v[k + 2]``.
    """

    N: np.ndarray
    values: np.ndarray
    tol: float
    reference: complex | None = None
    diffs: np.ndarray = field(init=False)
    plateau_index: int | None = field(init=False)
    slope: float = field(init=False)
    suggested_N: float | None = None

    def __post_init__(self):
        self.N = np.asarray(self.N, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        d = np.full(self.values.shape, np.nan)
        d[1:] = np.abs(np.diff(self.values))
        self.diffs = d
        self.plateau_index = None
        small = np.nan_to_num(d, nan=np.inf) < self.tol
        for k in range(1, len(d) - 2):
            if small[k] and small[k + 1] and small[k + 2]:
                self.plateau_index = k
                break
        self.slope = self._fit_slope()

    @property
    def converged(self) -> bool:
        return self.plateau_index is not None

    @property
    def plateau_N(self) -> float | None:
        return None if self.plateau_index is None else float(self.N[self.plateau_index])

    @property
    def errors(self) -> np.ndarray | None:
        if self.reference is None:
            return None
        return np.abs(self.values - self.reference)

    @property
    def value(self) -> complex:
        """Plateau value, or the value with the smallest step when no plateau exists."""
        if self.plateau_index is not None:
            return complex(self.values[self.plateau_index + 2])
        if len(self.values) < 2:
            return complex(self.values[-1])
        k = int(np.nanargmin(self.diffs[1:])) + 1
        return complex(self.values[k])

    def _fit_slope(self) -> float:
        """Least-squares slope of log error (or log step) against N before the plateau."""
        if self.reference is not None:
            y = np.abs(self.values - self.reference)
            x = self.N
        else:
            y = self.diffs[1:]
            x = self.N[1:]
        if len(y) < 2:
            return 0.0
        stop = int(np.argmin(y)) + 1
        if self.plateau_index is not None:
            stop = min(stop, self.plateau_index + (1 if self.reference is not None else 0))
        x, y = x[:stop], y[:stop]
        keep = y > 0
        if np.count_nonzero(keep) < 2:
            return 0.0
        return float(np.polyfit(x[keep], np.log(y[keep]), 1)[0])


def carleman1d_sweep(trace: BoundaryTrace, A: BoundaryArcSet, z: complex, N_max: float, tol: float,
                     step: float = 1.0, reference: complex | None = None, z0: complex = 0.0,
                     guard: float = POLE_GUARD) -> ConvergenceTrace:
    """Carleman values for N = 0, step, ..., N_max with plateau and slope diagnostics."""
    Ns = np.arange(0.0, N_max + step / 2, step)
    sweep = CarlemanSweep(trace, A, z, z0, guard)
    values = sweep(Ns)
    eta = np.finfo(float).eps * sweep.condition()
    return ConvergenceTrace(Ns, values, tol, reference, suggested_N=float(math.log(1.0 / eta)))
