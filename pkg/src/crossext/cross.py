"""
Two-fold crosses over the unit bidisc and the Gonchar-Carleman operator

    K_N(z, w) = (2 pi i)^-2  int_{A x B} exp(-N (g(a, b) - g(z, w)))
                             f(a, b) da db / ((a - z)(b - w)),

with g(z, w) = g1(z) + g2(w) the analytic completions of the harmonic
measures of the two boundary sets.  K = lim K_N lives on the wedge
{omega(z, A) + omega(w, B) < 1}.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from .carleman import POLE_GUARD, ConvergenceTrace, PoleGuardError, check_pole_guard
from .geometry import BoundaryArcSet, stolz_contains
from .harmonic import poisson_omega, schwarz_g, schwarz_g_boundary
from .quadrature import arc_rule

WEDGE_MARGIN = 1e-9
BOUND_SLACK = 1e-6
OVERFLOW = 1e300
DEFAULT_SCHEDULE = tuple(range(0, 41))


@dataclass(frozen=True)
class CrossSpec:
    """Cross X(A, B; E, E) with an optional exact function on it."""

    A: BoundaryArcSet
    B: BoundaryArcSet
    f: Callable | None = None
    name: str = ""

    def swapped(self) -> "CrossSpec":
        f = self.f
        g = None if f is None else (lambda z, w: f(w, z))
        return CrossSpec(self.B, self.A, g, self.name + "^T")

    def with_function(self, f: Callable, name: str | None = None) -> "CrossSpec":
        return CrossSpec(self.A, self.B, f, self.name if name is None else name)


@dataclass(frozen=True)
class WedgeSample:
    z: complex
    w: complex
    omega_z: float
    omega_w: float

    @property
    def omega_sum(self) -> float:
        return self.omega_z + self.omega_w

    @property
    def in_wedge(self) -> bool:
        return self.omega_sum < 1.0


def wedge_omega(spec: CrossSpec, z: complex, w: complex) -> WedgeSample:
    return WedgeSample(complex(z), complex(w), float(poisson_omega(z, spec.A)), float(poisson_omega(w, spec.B)))


def _factor_grid(n: int, r_max: float) -> np.ndarray:
    radii = r_max * np.arange(1, n + 1) / n
    angles = 2 * math.pi * np.arange(n) / n - math.pi
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


def wedge_grid(spec: CrossSpec, n_per_axis: int, omega_cap: float, r_max: float = 0.9,
               max_points: int | None = None) -> list[WedgeSample]:
    """Tensor (radius, angle) grid per factor filtered to omega_sum <= omega_cap.

    With ``max_points`` the filtered list, sorted by omega_sum, is thinned to
    evenly spaced entries so both ends of the omega range are kept.
    """
    if not 0.0 < omega_cap < 1.0:
        raise ValueError("omega_cap must lie in (0, 1)")
    zs = _factor_grid(n_per_axis, r_max)
    wz = poisson_omega(zs, spec.A)
    ww = poisson_omega(zs, spec.B)
    total = wz[:, None] + ww[None, :]
    iz, iw = np.nonzero(total <= omega_cap)
    if iz.size == 0:
        raise ValueError("wedge cap too tight")
    order = np.lexsort((iw, iz, total[iz, iw]))
    iz, iw = iz[order], iw[order]
    if max_points is not None and iz.size > max_points:
        pick = np.unique(np.round(np.linspace(0, iz.size - 1, max_points)).astype(int))
        iz, iw = iz[pick], iw[pick]
    return [WedgeSample(complex(zs[i]), complex(zs[j]), float(wz[i]), float(ww[j])) for i, j in zip(iz, iw)]


class GoncharCarleman:
    """Tensor-product quadrature of K_N on a fixed pair of arc rules.

    The b-sums  sum_b exp(-N g2(b)) f(a, b) db / (b - w)  are cached per w
    and N-schedule, so points sharing a w value reuse them.
    """

    def __init__(self, spec: CrossSpec, nodes: tuple[int, int] = (1024, 1024), order: int = 16,
                 guard: float = POLE_GUARD):
        if spec.f is None:
            raise ValueError("cross has no function to extend")
        self.spec = spec
        self.guard = guard
        self.rule_a = arc_rule(spec.A, nodes=nodes[0], order=order)
        self.rule_b = arc_rule(spec.B, nodes=nodes[1], order=order)
        self.a = self.rule_a.points
        self.b = self.rule_b.points
        self.ga = self._boundary_g(self.rule_a, spec.A)
        self.gb = self._boundary_g(self.rule_b, spec.B)
        self.da = 1j * self.a * self.rule_a.weights / (2j * math.pi)
        self.db = 1j * self.b * self.rule_b.weights / (2j * math.pi)
        with np.errstate(over="ignore", invalid="ignore"):
            self.F = np.asarray(spec.f(self.a[:, None], self.b[None, :]), dtype=complex)
        self._bsums: dict = {}

    @staticmethod
    def _boundary_g(rule, arcs: BoundaryArcSet) -> np.ndarray:
        if rule.full:
            return np.zeros(rule.size, dtype=complex)
        return schwarz_g_boundary(rule.theta, arcs)

    def _g(self, z, arcs: BoundaryArcSet) -> complex:
        return 0j if arcs.is_full else complex(schwarz_g(z, arcs))

    def _check(self, z: complex, w: complex) -> None:
        s = wedge_omega(self.spec, z, w)
        if s.omega_sum >= 1.0 - WEDGE_MARGIN:
            raise ValueError("outside wedge")
        check_pole_guard(self.rule_a, z, self.guard)
        check_pole_guard(self.rule_b, w, self.guard)

    def _bsum(self, w: complex, Ns: np.ndarray) -> np.ndarray:
        key = (w, Ns.tobytes())
        hit = self._bsums.get(key)
        if hit is None:
            kb = np.exp(-Ns[:, None] * self.gb[None, :]) * (self.db / (self.b - w))[None, :]
            with np.errstate(over="ignore", invalid="ignore"):
                hit = kb @ self.F.T
            if len(self._bsums) > 256:
                self._bsums.clear()
            self._bsums[key] = hit
        return hit

    def sweep(self, z: complex, w: complex, Ns: Sequence[float]) -> np.ndarray:
        """K_N(z, w) for every N in ``Ns``."""
        z, w = complex(z), complex(w)
        self._check(z, w)
        Ns = np.asarray(Ns, dtype=float)
        ka = np.exp(-Ns[:, None] * self.ga[None, :]) * (self.da / (self.a - z))[None, :]
        inner = self._bsum(w, Ns)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.sum(ka * inner, axis=1)
            return vals * np.exp(Ns * (self._g(z, self.spec.A) + self._g(w, self.spec.B)))

    def apply(self, z: complex, w: complex, N: float) -> complex:
        return complex(self.sweep(z, w, [N])[0])

    def limit(self, z: complex, w: complex, Ns: Sequence[float] = DEFAULT_SCHEDULE, tol: float = 1e-5) -> ConvergenceTrace:
        ref = None
        if self.spec.f is not None:
            with np.errstate(over="ignore", invalid="ignore"):
                ref = complex(self.spec.f(np.asarray(z), np.asarray(w)))
        return ConvergenceTrace(np.asarray(Ns, dtype=float), self.sweep(z, w, Ns), tol, reference=ref)

    def extension(self, Ns: Sequence[float] = DEFAULT_SCHEDULE, tol: float = 1e-5) -> Callable:
        """Evaluator (z, w) -> K(z, w) taken at the plateau of the N-schedule."""
        return lambda z, w: self.limit(z, w, Ns, tol).value


def gc_apply(spec: CrossSpec, z: complex, w: complex, N: float, nodes: tuple[int, int] = (1024, 1024)) -> complex:
    return GoncharCarleman(spec, nodes).apply(z, w, N)


# --- sup norms ------------------------------------------------------------


def arc_param(arcs: BoundaryArcSet, s):
    """Map s in [0, 1] onto the arc set, proportionally to length."""
    s = np.asarray(s, dtype=float)
    if arcs.is_full:
        return -math.pi + 2 * math.pi * s
    pieces = arcs.arcs
    lengths = np.array([hi - lo for lo, hi in pieces])
    cum = np.concatenate([[0.0], np.cumsum(lengths)]) / lengths.sum()
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(pieces) - 1)
    lo = np.array([p[0] for p in pieces])[k]
    return lo + (s - cum[k]) * lengths.sum()


@dataclass
class SupEstimate:
    sup_AB: float
    sup_W: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.sup_W) and math.isfinite(self.sup_AB)


def _sampled_sup(values_at: Callable, dim: int, n_coarse: int, rounds: int = 25, shrink: float = 4.0) -> float:
    """Sup of |f| over a parameter cube: coarse grid, then zoom around the argmax."""
    axes = [np.linspace(0.0, 1.0, n_coarse)] * dim
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, dim)
    vals = np.abs(values_at(grid))
    if not np.all(np.isfinite(vals)) or vals.max() > OVERFLOW:
        return math.inf
    best = float(vals.max())
    centre = grid[int(np.argmax(vals))]
    half = 1.0 / (n_coarse - 1)
    local = np.linspace(-1.0, 1.0, 7)
    for _ in range(rounds):
        pts = np.stack(np.meshgrid(*[c + half * local for c in centre], indexing="ij"), -1).reshape(-1, dim)
        pts = np.clip(pts, 0.0, 1.0)
        vals = np.abs(values_at(pts))
        if not np.all(np.isfinite(vals)) or vals.max() > OVERFLOW:
            return math.inf
        k = int(np.argmax(vals))
        if vals[k] >= best:
            best, centre = float(vals[k]), pts[k]
        half /= shrink
    return best


def sup_norms(spec: CrossSpec, n_samples: int = 10_000, r_max: float = 1.0 - 1e-12) -> SupEstimate:
    """Estimated sup |f| on A x B and on the cross W = (D u A) x B  u  A x (B u G)."""
    f = spec.f

    def on_AB(p):
        a = np.exp(1j * arc_param(spec.A, p[:, 0]))
        b = np.exp(1j * arc_param(spec.B, p[:, 1]))
        return f(a, b)

    def on_DB(p):
        z = r_max * p[:, 0] * np.exp(1j * (2 * math.pi * p[:, 1] - math.pi))
        return f(z, np.exp(1j * arc_param(spec.B, p[:, 2])))

    def on_AG(p):
        w = r_max * p[:, 1] * np.exp(1j * (2 * math.pi * p[:, 2] - math.pi))
        return f(np.exp(1j * arc_param(spec.A, p[:, 0])), w)

    n2 = max(int(round(math.sqrt(n_samples))), 3) | 1
    n3 = max(int(round((n_samples / 2) ** (1 / 3))), 3) | 1
    sup_ab = _sampled_sup(on_AB, 2, n2)
    sup_w = max(sup_ab, _sampled_sup(on_DB, 3, n3), _sampled_sup(on_AG, 3, n3))
    return SupEstimate(sup_ab, sup_w)


# --- extension reports ----------------------------------------------------


@dataclass
class PointResult:
    sample: WedgeSample
    K: complex
    converged: bool
    plateau_N: float | None
    abs_err: float | None
    bound: float | None
    margin: float | None
    diffs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        s = self.sample
        return {
            "z": [s.z.real, s.z.imag], "w": [s.w.real, s.w.imag],
            "omega_z": s.omega_z, "omega_w": s.omega_w, "omega_sum": s.omega_sum,
            "K": [_num(self.K.real), _num(self.K.imag)], "converged": self.converged,
            "plateau_N": self.plateau_N, "abs_err": _num(self.abs_err),
            "bound": _num(self.bound), "margin": _num(self.margin),
            "diffs": [_num(d) for d in self.diffs],
        }


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


@dataclass
class ExtensionReport:
    points: list[PointResult]
    sup_W: float
    sup_AB: float
    bound_checked: bool
    skip_reason: str | None = None

    @property
    def max_abs_err(self) -> float | None:
        errs = [p.abs_err for p in self.points if p.abs_err is not None]
        return max(errs) if errs else None

    @property
    def max_violation(self) -> float | None:
        if not self.bound_checked:
            return None
        return max(0.0, max(-p.margin for p in self.points))

    @property
    def min_margin(self) -> float | None:
        return None if not self.bound_checked else min(p.margin for p in self.points)

    @property
    def all_converged(self) -> bool:
        return all(p.converged for p in self.points)

    def to_dict(self) -> dict:
        return {
            "points": [p.to_dict() for p in self.points],
            "sup_W": _num(self.sup_W) if math.isfinite(self.sup_W) else "inf",
            "sup_AB": _num(self.sup_AB) if math.isfinite(self.sup_AB) else "inf",
            "bound_checked": self.bound_checked,
            "skip_reason": self.skip_reason,
            "max_abs_err": _num(self.max_abs_err),
            "max_violation": _num(self.max_violation),
            "all_converged": self.all_converged,
        }


def gc_extend(spec: CrossSpec, points: Sequence, N_schedule: Sequence[float] = DEFAULT_SCHEDULE,
              tol: float = 1e-5, nodes: tuple[int, int] = (1024, 1024), operator: GoncharCarleman | None = None,
              workers: int = 1, n_sup_samples: int = 10_000) -> ExtensionReport:
    """Evaluate K at wedge points, compare with the exact function and check the two-constant bound."""
    op = operator or GoncharCarleman(spec, nodes)
    samples = [p if isinstance(p, WedgeSample) else wedge_omega(spec, *p) for p in points]
    sups = sup_norms(spec, n_sup_samples)
    skip = None if sups.bounded else "unbounded on W"

    def one(s: WedgeSample) -> PointResult:
        tr = op.limit(s.z, s.w, N_schedule, tol)
        K = tr.value
        err = None if tr.reference is None else abs(K - tr.reference)
        if err is not None and not math.isfinite(err):
            err = math.inf
        bound = margin = None
        if skip is None:
            bound = sups.sup_AB ** (1.0 - s.omega_sum) * sups.sup_W ** s.omega_sum * (1.0 + BOUND_SLACK)
            margin = bound - abs(K)
        return PointResult(s, K, tr.converged, tr.plateau_N, err, bound, margin, list(tr.diffs[1:]))

    if workers > 1:
        # fill the b-sum cache serially so threads only read it
        for s in samples:
            op._bsum(complex(s.w), np.asarray(N_schedule, dtype=float))
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(one, samples))
    else:
        results = [one(s) for s in samples]
    return ExtensionReport(results, sups.sup_W, sups.sup_AB, skip is None, skip)


def power_identity_check(spec: CrossSpec, points: Sequence, n_power: int,
                         N_schedule: Sequence[float] = DEFAULT_SCHEDULE, tol: float = 1e-5,
                         nodes: tuple[int, int] = (1024, 1024)) -> float:
    """max over points of |K[f^n] - K[f]^n|."""
    op = GoncharCarleman(spec, nodes)
    pts = [(p.z, p.w) if isinstance(p, WedgeSample) else p for p in points]
    base = [op.limit(z, w, N_schedule, tol).value for z, w in pts]
    if n_power == 1:
        return max(abs(k - k) for k in base)
    f = spec.f
    powered = spec.with_function(lambda z, w: f(z, w) ** n_power)
    op_n = GoncharCarleman(powered, nodes)
    return max(abs(op_n.limit(z, w, N_schedule, tol).value - k**n_power) for (z, w), k in zip(pts, base))


# --- boundary probes ------------------------------------------------------


@dataclass
class ProbeTrace:
    depths: list[float]
    target: complex
    radial: list[complex]
    off_axis: list[complex]
    truncated: bool

    @property
    def radial_errors(self) -> list[float]:
        return [abs(v - self.target) for v in self.radial]

    @property
    def off_axis_errors(self) -> list[float]:
        return [abs(v - self.target) for v in self.off_axis]


def angular_probe(spec: CrossSpec, extension_eval: Callable, a: complex, w0: complex, alpha: float,
                  depths: Sequence[float]) -> ProbeTrace:
    """Values of the extension along a radius and a Stolz-cone ray into ``a``.

    The off-axis ray enters at half the cone angle.  A pole-guard trip ends
    the trace early and sets ``truncated``.
    """
    a = complex(a)
    target = complex(spec.f(np.asarray(a), np.asarray(w0)))
    tilt = np.exp(0.5j * alpha)
    radial, off, used = [], [], []
    truncated = False
    for d in depths:
        z_rad = a * (1 - d)
        z_off = a * (1 - d * tilt)
        assert stolz_contains(a, alpha, z_off)
        try:
            vr = complex(extension_eval(z_rad, w0))
            vo = complex(extension_eval(z_off, w0))
        except PoleGuardError:
            truncated = True
            break
        radial.append(vr)
        off.append(vo)
        used.append(float(d))
    return ProbeTrace(used, target, radial, off, truncated)


@dataclass
class JointProbe:
    depths: list[float]
    values: dict[str, list[complex]]

    @property
    def spreads(self) -> list[float]:
        cols = list(zip(*self.values.values()))
        return [max(abs(u - v) for u in col for v in col) for col in cols]


def joint_probe(evaluator: Callable, sequences: dict[str, Callable], depths: Sequence[float],
                dps: int = 400) -> JointProbe:
    """Evaluate ``evaluator`` along several approach sequences t -> (z(t), w(t)).

    Runs under mpmath with ``dps`` digits so points exponentially close to the
    boundary stay distinct from it.
    """
    values: dict[str, list[complex]] = {}
    with mpmath.workdps(dps):
        for name, seq in sequences.items():
            values[name] = [complex(evaluator(*seq(mpmath.mpf(t)))) for t in depths]
    return JointProbe([float(t) for t in depths], values)


def example1_sequences(a: complex = 1.0, b: complex = 1.0, rate: float = 3.0) -> dict[str, Callable]:
    """Two radial approaches to (a, b): equal depths, and z exponentially deeper than w."""
    return {
        "diagonal": lambda t: (a * (1 - t), b * (1 - t)),
        "z_faster": lambda t: (a * (1 - mpmath.exp(-rate / t)), b * (1 - t)),
    }
