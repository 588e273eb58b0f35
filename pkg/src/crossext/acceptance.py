"""
Acceptance criteria as runnable checks.

Each criterion function takes an ``overrides`` dict (``seed``, ``N_max``,
``threads``) and returns a :class:`CriterionResult`.  Runtime limits are
part of the criterion: exceeding one fails it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .carleman import BoundaryTrace, carleman1d, carleman1d_sweep, moment_residuals
from .catalog import get_function
from .cross import (
    CrossSpec,
    GoncharCarleman,
    angular_probe,
    example1_sequences,
    gc_extend,
    joint_probe,
    power_identity_check,
    wedge_grid,
)
from .dob import CondenserSpec, condenser_omega, dob_basis, dob_extend, gamma_closed_form, gram_pair
from .geometry import arc_set_normalize
from .harmonic import exhaustion_omega, poisson_omega
from .montecarlo import WalkDomain, mc_omega

FIX_A = arc_set_normalize([[-math.pi / 2, math.pi / 2]])


def fix_2d() -> CrossSpec:
    return CrossSpec(FIX_A, FIX_A, get_function("rational2d"), "FIX-2D")


def fix_f1(z):
    return 1.0 / (2.0 - z)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict
    tolerance: str
    runtime: float = 0.0
    limit: float | None = None
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] {self.number:2d} {self.name}: {shown} (tol: {self.tolerance}; {self.runtime:.1f}s)"

    def to_dict(self) -> dict:
        return {
            "number": self.number, "name": self.name, "passed": self.passed,
            "measured": {k: _plain(v) for k, v in self.measured.items()},
            "tolerance": self.tolerance, "runtime": self.runtime, "limit": self.limit, "note": self.note,
        }


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


# --- criteria -------------------------------------------------------------


def c01_center_measure(ov: dict) -> CriterionResult:
    rng = np.random.default_rng(ov.get("seed", 0))
    worst = 0.0
    for _ in range(50):
        k = int(rng.integers(1, 5))
        cuts = np.sort(rng.uniform(-math.pi, math.pi, 2 * k))
        A = arc_set_normalize(cuts.reshape(k, 2))
        worst = max(worst, abs(poisson_omega(0.0, A) - (1.0 - A.length / (2 * math.pi))))
    return CriterionResult(1, "center harmonic measure", worst < 1e-12, {"max_abs_err": worst}, "1e-12")


def c02_mc_disc(ov: dict) -> CriterionResult:
    dom = WalkDomain.disc(FIX_A, eps_abs=1e-3)
    rows, ok = [], True
    for z in (0.0, 0.5, 0.5j):
        p, se = mc_omega(dom, z, 200_000, ov.get("seed", 0), ov.get("threads", 1))
        exact = poisson_omega(z, FIX_A)
        dev = abs(p - exact)
        ok &= dev < 4 * se + 0.01
        rows.append(dev)
    return CriterionResult(2, "Monte Carlo vs exact", bool(ok), {"abs_dev": rows}, "4*stderr + 0.01")


def c03_slit_monotone(ov: dict) -> CriterionResult:
    dom = WalkDomain.slit_square(eps_abs=1e-3)
    ys = (0.9, 0.7, 0.5, 0.3, 0.1)
    est = [mc_omega(dom, 1j * y, 50_000, ov.get("seed", 0), ov.get("threads", 1)) for y in ys]
    steps = [(b[0] - a[0]) - 2 * math.hypot(a[1], b[1]) for a, b in zip(est, est[1:])]
    return CriterionResult(3, "slit-square monotonicity", all(s > 0 for s in steps),
                           {"omega": [e[0] for e in est], "min_step_over_2se": min(steps)}, "strict, 2*stderr")


def _fix_f1_trace(nodes: int) -> BoundaryTrace:
    return BoundaryTrace.on_arcs(fix_f1, FIX_A, nodes=nodes)


def c04_carleman(ov: dict) -> CriterionResult:
    trace = _fix_f1_trace(4096)
    N_max = ov.get("N_max", 30)
    sweep = carleman1d_sweep(trace, FIX_A, 0.0, N_max, tol=1e-10, reference=0.5)
    N = min(20, N_max)
    err = abs(carleman1d(trace, FIX_A, 0.0, N) - 0.5)
    ok = err < 1e-5 and sweep.slope <= -0.4
    return CriterionResult(4, "Carleman 1-D", ok, {"N": N, "abs_err": err, "slope": sweep.slope},
                           "err < 1e-5, slope <= -0.4")


def c05_u_shape(ov: dict) -> CriterionResult:
    trace = _fix_f1_trace(512)
    N_max = ov.get("N_max", 60)
    sweep = carleman1d_sweep(trace, FIX_A, 0.0, N_max, tol=1e-10, reference=0.5)
    err = sweep.errors
    k = int(np.argmin(err))
    tail = np.log10(err[-10:])
    rising = len(err) > 10 and k < len(err) - 10 and bool(np.all(np.diff(err[-10:]) > 0))
    return CriterionResult(5, "error U-shape", rising,
                           {"argmin_N": float(sweep.N[k]), "min_err": float(err[k]), "last10_log10": np.round(tail, 2).tolist()},
                           "minimum, then strict increase over last 10 N")


def _gc_grid(spec: CrossSpec):
    return wedge_grid(spec, 8, 0.6, max_points=25)


def _schedule(ov: dict) -> np.ndarray:
    return np.arange(0, ov.get("N_max", 40) + 1, 1.0)


_GC_CACHE: dict = {}


def _gc_report(ov: dict):
    key = ov.get("N_max", 40)
    if key not in _GC_CACHE:
        spec = fix_2d()
        _GC_CACHE[key] = (spec, gc_extend(spec, _gc_grid(spec), _schedule(ov), tol=1e-5, workers=ov.get("threads", 1)))
    return _GC_CACHE[key]


def c06_gc(ov: dict) -> CriterionResult:
    _, rep = _gc_report(ov)
    frac = sum(p.converged for p in rep.points) / len(rep.points)
    err = rep.max_abs_err
    return CriterionResult(6, "Gonchar-Carleman 2-D", err < 1e-3 and frac == 1.0,
                           {"points": len(rep.points), "max_abs_err": err, "converged": frac}, "err < 1e-3, 100% converged")


def c07_bound(ov: dict) -> CriterionResult:
    _, rep = _gc_report(ov)
    if not rep.bound_checked:
        return CriterionResult(7, "two-constant bound", False, {"skipped": rep.skip_reason}, "margin >= -1e-6*|f|_W")
    floor = -1e-6 * rep.sup_W
    return CriterionResult(7, "two-constant bound", rep.min_margin >= floor,
                           {"min_margin": rep.min_margin, "sup_AB": rep.sup_AB, "sup_W": rep.sup_W}, "margin >= -1e-6*|f|_W")


def c08_power(ov: dict) -> CriterionResult:
    spec = fix_2d()
    dev = power_identity_check(spec, _gc_grid(spec), 2, _schedule(ov), tol=1e-5)
    return CriterionResult(8, "power identity", dev < 1e-3, {"max_dev": dev}, "1e-3")


def c09_angular(ov: dict) -> CriterionResult:
    spec = fix_2d()
    ev = GoncharCarleman(spec, (4096, 1024)).extension(_schedule(ov), tol=1e-5)
    pr = angular_probe(spec, ev, 1.0, 0.5, math.pi / 4, [0.1, 0.05, 0.025, 0.0125])
    ok = True
    for errs in (pr.radial_errors, pr.off_axis_errors):
        ok &= len(errs) == 4 and all(b < a for a, b in zip(errs, errs[1:])) and errs[-1] < 5e-2
    return CriterionResult(9, "angular boundary limit", bool(ok),
                           {"radial": pr.radial_errors, "off_axis": pr.off_axis_errors, "truncated": pr.truncated},
                           "strictly decreasing, final < 5e-2")


def c10_example1(ov: dict) -> CriterionResult:
    h = get_function("example1")
    jp = joint_probe(h.mp, example1_sequences(), [0.1, 0.05, 0.025, 0.0125])
    return CriterionResult(10, "Example 1 no joint limit", jp.spreads[-1] > 0.1, {"spreads": jp.spreads}, "spread > 0.1")


def c11_moments(ov: dict) -> CriterionResult:
    res = moment_residuals(BoundaryTrace.full_circle(fix_f1, 4096), 10)
    return CriterionResult(11, "moment residuals", float(res.max()) < 1e-10, {"max_residual": float(res.max())}, "1e-10")


def c12_level_set(ov: dict) -> CriterionResult:
    eps = 0.3
    dom = WalkDomain.level_set(FIX_A, eps, eps_abs=1e-3)
    devs = []
    for z in (0.0, 0.4, -0.2 + 0.3j):
        p, _ = mc_omega(dom, z, 100_000, ov.get("seed", 0), ov.get("threads", 1))
        devs.append(abs(p - poisson_omega(z, FIX_A) / (1 - eps)))
    return CriterionResult(12, "level-set scaling", max(devs) < 0.03, {"abs_dev": devs}, "0.03")


def c13_dob(ov: dict) -> CriterionResult:
    spec = CondenserSpec(0.5, 40)
    basis = dob_basis(*gram_pair(spec))
    rel = float(np.abs(basis.gamma[:21] / gamma_closed_form(0.5, 21) - 1).max())
    r0, r1 = basis.orthogonality_residuals()
    return CriterionResult(13, "DOB closed forms", rel < 1e-8 and max(r0, r1) < 1e-10,
                           {"gamma_rel_err": rel, "H0_residual": r0, "H1_rel_residual": r1}, "rel 1e-8; residual 1e-10")


def shared_grid(n: int = 9):
    """Points inside both the boundary wedge of FIX-2D and the mixed condenser wedge."""
    spec = fix_2d()
    cand = [s for s in wedge_grid(spec, 8, 0.6)
            if abs(s.z) > 0.5 and condenser_omega(s.z, 0.5) + s.omega_w < 0.9]
    pick = np.unique(np.round(np.linspace(0, len(cand) - 1, n)).astype(int))
    return [cand[i] for i in pick]


def c14_dob_extend(ov: dict) -> CriterionResult:
    spec2 = fix_2d()
    cond = CondenserSpec(0.5, 40, B=FIX_A)
    basis = dob_basis(*gram_pair(cond))
    f = spec2.f
    pts = shared_grid(9)
    vals = dob_extend(cond, basis, f, [(s.z, s.w) for s in pts], reference=f)
    rep = gc_extend(spec2, pts, _schedule(ov), tol=1e-5)
    err = max(v.abs_err for v in vals)
    gap = max(abs(v.value - p.K) for v, p in zip(vals, rep.points))
    ok = len(pts) == 9 and err < 1e-3 and gap < 2e-3
    return CriterionResult(14, "DOB series extension", ok, {"points": len(pts), "max_abs_err": err, "max_gap_to_gc": gap},
                           "err < 1e-3, gap < 2e-3")


def c15_exhaustion(ov: dict) -> CriterionResult:
    z = 0.3
    exact = poisson_omega(z, FIX_A)
    ks = [2, 4, 8, 16, 32, 64]
    seq = [exhaustion_omega(z, FIX_A, k) for k in ks]
    dec = all(b <= a for a, b in zip(seq, seq[1:])) and seq[-1] >= exact
    gap = seq[-1] - exact
    return CriterionResult(15, "exhaustion limit", dec and abs(gap) < 1e-3,
                           {"gap_k64": gap, "decreasing": dec, "seq_minus_limit": [s - exact for s in seq]},
                           "decreasing, within 1e-3 at k=64")


@dataclass
class Criterion:
    number: int
    run: Callable[[dict], CriterionResult]
    limit: float | None
    fast: bool = True
    tags: tuple = field(default_factory=tuple)


CRITERIA = [
    Criterion(1, c01_center_measure, 1.0),
    Criterion(2, c02_mc_disc, 60.0, fast=False),
    Criterion(3, c03_slit_monotone, 60.0, fast=False),
    Criterion(4, c04_carleman, 10.0),
    Criterion(5, c05_u_shape, 10.0),
    Criterion(6, c06_gc, 120.0),
    Criterion(7, c07_bound, None),
    Criterion(8, c08_power, None),
    Criterion(9, c09_angular, None),
    Criterion(10, c10_example1, None),
    Criterion(11, c11_moments, None),
    Criterion(12, c12_level_set, None, fast=False),
    Criterion(13, c13_dob, None),
    Criterion(14, c14_dob_extend, None),
    Criterion(15, c15_exhaustion, None),
]


def run_criterion(c: Criterion, overrides: dict | None = None) -> CriterionResult:
    ov = dict(overrides or {})
    t0 = time.perf_counter()
    try:
        res = c.run(ov)
    except Exception as exc:  # a crash is a failed criterion, not a crashed suite
        res = CriterionResult(c.number, c.run.__name__, False, {"error": repr(exc)}, "-")
    res.runtime = time.perf_counter() - t0
    res.limit = c.limit
    if c.limit is not None and res.runtime > c.limit:
        res.passed = False
        res.note = f"runtime {res.runtime:.1f}s over limit {c.limit:.0f}s"
    return res


def run_suite(suite: str = "full", overrides: dict | None = None, numbers=None) -> list[CriterionResult]:
    if suite not in ("fast", "full"):
        raise ValueError("suite must be 'fast' or 'full'")
    _GC_CACHE.clear()
    chosen = [c for c in CRITERIA if (suite == "full" or c.fast) and (numbers is None or c.number in numbers)]
    return [run_criterion(c, overrides) for c in chosen]
