import math

import numpy as np
import pytest
from scipy.integrate import quad

from crossext.carleman import (
    BoundaryTrace,
    CarlemanSweep,
    ConvergenceTrace,
    PoleGuardError,
    carleman1d,
    carleman1d_sweep,
    cauchy_eval,
    moment_residuals,
    radial_maximal,
)
from crossext.harmonic import poisson_omega


def f1(z):
    return 1.0 / (2.0 - z)


@pytest.fixture(scope="module")
def trace4096(fix_a):
    return BoundaryTrace.on_arcs(f1, fix_a, nodes=4096)


# --- Cauchy integrals and moments ---


def test_cauchy_reproduces_polynomial():
    tr = BoundaryTrace.full_circle(lambda z: z**2, 512)
    assert cauchy_eval(tr, 0.3) == pytest.approx(0.09, abs=1e-12)


def test_cauchy_holomorphic_and_antiholomorphic():
    assert cauchy_eval(BoundaryTrace.full_circle(f1, 512), 0.0) == pytest.approx(0.5, abs=1e-12)
    anti = BoundaryTrace.full_circle(np.conj, 512)
    assert abs(cauchy_eval(anti, 0.3)) < 1e-12


def test_cauchy_guards(fix_a):
    tr = BoundaryTrace.full_circle(f1, 512)
    with pytest.raises(PoleGuardError, match="too close to contour"):
        cauchy_eval(tr, 0.99)
    with pytest.raises(ValueError, match="not interior"):
        cauchy_eval(tr, 1.2)
    with pytest.raises(ValueError):
        cauchy_eval(BoundaryTrace.on_arcs(f1, fix_a), 0.0)


def test_moment_residuals():
    assert moment_residuals(BoundaryTrace.full_circle(f1, 4096), 10).max() < 1e-10
    res = moment_residuals(BoundaryTrace.full_circle(np.conj, 512), 3)
    assert res[0] == pytest.approx(1.0, abs=1e-14)
    assert np.all(res[1:] < 1e-14)
    assert np.all(moment_residuals(BoundaryTrace.full_circle(lambda z: 0 * z, 64), 5) == 0)


def test_moments_of_cauchy_reconstruction():
    rng = np.random.default_rng(0)
    c = rng.normal(size=7) + 1j * rng.normal(size=7)
    data = BoundaryTrace.full_circle(lambda z: np.polyval(c, z) + 3 * np.conj(z) ** 2, 512)
    inner = BoundaryTrace.full_circle(lambda z: z, 256)
    rebuilt = inner.with_values(cauchy_eval(data, 0.8 * inner.points))
    assert moment_residuals(rebuilt, 10).max() < 1e-10


def test_radial_maximal_examples():
    grid = np.linspace(0, 0.99, 100)
    assert radial_maximal(lambda z: 2.0, 1j, grid) == 2.0
    assert radial_maximal(lambda z: z, 1.0, grid) == pytest.approx(0.99)
    with pytest.raises(ValueError):
        radial_maximal(lambda z: z, 1.0, [0.5, 1.0])


def test_radial_maximal_l2_bound():
    # ratio of L2 norms of M_rad C[p] and p stays bounded over random traces
    rng = np.random.default_rng(1)
    zeta = np.exp(2j * math.pi * np.arange(128) / 128)
    radii = np.linspace(0, 0.96, 60)
    worst = 0.0
    for _ in range(20):
        k = np.arange(-8, 9)
        c = (rng.normal(size=k.size) + 1j * rng.normal(size=k.size)) / (1 + np.abs(k))
        trace = BoundaryTrace.full_circle(lambda z: np.sum(c[:, None] * z[None, :] ** k[:, None], axis=0), 2048)
        ev = lambda z: cauchy_eval(trace, z)
        m = np.array([radial_maximal(ev, s, radii) for s in zeta])
        p = np.abs(trace.values)
        worst = max(worst, np.mean(m**2) / np.mean(p**2))
    assert worst <= 100


# --- Carleman recovery ---


def test_carleman_full_circle_is_cauchy(full_circle):
    tr = BoundaryTrace.full_circle(f1, 512)
    for N in (0.0, 3.0, 50.0):
        assert carleman1d(tr, full_circle, 0.0, N) == pytest.approx(0.5, abs=1e-12)
    assert carleman1d(tr, full_circle, 0.4j, 7.0) == cauchy_eval(tr, 0.4j)


def test_carleman_N0_is_partial_cauchy(fix_a, trace4096):
    v = carleman1d(trace4096, fix_a, 0.0, 0.0)
    # oracle: the integral over the complementary half circle, by adaptive quadrature
    g = lambda t: f1(np.exp(1j * t)) / (2 * math.pi)
    rest = quad(lambda t: g(t).real, math.pi / 2, 3 * math.pi / 2)[0] + 1j * quad(lambda t: g(t).imag, math.pi / 2, 3 * math.pi / 2)[0]
    assert abs(v - 0.5) > 0.01
    assert v + rest == pytest.approx(0.5, abs=1e-12)


def test_carleman_recovers_at_N20(fix_a, trace4096):
    assert abs(carleman1d(trace4096, fix_a, 0.0, 20.0) - 0.5) < 1e-5


def test_carleman_linearity(fix_a):
    tr_f = BoundaryTrace.on_arcs(f1, fix_a, nodes=1024)
    tr_g = tr_f.with_values(np.exp(tr_f.points))
    a, b = 2 - 1j, 0.5j
    combo = tr_f.with_values(a * tr_f.values + b * tr_g.values)
    for z in (0.0, 0.3 + 0.2j):
        lhs = carleman1d(combo, fix_a, z, 5.0)
        rhs = a * carleman1d(tr_f, fix_a, z, 5.0) + b * carleman1d(tr_g, fix_a, z, 5.0)
        assert abs(lhs - rhs) < 1e-13


def test_carleman_vectorized_matches_scalar(fix_a, trace4096):
    zs = np.array([0.0, 0.3j, -0.2])
    vec = carleman1d(trace4096, fix_a, zs, 8.0)
    assert np.allclose(vec, [carleman1d(trace4096, fix_a, z, 8.0) for z in zs], rtol=0, atol=1e-14)


def test_sweep_slope_and_plateau(fix_a, trace4096):
    tr = carleman1d_sweep(trace4096, fix_a, 0.0, 30, tol=1e-10, reference=0.5)
    assert tr.slope <= -0.4
    assert tr.converged
    assert abs(tr.value - 0.5) < 1e-9
    assert tr.suggested_N is not None and tr.suggested_N > 0


def test_sweep_full_circle_plateau_at_one(full_circle):
    tr = carleman1d_sweep(BoundaryTrace.full_circle(f1, 512), full_circle, 0.2, 10, tol=1e-12)
    assert np.all(tr.diffs[1:] == 0)
    assert tr.plateau_N == 1.0


def test_decay_steeper_near_the_arc(fix_a, trace4096):
    assert poisson_omega(0.9, fix_a) < poisson_omega(0.0, fix_a)
    s0 = carleman1d_sweep(trace4096, fix_a, 0.0, 30, tol=1e-10, reference=0.5).slope
    s9 = carleman1d_sweep(trace4096, fix_a, 0.9, 30, tol=1e-10, reference=f1(0.9)).slope
    assert s9 < s0


def test_error_has_interior_minimum_at_coarse_nodes(fix_a):
    # error first falls with N, then quadrature error amplified by exp(N omega) takes over
    tr = carleman1d_sweep(BoundaryTrace.on_arcs(f1, fix_a, nodes=512), fix_a, 0.0, 60, tol=1e-10, reference=0.5)
    err = tr.errors
    k = int(np.argmin(err))
    assert 0 < k < len(err) - 10
    assert err[-1] > 1e3 * err[k]
    assert err[0] > 10 * err[k]


def test_pole_guard_trips_near_contour(fix_a):
    with pytest.raises(PoleGuardError):
        CarlemanSweep(BoundaryTrace.on_arcs(f1, fix_a, nodes=512), fix_a, 0.9)
    with pytest.raises(ValueError):
        carleman1d(BoundaryTrace.on_arcs(f1, fix_a), fix_a, 0.0, -1.0)


def test_convergence_trace_rules():
    vals = np.array([1.0, 0.5, 0.3, 0.3001, 0.30011, 0.300111, 0.300111])
    tr = ConvergenceTrace(np.arange(vals.size), vals, tol=1e-3)
    assert tr.plateau_index == 3
    assert tr.plateau_N == 3.0
    assert tr.value == pytest.approx(0.300111)
    noisy = ConvergenceTrace(np.arange(4), np.array([1.0, 3.0, 3.5, 0.0]), tol=1e-6)
    assert not noisy.converged
    assert noisy.value == 3.5
    single = ConvergenceTrace(np.array([0.0]), np.array([2.0]), tol=1e-3)
    assert single.slope == 0.0 and single.value == 2.0
