import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from crossext.geometry import arc_set_normalize
from crossext.harmonic import (
    AnalyticCompletion,
    HarmonicMeasureField,
    LevelSet,
    exhaustion_omega,
    level_membership,
    poisson_omega,
    schwarz_g,
    schwarz_g_boundary,
    two_constant_bound,
)

interior = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0.0, 0.95), st.floats(-math.pi, math.pi))


@st.composite
def arc_sets(draw):
    n = draw(st.integers(1, 3))
    cuts = sorted(draw(st.lists(st.floats(-math.pi, math.pi), min_size=2 * n, max_size=2 * n, unique=True)))
    arcs = [[a, b] for a, b in zip(cuts[::2], cuts[1::2]) if b - a > 1e-3]
    if not arcs:
        arcs = [[0.0, 1.0]]
    return arc_set_normalize(arcs)


def poisson_quadrature(z, A):
    # independent oracle: adaptive quadrature of the Poisson kernel over the complement arcs
    ker = lambda t: (1 - abs(z) ** 2) / abs(np.exp(1j * t) - z) ** 2 / (2 * math.pi)
    return sum(quad(ker, lo, hi, epsabs=1e-13, epsrel=1e-13, limit=200)[0] for lo, hi in A.complement().arcs)


def test_center_values(fix_a, full_circle):
    assert poisson_omega(0.0, fix_a) == pytest.approx(0.5, abs=1e-15)
    assert poisson_omega(0.0, full_circle) == 0.0


def test_not_interior(fix_a):
    with pytest.raises(ValueError, match="not interior"):
        poisson_omega(1.0, fix_a)
    with pytest.raises(ValueError, match="not interior"):
        schwarz_g(1.2j, fix_a)


@pytest.mark.parametrize("z", [0.9, 0.5j, -0.3 + 0.4j, 0.95 * np.exp(2.5j)])
def test_matches_poisson_quadrature(fix_a, z):
    assert poisson_omega(z, fix_a) == pytest.approx(poisson_quadrature(z, fix_a), abs=1e-12)


def test_multi_arc_matches_quadrature():
    A = arc_set_normalize([[-2.5, -1.0], [0.2, 0.9], [2.0, 3.5]])
    for z in (0.0, 0.6, -0.7j, 0.8 * np.exp(1.0j)):
        assert poisson_omega(z, A) == pytest.approx(poisson_quadrature(z, A), abs=1e-12)


@given(arc_sets(), interior)
@settings(max_examples=80, deadline=None)
def test_range(A, z):
    w = poisson_omega(z, A)
    assert 0.0 <= w <= 1.0


@given(arc_sets(), st.floats(-math.pi, math.pi), interior)
@settings(max_examples=80, deadline=None)
def test_rotation_equivariance(A, phi, z):
    assert poisson_omega(np.exp(1j * phi) * z, A.rotate(phi)) == pytest.approx(poisson_omega(z, A), abs=1e-13)


@given(st.floats(-2.0, 0.0), st.floats(0.1, 2.0), st.floats(0.01, 0.5), interior)
@settings(max_examples=60, deadline=None)
def test_monotone_in_A(lo, length, extra, z):
    A = arc_set_normalize([[lo, lo + length]])
    A2 = arc_set_normalize([[lo - extra, lo + length + extra]])
    assert poisson_omega(z, A) >= poisson_omega(z, A2) - 1e-15


def test_mean_value_property(fix_a):
    rng = np.random.default_rng(0)
    for _ in range(20):
        z = 0.8 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        rho = 0.45 * (1 - abs(z))
        circle = z + rho * np.exp(2j * math.pi * np.arange(512) / 512)
        assert abs(np.mean(poisson_omega(circle, fix_a)) - poisson_omega(z, fix_a)) < 1e-8


def test_discrete_laplacian(fix_a):
    # the 5-point stencil itself errs by h^2/12 |d^4 omega|, which grows like
    # dist^-4 toward the arc endpoints; stay 0.3 away from the circle
    rng = np.random.default_rng(1)
    h = 1e-3
    zs = 0.7 * np.sqrt(rng.uniform(size=100)) * np.exp(2j * math.pi * rng.uniform(size=100))
    lap = (poisson_omega(zs + h, fix_a) + poisson_omega(zs - h, fix_a) + poisson_omega(zs + 1j * h, fix_a)
           + poisson_omega(zs - 1j * h, fix_a) - 4 * poisson_omega(zs, fix_a)) / h**2
    assert np.abs(lap).max() < 1e-4


def test_boundary_limits(fix_a):
    r = 1 - 1e-7
    assert poisson_omega(r, fix_a) < 1e-6
    assert poisson_omega(r * np.exp(0.4j), fix_a) < 1e-6
    assert poisson_omega(-r, fix_a) > 1 - 1e-6


def test_null_set_continuity(fix_a):
    shrunk = arc_set_normalize([[-math.pi / 2 + 1e-8, math.pi / 2]])
    for z in (0.0, 0.5, 0.9j, -0.7):
        assert abs(poisson_omega(z, shrunk) - poisson_omega(z, fix_a)) < 1e-7


# --- analytic completion ---


def test_schwarz_examples(fix_a, full_circle):
    assert schwarz_g(0.0, fix_a) == pytest.approx(0.5 + 0j, abs=1e-15)
    assert schwarz_g(0.5, full_circle) == 0j
    g = schwarz_g(0.5, fix_a)
    assert g.real == pytest.approx(poisson_omega(0.5, fix_a), abs=1e-12)


def test_schwarz_conjugate_symmetry(fix_a):
    rng = np.random.default_rng(2)
    zs = 0.95 * np.sqrt(rng.uniform(size=100)) * np.exp(2j * math.pi * rng.uniform(size=100))
    assert np.allclose(schwarz_g(np.conj(zs), fix_a).imag, -schwarz_g(zs, fix_a).imag, atol=1e-13)


@given(arc_sets(), interior, interior)
@settings(max_examples=60, deadline=None)
def test_completion_real_part_and_normalization(A, z, z0):
    g = schwarz_g(z, A, z0)
    assert g.real == pytest.approx(poisson_omega(z, A), abs=1e-12)
    assert abs(schwarz_g(z0, A, z0).imag) < 1e-12


def test_completion_is_holomorphic(fix_a):
    # Cauchy-Riemann: the x- and y-difference quotients agree
    h = 1e-5
    for z in (0.3, -0.2 + 0.5j, 0.6j):
        dx = (schwarz_g(z + h, fix_a) - schwarz_g(z - h, fix_a)) / (2 * h)
        dy = (schwarz_g(z + 1j * h, fix_a) - schwarz_g(z - 1j * h, fix_a)) / (2j * h)
        assert abs(dx - dy) < 1e-6


def test_boundary_values_are_radial_limits(fix_a):
    theta = np.linspace(-1.5, 1.5, 31)
    gb = schwarz_g_boundary(theta, fix_a)
    assert np.all(gb.real == 0)
    near = schwarz_g((1 - 1e-8) * np.exp(1j * theta), fix_a)
    assert np.allclose(near.imag, gb.imag, atol=1e-6)
    assert np.all(near.real < 1e-6)


def test_boundary_values_with_shifted_normalization(fix_a):
    comp = AnalyticCompletion(fix_a, 0.3j)
    theta = np.array([0.1, 1.0])
    near = comp((1 - 1e-9) * np.exp(1j * theta))
    assert np.allclose(comp.boundary(theta).imag, near.imag, atol=1e-6)


# --- level sets and bounds ---


def test_level_membership_examples(fix_a):
    field = HarmonicMeasureField(fix_a)
    assert level_membership(0.3, field, 0.0) == (True, pytest.approx(poisson_omega(0.3, fix_a)))
    inside, w = level_membership(0.0, field, 0.4)
    assert inside and w == pytest.approx(0.5 / 0.6)
    inside, w = level_membership(0.0, field, 0.6)
    assert not inside and w == pytest.approx(0.5 / 0.4)
    with pytest.raises(ValueError):
        level_membership(0.0, field, 1.0)


def test_level_sets_nested(fix_a):
    field = HarmonicMeasureField(fix_a)
    rng = np.random.default_rng(3)
    zs = 0.99 * np.sqrt(rng.uniform(size=2000)) * np.exp(2j * math.pi * rng.uniform(size=2000))
    d0 = LevelSet(field, 0.0).contains(zs)
    d1 = LevelSet(field, 0.2).contains(zs)
    d2 = field.level_set(0.5).contains(zs)
    assert d0.all()
    assert np.all(~d2 | d1)
    assert np.all(~d1 | d0)
    assert LevelSet(field, 0.2).omega_eps(0.0) == pytest.approx(0.5 / 0.8)


def test_two_constant_bound_examples():
    assert two_constant_bound(0.0, 1.0, 0.5) == 0.5
    assert two_constant_bound(-3.0, 2.0, 0.0) == -3.0
    assert math.exp(two_constant_bound(math.log(0.1), 0.0, 0.3)) == pytest.approx(10**-0.7, rel=1e-12)
    assert 10**-0.7 == pytest.approx(0.1995, abs=1e-4)
    with pytest.raises(ValueError):
        two_constant_bound(2.0, 1.0, 0.5)


def test_exhaustion_sequence_converges_at_first_order(fix_a):
    # with D_k a shrunken disc the gap decays like c/k rather than faster
    exact = poisson_omega(0.3, fix_a)
    gaps = np.array([exhaustion_omega(0.3, fix_a, k) - exact for k in (8, 16, 32, 64, 128, 256)])
    assert np.all(gaps > 0)
    assert np.all(np.diff(gaps) < 0)
    ratios = gaps[:-1] / gaps[1:]
    assert np.allclose(ratios[-3:], 2.0, atol=0.1)


def test_exhaustion_errors(fix_a):
    with pytest.raises(ValueError):
        exhaustion_omega(0.3, fix_a, 1)
    with pytest.raises(ValueError, match="not interior"):
        exhaustion_omega(0.95, fix_a, 4)
