import math

import numpy as np
import pytest
import scipy.linalg as sl
from hypothesis import given, settings
from hypothesis import strategies as st

from crossext.dob import (
    CondenserSpec,
    condenser_omega,
    dob_basis,
    dob_coeffs,
    dob_extend,
    gamma_closed_form,
    gram_pair,
)


def f2d(z, w):
    return 1 / ((2 - z) * (2 - w))


@pytest.fixture(scope="module")
def cond():
    return CondenserSpec(0.5, 40)


@pytest.fixture(scope="module")
def basis(cond):
    return dob_basis(*gram_pair(cond))


def test_condenser_spec_validation():
    with pytest.raises(ValueError):
        CondenserSpec(r=1.0)
    with pytest.raises(ValueError):
        CondenserSpec(J=0)
    with pytest.raises(ValueError):
        CondenserSpec(J=65)
    assert np.allclose(np.abs(CondenserSpec(0.3, 8).circle_points()), 0.3)


def test_gram_closed_forms():
    # monomials are orthogonal in both spaces: ||z^j||_H0^2 = r^{2j}, ||z^j||_H1^2 = pi / (j + 1)
    r, J = 0.6, 24
    G0, G1 = gram_pair(CondenserSpec(r, J))
    j = np.arange(J)
    assert np.allclose(G0, np.diag(r ** (2 * j)), rtol=0, atol=1e-15)
    assert np.allclose(G1, np.diag(math.pi / (j + 1)), rtol=0, atol=1e-13)


def test_gamma_matches_closed_form(basis):
    rel = np.abs(basis.gamma[:21] / gamma_closed_form(0.5, 21) - 1)
    assert rel.max() < 1e-8
    r0, r1 = basis.orthogonality_residuals()
    assert r0 < 1e-10 and r1 < 1e-10
    assert np.all(np.diff(basis.gamma) > 0)


def test_single_function_basis():
    b = dob_basis(*gram_pair(CondenserSpec(0.5, 1)))
    assert b.gamma[0] == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert b.B[0, 0] == pytest.approx(1.0, rel=1e-14)


def test_basis_is_scaled_monomials(basis):
    # b_j = z^j / r^j with the phase convention, for the leading part of the spectrum
    j = np.arange(20)
    assert np.allclose(np.diag(basis.B)[:20], 0.5 ** (-j), rtol=1e-9, atol=0)


def test_gamma_stable_under_perturbation():
    G0, G1 = gram_pair(CondenserSpec(0.5, 4))
    E = np.full(G0.shape, 1e-8)
    np.fill_diagonal(E, 0.0)
    g0 = dob_basis(G0, G1).gamma
    g1 = dob_basis(G0 + E, G1).gamma
    assert np.abs(g1 / g0 - 1).max() < 1e-7


def test_degenerate_condenser():
    G0, G1 = gram_pair(CondenserSpec(0.5, 4))
    G0[3, :] = G0[:, 3] = 0.0
    with pytest.raises(ValueError, match="degenerate condenser"):
        dob_basis(G0, G1)
    with pytest.raises(ValueError, match="degenerate condenser"):
        dob_basis(np.eye(3), -np.eye(3))


def test_complex_gram_path():
    # a unitary change of phase leaves the spectrum unchanged and exercises the complex solver
    G0, G1 = gram_pair(CondenserSpec(0.5, 12))
    D = np.diag(np.exp(1j * np.linspace(0.1, 2.0, 12)))
    g = dob_basis(G0, G1).gamma
    h = dob_basis(D.conj().T @ G0 @ D, D.conj().T @ G1 @ D)
    assert np.abs(h.gamma / g - 1).max() < 1e-12
    r0, r1 = h.orthogonality_residuals()
    assert max(r0, r1) < 1e-10


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_pencil_matches_eigh(J, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(J, J)) + 1j * rng.normal(size=(J, J))
    Y = rng.normal(size=(J, J))
    G0 = X @ X.conj().T + J * np.eye(J)
    G1 = Y @ Y.T + J * np.eye(J)
    b = dob_basis(G0, G1)
    lam = sl.eigh(G1, G0, eigvals_only=True)
    assert np.allclose(b.gamma**2, lam, rtol=1e-10, atol=0)
    assert np.allclose(G1 @ b.B, G0 @ b.B * b.gamma**2, rtol=0, atol=1e-9 * np.abs(G1).max())


def test_condenser_omega():
    assert condenser_omega(0.3, 0.5) == 0.0
    assert condenser_omega(0.5j, 0.5) == 0.0
    assert condenser_omega(0.7, 0.5) == pytest.approx(math.log(1.4) / math.log(2))
    # continuous across the circle, increasing to 1 at the unit circle
    rad = np.linspace(0.49, 0.999, 200)
    om = condenser_omega(rad, 0.5)
    assert np.all(np.diff(om) >= 0) and om[0] == 0 and om[-1] > 0.99
    with pytest.raises(ValueError):
        condenser_omega(1.0, 0.5)


# --- coefficients and series ---


def test_coeffs_rational(cond, basis):
    # 1/(2 - z) = sum z^j / 2^{j+1}, and b_j = z^j / r^j
    w = 0.3 + 0.2j
    c = dob_coeffs(cond, basis, f2d, w)
    j = np.arange(20)
    assert np.allclose(c[:20], 0.5**j / 2 ** (j + 1) / (2 - w), rtol=0, atol=1e-14)


def test_coeffs_special_functions(cond, basis):
    w = -0.4j
    g = lambda w: np.exp(w)
    c = dob_coeffs(cond, basis, lambda z, w: g(w) + 0 * z, w)
    assert c[0] == pytest.approx(g(w), abs=1e-14)
    assert np.abs(c[1:]).max() < 1e-14
    c = dob_coeffs(cond, basis, lambda z, w: z * g(w), w)
    assert c[1] == pytest.approx(0.5 * g(w), abs=1e-14)
    assert np.abs(np.delete(c, 1)).max() < 1e-14


def test_bessel_inequality(cond, basis):
    f = lambda z, w: np.exp(3 * z) / (2 - w)
    w = 0.5
    c = dob_coeffs(cond, basis, f, w)
    z = cond.circle_points()
    norm2 = np.mean(np.abs(f(z, w)) ** 2)
    assert np.sum(np.abs(c) ** 2) <= norm2 * (1 + 1e-12)


def test_reconstruction_on_circle(cond, basis):
    w = 0.4
    z = cond.circle_points()[::7]
    vals = [v.value for v in dob_extend(cond, basis, f2d, [(zi, w) for zi in z])]
    assert np.allclose(vals, f2d(z, w), rtol=0, atol=1e-13)


def test_dob_extend_points(cond, basis):
    (v,) = dob_extend(cond, basis, f2d, [(0.7, 0.5)], reference=f2d)
    assert v.in_wedge and v.omega_sum < 1
    assert v.abs_err < 1e-3
    assert v.tail_ok
    zw = lambda z, w: z * w
    # |b_j(z)| = (|z| / r)^j amplifies round-off in c_j, so stay at moderate |z|
    (u,) = dob_extend(cond, basis, zw, [(0.6j, 0.6)], reference=zw)
    assert u.abs_err < 1e-12


def test_dob_extend_flags_outside_wedge(cond, basis):
    (v,) = dob_extend(cond, basis, f2d, [(0.95, -0.9)])
    assert not v.in_wedge


def test_gamma_growth_rate(basis):
    j = np.arange(basis.J)
    slope = np.polyfit(j, np.log(basis.gamma), 1)[0]
    assert abs(slope / -math.log(0.5) - 1) < 0.05
