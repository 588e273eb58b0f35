"""
Doubly orthogonal bases on the disc condenser (circle |z| = r inside E).

H0 is L2 of normalized arclength on the circle, H1 the Bergman space of the
unit disc.  Polynomials of degree < J are orthonormalized in H0 and
diagonalized in H1, giving  b_j  with  ||b_j||_H0 = 1  and
||b_j||_H1 = gamma_j.  Functions separately holomorphic on the mixed cross
extend through  sum_j c_j(w) b_j(z).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sl
from numpy.polynomial.legendre import leggauss
from scipy.linalg.lapack import dgejsv

from .geometry import BoundaryArcSet, arc_set_normalize
from .harmonic import poisson_omega

J_MAX = 64


@dataclass(frozen=True)
class CondenserSpec:
    """Circle of radius ``r`` inside the unit disc, truncated at ``J`` basis functions.

    ``B`` is the boundary arc set of the second factor of the mixed cross.
    """

    r: float = 0.5
    J: int = 40
    B: BoundaryArcSet = arc_set_normalize([[-math.pi / 2, math.pi / 2]])
    n_circle: int | None = None
    n_radial: int | None = None
    n_angular: int | None = None

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError("r must lie in (0, 1)")
        if not 1 <= self.J <= J_MAX:
            raise ValueError(f"J must lie in [1, {J_MAX}]")

    @property
    def circle_nodes(self) -> int:
        return self.n_circle or max(256, 4 * self.J)

    def circle_points(self) -> np.ndarray:
        n = self.circle_nodes
        return self.r * np.exp(2j * math.pi * np.arange(n) / n)


def gram_pair(spec: CondenserSpec) -> tuple[np.ndarray, np.ndarray]:
    """Gram matrices of 1, z, ..., z^{J-1} in H0 and H1, by quadrature.

    H0: trapezoid on |z| = r.  H1: Gauss-Legendre in the radius times the
    trapezoid in angle, both exact for these polynomial integrands.
    """
    J = spec.J
    powers = np.arange(J)
    z = spec.circle_points()
    V = z[:, None] ** powers
    G0 = V.T @ V.conj() / z.size

    x, wx = leggauss(spec.n_radial or J + 8)
    rho, wr = (x + 1) / 2, wx / 2
    n_ang = spec.n_angular or max(4 * J, 64)
    phi = 2 * math.pi * np.arange(n_ang) / n_ang
    pts = (rho[:, None] * np.exp(1j * phi)[None, :]).ravel()
    wts = np.repeat(wr * rho * 2 * math.pi / n_ang, n_ang)
    W = pts[:, None] ** powers
    G1 = (W * wts[:, None]).T @ W.conj()
    return G0, G1


@dataclass
class DOBasis:
    """Columns of ``B`` hold the monomial coefficients of b_0 .. b_{J-1}."""

    B: np.ndarray
    gamma: np.ndarray
    G0: np.ndarray
    G1: np.ndarray

    @property
    def J(self) -> int:
        return self.gamma.size

    def eval(self, z) -> np.ndarray:
        """Matrix [len(z), J] of b_j(z)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return (z[:, None] ** np.arange(self.B.shape[0])) @ self.B

    def sup_on_disc(self, radius: float) -> np.ndarray:
        """Upper bound sum_m |B[m, j]| radius^m for max_{|z| <= radius} |b_j|."""
        return (radius ** np.arange(self.B.shape[0])) @ np.abs(self.B)

    def orthogonality_residuals(self) -> tuple[float, float]:
        """Max deviations of B^H G0 B from I and of B^H G1 B from diag(gamma^2).

        The H1 residual is taken entrywise relative to gamma_i gamma_j, the
        natural scale of that entry.
        """
        M0 = self.B.conj().T @ self.G0 @ self.B
        M1 = self.B.conj().T @ self.G1 @ self.B
        r0 = np.abs(M0 - np.eye(self.J)).max()
        scale = np.outer(self.gamma, self.gamma)
        r1 = np.abs(M1 / scale - np.eye(self.J)).max()
        return float(r0), float(r1)


def _hermitian_part(G: np.ndarray) -> np.ndarray:
    G = np.asarray(G)
    G = (G + G.conj().T) / 2
    if np.abs(G.imag).max() <= 1e-14 * np.abs(G).max():
        return G.real
    return G


def dob_basis(G0, G1) -> DOBasis:
    """Solve G1 v = gamma^2 G0 v with gamma ascending and v normalized in G0.

    The pencil is graded (gamma spans r^{-J}), so it is reduced with
    Cholesky factors and the singular values of L0^{-1} L1 are taken with a
    one-sided Jacobi SVD, which keeps small and large gamma to high relative
    accuracy where a symmetric eigensolver would not.
    """
    G0, G1 = _hermitian_part(G0), _hermitian_part(G1)
    try:
        L0 = np.linalg.cholesky(G0)
        L1 = np.linalg.cholesky(G1)
    except np.linalg.LinAlgError:
        raise ValueError("degenerate condenser") from None
    J = G0.shape[0]
    Y = sl.solve_triangular(L0, L1, lower=True)
    A = Y.conj().T
    real = not np.iscomplexobj(A)
    Ar = A if real else np.block([[A.real, -A.imag], [A.imag, A.real]])
    sva, _, v, work, _, info = dgejsv(Ar, joba=0, jobu=0, jobv=0)
    if info != 0:
        raise ValueError("degenerate condenser")
    s = sva * work[0] / work[1]
    if not real:
        # each singular value of the complex matrix appears twice in the real embedding
        s = s[::2]
        v = v[:J, ::2] + 1j * v[J:, ::2]
    if np.any(~np.isfinite(s)) or np.any(s <= 0):
        raise ValueError("degenerate condenser")
    order = np.argsort(s)
    gamma = s[order]
    V = v[:, order]
    B = sl.solve_triangular(L0.conj().T, V, lower=False)
    # fix the phase so the leading coefficient of each column is real positive
    lead = B[np.abs(B).argmax(axis=0), np.arange(J)]
    B = B * (np.abs(lead) / lead)[None, :]
    return DOBasis(B.astype(complex), gamma, G0, G1)


def gamma_closed_form(r: float, J: int) -> np.ndarray:
    j = np.arange(J)
    return np.sqrt(math.pi / (j + 1)) / r**j


def condenser_omega(z, r: float):
    """Harmonic measure of the circle |z| = r relative to the unit disc.

    Zero on the closed disc |z| <= r, log(|z| / r) / log(1 / r) on the annulus,
    so it vanishes on the circle and tends to 1 at the unit circle.
    """
    a = np.abs(np.asarray(z, dtype=complex))
    if np.any(a >= 1):
        raise ValueError("not interior")
    out = np.where(a <= r, 0.0, np.log(np.maximum(a, r) / r) / math.log(1 / r))
    return float(out) if out.ndim == 0 else out


def dob_coeffs(spec: CondenserSpec, basis: DOBasis, f: Callable, w: complex) -> np.ndarray:
    """c_j(w) = int_A f(z, w) conj(b_j(z)) d mu_0(z), trapezoid on the circle."""
    z = spec.circle_points()
    fz = np.asarray(f(z, np.full(z.shape, complex(w))), dtype=complex)
    return basis.eval(z).conj().T @ fz / z.size


@dataclass
class DOBValue:
    z: complex
    w: complex
    value: complex
    tail_bound: float
    tail_ok: bool
    omega_sum: float
    in_wedge: bool
    abs_err: float | None = None


def dob_extend(spec: CondenserSpec, basis: DOBasis, f: Callable, points: Sequence, tail_tol: float = 1e-6,
               reference: Callable | None = None) -> list[DOBValue]:
    """Truncated series sum_j c_j(w) b_j(z) with a last-quartile tail bound per point.

    Points outside the mixed wedge are evaluated but flagged.
    """
    out = []
    J = basis.J
    q = J - max(J // 4, 1)
    for z, w in points:
        z, w = complex(z), complex(w)
        c = dob_coeffs(spec, basis, f, w)
        val = complex(basis.eval(z)[0] @ c)
        tail = float(np.sum(np.abs(c[q:]) * basis.sup_on_disc(abs(z))[q:]))
        om = condenser_omega(z, spec.r) + float(poisson_omega(w, spec.B))
        err = None
        if reference is not None:
            err = abs(val - complex(np.asarray(reference(np.asarray(z), np.asarray(w)))))
        out.append(DOBValue(z, w, val, tail, tail <= tail_tol, om, om < 1.0, err))
    return out
