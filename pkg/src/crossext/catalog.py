"""
Closed catalog of test functions with exact evaluators.

Every entry evaluates f(z, w) with numpy broadcasting.  The two counterexample
entries also accept mpmath numbers so that approach sequences can get far
closer to the boundary than double precision allows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import mpmath
import numpy as np


@dataclass(frozen=True)
class CatalogFunction:
    name: str
    func: Callable
    params: dict = field(default_factory=dict)
    mp: Callable | None = None

    def __call__(self, z, w):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return np.asarray(self.func(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)), dtype=complex)

    def power(self, n: int) -> "CatalogFunction":
        base = self.func
        mp = self.mp
        return CatalogFunction(
            f"{self.name}^{n}",
            lambda z, w: base(z, w) ** n,
            {**self.params, "power": n},
            None if mp is None else (lambda z, w: mp(z, w) ** n),
        )

    def slice_z(self, w: complex) -> Callable:
        return lambda z: self(z, w)


def _const(c=1.0):
    c = complex(c)
    return lambda z, w: np.full(np.broadcast(z, w).shape, c, dtype=complex)


def _monomial(p=1, q=1):
    return lambda z, w: z**p * w**q


def _rational2d():
    return lambda z, w: 1.0 / ((2.0 - z) * (2.0 - w))


def _fix_f1():
    return lambda z, w: 1.0 / (2.0 - z) + 0.0 * w


def _entire():
    return lambda z, w: np.exp((z + w) / 2.0)


def _sym_rational():
    return lambda z, w: 1.0 / (3.0 - z - w)


def _example1():
    def f(z, w):
        z, w = np.broadcast_arrays(z, w)
        out = np.zeros(z.shape, dtype=complex)
        ok = (z != 1) & (w != 1)
        zz, ww = z[ok], w[ok]
        out[ok] = np.exp(-(np.log(1 - zz) + np.log(1 - ww)) * np.log((2 + zz * ww) / 3))
        return out

    def mp(z, w):
        if z == 1 or w == 1:
            return mpmath.mpc(0)
        return mpmath.exp(-(mpmath.log(1 - z) + mpmath.log(1 - w)) * mpmath.log((2 + z * w) / 3))

    return f, mp


def _example2(lam=math.sqrt(2) / 2):
    def f(z, w):
        z, w = np.broadcast_arrays(z, w)
        out = np.zeros(z.shape, dtype=complex)
        ok = w != 1
        out[ok] = np.exp(-(z[ok] - lam) * np.log((3 + w[ok]) / (1 - w[ok])) ** 2)
        return out

    def mp(z, w):
        if w == 1:
            return mpmath.mpc(0)
        return mpmath.exp(-(z - lam) * mpmath.log((3 + w) / (1 - w)) ** 2)

    return f, mp


CATALOG = {
    "const": _const,
    "monomial": _monomial,
    "rational2d": _rational2d,
    "fix_f1": _fix_f1,
    "entire": _entire,
    "sym_rational": _sym_rational,
    "example1": _example1,
    "example2": _example2,
}


def get_function(name: str, **params) -> CatalogFunction:
    """Look up a catalog entry; unknown names raise KeyError listing the catalog."""
    if name not in CATALOG:
        raise KeyError(f"unknown fixture {name!r}; catalog: {', '.join(sorted(CATALOG))}")
    built = CATALOG[name](**params)
    if isinstance(built, tuple):
        func, mp = built
    else:
        func, mp = built, None
    return CatalogFunction(name, func, dict(params), mp)
