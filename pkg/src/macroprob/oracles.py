"""Brute-force reference computations used to check the closed forms.

Nothing here is used by the simulation paths themselves: the tensor-product
helpers build the full 2^N space explicitly and the overlap helper integrates
wavefunctions numerically.
"""
from __future__ import annotations

from functools import reduce
from itertools import combinations

import numpy as np
from scipy import integrate

from .spin import SpinState


def product_vector(psi: SpinState, n: int) -> np.ndarray:
    """Full 2^N product state; bit 0 of a site is |+>, bit 1 is |->."""
    return reduce(np.kron, [psi.vector] * n)


def site_operator(single: np.ndarray, site: int, n: int) -> np.ndarray:
    ops = [np.eye(2, dtype=complex)] * n
    ops[site] = np.asarray(single, dtype=complex)
    return reduce(np.kron, ops)


def full_collective(single: np.ndarray, n: int) -> np.ndarray:
    return sum(site_operator(single, i, n) for i in range(n)) / n


def dicke_basis(n: int) -> np.ndarray:
    """Columns are the normalized symmetric states with k sites in |+>, k = 0..N."""
    dim = 2**n
    basis = np.zeros((dim, n + 1))
    for k in range(n + 1):
        for plus_sites in combinations(range(n), k):
            index = 0
            for site in range(n):
                if site not in plus_sites:
                    index |= 1 << (n - 1 - site)
            basis[index, k] = 1.0
        basis[:, k] /= np.linalg.norm(basis[:, k])
    return basis


def quadrature_overlap(centers_a, coeffs_a, centers_b, coeffs_b, width: float) -> complex:
    """``<a|b>`` for Gaussian superpositions by adaptive quadrature on the real line."""
    centers_a, centers_b = np.atleast_1d(centers_a), np.atleast_1d(centers_b)
    coeffs_a = np.atleast_1d(coeffs_a).astype(complex)
    coeffs_b = np.atleast_1d(coeffs_b).astype(complex)
    norm = (2.0 * np.pi * width**2) ** -0.5
    total = 0j
    for ca, xa in zip(coeffs_a, centers_a):
        for cb, xb in zip(coeffs_b, centers_b):
            lo = min(xa, xb) - 40.0 * width
            hi = max(xa, xb) + 40.0 * width

            def f(p, xa=xa, xb=xb):
                return norm * np.exp(-((p - xa) ** 2 + (p - xb) ** 2) / (4.0 * width**2))

            val, _ = integrate.quad(
                f, lo, hi, points=sorted({xa, xb, 0.5 * (xa + xb)}), epsabs=1e-15, epsrel=1e-13, limit=200
            )
            total += np.conj(ca) * cb * val
    return complex(total)
