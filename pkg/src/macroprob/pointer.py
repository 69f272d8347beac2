"""Gaussian pointer and its coupling ``U = exp(i Q M_x)`` to the sample.

A pointer branch is the minimum-uncertainty wavefunction

    phi(P) = (2 pi dP^2)^(-1/4) exp(-(P - center)^2 / (4 dP^2))

so that ``<Q^2> = 1 / (4 dP^2)``.  ``exp(i m Q)`` translates the center by
``-m``; since ``U`` is diagonal in the sector basis, the coupled state is one
translated Gaussian per sector and every inner product is a closed form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .ensemble import SymmetricState, sector_values
from .errors import ContractViolation, InvalidArgument
from .spin import SpinState


def log_gaussian_overlap(a, b, width: float):
    """Log of ``<phi_a|phi_b>`` for unit real Gaussians centred at a and b."""
    d = np.subtract(a, b)
    return -(d * d) / (8.0 * width * width)


@dataclass(frozen=True)
class GaussianPointer:
    center: float
    width: float
    coefficient: complex = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise InvalidArgument(f"pointer width must be positive, got {self.width!r}")
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def q_variance(self) -> float:
        """``<Q^2>`` of the minimum-uncertainty pointer."""
        return 1.0 / (4.0 * self.width**2)

    def shifted(self, shift: float) -> GaussianPointer:
        return GaussianPointer(self.center + shift, self.width, self.coefficient)

    def wavefunction(self, p):
        p = np.asarray(p, dtype=float)
        norm = (2.0 * np.pi * self.width**2) ** -0.25
        return self.coefficient * norm * np.exp(-((p - self.center) ** 2) / (4.0 * self.width**2))

    def as_superposition(self) -> PointerSuperposition:
        return PointerSuperposition([self])

    def __sub__(self, other: GaussianPointer) -> PointerSuperposition:
        return self.as_superposition() - other.as_superposition()


class PointerSuperposition:
    """A linear combination of Gaussians sharing one width."""

    def __init__(self, terms: Sequence[GaussianPointer]):
        terms = list(terms)
        if not terms:
            raise InvalidArgument("a superposition needs at least one term")
        width = terms[0].width
        if any(t.width != width for t in terms):
            raise InvalidArgument("all terms of a pointer superposition must share one width")
        self.terms = tuple(terms)
        self.width = width
        self.centers = np.array([t.center for t in terms], dtype=float)
        self.coefficients = np.array([t.coefficient for t in terms], dtype=complex)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"PointerSuperposition(n_terms={len(self)}, width={self.width})"

    def __add__(self, other: PointerSuperposition) -> PointerSuperposition:
        return PointerSuperposition(self.terms + other.terms)

    def __sub__(self, other: PointerSuperposition) -> PointerSuperposition:
        neg = [GaussianPointer(t.center, t.width, -t.coefficient) for t in other.terms]
        return PointerSuperposition(self.terms + tuple(neg))

    def scaled(self, factor: complex) -> PointerSuperposition:
        return PointerSuperposition(
            [GaussianPointer(t.center, t.width, factor * t.coefficient) for t in self.terms]
        )

    def wavefunction(self, p):
        return sum(t.wavefunction(p) for t in self.terms)

    def norm_sq(self) -> float:
        # sum_ij c_i^* c_j g_ij rewritten as |sum c|^2 + sum c_i^* c_j (g_ij - 1);
        # expm1 keeps small differences of nearly coincident Gaussians exact
        c = self.coefficients
        logs = log_gaussian_overlap(self.centers[:, None], self.centers[None, :], self.width)
        cross = np.conj(c)[:, None] * c[None, :] * np.expm1(logs)
        total = abs(c.sum()) ** 2 + cross.sum().real
        return max(float(total), 0.0)

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))


def _as_superposition(x) -> PointerSuperposition:
    return x.as_superposition() if isinstance(x, GaussianPointer) else x


def _check_widths(a: PointerSuperposition, b: PointerSuperposition):
    if a.width != b.width:
        raise InvalidArgument(f"pointer widths differ ({a.width!r} vs {b.width!r})")


def overlap(a, b) -> complex:
    """``<a|b> = sum_ij conj(c_i) d_j exp(-(a_i - b_j)^2 / (8 dP^2))``."""
    a, b = _as_superposition(a), _as_superposition(b)
    _check_widths(a, b)
    logs = log_gaussian_overlap(a.centers[:, None], b.centers[None, :], a.width)
    return complex(np.sum(np.conj(a.coefficients)[:, None] * b.coefficients[None, :] * np.exp(logs)))


class LogOverlap(NamedTuple):
    log_abs: float
    phase: complex


def log_overlap(a, b) -> LogOverlap:
    """``<a|b>`` as ``exp(log_abs) * phase``; finite even when the linear value underflows."""
    a, b = _as_superposition(a), _as_superposition(b)
    _check_widths(a, b)
    logs = log_gaussian_overlap(a.centers[:, None], b.centers[None, :], a.width)
    weights = np.conj(a.coefficients)[:, None] * b.coefficients[None, :]
    mask = weights != 0
    if not mask.any():
        return LogOverlap(-np.inf, 1.0 + 0j)
    top = np.max(logs[mask])
    s = np.sum(weights[mask] * np.exp(logs[mask] - top))
    if s == 0:
        return LogOverlap(-np.inf, 1.0 + 0j)
    return LogOverlap(float(top + np.log(abs(s))), complex(s / abs(s)))


@dataclass(frozen=True)
class CoupledState:
    """Sample-pointer state ``sum_k a_k |k> |phi_k>`` with one Gaussian per sector."""

    n: int
    sectors: np.ndarray = field(repr=False)
    amps: np.ndarray = field(repr=False)
    centers: np.ndarray = field(repr=False)
    width: float = 1.0

    @property
    def branches(self) -> list[tuple[complex, GaussianPointer]]:
        return [
            (complex(a), GaussianPointer(float(c), self.width))
            for a, c in zip(self.amps, self.centers)
        ]

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def inner(self, other: CoupledState) -> complex:
        a, b = self._aligned(other)
        logs = log_gaussian_overlap(a[1], b[1], self.width)
        return complex(np.sum(np.conj(a[0]) * b[0] * np.exp(logs)))

    def distance_sq(self, other: CoupledState) -> float:
        """``|| self - other ||^2`` evaluated without catastrophic cancellation."""
        (a, ca), (b, cb) = self._aligned(other)
        logs = log_gaussian_overlap(ca, cb, self.width)
        # |a|^2 + |b|^2 - 2 Re(a* b g) = |a - b|^2 + 2 Re(a* b)(1 - g)
        total = np.sum(np.abs(a - b) ** 2) - 2.0 * np.sum((np.conj(a) * b).real * np.expm1(logs))
        return max(float(total), 0.0)

    def distance(self, other: CoupledState) -> float:
        return float(np.sqrt(self.distance_sq(other)))

    def _aligned(self, other: CoupledState):
        if self.n != other.n or self.width != other.width:
            raise InvalidArgument("coupled states must share N and pointer width")
        size = self.n + 1
        a = np.zeros(size, complex)
        b = np.zeros(size, complex)
        ca = np.zeros(size)
        cb = np.zeros(size)
        a[self.sectors] = self.amps
        ca[self.sectors] = self.centers
        b[other.sectors] = other.amps
        cb[other.sectors] = other.centers
        return (a, ca), (b, cb)


def _check_pointer(pointer: GaussianPointer):
    if abs(abs(pointer.coefficient) - 1.0) > 1e-12:
        raise ContractViolation("initial pointer must be normalized (|coefficient| = 1)")


def couple_exact(state: SymmetricState, pointer: GaussianPointer) -> CoupledState:
    """Apply ``exp(i Q M_x)``: sector k's pointer moves to ``center - m_k``.

    Sectors with exactly zero amplitude are dropped, so an M_x eigenstate
    yields a single unentangled branch.
    """
    _check_pointer(pointer)
    keep = np.flatnonzero(state.amps != 0)
    m = sector_values(state.n)[keep]
    return CoupledState(
        state.n,
        keep,
        state.amps[keep] * pointer.coefficient,
        pointer.center - m,
        pointer.width,
    )


def unentangled_reference(state: SymmetricState, pointer: GaussianPointer, shift: float | None = None) -> CoupledState:
    """``exp(i sigma_bar Q)|Psi>|P>``: every sector carries the same pointer at ``center - sigma_bar``."""
    _check_pointer(pointer)
    if shift is None:
        shift = state.spin_stats()[0]
    keep = np.flatnonzero(state.amps != 0)
    return CoupledState(
        state.n,
        keep,
        state.amps[keep] * pointer.coefficient,
        np.full(keep.size, pointer.center - shift),
        pointer.width,
    )


def couple_perturbative(state: SymmetricState, pointer: GaussianPointer) -> tuple[CoupledState, float]:
    """First-order split: ``(1 - ds^2 <Q^2>/2N) * reference`` plus the norm^2 of the remainder.

    Returns the scaled unentangled branch and ``<dchi|dchi> = ds^2 <Q^2> / N``.
    """
    sbar, ds = state.spin_stats()
    ref = unentangled_reference(state, pointer, sbar)
    factor = 1.0 - ds**2 * pointer.q_variance / (2.0 * state.n)
    scaled = CoupledState(ref.n, ref.sectors, ref.amps * factor, ref.centers, ref.width)
    return scaled, ds**2 * pointer.q_variance / state.n


class DeltaChi(NamedTuple):
    exact: float
    perturbative: float


def delta_chi_norm(state: SymmetricState, pointer: GaussianPointer) -> DeltaChi:
    """Entanglement deficit: exact squared distance to the unentangled reference vs first order."""
    coupled = couple_exact(state, pointer)
    ref = unentangled_reference(state, pointer)
    _, pert = couple_perturbative(state, pointer)
    return DeltaChi(coupled.distance_sq(ref), pert)


def limit_distance(state: SymmetricState, pointer: GaussianPointer) -> float:
    """Distance between ``U|Psi>|P>`` and ``|Psi>|P - sigma_bar>``."""
    return couple_exact(state, pointer).distance(unentangled_reference(state, pointer))


def pointer_shift_value(psi: SpinState) -> float:
    """Shift of the pointer reading: ``|c_plus|^2 - |c_minus|^2``."""
    return psi.p_plus - psi.p_minus


def fixed_epsilon_plateau(delta_sigma: float, epsilon: float) -> float:
    """Large-N limit of the exact deficit when ``dP = 1 / (epsilon sqrt(N))``.

    The sector spread of ``sqrt(N)(m_k - sigma_bar)`` becomes Gaussian with
    variance ``ds^2``, so ``2 - 2 E[exp(-z^2 eps^2 / 8)] = 2 - 2 / sqrt(1 + ds^2 eps^2 / 4)``.
    """
    return 2.0 - 2.0 / np.sqrt(1.0 + delta_sigma**2 * epsilon**2 / 4.0)
