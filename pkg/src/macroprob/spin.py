"""Single spin-1/2 algebra in the eigenbasis of the measured component.

Every state is written as ``c_plus |+> + c_minus |->`` where ``|+>`` and
``|->`` are the +1/-1 eigenvectors of sigma_x.  In that basis sigma_x is
diagonal, and the other Pauli components are fixed by requiring the usual
cyclic algebra ``[sigma_x, sigma_y] = 2i sigma_z``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation

NORM_TOL = 1e-12

SIGMA_X = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_Y = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[0, -1j], [1j, 0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class SpinState:
    c_plus: complex
    c_minus: complex

    def __post_init__(self):
        object.__setattr__(self, "c_plus", complex(self.c_plus))
        object.__setattr__(self, "c_minus", complex(self.c_minus))
        norm = abs(self.c_plus) ** 2 + abs(self.c_minus) ** 2
        if not abs(norm - 1.0) <= NORM_TOL:
            raise ContractViolation(f"spin state norm^2 is {norm!r}, expected 1")

    @classmethod
    def from_vector(cls, vec) -> SpinState:
        vec = np.asarray(vec, dtype=complex)
        return cls(vec[0], vec[1])

    @classmethod
    def from_probability(cls, p_plus: float, phase: float = 0.0) -> SpinState:
        """State with ``|c_plus|^2 = p_plus`` and relative phase ``phase`` on c_minus."""
        if not 0.0 <= p_plus <= 1.0:
            raise ContractViolation(f"|c_plus|^2 must lie in [0, 1], got {p_plus!r}")
        return cls(np.sqrt(p_plus), np.sqrt(1.0 - p_plus) * np.exp(1j * phase))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c_plus, self.c_minus], dtype=complex)

    @property
    def p_plus(self) -> float:
        return abs(self.c_plus) ** 2

    @property
    def p_minus(self) -> float:
        return abs(self.c_minus) ** 2

    def with_global_phase(self, phase: float) -> SpinState:
        u = np.exp(1j * phase)
        return SpinState(u * self.c_plus, u * self.c_minus)


@dataclass(frozen=True)
class Observable2:
    """A 2x2 Hermitian observable in the canonical basis."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ContractViolation(f"expected a 2x2 matrix, got shape {m.shape}")
        if not np.array_equal(m, m.conj().T):
            raise ContractViolation("observable is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, vec):
        return self.matrix @ vec


PAULI_X = Observable2(SIGMA_X)
PAULI_Y = Observable2(SIGMA_Y)
PAULI_Z = Observable2(SIGMA_Z)


def pauli(nx: float, ny: float, nz: float) -> Observable2:
    """Spin component along the unit vector (nx, ny, nz)."""
    n = np.array([nx, ny, nz], dtype=float)
    length = np.linalg.norm(n)
    if length == 0:
        raise ContractViolation("axis vector must be nonzero")
    n = n / length
    m = n[0] * SIGMA_X + n[1] * SIGMA_Y + n[2] * SIGMA_Z
    # force exact hermiticity after floating-point accumulation
    m = 0.5 * (m + m.conj().T)
    return Observable2(m)


def _as_observable(obs) -> Observable2:
    return obs if isinstance(obs, Observable2) else Observable2(obs)


def expectation(obs: Observable2, psi: SpinState) -> float:
    obs = _as_observable(obs)
    v = psi.vector
    value = np.vdot(v, obs.matrix @ v)
    scale = max(1.0, float(np.max(np.abs(obs.matrix))))
    if abs(value.imag) > 1e-14 * scale:
        raise ContractViolation(f"expectation has imaginary part {value.imag!r}")
    return float(value.real)


@dataclass(frozen=True)
class Decomposition:
    """``obs|psi> = sigma_bar |psi> + delta_sigma |psi_perp>``."""

    sigma_bar: float
    delta_sigma: float
    psi_perp: SpinState
    degenerate: bool = False


def canonical_orthogonal(psi: SpinState) -> SpinState:
    """The unit vector orthogonal to ``psi`` whose first nonzero component is real positive."""
    v = np.array([-np.conj(psi.c_minus), np.conj(psi.c_plus)])
    lead = v[0] if abs(v[0]) > 0 else v[1]
    v = v * np.exp(-1j * np.angle(lead))
    return SpinState.from_vector(v / np.linalg.norm(v))


def decompose(obs: Observable2, psi: SpinState, *, degenerate_tol: float = 1e-13) -> Decomposition:
    obs = _as_observable(obs)
    sigma_bar = expectation(obs, psi)
    v = psi.vector
    residual = obs.matrix @ v - sigma_bar * v
    delta = float(np.linalg.norm(residual))
    if delta <= degenerate_tol:
        return Decomposition(sigma_bar, delta, canonical_orthogonal(psi), degenerate=True)
    perp = residual / delta
    # renormalize away rounding so the SpinState invariant holds
    perp = perp / np.linalg.norm(perp)
    return Decomposition(sigma_bar, delta, SpinState.from_vector(perp))


def rotate_to_axis(theta: float, phi: float = 0.0) -> SpinState:
    """State whose Bloch vector makes polar angle ``theta`` with the measured axis.

    ``<sigma_x> = cos(theta)``, ``<sigma_y> = sin(theta) cos(phi)`` and
    ``<sigma_z> = sin(theta) sin(phi)``; c_plus is real and non-negative.
    """
    c_plus = np.cos(theta / 2.0)
    c_minus = np.sin(theta / 2.0) * np.exp(1j * phi)
    if c_plus < 0:
        c_plus, c_minus = -c_plus, -c_minus
    return SpinState(c_plus, c_minus)


def sigma_bar(psi: SpinState) -> float:
    """``<sigma_x> = |c_plus|^2 - |c_minus|^2``."""
    return psi.p_plus - psi.p_minus


def delta_sigma(psi: SpinState) -> float:
    """Uncertainty of sigma_x; computed as ``2|c_plus c_minus|`` to avoid cancellation."""
    return 2.0 * abs(psi.c_plus) * abs(psi.c_minus)
