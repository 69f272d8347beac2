"""N identical spins in the permutation-symmetric (Dicke) subspace.

Sector ``k`` holds the normalized symmetric state with ``k`` spins in
``|+>`` (``n_plus = k``).  The collective average ``M_x`` is diagonal there
with eigenvalue ``(2k - N)/N``; ``M_y`` and ``M_z`` follow from the
spin-N/2 ladder operators with ``M_i = 2 J_i / N``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sparse
from scipy.linalg import eigvalsh_tridiagonal
from scipy.stats import binom

from .errors import ContractViolation, InvalidArgument
from .spin import SpinState
from .spin import delta_sigma as _delta_sigma
from .spin import sigma_bar as _sigma_bar

STATE_NORM_TOL = 1e-10
DENSE_CAP = 4096

KINDS = ("Mx", "My", "Mz", "MxPower", "Frequency")


def sector_values(n: int) -> np.ndarray:
    """Eigenvalues of M_x on sectors k = 0..N."""
    k = np.arange(n + 1)
    return (2.0 * k - n) / n


@dataclass(frozen=True)
class SymmetricState:
    n: int
    amps: np.ndarray = field(repr=False)
    source: SpinState | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidArgument(f"sample size must be a positive integer, got {self.n!r}")
        amps = np.array(self.amps, dtype=complex)
        if amps.shape != (self.n + 1,):
            raise ContractViolation(f"expected {self.n + 1} amplitudes, got shape {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if not abs(norm - 1.0) <= STATE_NORM_TOL:
            raise ContractViolation(f"symmetric state norm^2 is {norm!r}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "amps", amps)

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def log_probability(self, k: int) -> float:
        """``log |a_k|^2``, exact in the far tails for product states."""
        if self.source is not None:
            return float(binom.logpmf(k, self.n, self.source.p_plus))
        p = self.probabilities[k]
        return float(np.log(p)) if p > 0 else -np.inf

    def mean_mx(self) -> float:
        return float(np.dot(self.probabilities, sector_values(self.n)))

    def var_mx(self) -> float:
        m = sector_values(self.n)
        return float(np.dot(self.probabilities, (m - self.mean_mx()) ** 2))

    def spin_stats(self) -> tuple[float, float]:
        """Single-spin ``(sigma_bar, delta_sigma)`` implied by the M_x moments.

        Taken from the source spin when the state is a known product, where
        ``<M_x> = sigma_bar`` and ``N Var(M_x) = delta_sigma^2`` hold exactly.
        """
        if self.source is not None:
            return _sigma_bar(self.source), _delta_sigma(self.source)
        return self.mean_mx(), float(np.sqrt(self.n * self.var_mx()))

    def with_global_phase(self, phase: float) -> SymmetricState:
        return SymmetricState(self.n, self.amps * np.exp(1j * phase), self.source)


def from_product_state(psi: SpinState, n: int) -> SymmetricState:
    """Amplitudes ``sqrt(C(N,k)) c_plus^k c_minus^(N-k)`` of the N-fold product state.

    Magnitudes come from the binomial mass function, which is evaluated
    without forming C(N, k), so nothing overflows for N in the millions.
    """
    if int(n) != n or n < 1:
        raise InvalidArgument(f"sample size must be a positive integer, got {n!r}")
    n = int(n)
    k = np.arange(n + 1)
    try:
        mags = np.sqrt(binom.pmf(k, n, psi.p_plus))
    except OverflowError:
        # boost's pmf overflows for subnormal p; the log form does not
        mags = np.exp(0.5 * binom.logpmf(k, n, psi.p_plus))
    phase = k * np.angle(psi.c_plus) + (n - k) * np.angle(psi.c_minus)
    amps = mags * np.exp(1j * phase)
    # absorb the ~1e-15 pmf rounding so chained operations stay normalized
    amps = amps / np.sqrt(np.sum(mags**2))
    return SymmetricState(n, amps, source=psi)


def _ladder_offdiag(n: int) -> np.ndarray:
    """``<k+1|J_+|k>`` for the spin-N/2 representation quantized along x."""
    j = n / 2.0
    m = np.arange(n) - j
    return np.sqrt((j - m) * (j + m + 1.0))


@dataclass(frozen=True)
class CollectiveOperator:
    n: int
    kind: str
    power: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown operator kind {self.kind!r}; expected one of {KINDS}")
        if self.n < 1:
            raise InvalidArgument("sample size must be positive")

    def matrix(self) -> sparse.csr_matrix:
        n = self.n
        if self.kind == "Mx":
            return sparse.diags(sector_values(n), format="csr").astype(complex)
        if self.kind == "MxPower":
            return sparse.diags(sector_values(n) ** self.power, format="csr").astype(complex)
        if self.kind == "Frequency":
            return sparse.diags(np.arange(n + 1) / n, format="csr").astype(complex)
        up = _ladder_offdiag(n) / n  # 2 J_+ / N, lower off-diagonal (k -> k+1)
        if self.kind == "My":
            # M_y = (J_+ + J_-) / N
            return sparse.diags([up, up], [-1, 1], format="csr").astype(complex)
        # M_z = (J_+ - J_-) / (i N)
        return sparse.diags([-1j * up, 1j * up], [-1, 1], format="csr")

    def dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        if self.n > cap:
            raise InvalidArgument(
                f"N={self.n} exceeds the dense cap {cap}; use the closed-form scaling paths"
            )
        return self.matrix().toarray()

    def apply(self, state: SymmetricState) -> np.ndarray:
        return self.matrix() @ state.amps

    def expectation(self, state: SymmetricState) -> float:
        return float(np.vdot(state.amps, self.apply(state)).real)

    def variance(self, state: SymmetricState) -> float:
        mean = self.expectation(state)
        shifted = self.apply(state) - mean * state.amps
        return float(np.vdot(shifted, shifted).real)


def residual_norm(state: SymmetricState, sigma_bar: float) -> float:
    """``||(M_x - sigma_bar)|Psi>||``; equals ``delta_sigma / sqrt(N)`` on product states."""
    m = sector_values(state.n)
    return float(np.sqrt(np.dot(state.probabilities, (m - sigma_bar) ** 2)))


class CommutatorResidual(NamedTuple):
    identity_residual: float
    commutator_norm: float


def _hermitian_spectral_norm(h: np.ndarray) -> float:
    w = np.linalg.eigvalsh(h)
    return float(max(abs(w[0]), abs(w[-1])))


def commutator_residual(n: int, cap: int = DENSE_CAP) -> CommutatorResidual:
    """Dense check of ``[M_x, M_y] = 2i M_z / N`` and the size of ``[M_x, M_y]``."""
    if n < 1:
        raise InvalidArgument("sample size must be positive")
    if n > cap:
        raise InvalidArgument(
            f"N={n} exceeds the dense cap {cap}; use commutator_norm() for the scaling sweep"
        )
    mx = CollectiveOperator(n, "Mx").dense(cap)
    my = CollectiveOperator(n, "My").dense(cap)
    mz = CollectiveOperator(n, "Mz").dense(cap)
    comm = mx @ my - my @ mx
    # both matrices are anti-Hermitian; -i times them is Hermitian
    identity = _hermitian_spectral_norm(-1j * (comm - 2j * mz / n))
    return CommutatorResidual(identity, _hermitian_spectral_norm(-1j * comm))


def commutator_norm(n: int) -> float:
    """Spectral norm of ``[M_x, M_y]`` from its tridiagonal form, O(N) memory."""
    if n < 1:
        raise InvalidArgument("sample size must be positive")
    m = sector_values(n)
    # [M_x, M_y]_{k+1,k} = (m_{k+1} - m_k) (M_y)_{k+1,k}; unitarily similar to a
    # real symmetric tridiagonal with the moduli as off-diagonal
    off = np.abs((m[1:] - m[:-1]) * _ladder_offdiag(n) / n)
    if n == 1:
        return float(off[0])
    lo = eigvalsh_tridiagonal(np.zeros(n + 1), off, select="i", select_range=(0, 0))
    hi = eigvalsh_tridiagonal(np.zeros(n + 1), off, select="i", select_range=(n, n))
    return float(max(abs(lo[0]), abs(hi[0])))


class MicroscopicOutcome(NamedTuple):
    n_plus: np.ndarray | int
    f_n: np.ndarray | float


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        raise InvalidArgument("a seed or Generator is required for sampling")
    return np.random.default_rng(rng)


def sample_microscopic(state: SymmetricState, rng, trials: int | None = None) -> MicroscopicOutcome:
    """Measure sigma_x on every spin; sector k is drawn with probability ``|a_k|^2``.

    ``rng`` is a seed or a ``numpy.random.Generator``; a Generator is
    advanced in place so consecutive calls continue its stream.
    """
    gen = _as_rng(rng)
    p = state.probabilities
    p = p / p.sum()
    k = gen.choice(state.n + 1, size=trials, p=p)
    f = (2.0 * k - state.n) / state.n
    if trials is None:
        return MicroscopicOutcome(int(k), float(f))
    return MicroscopicOutcome(k, f)


def frequency_operator_residual(state: SymmetricState, p_plus: float | None = None) -> float:
    """``||(f_N - p_plus)|Psi>||`` for the frequency operator ``f_N = diag(k/N)``.

    ``p_plus`` defaults to ``|c_plus|^2`` of the source spin, or to ``<f_N>``
    when the state was not built from a product.
    """
    if p_plus is None:
        if state.source is not None:
            p_plus = state.source.p_plus
        else:
            p_plus = float(np.dot(state.probabilities, np.arange(state.n + 1) / state.n))
    f = np.arange(state.n + 1) / state.n
    return float(np.sqrt(np.dot(state.probabilities, (f - p_plus) ** 2)))
