"""Accuracy versus disturbance of the collective measurement.

Each spin is rotated by ``exp(i Q sigma_x / N)`` with the pointer's
conjugate variable Q random.  For a spin with uncertainty ``ds`` the
probability to stay in its initial state at fixed Q is
``1 - ds^2 sin^2(Q/N)``; averaging over a centred Gaussian Q of variance
``s^2`` gives ``1 - ds^2 (1 - exp(-2 s^2 / N^2)) / 2``.

Two conventions tie the Q spread to the accuracy ``dP = 1/(eps sqrt(N))``:

``"rotation"`` (default)
    ``dQ = 1/dP = eps sqrt(N)``, i.e. the rotation angle spread is
    ``dQ/N = eps/sqrt(N)`` and the all-spins survival tends to ``exp(-ds^2 eps^2)``.
``"minimum_uncertainty"``
    ``dQ = 1/(2 dP)`` as for the real Gaussian pointer used elsewhere; the
    survival then tends to ``exp(-ds^2 eps^2 / 4)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .ensemble import CollectiveOperator, SymmetricState, sector_values
from .errors import InvalidArgument
from .spin import SpinState, delta_sigma

CONVENTIONS = ("rotation", "minimum_uncertainty")


@dataclass(frozen=True)
class AccuracySetting:
    epsilon: float
    n: int
    convention: str = "rotation"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidArgument(f"epsilon must be positive, got {self.epsilon!r}")
        if self.n < 1:
            raise InvalidArgument(f"sample size must be positive, got {self.n!r}")
        if self.convention not in CONVENTIONS:
            raise InvalidArgument(f"unknown convention {self.convention!r}; expected one of {CONVENTIONS}")

    @property
    def pointer_width(self) -> float:
        return 1.0 / (self.epsilon * np.sqrt(self.n))

    @property
    def q_spread(self) -> float:
        if self.convention == "rotation":
            return self.epsilon * np.sqrt(self.n)
        return self.epsilon * np.sqrt(self.n) / 2.0


def _log_single_survival(ds: float, q_var: float, n: int) -> float:
    # log(1 - ds^2 (1 - exp(-2 q_var / N^2)) / 2) without cancellation
    return float(np.log1p(0.5 * ds**2 * np.expm1(-2.0 * q_var / n**2)))


class NoFlip(NamedTuple):
    exact: float
    estimate: float


def no_flip_probability(psi: SpinState, setting: AccuracySetting) -> NoFlip:
    """Product of per-spin survival probabilities, and the ``exp(-eps^2 ds^2)`` estimate."""
    ds = delta_sigma(psi)
    log_s = _log_single_survival(ds, setting.q_spread**2, setting.n)
    return NoFlip(float(np.exp(setting.n * log_s)), float(np.exp(-(setting.epsilon**2) * ds**2)))


def joint_survival_probability(psi: SpinState, setting: AccuracySetting) -> float:
    """``E_Q[prod_i |<psi|u_i(Q)|psi>|^2]``: the whole sample found unchanged.

    Unlike ``no_flip_probability`` the Q draw is shared by all spins.
    """
    ds = delta_sigma(psi)
    if ds == 0:
        return 1.0
    s, n = setting.q_spread, setting.n

    def integrand(z):
        inner = np.log1p(-(ds**2) * np.sin(s * z / n) ** 2)
        return np.exp(n * inner - 0.5 * z * z) / np.sqrt(2.0 * np.pi)

    # the integrand is even; its width is ~ 1 / (ds eps) in z
    scale = min(8.0, 8.0 / (ds * setting.epsilon))
    val, _ = integrate.quad(integrand, 0.0, 12.0, points=[scale], limit=400, epsabs=1e-14, epsrel=1e-12)
    return float(2.0 * val)


def fitted_constant(psi: SpinState, epsilon: float, ns: Sequence[int], convention: str = "rotation") -> float:
    """Richardson-extrapolated ``c`` in ``no_flip -> exp(-c eps^2)`` from the two largest N.

    The finite-N constant ``-log(no_flip)/eps^2`` approaches its limit as
    ``1/N``, so ``(N2 c2 - N1 c1)/(N2 - N1)`` cancels the leading error.
    """
    ns = sorted(ns)
    if len(ns) < 2:
        raise InvalidArgument("need at least two sample sizes")
    n1, n2 = ns[-2], ns[-1]
    c1 = -np.log(no_flip_probability(psi, AccuracySetting(epsilon, n1, convention)).exact) / epsilon**2
    c2 = -np.log(no_flip_probability(psi, AccuracySetting(epsilon, n2, convention)).exact) / epsilon**2
    return float((n2 * c2 - n1 * c1) / (n2 - n1))


@dataclass(frozen=True)
class Relation:
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - 1e-12


@dataclass(frozen=True)
class UncertaintyReport:
    collective: Relation  # dMx dMy >= |<Mz>| / N
    single_spin: Relation  # d(sigma_z,i) dMx >= |<sigma_y,i>| / N


def uncertainty_check(state: SymmetricState) -> UncertaintyReport:
    """Robertson bounds for ``[M_x, M_y] = 2i M_z/N`` and ``[sigma_z,i, M_x] = 2i sigma_y,i/N``.

    Single-spin moments follow from permutation symmetry:
    ``<sigma_y,i> = <M_y>``, ``<sigma_z,i> = <M_z>`` and ``sigma_z,i^2 = 1``.
    Operators are tridiagonal, so no dense matrices are formed.
    """
    n = state.n
    my = CollectiveOperator(n, "My")
    mz = CollectiveOperator(n, "Mz")
    d_mx = np.sqrt(state.var_mx())
    d_my = np.sqrt(my.variance(state))
    mean_mz = mz.expectation(state)
    mean_my = my.expectation(state)
    d_sz = np.sqrt(max(1.0 - mean_mz**2, 0.0))
    return UncertaintyReport(
        collective=Relation(float(d_mx * d_my), abs(mean_mz) / n),
        single_spin=Relation(float(d_sz * d_mx), abs(mean_my) / n),
    )


@dataclass(frozen=True)
class TradeoffRow:
    epsilon: float
    n: int
    pointer_width: float
    resolution: float  # pointer width in units of the M_x eigenvalue gap 2/N
    no_flip: float
    estimate: float
    resolves_gap: bool
    inaccurate: bool


def eigenvalue_gap(n: int) -> float:
    m = sector_values(n)
    return float(m[1] - m[0]) if n >= 1 else np.inf


def accuracy_tradeoff_sweep(
    psi: SpinState, epsilons: Sequence[float], ns: Sequence[int], convention: str = "rotation"
) -> list[TradeoffRow]:
    """One row per (eps, N).

    ``resolves_gap`` flips where the pointer width drops below the spacing
    ``2/N`` of neighbouring M_x eigenvalues; ``inaccurate`` marks widths
    larger than an O(1) difference in ``sigma_bar``.
    """
    rows = []
    for eps in epsilons:
        for n in ns:
            setting = AccuracySetting(eps, n, convention)
            nf = no_flip_probability(psi, setting)
            width = setting.pointer_width
            gap = eigenvalue_gap(n)
            rows.append(
                TradeoffRow(
                    epsilon=float(eps),
                    n=int(n),
                    pointer_width=float(width),
                    resolution=float(width / gap),
                    no_flip=nf.exact,
                    estimate=nf.estimate,
                    resolves_gap=bool(width < gap),
                    inaccurate=bool(width > 1.0 + 1e-12),
                )
            )
    return rows
