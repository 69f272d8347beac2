"""Pointer state conditioned on a definite microscopic outcome ``(n_plus, n_minus)``.

After coupling, projecting on sector k and dividing by ``a_k`` leaves the
pointer at ``|P - F_N>``.  The correction relative to the scaled unentangled
branch is

    dP = |P - F_N> - c |P - sigma_bar>,   c = 1 - ds^2 <Q^2> / (2N)
       = exp(i sigma_bar Q) [exp(i (F_N - sigma_bar) Q) - c] |P>,

whose expansion in powers of ``(F_N - sigma_bar) Q`` gives the per-order
terms reported below.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .ensemble import SymmetricState
from .errors import ImpossibleOutcomeError, InvalidArgument
from .pointer import GaussianPointer


@dataclass(frozen=True)
class PostSelection:
    n: int
    n_plus: int

    def __post_init__(self):
        if not 0 <= self.n_plus <= self.n:
            raise InvalidArgument(f"n_plus must lie in [0, {self.n}], got {self.n_plus}")

    @property
    def n_minus(self) -> int:
        return self.n - self.n_plus

    @property
    def f_n(self) -> float:
        return (self.n_plus - self.n_minus) / self.n


def modal_selection(state: SymmetricState) -> PostSelection:
    """Outcome with ``n_plus`` nearest ``N <f_N>`` (``N |c_plus|^2`` for products)."""
    if state.source is not None:
        target = state.n * state.source.p_plus
    else:
        target = float(np.dot(state.probabilities, np.arange(state.n + 1)))
    return PostSelection(state.n, int(np.clip(np.floor(target + 0.5), 0, state.n)))


def extreme_selection(n: int, up: bool = True) -> PostSelection:
    return PostSelection(n, n if up else 0)


def _gaussian_q_moment(order: int, q_var: float) -> float:
    """``<Q^order>`` for a centred Gaussian of variance ``q_var``."""
    if order % 2:
        return 0.0
    half = order // 2
    double_fact = float(np.prod(np.arange(1.0, order, 2.0))) if half else 1.0
    return double_fact * q_var**half


@dataclass(frozen=True)
class DeltaPReport:
    exact_norm: float
    perturbative_norm: float
    series_terms: tuple[float, ...]
    selection_probability: float
    f_n: float
    sigma_bar: float
    prefactor: float
    partial_sum_norms: tuple[float, ...]
    log_selection_probability: float = 0.0


def _selection_checks(state: SymmetricState, sel: PostSelection) -> float:
    if sel.n != state.n:
        raise InvalidArgument(f"selection is for N={sel.n}, state has N={state.n}")
    log_p = state.log_probability(sel.n_plus)
    if not np.isfinite(log_p):
        raise ImpossibleOutcomeError(sel.n_plus, sel.n, complex(state.amps[sel.n_plus]))
    return log_p


def _series_coefficients(shift: float, prefactor: float, orders: int) -> np.ndarray:
    # exp(i s Q) - c = (1 - c) + sum_j (i s)^j Q^j / j!
    b = np.array([(1j * shift) ** j / factorial(j) for j in range(orders + 1)], dtype=complex)
    b[0] = 1.0 - prefactor
    return b


def _partial_norms(coeffs: np.ndarray, q_var: float) -> tuple[float, ...]:
    size = coeffs.size
    moments = np.array([[_gaussian_q_moment(i + j, q_var) for j in range(size)] for i in range(size)])
    out = []
    for order in range(size):
        c = coeffs[: order + 1]
        g = moments[: order + 1, : order + 1]
        out.append(float(np.sqrt(max(np.real(np.conj(c) @ g @ c), 0.0))))
    return tuple(out)


def interference_profile(
    state: SymmetricState, pointer: GaussianPointer, sel: PostSelection, orders: int
) -> np.ndarray:
    """Norm of each order ``j = 1..orders`` of the relative-shift expansion.

    Term j is ``|F_N - sigma_bar|^j sqrt(<Q^(2j)>) / j!``.  Whether the
    sequence decays (likely outcome) or grows (unlikely outcome with
    ``dQ |F_N - sigma_bar| > 1``) is reported, not enforced.
    """
    if orders < 1:
        raise InvalidArgument("orders must be at least 1")
    _selection_checks(state, sel)
    shift = abs(sel.f_n - state.spin_stats()[0])
    q_var = pointer.q_variance
    return np.array(
        [shift**j * np.sqrt(_gaussian_q_moment(2 * j, q_var)) / factorial(j) for j in range(1, orders + 1)],
        dtype=float,
    )


def delta_p_exact(
    state: SymmetricState, pointer: GaussianPointer, sel: PostSelection, orders: int = 6
) -> DeltaPReport:
    """Exact and first-order norms of the post-selected pointer correction.

    Raises ImpossibleOutcomeError when the selected outcome has zero amplitude.
    """
    log_p = _selection_checks(state, sel)
    sbar, ds = state.spin_stats()
    q_var = pointer.q_variance
    prefactor = 1.0 - ds**2 * q_var / (2.0 * state.n)
    shifted_f = GaussianPointer(pointer.center - sel.f_n, pointer.width)
    shifted_ref = GaussianPointer(pointer.center - sbar, pointer.width, prefactor)
    exact = (shifted_f - shifted_ref).norm()
    shift = sel.f_n - sbar
    perturbative = abs(shift) * np.sqrt(q_var)
    coeffs = _series_coefficients(shift, prefactor, orders)
    terms = (abs(1.0 - prefactor),) + tuple(float(t) for t in interference_profile(state, pointer, sel, orders))
    return DeltaPReport(
        exact_norm=exact,
        perturbative_norm=float(perturbative),
        series_terms=terms,
        selection_probability=float(np.exp(log_p)),
        f_n=sel.f_n,
        sigma_bar=sbar,
        prefactor=prefactor,
        partial_sum_norms=_partial_norms(coeffs, q_var),
        log_selection_probability=log_p,
    )


def delta_p_perturbative(state: SymmetricState, pointer: GaussianPointer, sel: PostSelection) -> float:
    """First-order norm ``|F_N - sigma_bar| sqrt(<Q^2>)``."""
    _selection_checks(state, sel)
    return float(abs(sel.f_n - state.spin_stats()[0]) * np.sqrt(pointer.q_variance))


def consistency_gap(state: SymmetricState, sel: PostSelection) -> float:
    """``|F_N - sigma_bar|`` between the microscopic frequency and the collective reading."""
    return abs(sel.f_n - state.spin_stats()[0])
