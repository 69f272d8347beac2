from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macroprob.ensemble import from_product_state
from macroprob.errors import ImpossibleOutcomeError, InvalidArgument
from macroprob.pointer import GaussianPointer
from macroprob.postselect import (
    PostSelection,
    consistency_gap,
    delta_p_exact,
    delta_p_perturbative,
    extreme_selection,
    interference_profile,
    modal_selection,
)
from macroprob.spin import SpinState

BALANCED = SpinState(1 / np.sqrt(2), 1 / np.sqrt(2))


def eps_pointer(n, eps=0.1):
    return GaussianPointer(0.0, 1 / (eps * np.sqrt(n)))


def grid_delta_p(n, n_plus, width, ds=1.0, sbar=0.0):
    # pointer wavefunctions sampled on a grid
    f = (2 * n_plus - n) / n
    c = 1 - ds**2 / (4 * width**2) / (2 * n)
    p = np.linspace(-2 - 30 * width, 2 + 30 * width, 400001)
    diff = GaussianPointer(-f, width).wavefunction(p) - c * GaussianPointer(-sbar, width).wavefunction(p)
    return np.sqrt(np.trapezoid(np.abs(diff) ** 2, p))


def test_selection_properties():
    sel = PostSelection(10, 7)
    assert sel.n_minus == 3
    assert sel.f_n == pytest.approx(0.4)
    with pytest.raises(InvalidArgument):
        PostSelection(10, 11)


def test_modal_and_extreme():
    state = from_product_state(SpinState.from_probability(0.8), 100)
    assert modal_selection(state).n_plus == 80
    assert extreme_selection(100).n_plus == 100
    assert extreme_selection(100, up=False).n_plus == 0


@pytest.mark.parametrize("n, n_plus", [(16, 16), (64, 33), (100, 50), (100, 100), (256, 200)])
def test_exact_norm_matches_grid(n, n_plus):
    state = from_product_state(BALANCED, n)
    pointer = eps_pointer(n)
    rep = delta_p_exact(state, pointer, PostSelection(n, n_plus))
    assert rep.exact_norm == pytest.approx(grid_delta_p(n, n_plus, pointer.width), rel=1e-6, abs=1e-9)


def test_likely_outcome_has_only_normalization_term():
    n = 100
    state = from_product_state(BALANCED, n)
    rep = delta_p_exact(state, eps_pointer(n), PostSelection(n, 50))
    assert rep.sigma_bar == 0.0
    assert all(t == 0.0 for t in rep.series_terms[1:])
    assert rep.series_terms[0] == pytest.approx(0.01 / 8)
    assert rep.exact_norm == pytest.approx(0.01 / 8, rel=1e-12)


def test_series_terms_closed_form():
    n = 100
    state = from_product_state(BALANCED, n)
    pointer = eps_pointer(n)
    prof = interference_profile(state, pointer, PostSelection(n, 60), 5)
    delta, sq = 0.2, np.sqrt(pointer.q_variance)
    dfact = [1, 1, 3, 15, 105, 945]
    expected = [delta**j * np.sqrt(dfact[j] * sq ** (2 * j)) / factorial(j) for j in range(1, 6)]
    assert prof == pytest.approx(expected, rel=1e-12)
    assert prof[0] == pytest.approx(delta_p_perturbative(state, pointer, PostSelection(n, 60)))


def test_likely_profile_decreases():
    n = 100
    state = from_product_state(BALANCED, n)
    prof = interference_profile(state, eps_pointer(n), PostSelection(n, 51), 6)
    assert np.all(np.diff(prof) < 0)


def test_unlikely_profile_grows_when_shift_is_resolved():
    n = 1024
    state = from_product_state(BALANCED, n)
    prof = interference_profile(state, eps_pointer(n), PostSelection(n, n), 3)
    assert np.all(np.diff(prof) >= 0)


def test_partial_sums_converge_to_exact():
    n = 100
    state = from_product_state(BALANCED, n)
    rep = delta_p_exact(state, eps_pointer(n), PostSelection(n, 51), orders=12)
    assert rep.partial_sum_norms[-1] == pytest.approx(rep.exact_norm, rel=1e-10)
    rep = delta_p_exact(state, eps_pointer(n), PostSelection(n, 100), orders=30)
    assert rep.partial_sum_norms[-1] == pytest.approx(rep.exact_norm, rel=1e-6)


def test_unlikely_beats_likely():
    n = 256
    state = from_product_state(BALANCED, n)
    pointer = eps_pointer(n)
    likely = delta_p_exact(state, pointer, modal_selection(state)).exact_norm
    unlikely = delta_p_exact(state, pointer, extreme_selection(n)).exact_norm
    assert unlikely > 10 * likely


@pytest.mark.parametrize("n", [100, 1000, 10000])
def test_modal_norm_vanishes_at_fixed_width(n):
    state = from_product_state(BALANCED, n)
    rep = delta_p_exact(state, GaussianPointer(0.0, 1.0), modal_selection(state))
    assert rep.exact_norm == pytest.approx(1 / (8 * n), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(100, 2000), k=st.floats(1.0, 3.0))
def test_typical_outcomes_match_first_order(n, k):
    # selections about k standard deviations out, pointer width fixed at 1
    state = from_product_state(BALANCED, n)
    n_plus = int(round(n / 2 + k * np.sqrt(n) / 2))
    sel = PostSelection(n, min(n_plus, n))
    rep = delta_p_exact(state, GaussianPointer(0.0, 1.0), sel)
    assert abs(rep.exact_norm / rep.perturbative_norm - 1) <= 10 / n


def test_impossible_outcome():
    state = from_product_state(SpinState(1, 0), 10)
    with pytest.raises(ImpossibleOutcomeError) as info:
        delta_p_exact(state, GaussianPointer(0, 1), PostSelection(10, 3))
    assert info.value.n_plus == 3


def test_far_tail_probability_is_finite_in_log():
    n = 4000
    state = from_product_state(BALANCED, n)
    rep = delta_p_exact(state, GaussianPointer(0, 1), extreme_selection(n))
    assert rep.selection_probability == 0.0
    assert rep.log_selection_probability == pytest.approx(n * np.log(0.5))


def test_size_mismatch_rejected():
    with pytest.raises(InvalidArgument):
        delta_p_exact(from_product_state(BALANCED, 10), GaussianPointer(0, 1), PostSelection(12, 3))


def test_consistency_gap():
    state = from_product_state(SpinState.from_probability(0.8), 100)
    assert consistency_gap(state, PostSelection(100, 80)) == pytest.approx(0.0, abs=1e-14)
    assert consistency_gap(state, PostSelection(100, 100)) == pytest.approx(0.4)
