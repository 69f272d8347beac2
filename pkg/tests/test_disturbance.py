import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macroprob.disturbance import (
    AccuracySetting,
    accuracy_tradeoff_sweep,
    eigenvalue_gap,
    fitted_constant,
    joint_survival_probability,
    no_flip_probability,
    uncertainty_check,
)
from macroprob.ensemble import CollectiveOperator, from_product_state
from macroprob.errors import InvalidArgument
from macroprob.oracles import full_collective, product_vector, site_operator
from macroprob.spin import SIGMA_X, SIGMA_Y, SIGMA_Z, SpinState, delta_sigma, rotate_to_axis

BALANCED = SpinState(1 / np.sqrt(2), 1 / np.sqrt(2))


def survival_by_quadrature(psi, setting):
    # one spin: E_Q |<psi| exp(i Q sigma_x / N) |psi>|^2 on a Q grid
    s, n = setting.q_spread, setting.n
    z = np.linspace(-12, 12, 20001)
    q = s * z
    amp = np.cos(q / n) + 1j * np.sin(q / n) * (abs(psi.c_plus) ** 2 - abs(psi.c_minus) ** 2)
    w = np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi)
    return np.trapezoid(np.abs(amp) ** 2 * w, z)


@pytest.mark.parametrize("convention", ["rotation", "minimum_uncertainty"])
@pytest.mark.parametrize("p", [0.5, 0.8, 0.95])
def test_single_spin_survival_matches_quadrature(convention, p):
    psi = SpinState.from_probability(p)
    setting = AccuracySetting(0.5, 4, convention)
    single = no_flip_probability(psi, AccuracySetting(0.5, 4, convention)).exact ** (1 / 4)
    assert single == pytest.approx(survival_by_quadrature(psi, setting), abs=1e-10)


def test_balanced_no_flip_at_large_n():
    nf = no_flip_probability(BALANCED, AccuracySetting(0.1, 10_000))
    assert abs(nf.exact - np.exp(-0.01)) <= 1e-6
    assert nf.estimate == pytest.approx(np.exp(-0.01))


def test_minimum_uncertainty_limit_is_quarter():
    nf = no_flip_probability(BALANCED, AccuracySetting(0.1, 100_000, "minimum_uncertainty"))
    assert nf.exact == pytest.approx(np.exp(-0.01 / 4), rel=1e-6)
    assert fitted_constant(BALANCED, 0.1, [1000, 10000], "minimum_uncertainty") == pytest.approx(0.25, rel=1e-6)


def test_fitted_constant_is_one():
    assert fitted_constant(BALANCED, 0.1, [100, 1000, 10000]) == pytest.approx(1.0, rel=1e-6)


@settings(max_examples=40, deadline=None)
@given(eps=st.floats(0.01, 1.0), n=st.integers(1, 10_000), theta=st.floats(0, np.pi))
def test_no_flip_monotone(eps, n, theta):
    psi = rotate_to_axis(theta, 0.0)
    base = no_flip_probability(psi, AccuracySetting(eps, n)).exact
    assert 0.0 <= base <= 1.0
    assert no_flip_probability(psi, AccuracySetting(eps * 1.5, n)).exact <= base + 1e-15
    # the Gaussian-averaged survival approaches its limit from above:
    # exp(-eps^2 ds^2 + O(eps^4 / N)) with a positive 1/N term
    assert no_flip_probability(psi, AccuracySetting(eps, n * 2)).exact <= base + 1e-15


def test_eigenstate_never_flips():
    nf = no_flip_probability(SpinState(1, 0), AccuracySetting(0.3, 100))
    assert nf.exact == 1.0
    assert joint_survival_probability(SpinState(1, 0), AccuracySetting(0.3, 100)) == 1.0


def test_joint_survival_matches_brute_force():
    psi, setting = BALANCED, AccuracySetting(0.4, 50)
    s, n = setting.q_spread, setting.n
    z = np.linspace(-12, 12, 40001)
    w = np.exp(-0.5 * z * z) / np.sqrt(2 * np.pi)
    single = 1 - np.sin(s * z / n) ** 2
    assert joint_survival_probability(psi, setting) == pytest.approx(np.trapezoid(single**n * w, z), rel=1e-8)


def test_setting_validation():
    with pytest.raises(InvalidArgument):
        AccuracySetting(0.0, 10)
    with pytest.raises(InvalidArgument):
        AccuracySetting(0.1, 0)
    with pytest.raises(InvalidArgument):
        AccuracySetting(0.1, 10, "other")
    with pytest.raises(InvalidArgument):
        fitted_constant(BALANCED, 0.1, [100])


def test_tradeoff_flags():
    rows = accuracy_tradeoff_sweep(BALANCED, [0.1, 10.0], [100])
    small, large = rows
    assert small.pointer_width == pytest.approx(1.0)
    assert not small.resolves_gap and not small.inaccurate
    assert large.resolves_gap
    rows = accuracy_tradeoff_sweep(BALANCED, [0.01], [100])
    assert rows[0].inaccurate
    assert eigenvalue_gap(100) == pytest.approx(0.02)


def dense_uncertainty(psi, n):
    v = product_vector(psi, n)
    ops = {k: full_collective(m, n) for k, m in (("x", SIGMA_X), ("y", SIGMA_Y), ("z", SIGMA_Z))}
    mean = {k: np.vdot(v, o @ v).real for k, o in ops.items()}
    sd = {k: np.sqrt(np.vdot(v, o @ o @ v).real - mean[k] ** 2) for k, o in ops.items()}
    sz0 = site_operator(SIGMA_Z, 0, n)
    sy0 = site_operator(SIGMA_Y, 0, n)
    d_sz0 = np.sqrt(1 - np.vdot(v, sz0 @ v).real ** 2)
    return (sd["x"] * sd["y"], abs(mean["z"]) / n), (d_sz0 * sd["x"], abs(np.vdot(v, sy0 @ v).real) / n)


@pytest.mark.parametrize("theta, phi", [(0.3, 0.2), (1.2, -2.0), (2.5, 1.0), (np.pi / 2, np.pi / 2)])
def test_uncertainty_matches_dense_oracle(theta, phi):
    psi = rotate_to_axis(theta, phi)
    rep = uncertainty_check(from_product_state(psi, 6))
    (c_lhs, c_rhs), (s_lhs, s_rhs) = dense_uncertainty(psi, 6)
    assert rep.collective.lhs == pytest.approx(c_lhs, abs=1e-12)
    assert rep.collective.rhs == pytest.approx(c_rhs, abs=1e-12)
    assert rep.single_spin.lhs == pytest.approx(s_lhs, abs=1e-12)
    assert rep.single_spin.rhs == pytest.approx(s_rhs, abs=1e-12)
    assert rep.collective.holds and rep.single_spin.holds


def test_product_state_variances():
    psi = rotate_to_axis(1.0, 0.5)
    n = 30
    state = from_product_state(psi, n)
    my = CollectiveOperator(n, "My")
    sy = np.sin(1.0) * np.cos(0.5)
    assert my.variance(state) == pytest.approx((1 - sy**2) / n, abs=1e-12)
    assert state.var_mx() == pytest.approx(delta_sigma(psi) ** 2 / n, abs=1e-12)
