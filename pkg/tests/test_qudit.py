import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macroprob.errors import InconsistentMomentsError, InvalidArgument, SingularSystemError
from macroprob.qudit import (
    QuditSpec,
    collective_moments,
    invert_moments,
    moments_from_probs,
    probs_from_moments,
    solve_vandermonde,
    vandermonde_condition,
)
from macroprob.runner import random_qudit_instance


def test_three_level_example():
    spec = QuditSpec((-1, 0, 1), (0.5, 0.3, 0.2))
    m = moments_from_probs(spec)
    assert m == pytest.approx([-0.3, 0.7], abs=1e-15)
    assert probs_from_moments(spec.levels, [-0.3, 0.7]) == pytest.approx([0.5, 0.3, 0.2], abs=1e-12)


def test_solver_matches_dense_solve():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = rng.integers(2, 7)
        x = np.sort(rng.uniform(-1, 1, n))
        if np.min(np.diff(x)) < 1e-2:
            continue
        b = rng.normal(size=n)
        v = np.vander(x, increasing=True).T
        assert solve_vandermonde(x, b) == pytest.approx(np.linalg.solve(v, b), rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_roundtrip_random_instances(seed):
    spec = random_qudit_instance(np.random.default_rng(seed))
    got = probs_from_moments(spec.levels, moments_from_probs(spec))
    assert np.max(np.abs(got - spec.probs)) < 1e-9


def test_repeated_levels_are_singular():
    with pytest.raises(SingularSystemError):
        QuditSpec((0, 0, 1), (0.2, 0.3, 0.5))
    with pytest.raises(SingularSystemError):
        solve_vandermonde([1, 1], [1, 1])


def test_inconsistent_moments_rejected():
    # <L> = 2 is impossible for levels in [-1, 1]
    with pytest.raises(InconsistentMomentsError) as info:
        invert_moments((-1, 0, 1), (2.0, 1.0))
    assert info.value.value < 0


def test_tiny_negative_is_clamped():
    res = invert_moments((-1, 1), (1.0 + 1e-10,))
    assert res.clamp > 0
    assert res.probs == pytest.approx([0.0, 1.0])
    assert res.probs.min() >= 0


def test_argument_validation():
    with pytest.raises(InvalidArgument):
        invert_moments((-1, 0, 1), (0.1,))
    with pytest.raises(InvalidArgument):
        QuditSpec((0, 1), (0.5, 0.6))
    with pytest.raises(InvalidArgument):
        collective_moments([0, 0], [0, 1])


def test_sampled_moments_converge():
    spec = QuditSpec((-1, 0, 1), (0.5, 0.3, 0.2))
    counts = np.random.default_rng(1).multinomial(200_000, spec.probs)
    est = probs_from_moments(spec.levels, collective_moments(counts, spec.levels))
    assert est == pytest.approx(spec.probs, abs=5e-3)


def test_condition_grows_with_clustering():
    assert vandermonde_condition([-1, 0, 1]) < vandermonde_condition([-1, 0, 0.01])
