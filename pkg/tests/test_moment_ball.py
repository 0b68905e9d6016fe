import numpy as np
import pytest

from optilik.exceptions import InvalidInputError, SolverError
from optilik.moment_ball import (
    MomentSummary,
    measure_moments,
    moment_summary,
    optimistic_likelihood_moment,
)


def test_two_point_summary():
    summary = moment_summary([[-1.0], [1.0]])
    np.testing.assert_allclose(summary.mean, [0.0], atol=1e-15)
    np.testing.assert_allclose(summary.covariance, [[1.0]])


def test_regularization_is_added():
    summary = moment_summary([[-1.0], [1.0]], regularization=0.5)
    np.testing.assert_allclose(summary.covariance, [[1.5]])


def test_single_sample_is_ridged():
    summary = moment_summary([[2.0, 3.0]])
    np.testing.assert_allclose(summary.covariance, 1e-8 * np.eye(2))
    assert optimistic_likelihood_moment(summary, [2.0, 3.0]) == 1.0


def test_spread_samples_share_moments():
    samples = [[-2.0]] + [[-0.5]] * 4 + [[0.5]] * 4 + [[2.0]]
    summary = moment_summary(samples)
    assert summary.mean[0] == pytest.approx(0.0, abs=1e-15)
    assert summary.covariance[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_weighted_measure_moments(spread_atoms, two_atoms):
    a = measure_moments(spread_atoms)
    b = measure_moments(two_atoms)
    np.testing.assert_allclose(a.mean, b.mean, atol=1e-15)
    np.testing.assert_allclose(a.covariance, b.covariance, atol=1e-12)


def test_examples():
    identity = MomentSummary(mean=[0.0, 0.0], covariance=np.eye(2))
    assert optimistic_likelihood_moment(identity, [0.0, 0.0]) == 1.0
    assert optimistic_likelihood_moment(identity, [0.6, 0.8]) == pytest.approx(0.5)
    assert optimistic_likelihood_moment(identity, [0.0, 2.0]) == pytest.approx(0.2)


def test_errors():
    with pytest.raises(InvalidInputError, match="empty sample set"):
        moment_summary([])
    with pytest.raises(InvalidInputError):
        moment_summary([[1.0]], regularization=-1.0)
    with pytest.raises(InvalidInputError, match="symmetric"):
        MomentSummary(mean=[0.0, 0.0], covariance=[[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(SolverError, match="singular"):
        MomentSummary(mean=[0.0, 0.0], covariance=np.zeros((2, 2)))
    with pytest.raises(InvalidInputError, match="dimension mismatch"):
        optimistic_likelihood_moment(MomentSummary([0.0], [[1.0]]), [0.0, 1.0])


def test_output_range(rng):
    samples = rng.normal(size=(30, 3))
    summary = moment_summary(samples)
    for _ in range(50):
        value = optimistic_likelihood_moment(summary, rng.normal(size=3) * 3)
        assert 0.0 < value < 1.0


def test_affine_invariance(rng):
    samples = rng.normal(size=(40, 3))
    a = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    b = rng.normal(size=3)
    base = moment_summary(samples)
    moved = moment_summary(samples @ a.T + b)
    for _ in range(20):
        x = rng.normal(size=3) * 2
        assert optimistic_likelihood_moment(moved, a @ x + b) == pytest.approx(
            optimistic_likelihood_moment(base, x), abs=1e-8
        )
