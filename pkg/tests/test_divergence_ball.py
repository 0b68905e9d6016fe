import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optilik.divergence_ball import (
    DivergenceBall,
    off_support_value,
    optimal_measure_on_support,
    optimistic_likelihood_divergence,
    solve_on_support,
    solve_on_support_kl,
)
from optilik.exceptions import InvalidInputError
from optilik.measures import DiscreteMeasure, DivergenceFamily, f_divergence

ALL_FAMILIES = list(DivergenceFamily)


def grid_oracle_two_atoms(family, nominal, eps, k, points=100_001):
    """max y_k over y = (y_0, 1 - y_0) with D_f(nominal || y) <= eps, by brute force.

    A coarse grid locates the best feasible point and a second grid around it
    refines the answer to a resolution near 1e-10.
    """

    def search(lo, hi):
        y0 = np.linspace(lo, hi, points)
        y = np.stack([y0, 1.0 - y0], axis=1)
        ok = family.perspective(nominal[None, :], y).sum(axis=1) <= eps
        yk = y[ok, k]
        return y0[ok][np.argmax(yk)], float(yk.max())

    coarse_y0, _ = search(1e-12, 1.0 - 1e-12)
    step = 1.0 / (points - 1)
    _, value = search(max(coarse_y0 - step, 1e-12), min(coarse_y0 + step, 1.0 - 1e-12))
    return value


def simplex_grid_oracle(family, nominal, eps, k, step=2e-3):
    """max y_k over a grid of the 3-simplex."""
    a = np.arange(0.0, 1.0 + step / 2, step)
    y0, y1 = np.meshgrid(a, a, indexing="ij")
    y2 = 1.0 - y0 - y1
    mask = y2 >= -1e-12
    y = np.stack([y0[mask], y1[mask], np.clip(y2[mask], 0, None)], axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        div = family.perspective(nominal[None, :], y).sum(axis=1)
    feasible = div <= eps
    return float(np.max(y[feasible, k]))


def test_negative_radius_rejected(two_atoms):
    with pytest.raises(InvalidInputError, match="negative radius"):
        DivergenceBall(DivergenceFamily.KL, two_atoms, -0.1)


@pytest.mark.parametrize(
    "family, eps, expected",
    [
        (DivergenceFamily.KL, math.log(2), 0.5),
        (DivergenceFamily.HELLINGER, 0.5, 0.75),
        (DivergenceFamily.TOTAL_VARIATION, 1.0, 0.5),
        (DivergenceFamily.CHI_SQUARED, 1.0, 0.5),
    ],
)
def test_off_support_examples(two_atoms, family, eps, expected):
    ball = DivergenceBall(family, two_atoms, eps)
    assert optimistic_likelihood_divergence(ball, [0.0]) == pytest.approx(expected, abs=1e-15)


def test_off_support_closed_forms_on_random_instances(rng):
    for _ in range(100):
        eps = float(rng.uniform(0, 3))
        n = int(rng.integers(1, 6))
        points = rng.normal(size=(n, 2))
        weights = rng.dirichlet(np.ones(n))
        center = DiscreteMeasure(points, weights / weights.sum())
        x = rng.normal(size=2) + 10.0
        expected = {
            DivergenceFamily.KL: 1 - math.exp(-eps),
            DivergenceFamily.HELLINGER: 1 - (1 - eps) ** 2 if eps <= 1 else 1.0,
            DivergenceFamily.CHI_SQUARED: 1 - 1 / (1 + eps),
            DivergenceFamily.TOTAL_VARIATION: min(eps / 2, 1.0),
        }
        for family, value in expected.items():
            ball = DivergenceBall(family, center, eps)
            assert optimistic_likelihood_divergence(ball, x) == value


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_zero_radius_degenerates_to_center(two_atoms, family):
    ball = DivergenceBall(family, two_atoms, 0.0)
    assert optimistic_likelihood_divergence(ball, [0.0]) == 0.0
    assert optimistic_likelihood_divergence(ball, [1.0]) == 0.5


def test_kl_on_support_matches_grid_oracle():
    center = DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5])
    ball = DivergenceBall(DivergenceFamily.KL, center, 0.1)
    oracle = grid_oracle_two_atoms(DivergenceFamily.KL, center.weights, 0.1, 1)
    assert optimistic_likelihood_divergence(ball, [1.0]) == pytest.approx(oracle, abs=1e-6)


def test_solve_on_support_kl_examples():
    single = DiscreteMeasure([[2.0]], [1.0])
    assert solve_on_support_kl(single, 0.3, 0) == 1.0

    uniform = DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5])
    oracle = grid_oracle_two_atoms(DivergenceFamily.KL, uniform.weights, 0.05, 0)
    assert solve_on_support_kl(uniform, 0.05, 0) == pytest.approx(oracle, abs=1e-6)

    assert solve_on_support_kl(uniform, 1e6, 0) == pytest.approx(1.0, abs=1e-6)


def test_kl_on_support_closed_form_for_two_atoms():
    # y = (1 - s, s) with 0.5 log(0.5 / (1 - s)) + 0.5 log(0.5 / s) = eps
    eps = 0.2
    uniform = DiscreteMeasure([[0.0], [1.0]], [0.5, 0.5])
    s = 0.5 * (1 - math.sqrt(1 - math.exp(-2 * eps)))
    assert solve_on_support_kl(uniform, eps, 0) == pytest.approx(1 - s, abs=1e-10)


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_on_support_optimum_is_feasible(family, rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        weights = rng.dirichlet(np.ones(n))
        center = DiscreteMeasure(np.arange(n, dtype=float)[:, None], weights / weights.sum())
        eps = float(rng.uniform(0.01, 0.8))
        k = int(rng.integers(n))
        y = optimal_measure_on_support(family, center, eps, k)
        assert y.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(y >= 0)
        assert f_divergence(family, center.weights, y / y.sum()) <= eps + 1e-9
        assert solve_on_support(family, center, eps, k) >= center.weights[k]


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_three_atom_values_match_simplex_grid(family):
    center = DiscreteMeasure([[0.0], [1.0], [2.0]], [0.2, 0.3, 0.5])
    for eps in (0.05, 0.3):
        for k in range(3):
            oracle = simplex_grid_oracle(family, center.weights, eps, k)
            value = solve_on_support(family, center, eps, k)
            # the grid lies inside the feasible set, so it can only under-estimate
            assert value >= oracle - 1e-9
            assert value <= oracle + 2e-2


def test_total_variation_on_support_closed_form():
    center = DiscreteMeasure([[0.0], [1.0]], [0.3, 0.7])
    assert solve_on_support(DivergenceFamily.TOTAL_VARIATION, center, 0.2, 0) == pytest.approx(0.4)
    assert solve_on_support(DivergenceFamily.TOTAL_VARIATION, center, 5.0, 0) == 1.0


def test_hellinger_saturates():
    assert off_support_value(DivergenceFamily.HELLINGER, 1.0) == 1.0
    assert off_support_value(DivergenceFamily.HELLINGER, 3.0) == 1.0
    center = DiscreteMeasure([[0.0], [1.0]], [0.25, 0.75])
    assert solve_on_support(DivergenceFamily.HELLINGER, center, 1.0, 0) == 1.0


def test_limits_for_large_radius():
    assert off_support_value(DivergenceFamily.KL, 50.0) == pytest.approx(1.0)
    assert off_support_value(DivergenceFamily.CHI_SQUARED, 1e12) == pytest.approx(1.0)


def test_flatness_off_support(two_atoms):
    for family in ALL_FAMILIES:
        ball = DivergenceBall(family, two_atoms, 0.3)
        near = optimistic_likelihood_divergence(ball, [1.01])
        far = optimistic_likelihood_divergence(ball, [100.0])
        assert near == far


@settings(max_examples=500, deadline=None)
@given(
    st.sampled_from(ALL_FAMILIES),
    st.floats(0.0, 3.0),
    st.floats(0.0, 3.0),
    st.booleans(),
)
def test_monotone_in_radius(family, eps_a, eps_b, on_support):
    center = DiscreteMeasure([[0.0], [1.0], [2.0]], [0.2, 0.3, 0.5])
    x = [1.0] if on_support else [0.5]
    lo, hi = sorted((eps_a, eps_b))
    v_lo = optimistic_likelihood_divergence(DivergenceBall(family, center, lo), x)
    v_hi = optimistic_likelihood_divergence(DivergenceBall(family, center, hi), x)
    assert 0.0 <= v_lo <= 1.0
    assert v_lo <= v_hi + 1e-10


@pytest.mark.parametrize("family", ALL_FAMILIES)
@pytest.mark.parametrize("eps", [1.1e-308, 1e-300, 1e-32, 1e-17, 1e-12])
def test_tiny_radius_on_support_stays_above_nominal_weight(family, eps):
    for weights in ([0.3, 0.7], [0.1, 0.2, 0.7]):
        center = DiscreteMeasure(np.arange(len(weights), dtype=float)[:, None], weights)
        for k, nominal in enumerate(center.weights):
            value = solve_on_support(family, center, eps, k)
            assert value >= nominal
            assert value == pytest.approx(nominal, abs=1e-5)
