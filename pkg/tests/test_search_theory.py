import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from driftsearch import search_theory as st_
from driftsearch.grid import Domain, GridSpec, ScalarField


def toy_grid(n=2, size=2.0):
    return GridSpec(Domain(0, size, 0, size), n, n)


def random_density(rng, g):
    v = rng.gamma(0.5, size=(g.nx, g.ny))
    v[rng.random(v.shape) < 0.2] = 0.0
    v /= v.sum() * g.cell_area
    return ScalarField(g, v)


def test_detection_function_values():
    assert st_.detection_function(0.0) == 0.0
    assert math.isclose(st_.detection_function(math.log(2)), 0.5)
    assert math.isclose(st_.detection_function(10.0), 1 - math.exp(-10))
    with pytest.raises(ValueError):
        st_.detection_function(-0.1)


def test_detection_probability_cases():
    g = toy_grid()
    p = ScalarField(g, np.array([[0.1, 0.2], [0.3, 0.4]]) / g.cell_area)
    assert st_.detection_probability(p, g.zeros()) == 0.0
    half = ScalarField(g, np.full((2, 2), math.log(2)))
    assert math.isclose(st_.detection_probability(p, half), 0.5)
    c = np.array([[0.0, 1.0], [2.0, 0.5]])
    oracle = 0.1 * 0 + 0.2 * (1 - math.exp(-1)) + 0.3 * (1 - math.exp(-2)) + 0.4 * (1 - math.exp(-0.5))
    assert math.isclose(st_.detection_probability(p, ScalarField(g, c)), oracle)


def test_uniform_density_closed_form():
    g = GridSpec(Domain(0, 40, 0, 25), 16, 10)
    A = 1000.0
    p = ScalarField(g, np.full((16, 10), 1 / A))
    B = 7.3
    plan = st_.solve_alpha(p, B)
    assert abs(plan.alpha - (math.log(1 / A) - B / A)) < 1e-9
    np.testing.assert_allclose(plan.c_opt.values, B / A, atol=1e-9)


def test_zero_budget_gives_zero_coverage():
    g = toy_grid(8, 8.0)
    plan = st_.solve_alpha(random_density(np.random.default_rng(1), g), 0.0)
    assert np.all(plan.c_opt.values == 0.0)


def test_two_level_density_brute_force():
    g = toy_grid(4, 4.0)
    v = np.full((4, 4), 1.0)
    v[:2, :2] = 5.0
    v /= v.sum()
    p = ScalarField(g, v)
    B = 3.0
    plan = st_.solve_alpha(p, B)
    logp = np.log(v)
    alphas = np.linspace(logp.min() - 2, logp.max(), 10 ** 6)
    # budget at each candidate alpha, cell by cell
    used = np.zeros_like(alphas)
    for lp in logp.ravel():
        used += np.maximum(lp - alphas, 0.0)
    best = alphas[np.argmin(np.abs(used - B))]
    assert abs(plan.alpha - best) < 1e-5


def test_alpha_residual_on_random_fields():
    rng = np.random.default_rng(20)
    g = GridSpec(Domain(0, 64, 0, 32), 32, 16)
    for _ in range(20):
        p = random_density(rng, g)
        B = float(rng.uniform(0, 500))
        plan = st_.solve_alpha(p, B)
        assert abs(st_.budget_used(p, plan.alpha) - B) <= 1e-6 * max(B, 1.0)
        assert abs(plan.c_opt.integrate() - B) <= 1e-6 * max(B, 1.0)
        support = p.values > st_.default_floor(p)
        np.testing.assert_allclose(plan.c_opt.values[support],
                                   np.maximum(np.log(p.values[support]) - plan.alpha, 0.0))
        assert np.all(plan.c_opt.values[~support] == 0)


def test_incremental_planning_matches_one_shot():
    rng = np.random.default_rng(5)
    g = GridSpec(Domain(0, 30, 0, 30), 30, 30)
    for _ in range(5):
        p = random_density(rng, g)
        B1, B2 = rng.uniform(1, 200, 2)
        c1 = st_.solve_alpha(p, B1).c_opt
        post = p.values * np.exp(-c1.values)
        post /= post.sum() * g.cell_area
        c2 = st_.solve_alpha(p.with_values(post), B2).c_opt
        whole = st_.solve_alpha(p, B1 + B2).c_opt
        l1 = np.abs(c1.values + c2.values - whole.values).sum() * g.cell_area
        assert l1 < 1e-5


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.1, 100), st.floats(0.1, 100))
def test_more_budget_lowers_alpha(seed, b1, b2):
    g = toy_grid(6, 6.0)
    p = random_density(np.random.default_rng(seed), g)
    lo, hi = sorted((b1, b2))
    a_lo, a_hi = st_.solve_alpha(p, lo), st_.solve_alpha(p, hi)
    assert a_hi.alpha <= a_lo.alpha + 1e-12
    assert np.all(a_hi.c_opt.values >= a_lo.c_opt.values - 1e-9)


def test_mdsmc_mismatch_cases():
    g = toy_grid()
    v = np.array([[0.5, 0.0], [0.3, 0.2]]) / g.cell_area
    p = ScalarField(g, v)
    alpha = math.log(0.1)
    c = ScalarField(g, np.array([[0.4, 3.0], [0.0, 5.0]]))
    s = st_.mismatch_mdsmc(p, alpha, c).values
    expected = np.array([[max(math.log(0.5) - alpha - 0.4, 0), 0.0],
                         [max(math.log(0.3) - alpha, 0), 0.0]])
    np.testing.assert_allclose(s, expected)
    # over-searched everywhere
    big = ScalarField(g, np.full((2, 2), 50.0))
    assert np.all(st_.mismatch_mdsmc(p, alpha, big).values == 0)


def test_dsmc_mismatch_cases():
    g = toy_grid()
    p = ScalarField(g, np.full((2, 2), 0.25))
    assert np.array_equal(st_.mismatch_dsmc(p, g.zeros(), 3, 0.0).values, p.values)
    even = ScalarField(g, np.full((2, 2), 0.25 * 3 * 2.0))
    np.testing.assert_allclose(st_.mismatch_dsmc(p, even, 3, 2.0).values, 0.0)
    c = ScalarField(g, np.array([[1.0, 0.0], [2.0, 0.5]]))
    np.testing.assert_allclose(st_.mismatch_dsmc(p, c, 2, 1.5).values, 0.25 - c.values / 3.0)
