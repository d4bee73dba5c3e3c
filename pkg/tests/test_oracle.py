import math

import numpy as np
import pytest

from conftest import CAP
from mirrorpo.estimators import triangle_deviation_bound
from mirrorpo.mdp import Mdp, make_short_corridor
from mirrorpo.oracle import (CapacityError, DivergenceError, TrajectoryTree, corridor_p_right,
                             corridor_value, corridor_value_curve, deviation_diagnostic,
                             empirical_lipschitz,
                             enumerate_trajectories, estimator_moments, exact_gradient,
                             exact_return, finite_difference, optimal_value, random_pairs,
                             tail_mass, variance_recursion_check)
from mirrorpo.policy import SoftmaxLinearPolicy, score_matrix

# values at theta = 0 from fixed-point iteration of the policy Bellman operator
FROZEN_J_AT_ZERO = (-0.20378708976003815, 0.2243091661891605, -0.05505085051104964)


def corridor_closed_form(p):
    return 2.0 * (p - 2.0) / (p * (1.0 - p))


def zero_reward_mdp():
    P = np.zeros((2, 2, 3))
    P[:, :, 2] = 0.5
    P[:, 0, 0] = 0.5
    P[:, 1, 1] = 0.5
    return Mdp(P, np.zeros((2, 2)), np.array([0.5, 0.5]), gamma=0.9, r_max=1.0,
               features=np.eye(4).reshape(2, 2, 4))


class TestCorridorValues:
    @pytest.mark.parametrize("p", [0.05, 0.3, 0.5, 0.59, 0.95])
    def test_matches_closed_form(self, p):
        np.testing.assert_allclose(corridor_value(p), corridor_closed_form(p), rtol=1e-12)

    def test_frozen_values(self):
        np.testing.assert_allclose(corridor_value(0.59), -11.657709797436958, rtol=1e-12)
        np.testing.assert_allclose(corridor_value(0.95), -44.21052631578944, rtol=1e-12)
        np.testing.assert_allclose(corridor_value(0.05), -82.10526315789474, rtol=1e-12)

    def test_curve_shape(self):
        grid = np.round(np.arange(0.005, 1.0, 0.005), 12)
        p, v = np.array(corridor_value_curve(grid)).T
        i = int(np.argmax(v))
        assert 0.56 <= p[i] <= 0.61
        assert -12.6 <= v[i] <= -10.6
        inner = (p >= 0.1) & (p <= 0.9)
        assert np.max(np.abs(np.diff(v[inner]))) < 5

    def test_optimum_is_two_minus_root_two(self):
        from scipy.optimize import minimize_scalar
        res = minimize_scalar(lambda p: -corridor_value(p), bounds=(0.3, 0.9), method="bounded",
                              options={"xatol": 1e-10})
        np.testing.assert_allclose(res.x, 2 - math.sqrt(2), atol=1e-6)

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_endpoints_diverge(self, p):
        with pytest.raises(DivergenceError):
            corridor_value(p)

    def test_p_right_from_theta(self):
        np.testing.assert_allclose(corridor_p_right([0.4, -0.1]), 1 / (1 + math.exp(-0.5)))

    def test_policy_return_matches_curve(self, corridor):
        pol = SoftmaxLinearPolicy(np.array([0.36, 0.0]), corridor.features)
        np.testing.assert_allclose(exact_return(corridor, pol),
                                   corridor_value(corridor_p_right(pol.theta)), rtol=1e-12)

    def test_gradient_vanishes_at_optimum(self, corridor):
        p_star = 2 - math.sqrt(2)
        theta = np.array([math.log(p_star / (1 - p_star)), 0.0])
        pol = SoftmaxLinearPolicy(theta, corridor.features)
        g = exact_gradient(corridor, pol, method="linear")
        fd = finite_difference(lambda t: exact_return(corridor, pol.with_theta(t)), theta)
        assert np.abs(g).max() < 1e-3 and np.abs(fd).max() < 1e-3

    def test_never_terminating_policy(self, corridor):
        pol = SoftmaxLinearPolicy(np.array([0.0, 800.0]), corridor.features)
        with pytest.raises(DivergenceError):
            exact_return(corridor, pol)


class TestEnumeration:
    def test_single_path(self):
        P = np.zeros((2, 1, 3))
        P[0, 0, 1] = 1.0
        P[1, 0, 2] = 1.0
        m = Mdp(P, -np.ones((2, 1)), np.array([1.0, 0.0]), features=np.ones((2, 1, 1)))
        d = enumerate_trajectories(m, SoftmaxLinearPolicy(np.zeros(1), m.features), 5)
        assert len(d.entries) == 1
        tr, prob = d.entries[0]
        assert prob == 1.0 and d.tail_mass == 0.0
        np.testing.assert_array_equal(tr.states, [0, 1])

    def test_mass_and_tail(self, fixtures, trees, rng):
        for m, tree in zip(fixtures, trees):
            pol = SoftmaxLinearPolicy(rng.uniform(-1, 1, 4), m.features)
            d = enumerate_trajectories(m, pol, CAP, tree=tree)
            assert d.tail_mass <= 1e-6
            np.testing.assert_allclose(d.probabilities.sum(), 1 - d.tail_mass, atol=1e-12)
            np.testing.assert_allclose(d.tail_mass, tail_mass(m, pol, CAP), rtol=1e-6,
                                       atol=1e-15)

    def test_longer_cap_tail_from_chain_powers(self, fixtures):
        # cap 30 exceeds the enumeration guard, so use the chain directly
        for m in fixtures:
            pol = SoftmaxLinearPolicy(np.zeros(4), m.features)
            assert tail_mass(m, pol, 30) <= 1e-6

    def test_probabilities_recomputed_independently(self, corridor):
        pol = SoftmaxLinearPolicy(np.array([0.2, -0.3]), corridor.features)
        d = enumerate_trajectories(corridor, pol, 12)
        pi = pol.probability_table()
        for tr, prob in d.entries:
            direct = corridor.initial_dist[tr.states[0]]
            for s, a, s2 in zip(tr.states, tr.actions, tr.next_states):
                direct *= pi[s, a] * corridor.transition[s, a, s2]
            assert abs(prob - direct) <= 1e-14

    def test_corridor_tail_matches_chain(self, corridor):
        pol = SoftmaxLinearPolicy(np.zeros(2), corridor.features)
        d = enumerate_trajectories(corridor, pol, 20)
        np.testing.assert_allclose(d.tail_mass, tail_mass(corridor, pol, 20), rtol=1e-12)
        # the p = 1/2 chain restricted to nonterminal states, raised independently
        Q = np.array([[0.5, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0]])
        direct = np.linalg.matrix_power(Q, 60)[0].sum()
        np.testing.assert_allclose(tail_mass(corridor, pol, 60), direct, rtol=1e-10)

    def test_capacity_guard(self, corridor):
        with pytest.raises(CapacityError, match="2\\^60"):
            TrajectoryTree(corridor, 60)

    def test_h_max_truncation_is_a_leaf(self):
        m = make_short_corridor(h_max=4)
        d = enumerate_trajectories(m, SoftmaxLinearPolicy(np.zeros(2), m.features), 10)
        assert d.tail_mass == 0.0
        np.testing.assert_allclose(d.probabilities.sum(), 1.0, atol=1e-14)
        assert any(tr.truncated for tr, _ in d.entries)


class TestExactReturn:
    def test_frozen_values(self, fixtures):
        for m, J in zip(fixtures, FROZEN_J_AT_ZERO):
            np.testing.assert_allclose(
                exact_return(m, SoftmaxLinearPolicy(np.zeros(4), m.features)), J, rtol=1e-12)

    def test_enumeration_agrees_with_linear_solve(self, fixtures, trees, rng):
        for m, tree in zip(fixtures, trees):
            pol = SoftmaxLinearPolicy(rng.uniform(-2, 2, 4), m.features)
            d = enumerate_trajectories(m, pol, CAP, tree=tree)
            tol = max(1e-8, 20 * d.tail_mass * m.h_max)
            assert abs(d.expectation(d.returns) - exact_return(m, pol)) <= tol

    def test_zero_reward(self):
        m = zero_reward_mdp()
        pol = SoftmaxLinearPolicy(np.ones(4), m.features)
        assert exact_return(m, pol) == 0.0
        np.testing.assert_array_equal(exact_gradient(m, pol, 10), 0.0)

    def test_optimal_value_bounds_policies(self, fixtures, rng):
        for m in fixtures:
            best = optimal_value(m)
            for _ in range(5):
                pol = SoftmaxLinearPolicy(rng.uniform(-3, 3, 4), m.features)
                assert exact_return(m, pol) <= best + 1e-12


class TestExactGradient:
    def test_matches_finite_differences(self, fixtures, trees):
        rng = np.random.default_rng(8)
        for _ in range(20):
            i = int(rng.integers(3))
            m, tree = fixtures[i], trees[i]
            pol = SoftmaxLinearPolicy(rng.uniform(-2, 2, 4), m.features)
            g = exact_gradient(m, pol, tree=tree)
            fd = finite_difference(lambda t: exact_return(m, pol.with_theta(t)), pol.theta)
            np.testing.assert_allclose(g, fd, rtol=1e-5, atol=1e-7)

    def test_linear_form_agrees(self, fixtures, trees, rng):
        for m, tree in zip(fixtures, trees):
            pol = SoftmaxLinearPolicy(rng.uniform(-2, 2, 4), m.features)
            # truncated paths carry long score sums, so the gap scales with the tail
            tol = max(1e-8, 100 * CAP * tail_mass(m, pol, CAP))
            np.testing.assert_allclose(exact_gradient(m, pol, method="linear"),
                                       exact_gradient(m, pol, tree=tree), atol=tol)

    def test_linear_form_on_corridor(self, corridor):
        pol = SoftmaxLinearPolicy(np.array([0.9, 0.1]), corridor.features)
        fd = finite_difference(lambda t: exact_return(corridor, pol.with_theta(t)), pol.theta)
        np.testing.assert_allclose(exact_gradient(corridor, pol, method="linear"), fd, rtol=1e-6)

    def test_unknown_method(self, corridor):
        with pytest.raises(ValueError):
            exact_gradient(corridor, SoftmaxLinearPolicy(np.zeros(2), corridor.features),
                           method="magic")


class TestFiniteDifference:
    def test_quadratic(self):
        g = finite_difference(lambda t: 0.5 * t @ t, np.array([1.0, 2.0]))
        np.testing.assert_allclose(g, [1.0, 2.0], atol=1e-8)

    def test_linear_any_step(self):
        c = np.array([3.0, -1.0, 0.5])
        for h in (1e-3, 1e-1, 1.0):
            np.testing.assert_allclose(finite_difference(lambda t: c @ t, np.zeros(3), h), c,
                                       rtol=1e-12)

    def test_bad_step(self):
        with pytest.raises(ValueError):
            finite_difference(lambda t: 0.0, np.zeros(1), 0.0)


class TestMoments:
    def test_vanilla_mean_is_gradient(self, fixtures, trees, rng):
        m, tree = fixtures[0], trees[0]
        th = rng.uniform(-1, 1, 4)
        mean, _ = estimator_moments("vanilla", m, [th], [1], CAP, tree=tree)
        exact = exact_gradient(m, SoftmaxLinearPolicy(th, m.features), tree=tree)
        np.testing.assert_allclose(mean, exact, atol=1e-10)

    def test_vanilla_batch_scaling(self, fixtures, trees, rng):
        m, tree = fixtures[1], trees[1]
        th = rng.uniform(-1, 1, 4)
        _, v1 = estimator_moments("vanilla", m, [th], [1], CAP, tree=tree)
        _, v7 = estimator_moments("vanilla", m, [th], [7], CAP, tree=tree)
        np.testing.assert_allclose(v7, v1 / 7, rtol=1e-12)

    def test_recursive_with_frozen_parameters(self, fixtures, trees):
        m, tree = fixtures[2], trees[2]
        th = np.array([0.1, -0.2, 0.3, 0.0])
        m0, v0 = estimator_moments("vanilla", m, [th], [5], CAP, tree=tree)
        m1, v1 = estimator_moments("vrmpo_recursive", m, [th, th], [5, 3], CAP, tree=tree)
        np.testing.assert_array_equal(m1, m0)
        assert v1 == v0

    def test_unknown_kind(self, fixtures, trees):
        with pytest.raises(ValueError):
            estimator_moments("svrpg_is", fixtures[0], [np.zeros(4)], [1], CAP, tree=trees[0])


class TestDiagnostics:
    def test_triangle_bound_on_every_trajectory(self, fixtures, trees, rng):
        for m, tree in zip(fixtures, trees):
            pol = SoftmaxLinearPolicy(rng.uniform(-1, 1, 4), m.features)
            w, _ = tree.weights(pol.theta)
            g = tree.gradients(pol.theta)
            dev = np.linalg.norm(g - w @ g, axis=1)
            g_norm = float(np.linalg.norm(score_matrix(pol), axis=-1).max())
            r_bound = float(np.abs(tree.returns()).max())
            bound = math.sqrt(triangle_deviation_bound(CAP, g_norm, r_bound))
            assert dev.max() <= bound

    def test_deviation_diagnostic_logs_sigma_ratio(self, fixtures, trees, caplog):
        m, tree = fixtures[0], trees[0]
        pol = SoftmaxLinearPolicy(np.array([0.3, -0.2, 0.1, 0.5]), m.features)
        with caplog.at_level("INFO", logger="mirrorpo.oracle"):
            diag = deviation_diagnostic(m, pol, CAP, tree=tree)
        assert 0.0 <= diag.mean_sq <= diag.max_sq <= diag.triangle_sq
        assert diag.sigma_ratio is not None and np.isfinite(diag.sigma_ratio)
        assert "ratio to sigma^2" in caplog.text

    def test_lipschitz_estimate_is_stable(self, fixtures):
        m = fixtures[0]

        def grad(t):
            return exact_gradient(m, SoftmaxLinearPolicy(t, m.features), method="linear")

        rng = np.random.default_rng(0)
        a = empirical_lipschitz(grad, random_pairs(4, 100, rng))
        b = empirical_lipschitz(grad, random_pairs(4, 100, rng))
        assert np.isfinite(a) and a > 0
        assert abs(a - b) <= 0.1 * max(a, b)

    def test_recursion_terms(self, fixtures, trees):
        m, tree = fixtures[0], trees[0]
        a = np.array([0.2, -0.1, 0.4, 0.0])
        same = variance_recursion_check(m, [a, a], 4, 2, CAP, tree=tree)
        np.testing.assert_allclose(same.lhs, same.prev_error, rtol=1e-12)
        assert same.step_sq == 0.0
        # a uniform shift of the tabular logits would not change the policy
        moved = variance_recursion_check(m, [a, a + np.array([0.05, -0.05, 0.0, 0.03])], 4, 2,
                                         CAP, tree=tree)
        assert moved.lhs > moved.prev_error
        assert moved.ratio <= 2.0

    def test_recursion_needs_two_points(self, fixtures, trees):
        with pytest.raises(ValueError):
            variance_recursion_check(fixtures[0], [np.zeros(4)], 1, 1, CAP, tree=trees[0])
