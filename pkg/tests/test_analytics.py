import math

import numpy as np
import pytest

from seqchsh import analytics as an
from seqchsh.errors import DomainError
from seqchsh.measurements import default_bundle
from seqchsh.sequential import ScenarioConfig, run_scenario
from seqchsh.states import k_param, make_spec, pair_slack

SQRT2, SQRT5, SQRT10 = math.sqrt(2), math.sqrt(5), math.sqrt(10)
P_LOW_K1 = (2 * SQRT5 - 4) / (2 * SQRT10 - 4)
P_HIGH_K1 = (SQRT5 - 2) / (SQRT5 - SQRT2)


def spec_with_K(K):
    """Two-level spec with 2 c1 c2 = K."""
    a, b = math.sqrt(1 + K), math.sqrt(1 - K)
    return make_spec([(a + b) / 2, (a - b) / 2], 2, 2)


class TestBounds:
    def test_case1_optimum_bell(self):
        assert an.bound_s1_case1(math.atan(1), 1.0) == pytest.approx(2 * SQRT2, abs=1e-15)

    @pytest.mark.parametrize("K", [0.1, 0.5, 1.0])
    def test_theta_zero(self, K):
        assert an.bound_s1_case1(0.0, K) == 2.0
        assert an.bound_s2_case1(0.0, K) == 1.0
        assert an.bound_s1_case2(0.0, K) == 0.0
        assert an.bound_s2_case2(0.0, K) == 1.0

    def test_case1_against_simulation(self):
        K, theta = 0.6, 0.3
        spec = spec_with_K(K)
        assert k_param(spec) == pytest.approx(K, abs=1e-14)
        rep = run_scenario(ScenarioConfig(spec, default_bundle(spec, theta, theta, 0.5)))
        assert rep.s(1, 1) == pytest.approx(an.bound_s1_case1(theta, K), abs=1e-9)
        assert rep.s(2, 1) == pytest.approx(an.bound_s2_case1(theta, K), abs=1e-9)
        assert rep.s(2, 2) == pytest.approx(an.bound_s2_case2(theta, K), abs=1e-9)
        assert rep.s(1, 2) >= an.bound_s1_case2(theta, K)

    def test_case2_optimum(self):
        theta = math.atan(2)
        assert an.bound_s2_case2(theta, 1.0) == pytest.approx(SQRT5, abs=1e-15)
        assert an.bound_s1_case2(theta, 1.0) == pytest.approx(4 / SQRT5, abs=1e-15)

    def test_case2_right_angle(self):
        assert an.bound_s1_case2(math.pi / 2, 0.8) == pytest.approx(1.6, abs=1e-15)
        assert an.bound_s2_case2(math.pi / 2, 0.8) == pytest.approx(1.6, abs=1e-15)

    def test_halving_exact(self):
        thetas = np.linspace(0, math.pi / 2, 1001)
        for K in (0.1, 0.37, 1.0):
            np.testing.assert_array_equal(an.bound_s2_case1(thetas, K),
                                          an.bound_s1_case1(thetas, K) / 2)


class TestTradeoff:
    def test_limits(self):
        assert an.tradeoff_case2(0.0, 0.4) == pytest.approx(1.0, abs=1e-15)
        assert an.tradeoff_case2(0.8, 0.4) == pytest.approx(0.8, abs=1e-15)

    def test_bell_optimum(self):
        assert an.tradeoff_case2(4 / SQRT5, 1.0) == pytest.approx(SQRT5, abs=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            an.tradeoff_case2(2.1, 1.0)

    def test_identity_grid(self):
        thetas = np.linspace(0, math.pi / 2, 1000)
        for K in np.arange(1, 11) / 10:
            for th in thetas:
                s1 = min(an.bound_s1_case2(th, K), 2 * K)
                assert abs(an.tradeoff_case2(s1, K) - an.bound_s2_case2(th, K)) <= 1e-12


class TestOptimalTheta:
    def test_values(self):
        assert an.optimal_theta(1, 1.0) == pytest.approx((math.pi / 4, 2 * SQRT2), abs=1e-15)
        assert an.optimal_theta(2, 1.0) == pytest.approx((math.atan(2), SQRT5), abs=1e-15)

    def test_separable_limit(self):
        theta, val = an.optimal_theta(1, 1e-9)
        assert theta == pytest.approx(0.0, abs=1e-8)
        assert val == pytest.approx(2.0, abs=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            an.optimal_theta(1, 0.0)
        with pytest.raises(DomainError):
            an.optimal_theta(3, 0.5)

    @pytest.mark.parametrize("K", [0.2, 0.55, 0.9, 1.0])
    def test_grid_scan_oracle(self, K):
        thetas = np.linspace(0, math.pi / 2, 100_000)
        h = thetas[1] - thetas[0]
        for case, fn in ((1, an.bound_s1_case1), (2, an.bound_s2_case2)):
            vals = fn(thetas, K)
            theta, best = an.optimal_theta(case, K)
            assert abs(thetas[np.argmax(vals)] - theta) <= h
            assert best >= vals.max() - 1e-12


class TestMixed:
    def test_quarter(self):
        s1, s2 = an.mixed_scores(0.25, 1.0)
        assert s1 == pytest.approx(0.5 * SQRT2 + 0.75 * 4 / SQRT5, abs=1e-15)
        assert s2 == pytest.approx(0.25 * SQRT2 + 0.75 * SQRT5, abs=1e-15)
        assert (s1, s2) == pytest.approx((2.04875, 2.03061), abs=1e-5)

    def test_endpoints(self):
        assert an.mixed_scores(1.0, 1.0) == pytest.approx((2 * SQRT2, SQRT2), abs=1e-15)
        assert an.mixed_scores(0.0, 1.0) == pytest.approx((4 / SQRT5, SQRT5), abs=1e-15)

    @pytest.mark.parametrize("d", [2, 4, 6, 8])
    @pytest.mark.parametrize("p", [0.0, 0.2, 0.5, 1.0])
    def test_matches_simulation_for_equal_pairs(self, d, p):
        spec = make_spec([1] * d, d, d)
        rep = run_scenario(ScenarioConfig(spec, default_bundle(spec, mix_p=p)))
        s1, s2 = an.mixed_scores(p, k_param(spec))
        assert rep.s_mixed(1) == pytest.approx(s1, abs=1e-9)
        assert rep.s_mixed(2) == pytest.approx(s2, abs=1e-9)

    def test_simulation_dominates_with_slack(self, rng):
        for _ in range(20):
            d = int(rng.choice([2, 4, 6]))
            spec = make_spec(rng.random(d) + 0.05, d, d)
            assert pair_slack(spec) > 0
            p = float(rng.random())
            rep = run_scenario(ScenarioConfig(spec, default_bundle(spec, mix_p=p)))
            assert rep.s_mixed(1) >= an.mixed_scores(p, k_param(spec))[0] - 1e-12


class TestFeasible:
    def test_bell_interval(self):
        iv = an.feasible_interval(1.0)
        assert iv.nonempty
        assert iv.p_low == pytest.approx(P_LOW_K1, abs=1e-12)
        assert iv.p_high == pytest.approx(P_HIGH_K1, abs=1e-12)
        assert (iv.p_low, iv.p_high) == pytest.approx((0.20311, 0.28724), abs=1e-5)

    @pytest.mark.parametrize("K", [0.5, math.sqrt(3) / 2, 0.95])
    def test_empty(self, K):
        assert not an.feasible_interval(K).nonempty

    def test_k095_values(self):
        iv = an.feasible_interval(0.95)
        assert iv.p_low == pytest.approx(0.296, abs=1e-3)
        assert iv.p_high == pytest.approx(0.192, abs=1e-3)

    @pytest.mark.parametrize("K", np.linspace(0.9, 1.0, 11))
    def test_endpoint_residuals(self, K):
        iv = an.feasible_interval(K)
        assert abs(an.mixed_scores(iv.p_low, K)[0] - 2) <= 1e-10
        assert abs(an.mixed_scores(iv.p_high, K)[1] - 2) <= 1e-10

    def test_endpoints_by_bisection(self):
        lo = an.bisect(lambda p: an.mixed_scores(p, 1.0)[0] - 2, 0, 1)
        hi = an.bisect(lambda p: an.mixed_scores(p, 1.0)[1] - 2, 0, 1)
        assert lo == pytest.approx(P_LOW_K1, abs=1e-11)
        assert hi == pytest.approx(P_HIGH_K1, abs=1e-11)


class TestCriticalK:
    def test_value(self):
        kc = an.critical_K()
        assert 0.97 < kc < 0.98
        # frozen from a dense scan of p_low - p_high (see test_dense_scan)
        assert kc == pytest.approx(0.97750178, abs=1e-8)

    def test_dense_scan(self):
        Ks = np.linspace(0.9, 1.0, 100_001)
        nonempty = [an.feasible_interval(float(k)).nonempty for k in Ks[::100]]
        first = Ks[::100][nonempty.index(True)]
        assert abs(first - an.critical_K()) <= 1e-4

    def test_sides(self):
        kc = an.critical_K()
        assert an.feasible_interval(kc + 1e-8).nonempty
        assert not an.feasible_interval(kc - 1e-8).nonempty


class TestOptimize:
    def test_bell_beats_paper_mixing(self):
        res = an.optimize_min_violation(1.0, 32)
        assert res.min_score >= 2.03061
        s1, s2 = an.free_angle_scores(res.theta1, res.theta2, res.p, 1.0)
        assert min(s1, s2) == pytest.approx(res.min_score, abs=1e-15)

    def test_weak_entanglement_no_violation(self):
        assert an.optimize_min_violation(0.5, 16).min_score < 2

    def test_refinement_monotone(self):
        assert (an.optimize_min_violation(1.0, 64).min_score
                >= an.optimize_min_violation(1.0, 8).min_score)

    def test_coarse_grid_superset(self):
        coarse = an.optimize_min_violation(1.0, 8, refine_rounds=0)
        fine = an.optimize_min_violation(1.0, 64, refine_rounds=0)
        assert fine.min_score >= coarse.min_score

    def test_deterministic(self):
        assert an.optimize_min_violation(0.9, 16) == an.optimize_min_violation(0.9, 16)

    def test_grid_minimum(self):
        with pytest.raises(DomainError):
            an.optimize_min_violation(1.0, 7)


def test_canonical_scores_match_closed_forms_for_equal_pairs():
    c = [1 / math.sqrt(2)] * 2
    theta = 0.4
    exact = an.canonical_scores(theta, c)
    assert exact[(1, 1)] == pytest.approx(an.bound_s1_case1(theta, 1.0), abs=1e-15)
    assert exact[(2, 2)] == pytest.approx(an.bound_s2_case2(theta, 1.0), abs=1e-15)
