import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aloha_lab import (
    ConfigError,
    SystemConfig,
    UserSpec,
    duty_cycle_feasible,
    mean_interval_bounds,
    optimal_load,
    per_user_success_rate,
    run_simplified,
    success_probability,
    summarize,
    total_rate,
)
from aloha_lab.analytic_model import equal_rate_success_rate, throughput

# 30-digit mpmath evaluations
P_1_HALF = 0.367879441171442321595523770161
P_1_0007 = 0.986097544262861903476722832192


def users(*rates):
    return [UserSpec(i, r) for i, r in enumerate(rates)]


class TestTotalRate:
    def test_sum(self):
        assert total_rate(users(0.001, 0.002, 0.004)) == pytest.approx(0.007, rel=1e-15)

    def test_homogeneous(self):
        assert total_rate(users(*[0.003] * 10)) == pytest.approx(0.03, rel=1e-15)

    def test_single(self):
        assert total_rate(users(0.25)) == 0.25

    def test_empty(self):
        with pytest.raises(ConfigError):
            total_rate([])


class TestSuccessProbability:
    def test_values(self):
        assert success_probability(0.0, 0.3) == 1.0
        assert success_probability(1.0, 0.5) == pytest.approx(P_1_HALF, rel=1e-14)
        assert success_probability(1.0, 0.007) == pytest.approx(P_1_0007, rel=1e-14)

    def test_bad_rate(self):
        with pytest.raises(ConfigError):
            success_probability(1.0, 0.0)

    @given(st.floats(0.01, 10), st.floats(1e-4, 1), st.floats(1.01, 2))
    def test_strictly_decreasing(self, q, lam, k):
        p = success_probability(q, lam)
        assert 0 < p < 1
        assert success_probability(q * k, lam) < p
        assert success_probability(q, lam * k) < p


class TestPerUser:
    def test_value(self):
        assert per_user_success_rate(UserSpec(0, 0.002), 1.0, 0.007) == pytest.approx(
            0.00197219508852572380695344566438, rel=1e-13
        )

    def test_single_user_is_total(self):
        assert per_user_success_rate(UserSpec(0, 0.3), 1.0, 0.3) == pytest.approx(throughput(1.0, 0.3))

    def test_equal_rates(self):
        n, lam, q = 10, 0.003, 1.0
        us = users(*[lam] * n)
        big = total_rate(us)
        assert per_user_success_rate(us[0], q, big) == pytest.approx(lam * math.exp(-2 * n * q * lam), rel=1e-13)
        assert equal_rate_success_rate(lam, n, q) == pytest.approx(lam * math.exp(-2 * n * q * lam), rel=1e-15)

    def test_rate_above_total(self):
        with pytest.raises(ConfigError):
            per_user_success_rate(UserSpec(0, 0.5), 1.0, 0.4)

    @given(st.lists(st.floats(1e-4, 1.0), min_size=1, max_size=20), st.floats(0, 10))
    def test_rates_sum_to_total_success_rate(self, rates, q):
        us = users(*rates)
        lam = total_rate(us)
        s = math.fsum(per_user_success_rate(u, q, lam) for u in us)
        assert s == pytest.approx(lam * success_probability(q, lam), rel=1e-12)


class TestDutyCycle:
    @pytest.mark.parametrize("rate,expected", [(0.01, True), (0.02, False), (0.005, True)])
    def test_cases(self, rate, expected):
        assert duty_cycle_feasible(UserSpec(0, rate), 1.0, 100) is expected


class TestBounds:
    def test_values(self):
        b = mean_interval_bounds(1.0, 0.007, [UserSpec(0, 0.002)])
        assert b.mean_interval == pytest.approx(144.871208419784620758, rel=1e-12)
        assert b.lower_bound == pytest.approx(144.857142857142857142, rel=1e-13)
        assert b.mean_interval >= b.lower_bound
        assert b.per_user_bound[0] == pytest.approx(507.0, rel=1e-13)
        assert b.per_user_mean[0] == pytest.approx(507.049229469246172653, rel=1e-12)

    def test_equality_at_zero_airtime(self):
        b = mean_interval_bounds(0.0, 0.25)
        assert b.mean_interval == b.lower_bound == 4.0

    @given(st.floats(1e-3, 10), st.floats(1e-4, 1))
    def test_slack_nonnegative(self, q, lam):
        b = mean_interval_bounds(q, lam)
        assert b.mean_interval - b.lower_bound >= -1e-12 * b.mean_interval


class TestOptimalLoad:
    @pytest.mark.parametrize("q", [1.0, 0.5, 3.0])
    def test_grid_search(self, q):
        lam_star, s_max = optimal_load(q)
        grid = np.linspace(1e-4, 5 / q, 10_001)
        s = grid * np.exp(-2 * q * grid)
        step = grid[1] - grid[0]
        assert abs(grid[s.argmax()] - lam_star) <= step
        assert s_max == pytest.approx(s.max(), rel=1e-6)

    def test_values(self):
        assert optimal_load(1.0) == pytest.approx((0.5, 0.183939720585721160797))
        assert optimal_load(0.5)[0] == 1.0

    def test_is_maximum(self):
        lam, s = optimal_load(1.0)
        assert throughput(1.0, lam) > throughput(1.0, 0.9 * lam)
        assert throughput(1.0, lam) > throughput(1.0, 1.1 * lam)

    def test_bad_airtime(self):
        with pytest.raises(ConfigError):
            optimal_load(0.0)


class TestSummary:
    def test_invariants(self, hetero_config):
        s = summarize(hetero_config)
        assert s.total_rate == pytest.approx(0.007)
        assert s.success_probability == pytest.approx(math.exp(-2 * s.total_rate))
        assert s.mean_success_interval == pytest.approx(1 / (s.total_rate * s.success_probability))
        assert s.mean_success_interval >= s.mean_interval_lower_bound
        assert all(s.duty_feasible.values())


class TestRunSimplified:
    def test_per_user_rates(self, hetero_config):
        r = run_simplified(hetero_config)
        expected = [0.000986097544262862, 0.00197219508852572, 0.00394439017705145]
        for u, lam_p in zip(r.users, expected):
            sigma = math.sqrt(lam_p * hetero_config.horizon) / hetero_config.horizon
            assert abs(u.delivered_rate.rate - lam_p) <= 3 * sigma

    def test_intervals_exponential(self, hetero_config):
        r = run_simplified(hetero_config)
        assert r.interval_ks is not None and r.interval_ks.passed

    def test_zero_airtime_keeps_everything(self):
        cfg = SystemConfig(users=tuple(users(0.2, 0.3)), airtime=0.0, horizon=1e4, seed=5)
        r = run_simplified(cfg)
        assert r.delivered == r.sent and r.delivered_fraction == 1.0
        assert abs(r.sent - 5000) < 4 * math.sqrt(5000)

    @pytest.mark.parametrize("seed", range(5))
    def test_binomial_fraction(self, seed):
        cfg = SystemConfig(users=tuple(users(0.05, 0.1)), airtime=1.0, horizon=2e5, seed=seed)
        r = run_simplified(cfg)
        p = math.exp(-0.3)
        assert r.sent >= 10**4
        assert abs(r.delivered_fraction - p) <= 3 * math.sqrt(p * (1 - p) / r.sent)

    @pytest.mark.parametrize("lam", [0.01, 0.1, 0.5, 1.0])
    def test_mean_interval_exceeds_two_airtimes(self, lam):
        cfg = SystemConfig(users=tuple(users(lam / 2, lam / 2)), airtime=1.0, horizon=2e5, seed=1)
        assert run_simplified(cfg).mean_interval > 2.0
