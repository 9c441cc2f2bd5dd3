import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings, strategies as st

from aloha_lab import (
    ConfigError,
    Exponential,
    InsufficientSampleError,
    SplitMix64,
    dispersion_index,
    estimate_rate,
    ks_test_exponential,
)
from aloha_lab.stats import ks_statistic_exponential, proportion_stderr


class TestEstimateRate:
    def test_normal_interval(self):
        r = estimate_rate(100, 1000.0, 1.96)
        assert r.rate == pytest.approx(0.1)
        assert (r.ci_low, r.ci_high) == pytest.approx((0.0804, 0.1196))

    def test_zero_count(self):
        r = estimate_rate(0, 50.0)
        assert (r.rate, r.ci_low, r.ci_high) == (0.0, 0.0, 0.0)

    def test_large_count(self):
        r = estimate_rate(10**6, 1e8, 1.96)
        assert r.rate == pytest.approx(0.01)
        assert r.ci_high - r.rate == pytest.approx(1.96e-5)

    def test_clipped_at_zero(self):
        assert estimate_rate(1, 1.0, 3.0).ci_low == 0.0

    def test_bad_horizon(self):
        with pytest.raises(ConfigError):
            estimate_rate(3, 0.0)

    def test_width_shrinks_like_inverse_sqrt_count(self):
        # same rate, 100x the data -> relative half-width 10x smaller
        a, b = estimate_rate(100, 1e3), estimate_rate(10_000, 1e5)
        rel = lambda r: (r.ci_high - r.rate) / r.rate
        assert rel(a) / rel(b) == pytest.approx(10.0)


class TestKs:
    def test_single_point(self):
        r = ks_test_exponential([math.log(2)], 1.0, min_n=1)
        assert r.statistic == pytest.approx(0.5)

    def test_matches_scipy(self):
        x = Exponential(0.3).sample(SplitMix64(12), 500)
        ours = ks_statistic_exponential(x, 0.3)
        ref = scipy.stats.kstest(x, "expon", args=(0, 1 / 0.3)).statistic
        assert ours == pytest.approx(ref, abs=1e-12)

    def test_critical_values(self):
        assert ks_test_exponential(np.ones(100), 1.0, 0.05).critical == pytest.approx(0.1358)
        assert ks_test_exponential(np.ones(100), 1.0, 0.01).critical == pytest.approx(0.1628)

    def test_null_passes(self):
        rng = SplitMix64(31)
        passes = sum(ks_test_exponential(Exponential(0.0069).sample(rng, 10**4), 0.0069, 0.01).passed for _ in range(100))
        assert passes >= 97

    def test_wrong_rate_fails(self):
        x = Exponential(1.0).sample(SplitMix64(2), 10**4)
        assert not ks_test_exponential(x, 2.0, 0.01).passed

    def test_insufficient(self):
        with pytest.raises(InsufficientSampleError):
            ks_test_exponential(np.ones(49), 1.0)

    def test_bad_rate(self):
        with pytest.raises(ConfigError):
            ks_test_exponential(np.ones(60), 0.0)

    @pytest.mark.parametrize("alpha,runs", [(0.05, 500), (0.01, 2000)])
    def test_calibration(self, alpha, runs):
        rng = SplitMix64(2718)
        rejects = sum(not ks_test_exponential(Exponential(1.0).sample(rng, 200), 1.0, alpha).passed for _ in range(runs))
        assert alpha / 2 <= rejects / runs <= 2 * alpha

    @settings(max_examples=50)
    @given(st.integers(0, 2**32), st.floats(0.01, 100), st.integers(1, 60))
    def test_invariances(self, seed, scale, n):
        x = Exponential(1.0).sample(SplitMix64(seed), n)
        d = ks_statistic_exponential(x, 1.0)
        assert 0.0 <= d <= 1.0
        assert ks_statistic_exponential(x[::-1], 1.0) == d
        assert ks_statistic_exponential(np.random.default_rng(seed).permutation(x), 1.0) == d
        assert ks_statistic_exponential(x * scale, 1.0 / scale) == pytest.approx(d, abs=1e-9)


class TestDispersion:
    def test_constant(self):
        assert dispersion_index([3, 3, 3]) == 0.0

    def test_hand(self):
        assert dispersion_index([0, 2, 4]) == pytest.approx(2.0)

    @given(st.integers(1, 50), st.integers(1, 20))
    def test_two_value_balanced(self, m, reps):
        assert dispersion_index([0, 2 * m] * reps) > 1.0

    def test_poisson_counts(self):
        x = np.cumsum(Exponential(1.0).sample(SplitMix64(8), 20_000))
        counts, _ = np.histogram(x[x <= 15_000], bins=500, range=(0, 15_000))
        assert 0.9 <= dispersion_index(counts) <= 1.1

    def test_errors(self):
        with pytest.raises(ConfigError):
            dispersion_index([1])
        with pytest.raises(ValueError):
            dispersion_index([0, 0, 0])


class TestProportionStderr:
    def test_iid_matches_binomial(self):
        x = np.array([1, 0] * 500)
        assert proportion_stderr(x) == pytest.approx(math.sqrt(0.25 / 1000))

    def test_lag_term_for_one_dependent(self):
        # 1-dependent product of neighbouring Bernoulli(q) gaps: exact variance
        q = 0.6
        rng = np.random.default_rng(0)
        n = 400_000
        g = rng.random(n + 1) < q
        x = g[:-1] & g[1:]
        exact = math.sqrt((q**2 - q**4 + 2 * (q**3 - q**4)) / n)
        assert proportion_stderr(x, max_lag=1) == pytest.approx(exact, rel=0.02)
        assert proportion_stderr(x) < 0.9 * exact
