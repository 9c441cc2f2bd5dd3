"""Rate estimates, KS exponentiality test and dispersion checks."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError, InsufficientSampleError

# Asymptotic two-sided KS coefficients.
KS_COEFFICIENTS = {0.05: 1.358, 0.01: 1.628}
KS_MIN_N = 50


@dataclass(frozen=True)
class RateEstimate:
    rate: float
    ci_low: float
    ci_high: float
    count: int
    horizon: float

    def contains(self, value: float) -> bool:
        return self.ci_low <= value <= self.ci_high

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_rate(count: int, horizon: float, z: float = 1.96) -> RateEstimate:
    """Poisson rate ``count/horizon`` with a normal-approximation interval."""
    if not horizon > 0:
        raise ConfigError(f"horizon must be > 0, got {horizon!r}")
    if count < 0:
        raise ConfigError(f"count must be >= 0, got {count!r}")
    if not z > 0:
        raise ConfigError(f"z must be > 0, got {z!r}")
    rate = count / horizon
    half = z * math.sqrt(count) / horizon
    return RateEstimate(rate, max(rate - half, 0.0), rate + half, int(count), float(horizon))


@dataclass(frozen=True)
class KsResult:
    n: int
    statistic: float
    critical: float
    alpha: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "statistic": self.statistic,
            "critical": self.critical,
            "alpha": self.alpha,
            "pass": self.passed,
        }


def ks_coefficient(alpha: float) -> float:
    if alpha in KS_COEFFICIENTS:
        return KS_COEFFICIENTS[alpha]
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha!r}")
    return math.sqrt(-0.5 * math.log(alpha / 2.0))


def ks_statistic_exponential(samples, rate: float) -> float:
    x = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(x)
    cdf = -np.expm1(-rate * x)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    return float(max(d_plus, d_minus))


def ks_test_exponential(samples, rate: float, alpha: float = 0.01, min_n: int = KS_MIN_N) -> KsResult:
    """One-sample KS test of ``samples`` against Exponential(``rate``).

    The rate is the specified null value, not fitted, so the asymptotic
    critical value ``c(alpha)/sqrt(n)`` applies without Lilliefors correction.
    """
    if not (math.isfinite(rate) and rate > 0):
        raise ConfigError(f"rate must be > 0, got {rate!r}")
    n = len(samples)
    if n < max(min_n, 1):
        raise InsufficientSampleError(f"KS test needs at least {min_n} samples, got {n}")
    d = ks_statistic_exponential(samples, rate)
    critical = ks_coefficient(alpha) / math.sqrt(n)
    return KsResult(n, d, critical, alpha, d < critical)


def dispersion_index(counts) -> float:
    """Variance-to-mean ratio of bin counts (sample variance, n-1 denominator)."""
    c = np.asarray(counts, dtype=np.float64)
    if len(c) < 2:
        raise ConfigError("dispersion index needs at least 2 bins")
    mean = c.mean()
    if mean == 0:
        raise ValueError("dispersion index undefined for zero mean count")
    return float(c.var(ddof=1) / mean)


def proportion_stderr(flags, max_lag: int = 0) -> float:
    """Standard error of the mean of 0/1 indicators.

    With ``max_lag > 0`` the sample autocovariances up to that lag are added,
    which is the right variance for m-dependent indicators such as
    neighbour-gap collision flags.
    """
    x = np.asarray(flags, dtype=np.float64)
    n = len(x)
    if n == 0:
        return float("nan")
    d = x - x.mean()
    var = float(d @ d) / n
    for lag in range(1, min(max_lag, n - 1) + 1):
        var += 2.0 * float(d[:-lag] @ d[lag:]) / n
    return math.sqrt(max(var, 0.0) / n)
