"""Closed-form thinning model and its simulator.

The total stream is Poisson with rate ``Lambda = sum(rates)``; each message
survives with ``p = exp(-2 Q Lambda)`` and belongs to user ``i`` with
probability ``rate_i / Lambda``, so user ``i`` delivers at ``rate_i * p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .config import SystemConfig
from .errors import ConfigError
from .point_process import Exponential, MergedStream, UserSpec, assign_marks, bernoulli_thin, renewal_times
from .reports import SimReport, build_report
from .rng import SplitMix64


def total_rate(users: Sequence[UserSpec]) -> float:
    if not users:
        raise ConfigError("total_rate needs at least one user")
    return math.fsum(u.rate for u in users)


def success_probability(airtime: float, lam: float) -> float:
    if airtime < 0:
        raise ConfigError(f"airtime must be >= 0, got {airtime!r}")
    if not lam > 0:
        raise ConfigError(f"total rate must be > 0, got {lam!r}")
    return math.exp(-2.0 * airtime * lam)


def per_user_success_rate(user: UserSpec, airtime: float, lam: float) -> float:
    if user.rate > lam * (1 + 1e-12):
        raise ConfigError(f"user {user.id}: rate {user.rate!r} exceeds total rate {lam!r}")
    return user.rate * success_probability(airtime, lam)


def equal_rate_success_rate(rate: float, n_users: int, airtime: float) -> float:
    """Per-user delivered rate when all ``n_users`` send at ``rate``."""
    return rate * math.exp(-2.0 * n_users * airtime * rate)


def duty_cycle_feasible(user: UserSpec, airtime: float, factor: float = 100.0) -> bool:
    if airtime == 0:
        return True
    return user.rate <= 1.0 / (factor * airtime)


@dataclass(frozen=True)
class IntervalBounds:
    mean_interval: float
    lower_bound: float
    per_user_mean: dict[int, float]
    per_user_bound: dict[int, float]


def mean_interval_bounds(airtime: float, lam: float, users: Sequence[UserSpec] = ()) -> IntervalBounds:
    """Mean gap between deliveries next to its lower bound from ``e^x >= 1 + x``."""
    p = success_probability(airtime, lam)
    return IntervalBounds(
        mean_interval=1.0 / (lam * p),
        lower_bound=2.0 * airtime + 1.0 / lam,
        per_user_mean={u.id: 1.0 / (u.rate * p) for u in users},
        per_user_bound={u.id: 2.0 * airtime * lam / u.rate + 1.0 / u.rate for u in users},
    )


def throughput(airtime: float, lam: float) -> float:
    return lam * success_probability(airtime, lam)


def optimal_load(airtime: float) -> tuple[float, float]:
    """Load maximising ``lam * exp(-2 Q lam)`` and the maximum itself."""
    if not airtime > 0:
        raise ConfigError(f"airtime must be > 0, got {airtime!r}")
    return 1.0 / (2.0 * airtime), 1.0 / (2.0 * math.e * airtime)


@dataclass(frozen=True)
class AnalyticSummary:
    total_rate: float
    success_probability: float
    per_user_success_rate: dict[int, float]
    mean_success_interval: float
    mean_interval_lower_bound: float
    per_user_bounds: dict[int, float]
    duty_feasible: dict[int, bool]

    def to_dict(self) -> dict:
        return {
            "total_rate": self.total_rate,
            "success_probability": self.success_probability,
            "throughput": self.total_rate * self.success_probability,
            "mean_success_interval": self.mean_success_interval,
            "mean_interval_lower_bound": self.mean_interval_lower_bound,
            "users": [
                {
                    "id": uid,
                    "success_rate": rate,
                    "mean_interval_bound": self.per_user_bounds[uid],
                    "duty_feasible": self.duty_feasible[uid],
                }
                for uid, rate in self.per_user_success_rate.items()
            ],
        }


def summarize(config: SystemConfig) -> AnalyticSummary:
    lam = total_rate(config.users)
    q = config.airtime
    bounds = mean_interval_bounds(q, lam, config.users)
    return AnalyticSummary(
        total_rate=lam,
        success_probability=success_probability(q, lam),
        per_user_success_rate={u.id: per_user_success_rate(u, q, lam) for u in config.users},
        mean_success_interval=bounds.mean_interval,
        mean_interval_lower_bound=bounds.lower_bound,
        per_user_bounds=bounds.per_user_bound,
        duty_feasible={u.id: duty_cycle_feasible(u, q, config.duty_cycle_factor) for u in config.users},
    )


def simplified_stream(config: SystemConfig, rng: SplitMix64) -> MergedStream:
    """One Poisson(Lambda) stream whose events are marked by user share."""
    lam = config.total_rate
    times = renewal_times(Exponential(lam), config.horizon, rng.spawn())
    marks = assign_marks(len(times), [u.rate for u in config.users], config.user_ids, rng.spawn())
    return MergedStream(times, marks, config.horizon)


def run_simplified(config: SystemConfig, rng: SplitMix64 | None = None) -> SimReport:
    """Simulate the thinning model: Poisson total stream, marks, Bernoulli survival."""
    if rng is None:
        rng = SplitMix64(config.seed)
    seed = rng.seed
    lam = config.total_rate
    p = success_probability(config.airtime, lam)
    stream = simplified_stream(config, rng)
    outcome = bernoulli_thin(stream, p, rng.spawn())
    return build_report("simplified", config, seed, outcome, lam * p)
