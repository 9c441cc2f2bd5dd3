"""Exact collision model: superpose user streams, drop events whose
neighbouring gaps fall inside the guard window, measure what is left."""

from __future__ import annotations

import numpy as np

from .analytic_model import success_probability
from .config import GuardPolicy, SystemConfig
from .errors import InvariantError
from .point_process import DeliveryOutcome, MergedStream, generate_user_stream, superpose
from .reports import SimReport, build_report, inter_success_intervals
from .rng import SplitMix64

__all__ = ["filter_collisions", "inter_success_intervals", "physical_stream", "run_physical"]


def filter_collisions(stream: MergedStream, policy: GuardPolicy) -> DeliveryOutcome:
    """Flag events whose gap(s) to neighbours exceed ``policy.window``.

    A boundary event's missing neighbour counts as non-colliding.
    """
    gaps = np.diff(stream.times)
    if np.any(gaps < 0):
        raise InvariantError("filter_collisions needs a time-sorted stream")
    clear = gaps > policy.window
    prev_ok = np.concatenate(([True], clear))
    if policy.mode == "one_sided":
        return DeliveryOutcome(stream, prev_ok[: len(stream)])
    next_ok = np.concatenate((clear, [True]))
    return DeliveryOutcome(stream, (prev_ok & next_ok)[: len(stream)])


def physical_stream(config: SystemConfig, rng: SplitMix64) -> MergedStream:
    """Total message stream of all users; each user draws from its own child generator."""
    streams = [
        generate_user_stream(u, config.gap_model_for(u.id), config.horizon, rng.spawn())
        for u in config.users
    ]
    return superpose(streams)


def run_physical(config: SystemConfig, rng: SplitMix64 | None = None) -> SimReport:
    if rng is None:
        rng = SplitMix64(config.seed)
    seed = rng.seed
    stream = physical_stream(config, rng)
    outcome = filter_collisions(stream, config.guard)
    lam = config.total_rate
    null_rate = lam * success_probability(config.airtime, lam)
    # two-sided flags share a gap with each neighbour: 1-dependent
    lag = 1 if config.guard.mode == "two_sided" else 0
    return build_report("physical", config, seed, outcome, null_rate, corr_lag=lag)
