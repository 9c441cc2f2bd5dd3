"""SimReport: what one simulation run produced, plus its JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import SystemConfig
from .errors import InsufficientSampleError
from .point_process import DeliveryOutcome, attribute
from .stats import KsResult, RateEstimate, estimate_rate, ks_test_exponential, proportion_stderr

SIG_DIGITS = 9


def round_sig(x: float, digits: int = SIG_DIGITS):
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{digits}g}")


def _round_tree(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, dict):
        return {k: _round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(payload: dict, config: SystemConfig | None = None) -> str:
    """JSON with measured numbers at 9 significant digits.

    A ``config`` entry is written at full precision so that it can be fed
    back to reproduce the report.
    """
    body = _round_tree(payload)
    if config is not None:
        body["config"] = config.to_dict()
    return json.dumps(body, indent=2, sort_keys=False) + "\n"


@dataclass
class UserResult:
    id: int
    rate: float
    sent: int
    delivered: int
    delivered_rate: RateEstimate

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "rate": self.rate,
            "sent": self.sent,
            "delivered": self.delivered,
            "delivered_rate": self.delivered_rate.to_dict(),
        }


@dataclass
class SimReport:
    model: str
    config: SystemConfig
    seed: int
    users: list[UserResult]
    sent: int
    delivered: int
    delivered_fraction: float
    fraction_stderr: float
    interior_sent: int
    interior_delivered: int
    interior_fraction: float
    interior_stderr: float
    intervals: np.ndarray = field(repr=False)
    interval_ks: KsResult | None
    outcome: DeliveryOutcome = field(repr=False)

    @property
    def horizon(self) -> float:
        return self.config.horizon

    @property
    def throughput(self) -> float:
        return self.delivered / self.config.horizon

    @property
    def min_interval(self) -> float:
        return float(self.intervals.min()) if len(self.intervals) else math.inf

    @property
    def mean_interval(self) -> float:
        return float(self.intervals.mean()) if len(self.intervals) else math.nan

    def user(self, uid: int) -> UserResult:
        for u in self.users:
            if u.id == uid:
                return u
        raise KeyError(uid)

    def to_dict(self) -> dict[str, Any]:
        iv = self.intervals
        return {
            "model": self.model,
            "seed": self.seed,
            "totals": {
                "sent": self.sent,
                "delivered": self.delivered,
                "delivered_fraction": self.delivered_fraction,
                "fraction_stderr": self.fraction_stderr,
                "interior_sent": self.interior_sent,
                "interior_delivered": self.interior_delivered,
                "interior_fraction": self.interior_fraction,
                "interior_stderr": self.interior_stderr,
                "throughput": self.throughput,
            },
            "users": [u.to_dict() for u in self.users],
            "intervals": {
                "n": int(len(iv)),
                "mean": float(iv.mean()) if len(iv) else None,
                "min": float(iv.min()) if len(iv) else None,
                "max": float(iv.max()) if len(iv) else None,
            },
            "interval_ks": self.interval_ks.to_dict() if self.interval_ks else None,
        }

    def to_json(self, version: str | None = None) -> str:
        payload = {"version": version} if version else {}
        payload.update(self.to_dict())
        return dumps(payload, self.config)


def inter_success_intervals(outcome: DeliveryOutcome) -> np.ndarray:
    """Gaps between consecutive delivered events (empty below two deliveries)."""
    return np.diff(outcome.delivered_times)


def build_report(
    model: str,
    config: SystemConfig,
    seed: int,
    outcome: DeliveryOutcome,
    interval_null_rate: float,
    corr_lag: int = 0,
    z: float = 1.96,
    ks_alpha: float = 0.01,
) -> SimReport:
    stream = outcome.stream
    flags = outcome.delivered
    n = len(stream)
    users = []
    for u in config.users:
        sent = int(np.count_nonzero(stream.users == u.id))
        got = len(attribute(outcome, u.id))
        users.append(UserResult(u.id, u.rate, sent, got, estimate_rate(got, config.horizon, z)))

    interior = flags[1:-1] if n > 2 else flags[:0]
    intervals = inter_success_intervals(outcome)
    try:
        ks = ks_test_exponential(intervals, interval_null_rate, ks_alpha)
    except InsufficientSampleError:
        ks = None

    delivered = outcome.n_delivered
    return SimReport(
        model=model,
        config=config,
        seed=seed,
        users=users,
        sent=n,
        delivered=delivered,
        delivered_fraction=delivered / n if n else math.nan,
        fraction_stderr=proportion_stderr(flags, corr_lag),
        interior_sent=len(interior),
        interior_delivered=int(np.count_nonzero(interior)),
        interior_fraction=float(interior.mean()) if len(interior) else math.nan,
        interior_stderr=proportion_stderr(interior, corr_lag),
        intervals=intervals,
        interval_ks=ks,
        outcome=outcome,
    )
