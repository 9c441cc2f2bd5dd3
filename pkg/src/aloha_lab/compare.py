"""Side-by-side check of the collision simulator against the thinning model."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .analytic_model import AnalyticSummary
from .errors import ConfigError, InsufficientSampleError
from .reports import SimReport, dumps
from .stats import KsResult, RateEstimate, ks_test_exponential


def _rel(value: float, reference: float) -> float:
    if reference == 0:
        return math.nan
    return (value - reference) / reference


@dataclass(frozen=True)
class UserComparison:
    id: int
    predicted_rate: float
    physical: RateEstimate
    simplified: RateEstimate

    @property
    def rel_error_physical(self) -> float:
        return _rel(self.physical.rate, self.predicted_rate)

    @property
    def rel_error_simplified(self) -> float:
        return _rel(self.simplified.rate, self.predicted_rate)

    @property
    def rel_diff_models(self) -> float:
        """Physical relative to simplified; 0 when both runs agree exactly."""
        return _rel(self.physical.rate, self.simplified.rate)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "predicted_rate": self.predicted_rate,
            "physical": self.physical.to_dict(),
            "simplified": self.simplified.to_dict(),
            "rel_error_physical": self.rel_error_physical,
            "rel_error_simplified": self.rel_error_simplified,
            "rel_diff_models": self.rel_diff_models,
        }


@dataclass(frozen=True)
class ComparisonReport:
    physical: SimReport
    simplified: SimReport
    analytic: AnalyticSummary
    users: list[UserComparison]
    ks_physical: KsResult | None
    ks_simplified: KsResult | None

    @property
    def predicted_p(self) -> float:
        return self.analytic.success_probability

    @property
    def physical_fraction(self) -> float:
        return self.physical.interior_fraction

    @property
    def simplified_fraction(self) -> float:
        return self.simplified.delivered_fraction

    @property
    def guard_window(self) -> float:
        return self.physical.config.guard.window

    @property
    def physical_min_interval_exceeds_guard(self) -> bool:
        return self.physical.min_interval > self.guard_window

    @property
    def simplified_min_interval_exceeds_guard(self) -> bool:
        return self.simplified.min_interval > self.guard_window

    def to_dict(self) -> dict:
        def ks(r):
            return r.to_dict() if r is not None else None

        return {
            "seeds": {"physical": self.physical.seed, "simplified": self.simplified.seed},
            "analytic": self.analytic.to_dict(),
            "predicted_p": self.predicted_p,
            "physical_fraction": self.physical_fraction,
            "physical_fraction_stderr": self.physical.interior_stderr,
            "simplified_fraction": self.simplified_fraction,
            "simplified_fraction_stderr": self.simplified.fraction_stderr,
            "users": [u.to_dict() for u in self.users],
            "intervals": {
                "physical": {
                    "n": len(self.physical.intervals),
                    "mean": self.physical.mean_interval,
                    "min": self.physical.min_interval,
                    "min_exceeds_guard": self.physical_min_interval_exceeds_guard,
                    "ks": ks(self.ks_physical),
                },
                "simplified": {
                    "n": len(self.simplified.intervals),
                    "mean": self.simplified.mean_interval,
                    "min": self.simplified.min_interval,
                    "min_exceeds_guard": self.simplified_min_interval_exceeds_guard,
                    "ks": ks(self.ks_simplified),
                },
            },
        }

    def to_json(self, version: str | None = None) -> str:
        payload = {"version": version} if version else {}
        payload.update(self.to_dict())
        return dumps(payload, self.physical.config)

    def summary(self) -> str:
        lines = [
            f"predicted p            {self.predicted_p:.6f}",
            f"physical fraction      {self.physical_fraction:.6f} +/- {self.physical.interior_stderr:.6f}",
            f"simplified fraction    {self.simplified_fraction:.6f} +/- {self.simplified.fraction_stderr:.6f}",
            "user  predicted      physical       simplified     rel_err_phys  rel_err_simp",
        ]
        for u in self.users:
            lines.append(
                f"{u.id:<5d} {u.predicted_rate:<14.6g} {u.physical.rate:<14.6g} {u.simplified.rate:<14.6g} "
                f"{u.rel_error_physical:<+13.4f} {u.rel_error_simplified:+.4f}"
            )
        for name, r in (("physical", self.ks_physical), ("simplified", self.ks_simplified)):
            if r is None:
                lines.append(f"KS {name:<11} skipped (too few intervals)")
            else:
                verdict = "pass" if r.passed else "fail"
                lines.append(f"KS {name:<11} D={r.statistic:.5f} crit={r.critical:.5f} n={r.n} {verdict}")
        lines.append(
            f"physical min interval > guard ({self.guard_window:g}): {self.physical_min_interval_exceeds_guard}"
        )
        return "\n".join(lines) + "\n"


def _ks_or_none(samples, rate: float, alpha: float) -> KsResult | None:
    try:
        return ks_test_exponential(samples, rate, alpha)
    except InsufficientSampleError:
        return None


def compare_models(
    physical: SimReport, simplified: SimReport, analytic: AnalyticSummary, alpha: float = 0.01
) -> ComparisonReport:
    if not physical.config.equivalent(simplified.config):
        raise ConfigError("physical and simplified reports come from different configurations")
    null_rate = analytic.total_rate * analytic.success_probability
    users = [
        UserComparison(
            id=u.id,
            predicted_rate=analytic.per_user_success_rate[u.id],
            physical=u.delivered_rate,
            simplified=simplified.user(u.id).delivered_rate,
        )
        for u in physical.users
    ]
    return ComparisonReport(
        physical=physical,
        simplified=simplified,
        analytic=analytic,
        users=users,
        ks_physical=_ks_or_none(physical.intervals, null_rate, alpha),
        ks_simplified=_ks_or_none(simplified.intervals, null_rate, alpha),
    )
