"""Renewal streams, superposition, Bernoulli thinning and attribution.

Streams are held as parallel numpy arrays (times, user ids) rather than lists
of event objects; every operation here is a vectorised pass over them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .errors import ConfigError, InvariantError
from .rng import SplitMix64


@dataclass(frozen=True)
class UserSpec:
    id: int
    rate: float

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, (int, np.integer)) or self.id < 0:
            raise ConfigError(f"user id must be a nonnegative integer, got {self.id!r}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ConfigError(f"user {self.id}: rate must be > 0, got {self.rate!r}")


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ConfigError(f"exponential rate must be > 0, got {self.rate!r}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    def gaps_from_uniform(self, u: np.ndarray) -> np.ndarray:
        return -np.log(u) / self.rate

    def sample(self, rng: SplitMix64, n: int) -> np.ndarray:
        return self.gaps_from_uniform(rng.uniform(n))


@dataclass(frozen=True)
class ShiftedExponential:
    """Hard minimum gap ``shift`` plus an exponential residual."""

    shift: float
    residual_rate: float

    def __post_init__(self):
        if not (math.isfinite(self.shift) and self.shift >= 0):
            raise ConfigError(f"shift must be >= 0, got {self.shift!r}")
        if not (math.isfinite(self.residual_rate) and self.residual_rate > 0):
            raise ConfigError(f"residual_rate must be > 0, got {self.residual_rate!r}")

    @classmethod
    def for_rate(cls, rate: float, shift: float) -> ShiftedExponential:
        """Shifted law whose mean gap is still ``1/rate``; needs ``rate < 1/shift``."""
        residual_mean = 1.0 / rate - shift
        if not residual_mean > 0:
            raise ConfigError(
                f"rate {rate!r} is infeasible with minimum gap {shift!r} "
                f"(requires rate < {1.0 / shift!r})"
            )
        return cls(shift=shift, residual_rate=1.0 / residual_mean)

    @property
    def mean(self) -> float:
        return self.shift + 1.0 / self.residual_rate

    def gaps_from_uniform(self, u: np.ndarray) -> np.ndarray:
        return self.shift + (-np.log(u) / self.residual_rate)

    def sample(self, rng: SplitMix64, n: int) -> np.ndarray:
        return self.gaps_from_uniform(rng.uniform(n))


GapModel = Exponential | ShiftedExponential


class GapSampler(Protocol):
    mean: float

    def sample(self, rng: SplitMix64, n: int) -> np.ndarray: ...


def sample_gap(model: GapSampler, rng: SplitMix64) -> float:
    """Draw a single inter-message gap."""
    return float(model.sample(rng, 1)[0])


@dataclass(frozen=True)
class MergedStream:
    """Time-sorted marked events on ``[0, horizon]``.

    Equal times are ordered by ascending user id.
    """

    times: np.ndarray
    users: np.ndarray
    horizon: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        users = np.asarray(self.users, dtype=np.int64)
        if times.ndim != 1 or times.shape != users.shape:
            raise InvariantError("times and users must be 1-d arrays of equal length")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "users", users)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.times)

    def is_sorted(self) -> bool:
        if len(self) < 2:
            return True
        dt = np.diff(self.times)
        if np.any(dt < 0):
            return False
        tie = dt == 0
        return not np.any(tie & (np.diff(self.users) < 0))

    def check(self) -> None:
        if not self.is_sorted():
            raise InvariantError("stream is not sorted by (time, user)")
        if len(self) and (self.times[0] < 0 or self.times[-1] > self.horizon):
            raise InvariantError("stream has events outside [0, horizon]")

    def events(self) -> list[tuple[float, int]]:
        return list(zip(self.times.tolist(), self.users.tolist()))

    @classmethod
    def empty(cls, horizon: float) -> MergedStream:
        return cls(np.empty(0), np.empty(0, dtype=np.int64), horizon)


@dataclass(frozen=True)
class DeliveryOutcome:
    stream: MergedStream
    delivered: np.ndarray = field(repr=False)

    def __post_init__(self):
        flags = np.asarray(self.delivered, dtype=bool)
        if flags.shape != self.stream.times.shape:
            raise InvariantError("delivered flags must align with stream events")
        object.__setattr__(self, "delivered", flags)

    @property
    def n_delivered(self) -> int:
        return int(np.count_nonzero(self.delivered))

    @property
    def delivered_times(self) -> np.ndarray:
        return self.stream.times[self.delivered]

    def delivered_stream(self) -> MergedStream:
        return MergedStream(
            self.stream.times[self.delivered],
            self.stream.users[self.delivered],
            self.stream.horizon,
        )


def _check_horizon(horizon: float) -> float:
    horizon = float(horizon)
    if not (math.isfinite(horizon) and horizon > 0):
        raise ConfigError(f"horizon must be > 0, got {horizon!r}")
    return horizon


def renewal_times(model: GapSampler, horizon: float, rng: SplitMix64) -> np.ndarray:
    """Arrival times of a renewal process started at 0, truncated at ``horizon``.

    Gaps are drawn in blocks; times are the running sum ``t_k = t_{k-1} + gap_k``
    (np.cumsum is a sequential sum, so the block size does not change the result).
    """
    horizon = _check_horizon(horizon)
    expected = horizon / model.mean
    block = int(min(expected + 6.0 * math.sqrt(expected) + 64, 1 << 22))
    chunks = []
    last = 0.0
    while True:
        gaps = model.sample(rng, block)
        times = np.cumsum(np.concatenate(([last], gaps)))[1:]
        cut = int(np.searchsorted(times, horizon, side="right"))
        chunks.append(times[:cut])
        if cut < len(times):
            break
        last = float(times[-1])
    return np.concatenate(chunks)


def generate_user_stream(
    user: UserSpec, model: GapSampler, horizon: float, rng: SplitMix64
) -> MergedStream:
    times = renewal_times(model, horizon, rng)
    return MergedStream(times, np.full(len(times), user.id, dtype=np.int64), float(horizon))


def superpose(streams: Sequence[MergedStream], horizon: float | None = None) -> MergedStream:
    """Sorted union of marked streams, ties broken by user id."""
    if not streams:
        if horizon is None:
            raise ConfigError("superpose of no streams needs an explicit horizon")
        return MergedStream.empty(_check_horizon(horizon))
    horizons = {s.horizon for s in streams}
    if len(horizons) != 1 or (horizon is not None and horizons != {float(horizon)}):
        raise ConfigError(f"streams have mismatched horizons: {sorted(horizons)}")
    times = np.concatenate([s.times for s in streams])
    users = np.concatenate([s.users for s in streams])
    order = np.lexsort((users, times))
    return MergedStream(times[order], users[order], streams[0].horizon)


def bernoulli_thin(stream: MergedStream, p: float, rng: SplitMix64) -> DeliveryOutcome:
    """Keep each event independently with probability ``p`` (flag ``u <= p``)."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"thinning probability must be in [0, 1], got {p!r}")
    u = rng.uniform(len(stream))
    return DeliveryOutcome(stream, u <= p)


def assign_marks(n: int, rates: Sequence[float], ids: Sequence[int], rng: SplitMix64) -> np.ndarray:
    """Mark ``n`` events with user ids, id ``i`` chosen with probability ``rate_i / sum``."""
    w = np.asarray(rates, dtype=np.float64)
    cum = np.cumsum(w) / w.sum()
    cum[-1] = 1.0
    idx = np.searchsorted(cum, rng.uniform(n), side="left")
    return np.asarray(ids, dtype=np.int64)[idx]


def attribute(outcome: DeliveryOutcome, user: int, known_users: Sequence[int] | None = None) -> np.ndarray:
    """Delivered event times of one user, in order."""
    if known_users is not None and user not in set(known_users):
        raise ConfigError(f"unknown user id {user!r}")
    mask = outcome.delivered & (outcome.stream.users == user)
    return outcome.stream.times[mask]


def bin_counts(times: np.ndarray, horizon: float, n_bins: int) -> np.ndarray:
    """Event counts in ``n_bins`` equal bins over ``[0, horizon]``."""
    counts, _ = np.histogram(times, bins=n_bins, range=(0.0, horizon))
    return counts
