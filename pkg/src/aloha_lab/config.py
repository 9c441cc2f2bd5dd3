"""Experiment configuration and its JSON form.

Example config::

    {
      "users": [{"id": 0, "rate": 0.001}, {"id": 1, "rate": 0.002}],
      "airtime": 1.0,
      "horizon": 1e7,
      "seed": 42,
      "guard": {"window": 1.0, "mode": "two_sided"},
      "gap_model": "exponential",
      "duty_cycle_factor": 100
    }

``guard``, ``gap_model`` and ``duty_cycle_factor`` are optional.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any

from .errors import ConfigError
from .point_process import Exponential, ShiftedExponential, UserSpec
from .rng import MASK64

GUARD_MODES = ("two_sided", "one_sided")
GAP_MODELS = ("exponential", "shifted_exponential")
CONFIG_FIELDS = ("users", "airtime", "horizon", "seed", "guard", "gap_model", "duty_cycle_factor")


@dataclass(frozen=True)
class GuardPolicy:
    """Collision rule on the total stream.

    ``two_sided``: an event survives iff the gaps to both neighbours exceed
    ``window``. ``one_sided``: only the gap to the previous event is checked.
    """

    window: float
    mode: str = "two_sided"

    def __post_init__(self):
        if not (math.isfinite(self.window) and self.window >= 0):
            raise ConfigError(f"guard.window must be >= 0, got {self.window!r}")
        if self.mode not in GUARD_MODES:
            raise ConfigError(f"guard.mode must be one of {GUARD_MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class SystemConfig:
    users: tuple[UserSpec, ...]
    airtime: float
    horizon: float
    seed: int = 0
    guard: GuardPolicy | None = None
    gap_model: str = "exponential"
    duty_cycle_factor: float = 100.0
    _gap_models: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        users = tuple(self.users)
        object.__setattr__(self, "users", users)
        if not users:
            raise ConfigError("users must contain at least one user")
        ids = [u.id for u in users]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"user ids must be unique, got {ids}")
        if not (math.isfinite(self.airtime) and self.airtime >= 0):
            raise ConfigError(f"airtime must be >= 0, got {self.airtime!r}")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ConfigError(f"horizon must be > 0, got {self.horizon!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MASK64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not (math.isfinite(self.duty_cycle_factor) and self.duty_cycle_factor > 0):
            raise ConfigError(f"duty_cycle_factor must be > 0, got {self.duty_cycle_factor!r}")
        if self.gap_model not in GAP_MODELS:
            raise ConfigError(f"gap_model must be one of {GAP_MODELS}, got {self.gap_model!r}")
        if self.guard is None:
            object.__setattr__(self, "guard", GuardPolicy(self.airtime, "two_sided"))
        object.__setattr__(self, "_gap_models", self._build_gap_models())

    def _build_gap_models(self) -> dict:
        models = {}
        shift = self.duty_cycle_factor * self.airtime
        for u in self.users:
            if self.gap_model == "exponential":
                models[u.id] = Exponential(u.rate)
            elif u.rate * shift >= 1.0:
                raise ConfigError(
                    f"user {u.id}: rate {u.rate!r} is infeasible for shifted_exponential gaps "
                    f"(requires rate < 1/({self.duty_cycle_factor!r}*airtime) = {1.0 / shift!r})"
                )
            else:
                models[u.id] = ShiftedExponential.for_rate(u.rate, shift)
        return models

    def gap_model_for(self, user_id: int):
        return self._gap_models[user_id]

    @property
    def user_ids(self) -> list[int]:
        return [u.id for u in self.users]

    @property
    def total_rate(self) -> float:
        return math.fsum(u.rate for u in self.users)

    def with_seed(self, seed: int) -> SystemConfig:
        return replace(self, seed=seed)

    def equivalent(self, other: SystemConfig) -> bool:
        """Equal apart from the seed."""
        return replace(self, seed=0) == replace(other, seed=0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "users": [{"id": u.id, "rate": u.rate} for u in self.users],
            "airtime": self.airtime,
            "horizon": self.horizon,
            "seed": self.seed,
            "guard": {"window": self.guard.window, "mode": self.guard.mode},
            "gap_model": self.gap_model,
            "duty_cycle_factor": self.duty_cycle_factor,
        }


def _number(obj: dict, key: str, where: str | None = None) -> float:
    name = where or key
    if key not in obj:
        raise ConfigError(f"missing field {name!r}")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be a number, got {v!r}")
    return float(v)


def config_from_dict(obj: Any, allow_extra: tuple[str, ...] = ()) -> SystemConfig:
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    extra = set(obj) - set(CONFIG_FIELDS) - set(allow_extra)
    if extra:
        raise ConfigError(f"unknown field(s): {', '.join(sorted(extra))}")

    raw_users = obj.get("users")
    if not isinstance(raw_users, list) or not raw_users:
        raise ConfigError("users must be a nonempty list")
    users = []
    for i, ru in enumerate(raw_users):
        if not isinstance(ru, dict):
            raise ConfigError(f"users[{i}] must be an object")
        uid = ru.get("id")
        if isinstance(uid, bool) or not isinstance(uid, int) or uid < 0:
            raise ConfigError(f"users[{i}].id must be a nonnegative integer")
        rate = _number(ru, "rate", f"users[{i}].rate")
        if not (math.isfinite(rate) and rate > 0):
            raise ConfigError(f"users[{i}].rate must be > 0")
        users.append(UserSpec(uid, rate))

    airtime = _number(obj, "airtime")
    if not airtime >= 0:
        raise ConfigError("airtime must be >= 0")
    horizon = _number(obj, "horizon")
    if not horizon > 0:
        raise ConfigError("horizon must be > 0")
    seed = obj.get("seed")
    if seed is None:
        raise ConfigError("missing field 'seed'")
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MASK64:
        raise ConfigError("seed must be an unsigned 64-bit integer")

    guard = None
    if obj.get("guard") is not None:
        g = obj["guard"]
        if not isinstance(g, dict):
            raise ConfigError("guard must be an object")
        window = _number(g, "window", "guard.window") if "window" in g else airtime
        guard = GuardPolicy(window, g.get("mode", "two_sided"))

    return SystemConfig(
        users=tuple(users),
        airtime=airtime,
        horizon=horizon,
        seed=seed,
        guard=guard,
        gap_model=obj.get("gap_model", "exponential"),
        duty_cycle_factor=_number(obj, "duty_cycle_factor") if "duty_cycle_factor" in obj else 100.0,
    )


def parse_config(text: str, allow_extra: tuple[str, ...] = ()) -> SystemConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return config_from_dict(obj, allow_extra)
