"""Parameter sweeps over load, airtime or user count, written as CSV."""

from __future__ import annotations

import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Sequence

from .analytic_model import run_simplified, success_probability, summarize
from .compare import ComparisonReport, compare_models
from .config import GuardPolicy, SystemConfig, config_from_dict
from .errors import ConfigError
from .physical_model import run_physical
from .point_process import UserSpec
from .rng import SplitMix64, derive_seed

AXES = ("total_rate", "airtime", "user_count")
CSV_HEADER = (
    "axis",
    "lambda_total",
    "airtime",
    "p_predicted",
    "throughput_predicted",
    "frac_physical",
    "stderr_physical",
    "frac_simplified",
    "stderr_simplified",
)
CELL_STRIDE = 65536


def run_both(config: SystemConfig, seed: int | None = None) -> tuple:
    """Both simulators on derived seeds 0 (physical) and 1 (simplified)."""
    master = config.seed if seed is None else seed
    phys = run_physical(config, SplitMix64(derive_seed(master, 0)))
    simp = run_simplified(config, SplitMix64(derive_seed(master, 1)))
    return phys, simp


def run_comparison(config: SystemConfig, alpha: float = 0.01) -> ComparisonReport:
    phys, simp = run_both(config)
    return compare_models(phys, simp, summarize(config), alpha)


@dataclass(frozen=True)
class SweepSpec:
    base: SystemConfig
    axis: str
    values: tuple[float, ...]
    replicates: int = 1

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"sweep.axis must be one of {AXES}, got {self.axis!r}")
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise ConfigError("sweep.values must be nonempty")
        if any(not (math.isfinite(v) and v > 0) for v in values):
            raise ConfigError("sweep.values must all be positive")
        diffs = [b - a for a, b in zip(values, values[1:])]
        if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ConfigError("sweep.values must be strictly monotone")
        if isinstance(self.replicates, bool) or not isinstance(self.replicates, int) or self.replicates < 1:
            raise ConfigError("sweep.replicates must be an integer >= 1")
        if self.axis == "user_count":
            if any(v != int(v) for v in values):
                raise ConfigError("sweep.values must be integers for the user_count axis")
            if len({u.rate for u in self.base.users}) != 1:
                raise ConfigError("user_count sweeps need users with one common rate")
        if self.axis == "airtime" and self.base.airtime == 0:
            raise ConfigError("airtime sweeps need a base airtime > 0")

    def cell_config(self, k: int, r: int) -> SystemConfig:
        """Config for axis index ``k`` and replicate ``r`` with its derived seed."""
        v = self.values[k]
        base = self.base
        seed = derive_seed(base.seed, k * CELL_STRIDE + r)
        if self.axis == "total_rate":
            scale = v / base.total_rate
            users = tuple(UserSpec(u.id, u.rate * scale) for u in base.users)
            return replace(base, users=users, seed=seed)
        if self.axis == "airtime":
            # guard window keeps its ratio to airtime
            g = base.guard
            guard = GuardPolicy(g.window * v / base.airtime, g.mode)
            return replace(base, airtime=v, guard=guard, seed=seed)
        rate = base.users[0].rate
        users = tuple(UserSpec(i, rate) for i in range(int(v)))
        return replace(base, users=users, seed=seed)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    replicate: int
    lambda_total: float
    airtime: float
    p_predicted: float
    throughput_predicted: float
    frac_physical: float
    stderr_physical: float
    frac_simplified: float
    stderr_simplified: float
    throughput_physical: float
    throughput_simplified: float

    def csv_fields(self) -> list[float]:
        return [
            self.axis_value,
            self.lambda_total,
            self.airtime,
            self.p_predicted,
            self.throughput_predicted,
            self.frac_physical,
            self.stderr_physical,
            self.frac_simplified,
            self.stderr_simplified,
        ]


def run_cell(spec: SweepSpec, k: int, r: int) -> SweepRow:
    config = spec.cell_config(k, r)
    phys, simp = run_both(config)
    lam = config.total_rate
    p = success_probability(config.airtime, lam)
    return SweepRow(
        axis_value=spec.values[k],
        replicate=r,
        lambda_total=lam,
        airtime=config.airtime,
        p_predicted=p,
        throughput_predicted=lam * p,
        frac_physical=phys.interior_fraction,
        stderr_physical=phys.interior_stderr,
        frac_simplified=simp.delivered_fraction,
        stderr_simplified=simp.fraction_stderr,
        throughput_physical=phys.throughput,
        throughput_simplified=simp.throughput,
    )


def _run_cell_args(args) -> SweepRow:
    return run_cell(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list[SweepRow]:
    """Rows in axis order, replicates innermost. Cells are independent, so
    ``jobs > 1`` runs them in worker processes without changing the output."""
    cells = [(spec, k, r) for k in range(len(spec.values)) for r in range(spec.replicates)]
    if jobs <= 1:
        return [run_cell(*c) for c in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_cell_args, cells))


def _fmt(x: float) -> str:
    x = float(x)
    return f"{x:.9g}" if math.isfinite(x) else "nan"


def format_csv(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(CSV_HEADER)]
    lines += [",".join(_fmt(v) for v in row.csv_fields()) for row in rows]
    return "\n".join(lines) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write via a temp file in the same directory; nothing is left on failure."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sweep_from_dict(obj: Any) -> SweepSpec:
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    sweep = obj.get("sweep")
    if not isinstance(sweep, dict):
        raise ConfigError("missing field 'sweep' (object with axis, values, replicates)")
    base = config_from_dict({k: v for k, v in obj.items() if k != "sweep"})
    values = sweep.get("values")
    if not isinstance(values, list):
        raise ConfigError("sweep.values must be a list")
    if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in values):
        raise ConfigError("sweep.values must be numbers")
    return SweepSpec(
        base=base,
        axis=sweep.get("axis", ""),
        values=tuple(values),
        replicates=sweep.get("replicates", 1),
    )
