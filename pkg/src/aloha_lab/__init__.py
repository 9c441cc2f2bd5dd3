"""Unslotted ALOHA with per-user rates: a collision simulator and the
Poisson-thinning model it is compared against."""

__version__ = "0.1.0"

from .analytic_model import (
    AnalyticSummary,
    duty_cycle_feasible,
    mean_interval_bounds,
    optimal_load,
    per_user_success_rate,
    run_simplified,
    success_probability,
    summarize,
    total_rate,
)
from .compare import ComparisonReport, compare_models
from .config import GuardPolicy, SystemConfig, parse_config
from .errors import ConfigError, InsufficientSampleError, InvariantError
from .physical_model import filter_collisions, inter_success_intervals, run_physical
from .point_process import (
    DeliveryOutcome,
    Exponential,
    MergedStream,
    ShiftedExponential,
    UserSpec,
    attribute,
    bernoulli_thin,
    generate_user_stream,
    sample_gap,
    superpose,
)
from .reports import SimReport
from .rng import SplitMix64, derive_seed
from .stats import KsResult, RateEstimate, dispersion_index, estimate_rate, ks_test_exponential
