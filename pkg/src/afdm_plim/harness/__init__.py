"""Monte Carlo experiment harness and command line interface."""
from .config import AfSettings, ExperimentConfig, RateSettings, load_config, parse_sweep, worker_count
from .experiments import (
    AfResult,
    ResultRow,
    range_estimates,
    run_af,
    run_ber_sweep,
    run_range_sweep,
    run_rate_table,
    snr_at_ber,
    trial_rng,
)
from .io import format_rows, read_rows, write_rows

__all__ = [
    "AfSettings",
    "AfResult",
    "ExperimentConfig",
    "RateSettings",
    "ResultRow",
    "format_rows",
    "load_config",
    "parse_sweep",
    "range_estimates",
    "read_rows",
    "run_af",
    "run_ber_sweep",
    "run_range_sweep",
    "run_rate_table",
    "snr_at_ber",
    "trial_rng",
    "worker_count",
    "write_rows",
]
