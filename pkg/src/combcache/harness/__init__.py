"""Experiment runner, security audits and sweep output."""
from .audits import (AuditReport, AuditTooLarge, Check, audit_secure_caching, audit_secure_delivery,
                     check_otp_coverage, check_share_count, exhaustive_distribution, exhaustive_posterior)
from .config import ConfigError, ExperimentConfig, config_from_mapping, load_config
from .runner import RateReport, best_grid_point, params_for, run_experiment
from .fmt import render_decimal
from .sweep import emit_plot_data, read_csv, sweep, write_csv

__all__ = [
    "AuditReport", "AuditTooLarge", "Check", "audit_secure_caching", "audit_secure_delivery",
    "check_otp_coverage", "check_share_count", "exhaustive_distribution", "exhaustive_posterior",
    "ConfigError", "ExperimentConfig", "config_from_mapping", "load_config",
    "RateReport", "best_grid_point", "params_for", "run_experiment",
    "emit_plot_data", "read_csv", "render_decimal", "sweep", "write_csv",
]
