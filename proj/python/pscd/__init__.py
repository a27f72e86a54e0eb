"""Compound-risk-controlled parallel sequential change detection."""

from ._pscd import (
    ChangePointPrior,
    ConfigError,
    Error,
    Infeasible,
    InvalidArgument,
    PosteriorState,
    SizeGuard,
    SurvivalExhausted,
    change_by_now,
    direct_posterior,
    enumerate_glfwer,
    glfwer,
    iadd,
    iarl,
    lfdr,
    lfnr,
    lfwer,
    oracle_check,
    run_experiment,
    run_replication_trace,
    schedule,
    select,
)

__all__ = [
    "ChangePointPrior",
    "ConfigError",
    "Error",
    "Infeasible",
    "InvalidArgument",
    "PosteriorState",
    "SizeGuard",
    "SurvivalExhausted",
    "change_by_now",
    "direct_posterior",
    "enumerate_glfwer",
    "glfwer",
    "iadd",
    "iarl",
    "lfdr",
    "lfnr",
    "lfwer",
    "oracle_check",
    "run_experiment",
    "run_replication_trace",
    "schedule",
    "select",
]
