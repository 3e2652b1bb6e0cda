"""Stochastic inverse reinforcement learning on objectworld."""

from ._sirl import (
    ConfigError,
    Gmm,
    Instance,
    NumericalError,
    evd,
    features,
    fit_gmm,
    generate_demos,
    generate_world,
    gradient,
    log_likelihood,
    normalize_config,
    optimal,
    run_mcem,
    true_reward,
)

__all__ = [
    "ConfigError",
    "Gmm",
    "Instance",
    "NumericalError",
    "evd",
    "features",
    "fit_gmm",
    "generate_demos",
    "generate_world",
    "gradient",
    "log_likelihood",
    "normalize_config",
    "optimal",
    "run_mcem",
    "true_reward",
]
