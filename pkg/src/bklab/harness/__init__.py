"""Seeded experiment runner for the five scenarios."""

from .config import SCENARIOS, ConfigError, ExperimentConfig, scenario_rng
from .experiments import (
    RUNNERS,
    ResultRecord,
    run_adaptive_attack_experiment,
    run_incompressibility_experiment,
    run_known_metric_experiment,
    run_majority_experiment,
    run_pac_learning_experiment,
)

__all__ = [
    "SCENARIOS",
    "RUNNERS",
    "ConfigError",
    "ExperimentConfig",
    "ResultRecord",
    "scenario_rng",
    "run_adaptive_attack_experiment",
    "run_incompressibility_experiment",
    "run_known_metric_experiment",
    "run_majority_experiment",
    "run_pac_learning_experiment",
]
