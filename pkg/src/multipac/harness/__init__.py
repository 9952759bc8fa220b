"""Generators, Monte Carlo estimators, experiment runner and file formats."""

from .experiment import ExperimentResult, ExperimentSpec, TrialRecord, run_experiment
from .generators import (
    appendix_a_list,
    gen_appendix_a,
    gen_constant_class,
    gen_lower_bound_instance,
    gen_random_class,
    gen_threshold_class,
    list_coverage_gap,
    min_list_bounded_error,
    realizable_distribution,
)
from .montecarlo import ExcessRiskSummary, monte_carlo_excess_risk

__all__ = [
    "ExcessRiskSummary",
    "ExperimentResult",
    "ExperimentSpec",
    "TrialRecord",
    "appendix_a_list",
    "gen_appendix_a",
    "gen_constant_class",
    "gen_lower_bound_instance",
    "gen_random_class",
    "gen_threshold_class",
    "list_coverage_gap",
    "min_list_bounded_error",
    "monte_carlo_excess_risk",
    "realizable_distribution",
    "run_experiment",
]
