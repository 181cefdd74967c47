"""Optimal AI replacement in sequential teams with peer monitoring."""
from .chain import (
    CostBreakdown,
    EquilibriumReport,
    GradientDecomposition,
    WageSchedule,
    cost_gradient,
    expected_cost,
    offpath_shirk_rate,
    optimal_wages,
    pure_strategy_costs,
    shirk_success_rate,
    strategic_ai_cost,
    verify_trigger_equilibrium,
)
from .estimators import ReplacementOptimizer
from .exceptions import ConfigError, TeamAIError
from .model import (
    Instance,
    ReplacementStrategy,
    Topology,
    oring_instance,
    oring_production,
    random_instance,
    validate_instance,
    validate_strategy,
)
from .optimize import (
    ALPHA_BAR,
    BETA_BAR,
    GapReport,
    Method,
    Optimum,
    PayoffReport,
    family_cost,
    front_payoff_threshold,
    payoff_report,
    solve_chain_general,
    solve_chain_n3,
    solve_oring,
    solve_strategic,
    utilization_condition,
    wage_gap_report,
)
from .simulate import SimReport, domino_trace, monte_carlo, play_once
from .star import StarSolution, solve_star, star_condition, star_expected_cost, star_shirk_rate
from .task import (
    TaskStrategy,
    enumerate_task_corners,
    interior_gradient_check,
    solve_task_based,
    task_expected_cost,
    task_shirk_rate,
    task_total_compensation,
    task_wages,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_BAR",
    "BETA_BAR",
    "ConfigError",
    "cost_gradient",
    "CostBreakdown",
    "domino_trace",
    "enumerate_task_corners",
    "EquilibriumReport",
    "expected_cost",
    "family_cost",
    "front_payoff_threshold",
    "GapReport",
    "GradientDecomposition",
    "Instance",
    "interior_gradient_check",
    "Method",
    "monte_carlo",
    "offpath_shirk_rate",
    "optimal_wages",
    "Optimum",
    "oring_instance",
    "oring_production",
    "payoff_report",
    "PayoffReport",
    "play_once",
    "pure_strategy_costs",
    "random_instance",
    "ReplacementOptimizer",
    "ReplacementStrategy",
    "shirk_success_rate",
    "SimReport",
    "solve_chain_general",
    "solve_chain_n3",
    "solve_oring",
    "solve_star",
    "solve_strategic",
    "solve_task_based",
    "star_condition",
    "star_expected_cost",
    "star_shirk_rate",
    "StarSolution",
    "strategic_ai_cost",
    "task_expected_cost",
    "task_shirk_rate",
    "task_total_compensation",
    "task_wages",
    "TaskStrategy",
    "TeamAIError",
    "Topology",
    "utilization_condition",
    "validate_instance",
    "validate_strategy",
    "verify_trigger_equilibrium",
    "wage_gap_report",
    "WageSchedule",
]
