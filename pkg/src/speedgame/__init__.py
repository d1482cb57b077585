"""Speed-scaling scheduling game: minimum-energy schedules, cost sharing, best responses and equilibria."""

from .bestresp import (BestResponse, closed_form_response_marg, closed_form_response_prop,
                       numeric_best_response)
from .core import (GameConfig, InfeasibleProfileError, Job, Mechanism, SpeedSchedule, StrategyProfile,
                   WaitingCostMode, energy, validate_schedule)
from .dynamics import DynamicsTrace, Verdict, delta_sequence, detect_cycle, run_dynamics
from .equilibria import (candidate_profiles, dominance_condition, uniqueness_scan, verify_equilibrium)
from .mechanisms import CostReport, marginal_shares, penalties, potential, proportional_shares
from .yds import optimal_energy, oracle_energy, yds_schedule

__all__ = [
    "BestResponse", "CostReport", "DynamicsTrace", "GameConfig", "InfeasibleProfileError", "Job",
    "Mechanism", "SpeedSchedule", "StrategyProfile", "Verdict", "WaitingCostMode",
    "candidate_profiles", "closed_form_response_marg", "closed_form_response_prop", "delta_sequence",
    "detect_cycle", "dominance_condition", "energy", "marginal_shares", "numeric_best_response",
    "optimal_energy", "oracle_energy", "penalties", "potential", "proportional_shares", "run_dynamics",
    "uniqueness_scan", "validate_schedule", "verify_equilibrium", "yds_schedule",
]
