"""Cost sharing: proportional and marginal energy shares, penalties, social costs, potential."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .core import GameConfig, Job, Mechanism, StrategyProfile, check_feasible
from .yds import optimal_energy, yds_schedule


@dataclass(frozen=True)
class CostReport:
    mechanism: Mechanism
    cost_shares: tuple
    waiting_costs: tuple
    penalties: tuple
    optimal_energy: float

    @property
    def total_cost_share(self):
        return sum(self.cost_shares)

    @property
    def utilitarian_social_cost(self):
        return sum(self.penalties)

    @property
    def effective_social_cost(self):
        return sum(self.waiting_costs) + self.optimal_energy


def proportional_shares(jobs: Sequence[Job], profile: StrategyProfile, alpha) -> list:
    """Each player pays the energy spent while its own job runs."""
    per_job = yds_schedule(jobs, profile).job_energy(alpha)
    return [per_job.get(j.id, 0.0 * alpha) for j in jobs]


def marginal_shares(jobs: Sequence[Job], profile: StrategyProfile, alpha) -> list:
    """Each player pays E(OPT(d)) - E(OPT(d_-i)), the energy added by its presence."""
    total = optimal_energy(jobs, profile, alpha)
    return [total - _energy_without(jobs, profile, j.id, alpha) for j in jobs]


def _energy_without(jobs, profile, player, alpha):
    return optimal_energy([j for j in jobs if j.id != player], profile, alpha)


def shares(jobs, profile, mechanism, alpha) -> list:
    if Mechanism(mechanism) is Mechanism.PROPORTIONAL:
        return proportional_shares(jobs, profile, alpha)
    return marginal_shares(jobs, profile, alpha)


def penalties(jobs: Sequence[Job], profile: StrategyProfile, mechanism, config: GameConfig) -> CostReport:
    check_feasible(jobs, profile)
    mechanism = Mechanism(mechanism)
    schedule = yds_schedule(jobs, profile)
    total = schedule.energy(config.alpha)
    if mechanism is Mechanism.PROPORTIONAL:
        per_job = schedule.job_energy(config.alpha)
        b = [per_job.get(j.id, 0.0 * total) for j in jobs]
    else:
        b = [total - _energy_without(jobs, profile, j.id, config.alpha) for j in jobs]
    waiting = [config.waiting_cost(j, profile[j.id]) for j in jobs]
    return CostReport(mechanism, tuple(b), tuple(waiting),
                      tuple(x + y for x, y in zip(b, waiting)), total)


def potential(jobs: Sequence[Job], profile: StrategyProfile, config: GameConfig):
    """Effective social cost: waiting costs plus the optimal energy."""
    waiting = sum(config.waiting_cost(j, profile[j.id]) for j in jobs)
    return waiting + optimal_energy(jobs, profile, config.alpha)


def penalty_function(jobs: Sequence[Job], profile: StrategyProfile, player: int, mechanism,
                     config: GameConfig) -> Callable:
    """Penalty of ``player`` as a function of its own deadline, others held fixed.

    Under marginal sharing E(OPT(d_-i)) does not depend on the player's deadline,
    so it is computed once.
    """
    mechanism = Mechanism(mechanism)
    job = next(j for j in jobs if j.id == player)
    alpha = config.alpha

    if mechanism is Mechanism.MARGINAL:
        without = _energy_without(jobs, profile, player, alpha)

        def penalty(d):
            p = profile.with_deadline(player, d)
            return config.waiting_cost(job, d) + optimal_energy(jobs, p, alpha) - without
    else:
        def penalty(d):
            p = profile.with_deadline(player, d)
            share = yds_schedule(jobs, p).job_energy(alpha).get(player, 0.0 * alpha)
            return config.waiting_cost(job, d) + share

    return penalty
