"""Best-response dynamics with cycle detection."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .bestresp import BestResponse, PreconditionError, numeric_best_response
from .core import GameConfig, Job, Mechanism, StrategyProfile, check_feasible
from .mechanisms import penalty_function, potential

CYCLE_TOL = 1e-7


class Verdict(str, enum.Enum):
    EQUILIBRIUM = "equilibrium"
    CYCLE = "cycle"
    BUDGET_EXHAUSTED = "budget_exhausted"
    STALLED = "stalled"


class Order(str, enum.Enum):
    ROUND_ROBIN = "round_robin"
    MAX_GAIN = "max_gain"


class DynamicsError(RuntimeError):
    pass


@dataclass(frozen=True)
class Step:
    player: int
    d_old: float
    d_new: float
    penalty_old: float
    penalty_new: float
    phi_before: float
    phi_after: float

    @property
    def gain(self):
        return self.penalty_old - self.penalty_new


@dataclass
class DynamicsTrace:
    start: StrategyProfile
    mechanism: Mechanism
    order: Order
    steps: list = field(default_factory=list)
    profiles: list = field(default_factory=list)   # profile after each step
    verdict: Verdict | None = None
    cycle: tuple | None = None                     # (start index, period) into ``all_profiles``

    @property
    def final(self) -> StrategyProfile:
        return self.profiles[-1] if self.profiles else self.start

    @property
    def all_profiles(self) -> list:
        return [self.start] + self.profiles


def _find_revisit(profiles, gains, tol):
    """Earliest ``(i, period)`` with ``profiles[i + period]`` within ``tol`` of ``profiles[i]``.

    A revisit only counts when the moves in between improved by more than ``tol``
    in total; otherwise it is a convergent sequence crawling below the tolerance.
    """
    for k in range(1, len(profiles)):
        found = _revisit_of(profiles, gains, k, tol)
        if found:
            return found
    return None


def _revisit_of(profiles, gains, k, tol):
    for i in range(k):
        if profiles[k].distance(profiles[i]) <= tol and sum(gains[i:k]) > tol:
            return i, k - i
    return None


def detect_cycle(trace: DynamicsTrace, tol=CYCLE_TOL):
    """First revisited profile of ``trace`` as ``(start index, period)``, or None."""
    return _find_revisit(trace.all_profiles, [s.gain for s in trace.steps], tol)


def run_dynamics(jobs: Sequence[Job], start: StrategyProfile, mechanism, config: GameConfig,
                 max_steps: int = 1000, order=Order.ROUND_ROBIN, first_player: int = 0,
                 stop_on_cycle: bool = True, cycle_tol=CYCLE_TOL) -> DynamicsTrace:
    """Let players replace their deadline by a best response until nobody gains more than epsilon.

    ``max_steps`` bounds the number of improving moves.  With ``stop_on_cycle``
    false the run continues to the budget after a cycle is found; best responses
    are memoised per (player, profile), so revisiting a cycle costs nothing.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    check_feasible(jobs, start, config.min_gap)
    mechanism, order = Mechanism(mechanism), Order(order)
    n = len(jobs)
    ids = [j.id for j in jobs]
    trace = DynamicsTrace(start, mechanism, order)
    memo: dict = {}

    def respond(player, profile) -> tuple[BestResponse, object]:
        key = (player, profile.deadlines)
        if key not in memo:
            try:
                br = numeric_best_response(jobs, profile, player, mechanism, config)
            except (RuntimeError, PreconditionError) as exc:
                raise DynamicsError(f"step {len(trace.steps)}: best response of player {player} failed: {exc}") from exc
            current = penalty_function(jobs, profile, player, mechanism, config)(profile[player])
            memo[key] = (br, current)
        return memo[key]

    profile = start
    phi = potential(jobs, profile, config)
    gains: list = []
    turn = ids.index(first_player)
    idle = 0   # consecutive players without an improving move
    while True:
        if order is Order.ROUND_ROBIN:
            player = ids[turn % n]
            turn += 1
            br, current = respond(player, profile)
            gain = current - br.penalty
        else:
            options = [(respond(p, profile), p) for p in ids]
            (br, current), player = max(options, key=lambda o: o[0][1] - o[0][0].penalty)
            gain = current - br.penalty
        if not gain > config.epsilon:
            idle += 1
            if order is Order.MAX_GAIN or idle >= n:
                trace.verdict = Verdict.EQUILIBRIUM
                break
            continue
        idle = 0
        if br.deadline == profile[player]:
            trace.verdict = Verdict.STALLED
            break
        new = profile.with_deadline(player, br.deadline)
        new_phi = potential(jobs, new, config)
        trace.steps.append(Step(player, profile[player], br.deadline, current, br.penalty, phi, new_phi))
        trace.profiles.append(new)
        gains.append(gain)
        profile, phi = new, new_phi
        if trace.cycle is None:
            found = _revisit_of(trace.all_profiles, gains, len(trace.profiles), cycle_tol)
            if found:
                trace.cycle = found
                if stop_on_cycle:
                    trace.verdict = Verdict.CYCLE
                    break
        if len(trace.steps) >= max_steps:
            trace.verdict = Verdict.CYCLE if trace.cycle else Verdict.BUDGET_EXHAUSTED
            break
    return trace


def delta_sequence(trace: DynamicsTrace, alpha, player: int = 0) -> list:
    """delta_k = d / ((alpha-1)/2)**(1/alpha) after each move of the leading ``player``.

    Only meaningful for the symmetric two-player marginal game inside the
    slow-convergence regime 1 <= delta < 2**(1/alpha).
    """
    if len(trace.start) != 2:
        raise ValueError("delta sequence is defined for two-player traces only")
    q = ((alpha - 1) / 2) ** (1 / alpha)
    out = []
    for k, step in enumerate(trace.steps):
        if step.player != player:
            continue
        delta = step.d_new / q
        if not 1 <= delta < 2 ** (1 / alpha):
            raise ValueError(f"step {k}: delta={delta} left the regime [1, 2**(1/alpha))")
        out.append(delta)
    return out
