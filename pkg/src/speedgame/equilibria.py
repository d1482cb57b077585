"""Equilibrium checks and the two-player uniqueness study.

The two-player candidates fix ``w_1 = p_1 = 1`` and vary the second player's
workload and priority.  Both candidates run the jobs back to back from time 0;
they differ in which job goes first.  All checks use marginal cost sharing.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bestresp import numeric_best_response
from .core import GameConfig, Job, Mechanism, StrategyProfile, check_feasible
from .mechanisms import penalties

SCAN_MECHANISM = Mechanism.MARGINAL
NE_RTOL = 1e-7
DISCLAIMER = ("only the two back-to-back candidates S21/S12 are tested; "
              "'unique' means unique among these candidates")


class Label(str, enum.Enum):
    S21 = "S21"
    S12 = "S12"


@dataclass(frozen=True)
class EquilibriumCheck:
    is_nash: bool
    worst_player: int
    max_gain: float
    gains: tuple


@dataclass(frozen=True)
class CandidateProfile:
    label: Label
    lengths: dict
    profile: StrategyProfile


def verify_equilibrium(jobs: Sequence[Job], profile: StrategyProfile, mechanism, config: GameConfig,
                       epsilon=None) -> EquilibriumCheck:
    """Is ``profile`` an epsilon-Nash equilibrium?  ``epsilon`` defaults to ``config.epsilon``."""
    check_feasible(jobs, profile)
    eps = config.epsilon if epsilon is None else epsilon
    current = penalties(jobs, profile, mechanism, config).penalties
    gains = []
    for j, now in zip(jobs, current):
        br = numeric_best_response(jobs, profile, j.id, mechanism, config)
        gains.append(now - br.penalty)
    worst = max(range(len(jobs)), key=lambda k: gains[k])
    return EquilibriumCheck(gains[worst] <= eps, jobs[worst].id, gains[worst], tuple(gains))


def two_player_jobs(w2, p2, w1=1.0, p1=1.0) -> list[Job]:
    return [Job(0, w1, 0.0, p1), Job(1, w2, 0.0, p2)]


def candidate_profiles(w2, p2, alpha, w1=1.0, p1=1.0) -> tuple[CandidateProfile, CandidateProfile]:
    """The two back-to-back candidate equilibria.

    S21 runs job 2 first: ``d_2 = l2*``, ``d_1 = l2* + l1*``.
    S12 runs job 1 first: ``d_1 = l1``, ``d_2 = l1 + l2``.
    Each leading length balances the leader's speed against both priorities; the
    trailing length is the single-player optimum for the follower.
    """
    c = (alpha - 1) ** (1 / alpha)
    l2s = w2 * c / (p1 + p2) ** (1 / alpha)
    l1s = w1 * c / p1 ** (1 / alpha)
    l1 = w1 * c / (p1 + p2) ** (1 / alpha)
    l2 = w2 * c / p2 ** (1 / alpha)
    s21 = CandidateProfile(Label.S21, {"l2*": l2s, "l1*": l1s}, StrategyProfile((l2s + l1s, l2s)))
    s12 = CandidateProfile(Label.S12, {"l1": l1, "l2": l2}, StrategyProfile((l1, l1 + l2)))
    return s21, s12


def dominance_bound(p2, alpha, w1=1.0, p1=1.0):
    """Largest ``w_2`` for which S21 has no larger effective social cost than S12."""
    e = (alpha - 1) / alpha
    return w1 * ((p1 + p2) ** e - p1 ** e) / ((p1 + p2) ** e - p2 ** e)


def dominance_condition(w2, p2, alpha, w1=1.0, p1=1.0) -> bool:
    return w2 <= dominance_bound(p2, alpha, w1, p1)


def ne_tolerance(jobs, profile, config: GameConfig, rtol=NE_RTOL):
    scale = max(abs(x) for x in penalties(jobs, profile, SCAN_MECHANISM, config).penalties)
    return rtol * (1 + scale)


def check_candidate(w2, p2, cand: CandidateProfile, config: GameConfig) -> EquilibriumCheck:
    jobs = two_player_jobs(w2, p2)
    return verify_equilibrium(jobs, cand.profile, SCAN_MECHANISM, config,
                              epsilon=ne_tolerance(jobs, cand.profile, config))


def deviation_gain(w2, p2, player: int, config: GameConfig, label=Label.S12):
    """How much ``player`` gains by best-responding at the given candidate, net of tolerance."""
    jobs = two_player_jobs(w2, p2)
    cand = candidate_profiles(w2, p2, config.alpha)[0 if Label(label) is Label.S21 else 1]
    now = penalties(jobs, cand.profile, SCAN_MECHANISM, config).penalties[player]
    br = numeric_best_response(jobs, cand.profile, player, SCAN_MECHANISM, config)
    return now - br.penalty - ne_tolerance(jobs, cand.profile, config)


def deviation_threshold(p2, player: int, w2_range, config: GameConfig, iterations: int = 40):
    """The ``w_2`` where ``player`` stops wanting to leave S12, by bisection on the sign of its gain.

    Returns ``(threshold, status)``.  ``status`` is ``"ok"`` for a sign change from
    deviating (low ``w_2``) to staying (high ``w_2``); otherwise it names the
    observed pattern and the threshold is NaN.
    """
    lo, hi = w2_range
    dev_lo = deviation_gain(lo, p2, player, config) > 0
    dev_hi = deviation_gain(hi, p2, player, config) > 0
    if dev_lo == dev_hi:
        return math.nan, ("always_deviates" if dev_lo else "never_deviates")
    if not dev_lo:
        return math.nan, "reversed_sign_change"
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if deviation_gain(mid, p2, player, config) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2, "ok"


@dataclass(frozen=True)
class ScanCell:
    p2: float
    w2: float
    s21_ne: bool
    s12_ne: bool
    dominance: bool
    error: str | None = None


@dataclass
class RegionScan:
    alpha: float
    p2_values: tuple
    w2_values: tuple
    cells: list = field(default_factory=list)
    thresholds: list = field(default_factory=list)   # (p2, t1, t2, upper_bound, status1, status2)
    mechanism: Mechanism = SCAN_MECHANISM
    note: str = DISCLAIMER

    def cell(self, i, j) -> ScanCell:
        return self.cells[i * len(self.w2_values) + j]


def scan_cell(p2, w2, config: GameConfig) -> ScanCell:
    try:
        s21, s12 = candidate_profiles(w2, p2, config.alpha)
        return ScanCell(p2, w2, check_candidate(w2, p2, s21, config).is_nash,
                        check_candidate(w2, p2, s12, config).is_nash,
                        dominance_condition(w2, p2, config.alpha))
    except (RuntimeError, ValueError) as exc:
        return ScanCell(p2, w2, False, False, dominance_condition(w2, p2, config.alpha), str(exc))


def column_thresholds(p2, w2_range, config: GameConfig):
    t1, s1 = deviation_threshold(p2, 0, w2_range, config)
    t2, s2 = deviation_threshold(p2, 1, w2_range, config)
    return p2, t1, t2, dominance_bound(p2, config.alpha), s1, s2


def _cell_args(args):
    return scan_cell(*args)


def _column_args(args):
    return column_thresholds(*args)


def uniqueness_scan(p2_range=(0.1, 5.0), w2_range=(0.1, 3.0), grid=(100, 100), config: GameConfig | None = None,
                    cells: bool = True, thresholds: bool = True, workers: int = 1) -> RegionScan:
    """Flag, on a ``(p_2, w_2)`` grid, which candidate is an epsilon-equilibrium, and
    extract per ``p_2`` column the deviation thresholds of both players at S12.

    Cell failures are recorded on the cell and the scan continues.
    """
    config = config or GameConfig(alpha=2.0)
    n_p, n_w = grid
    p2s = tuple(float(x) for x in np.linspace(*p2_range, n_p))
    w2s = tuple(float(x) for x in np.linspace(*w2_range, n_w))
    scan = RegionScan(config.alpha, p2s, w2s)
    cell_jobs = [(p, w, config) for p in p2s for w in w2s] if cells else []
    col_jobs = [(p, w2_range, config) for p in p2s] if thresholds else []
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            scan.cells = list(pool.map(_cell_args, cell_jobs, chunksize=16))
            scan.thresholds = list(pool.map(_column_args, col_jobs))
    else:
        scan.cells = [_cell_args(a) for a in cell_jobs]
        scan.thresholds = [_column_args(a) for a in col_jobs]
    return scan
