"""Minimum-energy speed scaling schedules.

``yds_schedule`` repeatedly commits the interval of maximal density and runs the
jobs it contains in EDF order at that density.  ``oracle_energy`` solves the same
convex problem by an unrelated route (block coordinate descent over a slot grid)
and is only meant for cross-checking.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Job, Segment, SpeedSchedule, StrategyProfile, check_feasible


@dataclass(frozen=True)
class DensityInterval:
    start: float
    end: float
    domain_length: float
    included_jobs: frozenset
    density: float


def _covered(support, a, b):
    """Length of ``[a, b)`` covered by the sorted disjoint intervals in ``support``."""
    total = 0
    for s, e in support:
        if e <= a:
            continue
        if s >= b:
            break
        total += min(e, b) - max(s, a)
    return total


def _domain(support, a, b):
    """Pieces of ``[a, b)`` not covered by ``support``."""
    pieces = []
    t = a
    for s, e in support:
        if e <= t:
            continue
        if s >= b:
            break
        if s > t:
            pieces.append((t, s))
        t = max(t, e)
    if t < b:
        pieces.append((t, b))
    return pieces


def _add_support(support, a, b):
    merged = []
    for s, e in sorted(support + [(a, b)]):
        if merged and s <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], e))
        else:
            merged.append((s, e))
    return merged


def max_density_interval(pending: Sequence[Job], deadlines, support) -> DensityInterval | None:
    """Densest interval whose endpoints are event times of the pending jobs.

    Ties go to the smaller start, then the smaller end.
    """
    times = sorted({j.release for j in pending} | {deadlines[j.id] for j in pending})
    best = None
    best_density = None
    for ia, a in enumerate(times):
        for b in times[ia + 1:]:
            inside = [j for j in pending if j.release >= a and deadlines[j.id] <= b]
            if not inside:
                continue
            length = (b - a) - _covered(support, a, b)
            if not length > 0:
                continue
            density = sum(j.workload for j in inside) / length
            if best is None or density > best_density:
                best_density = density
                best = DensityInterval(a, b, length, frozenset(j.id for j in inside), density)
    return best


def _edf_fill(jobs: Sequence[Job], deadlines, pieces, speed) -> list[Segment]:
    remaining = {j.id: j.workload for j in jobs}
    arrivals = sorted(jobs, key=lambda j: (j.release, j.id))
    ready: list = []   # heap of (deadline, id)
    nxt = 0            # first job of ``arrivals`` not yet pushed
    left = len(jobs)
    out = []
    for ps, pe in pieces:
        t = ps
        while t < pe:
            while nxt < len(arrivals) and arrivals[nxt].release <= t:
                j = arrivals[nxt]
                heapq.heappush(ready, (deadlines[j.id], j.id))
                nxt += 1
            horizon = min(pe, arrivals[nxt].release) if nxt < len(arrivals) else pe
            if not ready:
                if nxt == len(arrivals):
                    break
                t = horizon
                continue
            jid = ready[0][1]
            finish = t + remaining[jid] / speed
            if finish <= horizon:
                end = finish
                remaining[jid] = 0
                heapq.heappop(ready)
                left -= 1
            else:
                end = horizon
                remaining[jid] -= (end - t) * speed
            if end > t:
                out.append(Segment(t, end, speed, jid))
            t = end
        if left == 0:
            break
    return out


def _merge(segments):
    merged = []
    for s in segments:
        if merged:
            m = merged[-1]
            if m.job_id == s.job_id and m.end == s.start and m.speed == s.speed:
                merged[-1] = Segment(m.start, s.end, m.speed, m.job_id)
                continue
        merged.append(s)
    return merged


def critical_intervals(jobs: Sequence[Job], profile: StrategyProfile) -> list[DensityInterval]:
    """The sequence of intervals committed by the max-density procedure, in commit order."""
    return _run(jobs, profile)[1]


def _run(jobs, profile):
    check_feasible(jobs, profile)
    deadlines = profile.deadlines
    pending = list(jobs)
    support: list = []
    segments: list[Segment] = []
    chosen = []
    while pending:
        iv = max_density_interval(pending, deadlines, support)
        if iv is None:   # only possible for degenerate input
            raise ValueError("no interval with positive domain left for pending jobs")
        inside = [j for j in pending if j.id in iv.included_jobs]
        pieces = _domain(support, iv.start, iv.end)
        segments.extend(_edf_fill(inside, deadlines, pieces, iv.density))
        support = _add_support(support, iv.start, iv.end)
        pending = [j for j in pending if j.id not in iv.included_jobs]
        chosen.append(iv)
    segments.sort(key=lambda s: s.start)
    return SpeedSchedule(tuple(_merge(segments))), chosen


def yds_schedule(jobs: Sequence[Job], profile: StrategyProfile) -> SpeedSchedule:
    """Energy-minimal feasible schedule for the declared deadlines."""
    return _run(jobs, profile)[0]


def optimal_energy(jobs: Sequence[Job], profile: StrategyProfile, alpha):
    if not jobs:
        return 0.0 * alpha
    return yds_schedule(jobs, profile).energy(alpha)


def event_times(jobs: Sequence[Job], profile: StrategyProfile) -> list:
    return sorted({j.release for j in jobs} | {profile[j.id] for j in jobs})


def speed_profile(schedule: SpeedSchedule, times) -> list:
    """Speed of ``schedule`` on each elementary interval ``[times[k-1], times[k])``."""
    return [schedule.speed_at((a + b) / 2) for a, b in zip(times, times[1:])]


# ---------------------------------------------------------------------------
# independent oracle


def _water_fill(base_speed, lengths, work):
    """Pour ``work`` into slots with current speeds ``base_speed`` so the top speed level is minimal.

    Returns the per-slot allocation.
    """
    order = np.argsort(base_speed, kind="stable")
    u = base_speed[order]
    L = lengths[order]
    cum_L = np.cumsum(L)
    cum_Lu = np.cumsum(L * u)
    levels = (work + cum_Lu) / cum_L
    # level using the m cheapest slots is valid once it does not exceed the next slot's speed
    nxt = np.append(u[1:], np.inf)
    m = int(np.argmax(levels <= nxt))
    level = levels[m]
    alloc = np.zeros_like(u)
    alloc[: m + 1] = np.maximum(level - u[: m + 1], 0.0) * L[: m + 1]
    out = np.empty_like(alloc)
    out[order] = alloc
    # renormalise away round-off so the job's total stays exact
    total = out.sum()
    if total > 0:
        out *= work / total
    return out


def oracle_energy(jobs: Sequence[Job], profile: StrategyProfile, alpha, grid_n: int = 2000,
                  max_sweeps: int = 10_000, rtol: float = 1e-12) -> float:
    """Approximate minimum energy by block coordinate descent on a refined slot grid.

    Each job's workload is spread over the slots inside its window; a sweep
    re-optimises one job at a time exactly (water-filling) against the others.
    """
    if not jobs:
        return 0.0
    check_feasible(jobs, profile)
    events = np.array(sorted({float(j.release) for j in jobs} | {float(profile[j.id]) for j in jobs}))
    if grid_n < len(events):
        raise ValueError(f"grid_n={grid_n} is smaller than the {len(events)} distinct event times")
    alpha = float(alpha)
    grid = np.unique(np.concatenate([np.linspace(events[0], events[-1], grid_n + 1), events]))
    lengths = np.diff(grid)
    mids = (grid[:-1] + grid[1:]) / 2
    masks = [(mids > j.release) & (mids < profile[j.id]) for j in jobs]
    alloc = []
    for j, mask in zip(jobs, masks):
        x = np.zeros_like(lengths)
        x[mask] = lengths[mask] * (j.workload / lengths[mask].sum())
        alloc.append(x)
    load = np.sum(alloc, axis=0)

    def objective():
        return float(np.sum((load / lengths) ** alpha * lengths))

    value = objective()
    for _ in range(max_sweeps):
        for k, (j, mask) in enumerate(zip(jobs, masks)):
            load -= alloc[k]
            x = np.zeros_like(lengths)
            x[mask] = _water_fill(load[mask] / lengths[mask], lengths[mask], j.workload)
            alloc[k] = x
            load += x
        new = objective()
        if value - new <= rtol * abs(new):
            value = min(value, new)
            break
        value = new
    return value
