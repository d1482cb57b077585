"""Domain types shared by the scheduling game: jobs, configuration, profiles, schedules.

All arithmetic is written against plain operators so that the same code runs on
Python floats and on ``mpmath.mpf`` values (used when a computation has to
resolve differences far below double precision).
"""

from __future__ import annotations

import enum
import sys
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

DEFAULT_MIN_GAP = 1e-9
WORKLOAD_RTOL = 1e-9


class WaitingCostMode(str, enum.Enum):
    ABSOLUTE = "absolute"   # p_i * d_i
    RELATIVE = "relative"   # p_i * (d_i - r_i)


class Mechanism(str, enum.Enum):
    PROPORTIONAL = "proportional"
    MARGINAL = "marginal"


class InfeasibleProfileError(ValueError):
    """A deadline does not exceed its job's release time (by the minimum gap)."""


class InstanceParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


def machine_eps(x) -> float:
    """Relative resolution of the number type of ``x``."""
    if isinstance(x, float) or isinstance(x, int):
        return sys.float_info.epsilon
    import mpmath

    return mpmath.mp.eps


@dataclass(frozen=True)
class Job:
    id: int
    workload: float
    release: float
    priority: float

    def __post_init__(self):
        if not self.workload > 0:
            raise ValueError(f"job {self.id}: workload must be positive, got {self.workload}")
        if not self.priority > 0:
            raise ValueError(f"job {self.id}: priority must be positive, got {self.priority}")
        if not self.release >= 0:
            raise ValueError(f"job {self.id}: release must be nonnegative, got {self.release}")


def check_jobs(jobs: Sequence[Job]) -> None:
    ids = [j.id for j in jobs]
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate job ids in {ids}")


def unit_jobs(n: int = 2) -> list[Job]:
    """``n`` identical jobs with unit workload and priority, released at time 0."""
    return [Job(i, 1.0, 0.0, 1.0) for i in range(n)]


@dataclass(frozen=True)
class GameConfig:
    alpha: float = 3.0
    waiting_cost_mode: WaitingCostMode = WaitingCostMode.ABSOLUTE
    epsilon: float = 1e-9
    min_gap: float = DEFAULT_MIN_GAP

    def __post_init__(self):
        object.__setattr__(self, "waiting_cost_mode", WaitingCostMode(self.waiting_cost_mode))
        if not self.alpha >= 2:
            raise ValueError(f"alpha must be >= 2, got {self.alpha}")
        if self.alpha > 3:
            warnings.warn(f"alpha={self.alpha} lies outside the physical range [2, 3]", stacklevel=3)
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if not self.min_gap > 0:
            raise ValueError(f"min_gap must be positive, got {self.min_gap}")

    def waiting_cost(self, job: Job, deadline):
        if self.waiting_cost_mode is WaitingCostMode.RELATIVE:
            return job.priority * (deadline - job.release)
        return job.priority * deadline


@dataclass(frozen=True)
class StrategyProfile:
    """Declared deadlines, indexed by job id."""

    deadlines: tuple

    def __post_init__(self):
        object.__setattr__(self, "deadlines", tuple(self.deadlines))

    def __getitem__(self, i):
        return self.deadlines[i]

    def __len__(self):
        return len(self.deadlines)

    def __iter__(self) -> Iterator:
        return iter(self.deadlines)

    def with_deadline(self, i: int, d) -> "StrategyProfile":
        ds = list(self.deadlines)
        ds[i] = d
        return StrategyProfile(tuple(ds))

    def distance(self, other: "StrategyProfile"):
        """Sup-norm distance between two profiles."""
        return max(abs(a - b) for a, b in zip(self.deadlines, other.deadlines))


def check_feasible(jobs: Sequence[Job], profile: StrategyProfile, min_gap=0.0) -> None:
    """Raise :class:`InfeasibleProfileError` unless ``d_j > r_j`` for every job."""
    for j in jobs:
        if j.id >= len(profile):
            raise InfeasibleProfileError(f"no deadline declared for job {j.id}")
        d = profile[j.id]
        if not d > j.release + min_gap:
            raise InfeasibleProfileError(
                f"job {j.id}: deadline {d} must exceed release {j.release}"
                + (f" by at least {min_gap}" if min_gap else "")
            )


@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    speed: float
    job_id: int | None   # None marks idle time

    @property
    def length(self):
        return self.end - self.start

    @property
    def work(self):
        return self.speed * (self.end - self.start)


@dataclass(frozen=True)
class SpeedSchedule:
    segments: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def energy(self, alpha):
        return energy(self, alpha)

    def job_energy(self, alpha) -> dict:
        out: dict = {}
        for s in self.segments:
            if s.job_id is None:
                continue
            out[s.job_id] = out.get(s.job_id, 0) + s.speed ** alpha * s.length
        return out

    def job_work(self) -> dict:
        out: dict = {}
        for s in self.segments:
            if s.job_id is not None:
                out[s.job_id] = out.get(s.job_id, 0) + s.work
        return out

    def job_speeds(self) -> dict:
        out: dict = {}
        for s in self.segments:
            if s.job_id is not None:
                out.setdefault(s.job_id, []).append(s.speed)
        return out

    def speed_at(self, t):
        for s in self.segments:
            if s.start <= t < s.end:
                return s.speed
        return 0.0


def energy(schedule: SpeedSchedule, alpha):
    """Total energy: sum of speed**alpha * length over all segments."""
    return sum((s.speed ** alpha * s.length for s in schedule.segments), 0.0 * alpha)


def validate_schedule(schedule: SpeedSchedule, jobs: Sequence[Job], profile: StrategyProfile,
                      rtol: float = WORKLOAD_RTOL) -> list[str]:
    """List every invariant violation of ``schedule``; an empty list means it is valid."""
    violations = []
    by_id = {j.id: j for j in jobs}
    segs = schedule.segments
    scale = max([abs(s.end) for s in segs] + [1.0])
    ttol = rtol * scale

    for k, s in enumerate(segs):
        if not s.start < s.end:
            violations.append(f"segment {k}: empty or reversed interval [{s.start}, {s.end})")
        if s.speed < 0:
            violations.append(f"segment {k}: negative speed {s.speed}")
        if k and segs[k - 1].end > s.start + ttol:
            violations.append(f"segment {k}: overlap with previous segment")
        if s.job_id is None:
            continue
        if s.job_id not in by_id:
            violations.append(f"segment {k}: unknown job {s.job_id}")
            continue
        job = by_id[s.job_id]
        if s.start < job.release - ttol:
            violations.append(f"job {job.id} runs before release ({s.start} < {job.release})")
        if s.end > profile[job.id] + ttol:
            violations.append(f"job {job.id} runs after deadline ({s.end} > {profile[job.id]})")

    work = schedule.job_work()
    for j in jobs:
        done = work.get(j.id, 0.0)
        if abs(done - j.workload) > rtol * j.workload:
            violations.append(f"job {j.id}: workload mismatch (executed {done}, required {j.workload})")

    # EDF: every running job must be the (deadline, id)-minimal released unfinished job.
    done = {j.id: 0.0 for j in jobs}
    for k, s in enumerate(segs):
        if s.job_id is not None and s.job_id in by_id:
            ready = [j for j in jobs
                     if j.release <= s.start + ttol and j.workload - done[j.id] > rtol * j.workload]
            if ready:
                first = min(ready, key=lambda j: (profile[j.id], j.id))
                if first.id != s.job_id:
                    violations.append(
                        f"EDF order violated at t={s.start}: job {s.job_id} runs while job {first.id} is pending")
            done[s.job_id] += s.work
    return violations


def parse_instance(text: str) -> tuple[list[Job], dict]:
    """Parse an instance file: a header ``alpha=<real> mode=<absolute|relative>`` then ``id w r p`` lines.

    Returns the jobs and the header settings (keys ``alpha`` and ``mode``).
    """
    header: dict = {}
    jobs: list[Job] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not seen_header:
            seen_header = True
            for tok in line.split():
                col = raw.find(tok) + 1
                key, sep, value = tok.partition("=")
                if not sep:
                    raise InstanceParseError(f"expected key=value in header, got {tok!r}", lineno, col)
                if key == "alpha":
                    header["alpha"] = _parse_real(value, lineno, col)
                elif key == "mode":
                    try:
                        header["mode"] = WaitingCostMode(value)
                    except ValueError:
                        raise InstanceParseError(f"unknown mode {value!r}", lineno, col) from None
                else:
                    raise InstanceParseError(f"unknown header key {key!r}", lineno, col)
            continue
        fields = line.split()
        if len(fields) != 4:
            raise InstanceParseError(f"expected 4 fields 'id w r p', got {len(fields)}", lineno, 1)
        cols = [raw.find(f) + 1 for f in fields]
        try:
            jid = int(fields[0])
        except ValueError:
            raise InstanceParseError(f"job id must be an integer, got {fields[0]!r}", lineno, cols[0]) from None
        w, r, p = (_parse_real(f, lineno, c) for f, c in zip(fields[1:], cols[1:]))
        try:
            jobs.append(Job(jid, w, r, p))
        except ValueError as exc:
            raise InstanceParseError(str(exc), lineno, 1) from None
    if not seen_header:
        raise InstanceParseError("missing header line")
    ids = sorted(j.id for j in jobs)
    if ids != list(range(len(jobs))):
        raise InstanceParseError(f"job ids must be 0..{len(jobs) - 1}, got {ids}")
    jobs.sort(key=lambda j: j.id)
    return jobs, header


def parse_profile(text: str, n: int | None = None) -> StrategyProfile:
    """Parse ``id d`` lines into a profile."""
    entries: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise InstanceParseError(f"expected 2 fields 'id d', got {len(fields)}", lineno, 1)
        try:
            jid = int(fields[0])
        except ValueError:
            raise InstanceParseError(f"job id must be an integer, got {fields[0]!r}", lineno, 1) from None
        entries[jid] = _parse_real(fields[1], lineno, raw.find(fields[1]) + 1)
    n = len(entries) if n is None else n
    if sorted(entries) != list(range(n)):
        raise InstanceParseError(f"profile must declare deadlines for ids 0..{n - 1}, got {sorted(entries)}")
    return StrategyProfile(tuple(entries[i] for i in range(n)))


def _parse_real(tok: str, line: int, col: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise InstanceParseError(f"not a real number: {tok!r}", line, col) from None


def profile_of(deadlines: Iterable) -> StrategyProfile:
    return StrategyProfile(tuple(deadlines))
