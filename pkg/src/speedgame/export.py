"""CSV writers and readers for schedules, cost reports, curves, traces and scans.

Reals are written with 12 significant digits so golden files diff cleanly.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable

from .core import Segment, SpeedSchedule


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".12g")


def _table(header: Iterable[str], rows: Iterable[Iterable], trailer: Iterable[str] = ()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    for line in trailer:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def schedule_csv(schedule: SpeedSchedule, alpha) -> str:
    rows = [(s.start, s.end, s.speed, "idle" if s.job_id is None else s.job_id) for s in schedule.segments]
    return _table(["start", "end", "speed", "job_id"], rows, [f"energy={fmt(schedule.energy(alpha))}"])


def read_schedule_csv(text: str) -> SpeedSchedule:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    segs = []
    for row in csv.DictReader(lines):
        job = None if row["job_id"] == "idle" else int(row["job_id"])
        segs.append(Segment(float(row["start"]), float(row["end"]), float(row["speed"]), job))
    return SpeedSchedule(tuple(segs))


def cost_report_csv(report, ids) -> str:
    rows = [(i, b, w, p) for i, b, w, p in zip(ids, report.cost_shares, report.waiting_costs, report.penalties)]
    rows.append(("total", report.total_cost_share, sum(report.waiting_costs), report.utilitarian_social_cost))
    trailer = [f"mechanism={report.mechanism.value}",
               f"optimal_energy={fmt(report.optimal_energy)}",
               f"effective_social_cost={fmt(report.effective_social_cost)}"]
    return _table(["id", "share", "waiting", "penalty"], rows, trailer)


def curve_csv(rows) -> str:
    """Rows of ``(d_other, d_star, value, regime)``."""
    return _table(["d_other", "d_star", "value", "regime"], rows)


def trace_csv(trace) -> str:
    rows = [(k, s.player, s.d_old, s.d_new, s.penalty_old, s.penalty_new, s.phi_after)
            for k, s in enumerate(trace.steps, start=1)]
    summary = f"verdict={trace.verdict.value} steps={len(trace.steps)} order={trace.order.value}"
    if trace.cycle:
        summary += f" cycle_start={trace.cycle[0]} period={trace.cycle[1]}"
    summary += " final=" + ";".join(fmt(d) for d in trace.final)
    return _table(["step", "player", "d_old", "d_new", "penalty_old", "penalty_new", "phi"], rows) + summary + "\n"


def scan_csv(scan) -> str:
    rows = [(c.p2, c.w2, c.s21_ne, c.s12_ne, c.dominance) for c in scan.cells]
    return _table(["p2", "w2", "s21_ne", "s12_ne", "dominance"], rows,
                  [f"alpha={fmt(scan.alpha)} mechanism={scan.mechanism.value}", scan.note])


def thresholds_csv(scan) -> str:
    rows = [(p2, t1, t2, ub) for p2, t1, t2, ub, _, _ in scan.thresholds]
    odd = [f"p2={fmt(p2)}: t1 {s1}, t2 {s2}" for p2, _, _, _, s1, s2 in scan.thresholds
           if (s1, s2) != ("ok", "ok")]
    return _table(["p2", "t1", "t2", "upper_bound"], rows,
                  [f"alpha={fmt(scan.alpha)} mechanism={scan.mechanism.value}"] + odd)
