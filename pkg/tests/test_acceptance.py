"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v -s`` or ``python3 tests/test_acceptance.py``.
The lines are also repeated in the terminal summary.
"""

import math
import random
import sys
import time
from pathlib import Path

import mpmath
import pytest
from scipy.optimize import brentq

sys.path.insert(0, str(Path(__file__).parent))
from conftest import random_instance  # noqa: E402

from speedgame import cli
from speedgame.bestresp import (closed_form_response_prop, local_minima_table, marg_penalty,
                                numeric_best_response, prop_penalty, threshold_d21, threshold_d22)
from speedgame.core import GameConfig, Job, StrategyProfile, unit_jobs
from speedgame.dynamics import Verdict, delta_sequence, detect_cycle, run_dynamics
from speedgame.equilibria import (candidate_profiles, check_candidate, column_thresholds,
                                  dominance_condition)
from speedgame.mechanisms import marginal_shares, penalties, potential, proportional_shares
from speedgame.yds import optimal_energy, oracle_energy

RESULTS: dict = {}


def record(num, title, ok, detail=""):
    line = f"criterion {num:2d} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
    RESULTS[num] = line
    print(line)
    assert ok, line


def test_c01_yds_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for s in range(100):
        alpha = (2.0, 2.5, 3.0)[s % 3]
        jobs, prof = random_instance(1000 + s, n_max=6)
        e = optimal_energy(jobs, prof, alpha)
        worst = max(worst, abs(e - oracle_energy(jobs, prof, alpha)) / (1 + e))
    dt = time.perf_counter() - t0
    record(1, "YDS vs discretised oracle", worst <= 1e-3 and dt < 30,
           f"max |E-oracle|/(1+E)={worst:.2e}, {dt:.2f}s")


def test_c02_single_player():
    rng = random.Random(2)
    worst = 0.0
    for _ in range(50):
        w, r, p, alpha = rng.uniform(0.1, 5), rng.uniform(0, 5), rng.uniform(0.1, 5), rng.uniform(2, 3)
        job = Job(0, w, r, p)
        br = numeric_best_response([job], StrategyProfile((r + 1.0,)), 0, "marginal", GameConfig(alpha=alpha))
        worst = max(worst, abs(br.deadline - (r + w * (alpha - 1) ** (1 / alpha) * p ** (-1 / alpha))))
    record(2, "single-player closed form", worst <= 1e-8, f"max error {worst:.2e}")


def test_c03_penalty_branches():
    rng = random.Random(3)
    cfg, jobs = GameConfig(alpha=3.0), unit_jobs(2)
    wf = wh = 0.0
    for _ in range(1000):
        d1, d2 = rng.uniform(0.05, 5), rng.uniform(0.05, 5)
        rep = penalties(jobs, StrategyProfile((d1, d2)), "proportional", cfg)
        wf = max(wf, abs(rep.penalties[0] - prop_penalty(d1, d2, 3.0)[0]))
    for _ in range(1000):
        d1, d2 = rng.uniform(0.05, 5), rng.uniform(0.05, 5)
        rep = penalties(jobs, StrategyProfile((d1, d2)), "marginal", cfg)
        wh = max(wh, abs(rep.penalties[1] - marg_penalty(d2, d1, 3.0)[0]))
    record(3, "f1..f4 and h1..h4 reproduction", max(wf, wh) <= 1e-9, f"max error f {wf:.1e}, h {wh:.1e}")


def test_c04_proportional_regimes():
    worst, details = 0.0, []
    ok = True
    for alpha in (2.0, 3.0):
        cfg = GameConfig(alpha=alpha)
        for k in range(200):
            d2 = 0.05 + (4.0 - 0.05) * k / 199
            num = numeric_best_response(unit_jobs(2), StrategyProfile((1.0, d2)), 0, "proportional", cfg)
            worst = max(worst, abs(num.deadline - closed_form_response_prop(d2, alpha).deadline))
        g = local_minima_table(alpha)
        # d21 independently: the crossing of g3 and g4
        root = brentq(lambda d: g["f4"][1](d) - g["f3"][1](d), 1e-6, 5, xtol=1e-15, rtol=1e-15)
        e21 = abs(threshold_d21(alpha) - root)
        d22, upper = threshold_d22(alpha), 2 * ((alpha - 1) / 2) ** (1 / alpha)
        inside = threshold_d21(alpha) < d22 < upper if alpha > 2 else abs(d22 - threshold_d21(alpha)) < 1e-12
        ok &= e21 <= 1e-10 and inside
        details.append(f"alpha={alpha:g}: d21 err {e21:.1e}, d22={d22:.6f}")
    ok &= worst <= 1e-6
    record(4, "proportional best-response regimes", ok, f"max BR error {worst:.1e}; " + "; ".join(details))


def test_c05_no_pure_equilibrium():
    cfg = GameConfig(alpha=3.0, epsilon=1e-6)
    t0 = time.perf_counter()
    trace = run_dynamics(unit_jobs(2), StrategyProfile((4.0, 4.0)), "proportional", cfg,
                         max_steps=10_000, stop_on_cycle=False)
    dt = time.perf_counter() - t0
    fired = detect_cycle(trace) is not None
    ok = len(trace.steps) == 10_000 and trace.verdict is not Verdict.EQUILIBRIUM and fired and dt < 10
    record(5, "proportional dynamics never settle", ok,
           f"{len(trace.steps)} steps, verdict={trace.verdict.value}, cycle={trace.cycle}, {dt:.2f}s")


def test_c06_slow_convergence():
    old = mpmath.mp.dps
    try:
        mpmath.mp.dps = 100
        m = mpmath.mpf
        jobs = [Job(0, m(1), m(0), m(1)), Job(1, m(1), m(0), m(1))]
        c = m(2) ** (m(1) / 3)
        cfg = GameConfig(m(3), epsilon=m(0), min_gap=m("1e-90"))
        trace = run_dynamics(jobs, StrategyProfile((m("1.2"), m("1.2") + c)), "marginal", cfg, max_steps=100)
        ds = delta_sequence(trace, 3)
        # the limit: player 1 leads at the single-player length of the pair, player 2 trails
        eq = (m(1), 1 + c)
        dist = [abs(p[0] - eq[0]) + abs(p[1] - eq[1]) for p in trace.all_profiles]
        ok = (len(trace.steps) == 100 and trace.verdict is Verdict.BUDGET_EXHAUSTED
              and all(1 < d < m("1.2") for d in ds)
              and all(a > b for a, b in zip(ds, ds[1:]))
              and all(a > b for a, b in zip(dist, dist[1:]))
              and all(x > 0 for x in dist))
        detail = f"{len(ds)} deltas, last delta-1={mpmath.nstr(ds[-1] - 1, 3)}, final distance={mpmath.nstr(dist[-1], 3)}"
    finally:
        mpmath.mp.dps = old
    record(6, "marginal dynamics converge without arriving", ok, detail)


def test_c07_sandwich():
    worst = -math.inf
    for s in range(200):
        jobs, prof = random_instance(7000 + s, n_max=6)
        alpha = (2.0, 2.5, 3.0)[s % 3]
        pr, mg = proportional_shares(jobs, prof, alpha), marginal_shares(jobs, prof, alpha)
        for a, b in zip(pr, mg):
            worst = max(worst, a - b - 1e-9, b - alpha * a - 1e-9)
    record(7, "proportional <= marginal <= alpha*proportional", worst <= 0, f"max violation {worst:.1e}")


def test_c08_tight_example():
    n, alpha = 1000, 2.0
    jobs = [Job(i, 1 / n, 0.0, 1.0) for i in range(n)]
    total = sum(marginal_shares(jobs, StrategyProfile((1.0,) * n), alpha))
    exact = n - n * (1 - 1 / n) ** alpha
    ok = abs(total - exact) <= 1e-6 and abs(exact - (2 - 1 / n)) <= 1e-9 and abs(total - alpha) / alpha <= 1e-3
    record(8, "tight marginal overcharge", ok, f"total={total:.9f}, expected {exact:.9f}, limit {alpha:g}")


def test_c09_potential_law():
    rng = random.Random(9)
    worst = 0.0
    for k in range(500):
        jobs, prof = random_instance(9000 + k // 5, n_max=5)
        cfg = GameConfig(alpha=rng.choice([2.0, 2.5, 3.0]))
        i = rng.randrange(len(jobs))
        moved = prof.with_deadline(i, jobs[i].release + rng.uniform(0.05, 5.0))
        dpen = (penalties(jobs, moved, "marginal", cfg).penalties[i]
                - penalties(jobs, prof, "marginal", cfg).penalties[i])
        dphi = potential(jobs, moved, cfg) - potential(jobs, prof, cfg)
        worst = max(worst, abs(dpen - dphi))
    record(9, "exact potential under marginal sharing", worst <= 1e-7, f"max |dpen - dphi| {worst:.1e}")


def test_c10_equilibria():
    cfg = GameConfig(alpha=2.0)
    s21, s12 = candidate_profiles(1.0, 1.0, 2.0)
    ok = check_candidate(1.0, 1.0, s21, cfg).is_nash and check_candidate(1.0, 1.0, s12, cfg).is_nash
    detail = [f"unit cell S21/S12 NE: {ok}"]
    # shaded region: dominance holds and both players leave S12
    rng = random.Random(10)
    cols = {}
    cells = []
    while len(cells) < 20:
        p2 = round(rng.uniform(1.0, 5.0), 2)
        if p2 not in cols:
            _, t1, t2, _, s1, s2 = column_thresholds(p2, (0.1, 3.0), cfg)
            t1 = 3.0 if s1 == "always_deviates" else t1
            t2 = 3.0 if s2 == "always_deviates" else t2
            cols[p2] = min(t1, t2)
        top = cols[p2]
        if not top > 0.11:
            continue
        w2 = rng.uniform(0.1, top - 0.01)
        if dominance_condition(w2, p2, 2.0):
            cells.append((p2, w2))
    good = 0
    for p2, w2 in cells:
        a, b = candidate_profiles(w2, p2, 2.0)
        good += check_candidate(w2, p2, a, cfg).is_nash and not check_candidate(w2, p2, b, cfg).is_nash
    detail.append(f"{good}/20 shaded cells with S21 the only NE")
    record(10, "two-player equilibria at alpha=2", ok and good == 20, "; ".join(detail))


def test_c11_cross_monotonicity():
    vals = []
    ok = True
    for alpha in (2.0, 3.0):
        alone = marginal_shares([Job(0, 1.0, 0.0, 1.0)], StrategyProfile((1.0,)), alpha)[0]
        paired = marginal_shares(unit_jobs(2), StrategyProfile((1.0, 1.0)), alpha)[0]
        ok &= abs(paired - (2 ** alpha - 1)) <= 1e-12 and abs(alone - 1) <= 1e-12 and paired > alone
        vals.append(f"alpha={alpha:g}: {paired:g} vs {alone:g}")
    record(11, "marginal sharing is not cross-monotonic", ok, "; ".join(vals))


def test_c12_determinism(tmp_path):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        assert cli.main(["figures", "--grid", "3x1", "--out", str(d)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    ok = outs[0] == outs[1] and len(outs[0]) == 5
    record(12, "figures output is byte-identical across runs", ok, f"{len(outs[0])} files compared")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
