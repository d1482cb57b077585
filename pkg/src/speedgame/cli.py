"""Command-line front end.

Examples::

    speedgame schedule instance.txt --profile profile.txt --out out/
    speedgame dynamics instance.txt --profile start.txt --mechanism proportional --max-steps 100
    speedgame scan --alpha 2 --grid 40x40 --out scan/
    speedgame figures --alpha 3 --out figs/
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import export
from .bestresp import PreconditionError, UnboundedWindowError, numeric_best_response
from .core import (GameConfig, InfeasibleProfileError, InstanceParseError, Mechanism, WaitingCostMode,
                   parse_instance, parse_profile)
from .dynamics import DynamicsError, Order, run_dynamics
from .equilibria import verify_equilibrium, uniqueness_scan
from .figures import all_figures
from .mechanisms import penalties
from .yds import yds_schedule

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARSE = 3
EXIT_INFEASIBLE = 4
EXIT_NUMERIC = 5

SUBCOMMANDS = ("schedule", "shares", "bestresp", "dynamics", "verify", "scan", "figures")


def _grid(text: str):
    try:
        n, m = (int(x) for x in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}") from None
    if n < 1 or m < 1:
        raise argparse.ArgumentTypeError("grid dimensions must be positive")
    return n, m


def _positive(kind):
    def parse(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="speedgame", description="Speed-scaling scheduling game engine.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="energy exponent (>= 2)")
    common.add_argument("--epsilon", type=_positive(float), help="equilibrium / improvement tolerance")
    common.add_argument("--mode", choices=[m.value for m in WaitingCostMode])
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")

    game = argparse.ArgumentParser(add_help=False)
    game.add_argument("instance", type=Path)
    game.add_argument("--profile", type=Path, required=True, help="file of 'id d' lines")
    game.add_argument("--mechanism", choices=[m.value for m in Mechanism], default="marginal")

    sub.add_parser("schedule", parents=[common, game], help="minimum-energy schedule")
    sub.add_parser("shares", parents=[common, game], help="cost shares and penalties")
    p = sub.add_parser("bestresp", parents=[common, game], help="best response of one player")
    p.add_argument("--player", type=int, default=0)
    p = sub.add_parser("dynamics", parents=[common, game], help="best-response dynamics")
    p.add_argument("--max-steps", type=_positive(int), default=1000)
    p.add_argument("--order", choices=[o.value for o in Order], default="round_robin")
    p.add_argument("--keep-going", action="store_true", help="continue to the step budget after a cycle")
    p.add_argument("--dps", type=_positive(int), help="run in mpmath with this many decimal digits")
    sub.add_parser("verify", parents=[common, game], help="epsilon-Nash check")
    p = sub.add_parser("scan", parents=[common], help="two-player uniqueness scan (marginal sharing)")
    p.add_argument("--grid", type=_grid, default=(100, 100), help="NxM cells over p2 x w2")
    p.add_argument("--workers", type=_positive(int), default=1)
    p = sub.add_parser("figures", parents=[common], help="data for all plots")
    p.add_argument("--grid", type=_grid, default=(100, 1), help="N p2 columns for the thresholds (M ignored)")
    p.add_argument("--workers", type=_positive(int), default=1)
    return parser


def _config(args, header=None) -> GameConfig:
    header = header or {}
    kw = {}
    alpha = args.alpha if args.alpha is not None else header.get("alpha")
    if alpha is not None:
        kw["alpha"] = alpha
    mode = args.mode if args.mode is not None else header.get("mode")
    if mode is not None:
        kw["waiting_cost_mode"] = WaitingCostMode(mode)
    if args.epsilon is not None:
        kw["epsilon"] = args.epsilon
    return GameConfig(**kw)


def _load(args):
    jobs, header = parse_instance(args.instance.read_text(encoding="utf-8"))
    profile = parse_profile(args.profile.read_text(encoding="utf-8"), len(jobs))
    return jobs, profile, _config(args, header)


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text, encoding="utf-8")
    return path


def cmd_schedule(args):
    jobs, profile, cfg = _load(args)
    sched = yds_schedule(jobs, profile)
    path = _write(args.out, "schedule.csv", export.schedule_csv(sched, cfg.alpha))
    for s in sched.segments:
        print(f"[{export.fmt(s.start)}, {export.fmt(s.end)})  speed {export.fmt(s.speed)}  job {s.job_id}")
    print(f"energy={export.fmt(sched.energy(cfg.alpha))}  -> {path}")


def cmd_shares(args):
    jobs, profile, cfg = _load(args)
    report = penalties(jobs, profile, args.mechanism, cfg)
    path = _write(args.out, "costs.csv", export.cost_report_csv(report, [j.id for j in jobs]))
    print(export.cost_report_csv(report, [j.id for j in jobs]), end="")
    print(f"-> {path}")


def cmd_bestresp(args):
    jobs, profile, cfg = _load(args)
    br = numeric_best_response(jobs, profile, args.player, args.mechanism, cfg)
    others = [profile[j.id] for j in jobs if j.id != args.player]
    d_other = others[0] if len(others) == 1 else float("nan")
    path = _write(args.out, "bestresp.csv", export.curve_csv([(d_other, br.deadline, br.penalty, br.regime)]))
    print(f"player={args.player} d_star={export.fmt(br.deadline)} penalty={export.fmt(br.penalty)}  -> {path}")


def cmd_dynamics(args):
    jobs, profile, cfg = _load(args)
    if args.dps:
        import mpmath
        from .core import Job, StrategyProfile

        mpmath.mp.dps = args.dps
        m = mpmath.mpf
        jobs = [Job(j.id, m(j.workload), m(j.release), m(j.priority)) for j in jobs]
        profile = StrategyProfile(tuple(m(d) for d in profile))
        cfg = GameConfig(m(cfg.alpha), cfg.waiting_cost_mode, m(cfg.epsilon) if args.epsilon else 0, m(cfg.min_gap))
    trace = run_dynamics(jobs, profile, args.mechanism, cfg, max_steps=args.max_steps, order=args.order,
                         stop_on_cycle=not args.keep_going)
    text = export.trace_csv(trace)
    path = _write(args.out, "trace.csv", text)
    print(text.rsplit("\n", 2)[-2] + f"  -> {path}")


def cmd_verify(args):
    jobs, profile, cfg = _load(args)
    res = verify_equilibrium(jobs, profile, args.mechanism, cfg)
    print(f"is_nash={'true' if res.is_nash else 'false'} worst_player={res.worst_player} "
          f"max_gain={export.fmt(res.max_gain)} epsilon={export.fmt(cfg.epsilon)}")


def cmd_scan(args):
    cfg = _config(args, {"alpha": 2.0})
    scan = uniqueness_scan(grid=args.grid, config=cfg, workers=args.workers)
    a = _write(args.out, "scan.csv", export.scan_csv(scan))
    b = _write(args.out, "thresholds.csv", export.thresholds_csv(scan))
    both = sum(c.s21_ne and c.s12_ne for c in scan.cells)
    only21 = sum(c.s21_ne and not c.s12_ne for c in scan.cells)
    print(f"cells={len(scan.cells)} both_ne={both} only_s21_ne={only21} mechanism={scan.mechanism.value}")
    print(f"note: {scan.note}")
    print(f"-> {a}, {b}")


def cmd_figures(args):
    cfg = _config(args)
    data = all_figures(cfg.alpha, columns=args.grid[0], workers=args.workers)
    for name, rows in data.items():
        text = export.thresholds_csv(rows) if name == "2playerUnique.csv" else export.curve_csv(rows)
        print(f"-> {_write(args.out, name, text)}")


COMMANDS = {
    "schedule": cmd_schedule,
    "shares": cmd_shares,
    "bestresp": cmd_bestresp,
    "dynamics": cmd_dynamics,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "figures": cmd_figures,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except InstanceParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasibleProfileError as exc:
        print(f"error: infeasible profile: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UnboundedWindowError, DynamicsError, PreconditionError) as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
