import subprocess
import sys

import pytest

from speedgame import cli
from speedgame.export import read_schedule_csv
from speedgame.yds import yds_schedule
from speedgame.core import parse_instance, parse_profile

INSTANCE = """\
alpha=3 mode=absolute
0 1 0 1
1 1 0 1
"""
C3 = 2 ** (1 / 3)


@pytest.fixture
def files(tmp_path):
    inst = tmp_path / "inst.txt"
    inst.write_text(INSTANCE)

    def profile(*ds):
        p = tmp_path / "prof.txt"
        p.write_text("".join(f"{i} {d!r}\n" for i, d in enumerate(ds)))
        return str(p)
    return str(inst), profile, tmp_path


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_schedule_roundtrip(files, capsys):
    inst, profile, tmp = files
    code, out, _ = run(["schedule", inst, "--profile", profile(1.5, 3.0), "--out", str(tmp / "o")], capsys)
    assert code == 0 and "energy=" in out
    text = (tmp / "o" / "schedule.csv").read_text()
    sched = read_schedule_csv(text)
    jobs, _ = parse_instance(INSTANCE)
    ref = yds_schedule(jobs, parse_profile(open(profile(1.5, 3.0)).read(), 2))
    assert sched.energy(3.0) == pytest.approx(ref.energy(3.0), rel=1e-9)
    for a, b in zip(sched.segments, ref.segments):
        assert (a.start, a.end, a.speed) == pytest.approx((b.start, b.end, b.speed), rel=1e-9)
        assert a.job_id == b.job_id


def test_shares(files, capsys):
    inst, profile, tmp = files
    code, out, _ = run(["shares", inst, "--profile", profile(1.0, 1.0), "--mechanism", "marginal",
                        "--out", str(tmp)], capsys)
    assert code == 0
    rows = [ln.split(",") for ln in (tmp / "costs.csv").read_text().splitlines() if not ln.startswith("#")]
    assert rows[0] == ["id", "share", "waiting", "penalty"]
    assert float(rows[1][1]) == pytest.approx(7.0)
    assert "# mechanism=marginal" in out


def test_bestresp(files, capsys):
    inst, profile, tmp = files
    code, out, _ = run(["bestresp", inst, "--profile", profile(1.1, 5.0), "--player", "1", "--out", str(tmp)],
                       capsys)
    assert code == 0
    d_star = float(out.split("d_star=")[1].split()[0])
    assert d_star == pytest.approx(1.1 + C3, abs=1e-8)


def test_dynamics_cycle(files, capsys):
    inst, profile, tmp = files
    code, out, _ = run(["dynamics", inst, "--profile", profile(4.0, 4.0), "--mechanism", "proportional",
                        "--out", str(tmp)], capsys)
    assert code == 0 and "verdict=cycle" in out and "period=4" in out
    assert (tmp / "trace.csv").read_text().splitlines()[-1].startswith("verdict=cycle")


def test_dynamics_precise(files, capsys):
    inst, profile, tmp = files
    code, out, _ = run(["dynamics", inst, "--profile", profile(1.2, 1.2 + C3), "--dps", "40",
                        "--max-steps", "10", "--out", str(tmp)], capsys)
    assert code == 0 and "verdict=budget_exhausted steps=10" in out


def test_verify(files, capsys):
    inst, profile, _ = files
    code, out, _ = run(["verify", inst, "--profile", profile(1 + C3, 1.0)], capsys)
    assert code == 0 and out.startswith("is_nash=true")
    code, out, _ = run(["verify", inst, "--profile", profile(1.2, 1.2 + C3)], capsys)
    assert code == 0 and out.startswith("is_nash=false")


def test_scan(tmp_path, capsys):
    code, out, _ = run(["scan", "--grid", "2x2", "--out", str(tmp_path)], capsys)
    assert code == 0 and "cells=4" in out and "mechanism=marginal" in out
    assert (tmp_path / "scan.csv").read_text().startswith("p2,w2,s21_ne,s12_ne,dominance\n")
    assert (tmp_path / "thresholds.csv").exists()


def test_flags_override_header(files, capsys):
    inst, profile, tmp = files
    run(["schedule", inst, "--profile", profile(1.0, 1.0), "--alpha", "2", "--out", str(tmp)], capsys)
    assert "# energy=4" in (tmp / "schedule.csv").read_text()
    run(["schedule", inst, "--profile", profile(1.0, 1.0), "--out", str(tmp)], capsys)
    assert "# energy=8" in (tmp / "schedule.csv").read_text()


def test_exit_codes(files, capsys, tmp_path):
    inst, profile, _ = files
    assert run(["schedule", inst, "--profile", profile(0.0, 1.0)], capsys)[0] == cli.EXIT_INFEASIBLE
    bad = tmp_path / "bad.txt"
    bad.write_text("alpha=3\n0 1 zero 1\n")
    code, _, err = run(["schedule", str(bad), "--profile", profile(1.0)], capsys)
    assert code == cli.EXIT_PARSE and "line 2" in err
    assert run(["schedule", str(tmp_path / "missing.txt"), "--profile", profile(1.0)], capsys)[0] == cli.EXIT_IO
    assert run(["schedule", inst, "--profile", profile(1.0, 1.0), "--alpha", "1.5"], capsys)[0] == cli.EXIT_PARSE
    with pytest.raises(SystemExit) as exc:
        cli.main(["scan", "--grid", "ten"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "speedgame", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for name in cli.SUBCOMMANDS:
        assert name in res.stdout


def test_figures_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["figures", "--grid", "2x1", "--out", str(a)], capsys)[0] == 0
    assert run(["figures", "--grid", "2x1", "--out", str(b)], capsys)[0] == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(["bestResponse.csv", "bestResponse12.csv", "convergence.csv",
                            "convergence1.csv", "2playerUnique.csv"])
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
