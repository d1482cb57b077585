import sys
import random

import pytest

from speedgame.core import Job, StrategyProfile


def random_instance(seed, n_max=6, n_min=1, release_max=4.0, same_release=False):
    """Random jobs and a feasible profile; deterministic in ``seed``."""
    rng = random.Random(seed)
    n = rng.randint(n_min, n_max)
    jobs = []
    for i in range(n):
        r = 0.0 if same_release else round(rng.uniform(0, release_max), 3)
        jobs.append(Job(i, rng.uniform(0.2, 3.0), r, rng.uniform(0.3, 3.0)))
    profile = StrategyProfile(tuple(j.release + rng.uniform(0.1, 4.0) for j in jobs))
    return jobs, profile


@pytest.fixture
def unit_pair():
    return [Job(0, 1.0, 0.0, 1.0), Job(1, 1.0, 0.0, 1.0)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
