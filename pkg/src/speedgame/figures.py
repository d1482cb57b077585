"""Data behind the best-response, convergence and uniqueness plots."""

from __future__ import annotations

import numpy as np

from .bestresp import (PreconditionError, closed_form_response_marg, closed_form_response_prop,
                       numeric_best_response)
from .core import GameConfig, StrategyProfile, unit_jobs
from .equilibria import uniqueness_scan

CURVE_POINTS = 200


def prop_response_curve(alpha, player: int = 0, lo=0.05, hi=4.0, points=CURVE_POINTS):
    """Numeric best response of ``player`` in the symmetric proportional game, against the other's deadline."""
    cfg = GameConfig(alpha=alpha)
    jobs = unit_jobs(2)
    rows = []
    for d in np.linspace(lo, hi, points):
        d = float(d)
        # the responder's own entry is ignored by its best response
        br = numeric_best_response(jobs, StrategyProfile((d, d)), player, "proportional", cfg)
        rows.append((d, br.deadline, br.penalty, closed_form_response_prop(d, alpha).regime))
    return rows


def _deltas(alpha, points):
    top = 2 ** (1 / alpha)
    return [1 + (top - 1) * k / (points + 1) for k in range(1, points + 1)]


def marg_response_curves(alpha, points=CURVE_POINTS):
    """Player 2's answer to ``d_1 = delta*q`` and player 1's answer to ``d_2 = c*(1 + delta/2**(1/alpha))``."""
    cfg = GameConfig(alpha=alpha)
    jobs = unit_jobs(2)
    q = ((alpha - 1) / 2) ** (1 / alpha)
    c = (alpha - 1) ** (1 / alpha)
    second, first = [], []
    for delta in _deltas(alpha, points):
        d1 = delta * q
        br = numeric_best_response(jobs, StrategyProfile((d1, d1 + c)), 1, "marginal", cfg)
        second.append((d1, br.deadline, br.penalty, _marg_regime(d1, alpha, "two_given_one")))
        d2 = c * (1 + delta * 2 ** (-1 / alpha))
        br = numeric_best_response(jobs, StrategyProfile((d1, d2)), 0, "marginal", cfg)
        first.append((d2, br.deadline, br.penalty, _marg_regime(d2, alpha, "one_given_two")))
    return second, first


def _marg_regime(d, alpha, responder):
    try:
        return closed_form_response_marg(d, alpha, responder).regime
    except PreconditionError:
        return ""


def all_figures(alpha=3.0, columns: int = 100, w2_range=(0.1, 3.0), p2_range=(0.1, 5.0), workers: int = 1):
    """Map of file name to rows/scan for the five plots.  The uniqueness plot is always at alpha = 2."""
    second, first = marg_response_curves(alpha)
    scan = uniqueness_scan(p2_range, w2_range, (columns, 1), GameConfig(alpha=2.0),
                           cells=False, workers=workers)
    return {
        "bestResponse.csv": prop_response_curve(alpha, player=0),
        "bestResponse12.csv": prop_response_curve(alpha, player=1),
        "convergence.csv": second,
        "convergence1.csv": first,
        "2playerUnique.csv": scan,
    }
