"""Best responses: a numeric minimiser over one player's deadline, and closed forms
for the symmetric two-player game (unit workloads, priorities, release time 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .core import GameConfig, Job, Mechanism, StrategyProfile, check_feasible, machine_eps
from .mechanisms import penalty_function

INV_PHI = (5 ** 0.5 - 1) / 2
GOLDEN_TOL = 1e-10
MAX_DOUBLINGS = 60


class UnboundedWindowError(RuntimeError):
    """The penalty kept decreasing up to the largest search window tried."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class BestResponse:
    deadline: float
    penalty: float
    regime: str | None = None


@dataclass(frozen=True)
class PiecewiseMinSpec:
    breakpoints: tuple
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"empty search window ({self.lower}, {self.upper})")

    def pieces(self):
        pts = [self.lower] + [b for b in self.breakpoints if self.lower < b < self.upper] + [self.upper]
        return list(zip(pts, pts[1:]))


# ---------------------------------------------------------------------------
# one-dimensional search


def golden_section(f: Callable, lo, hi, tol=GOLDEN_TOL):
    """Minimise ``f`` on ``[lo, hi]`` assuming unimodality; returns ``(x, f(x))``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    scale = max(abs(lo), abs(hi), 1)
    while b - a > tol * scale:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def _bracketed_root(g: Callable, lo, hi, glo, ghi, xtol, max_iter=300):
    """Illinois false position for a sign change of ``g`` on ``[lo, hi]``."""
    side = 0
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        x = (lo * ghi - hi * glo) / (ghi - glo)
        if not lo < x < hi:
            x = (lo + hi) / 2
        gx = g(x)
        if gx == 0:
            return x
        if (gx < 0) == (glo < 0):
            lo, glo = x, gx
            if side == -1:
                ghi /= 2
            side = -1
        else:
            hi, ghi = x, gx
            if side == 1:
                glo /= 2
            side = 1
    return (lo + hi) / 2


def _polish(f: Callable, x, fx, lo, hi):
    """Refine a smooth interior minimiser by finding the root of a central-difference slope.

    Golden section alone cannot place the argmin better than about sqrt(eps).
    """
    eps = machine_eps(x)
    scale = max(abs(x), 1)
    h = eps ** (1.0 / 3) * scale

    def slope(t):
        return (f(t + h) - f(t - h)) / (2 * h)

    # golden section leaves the argmin within ~max(tol, sqrt(eps)) of the truth
    width = max(1e4 * h, 1e-7 * scale)
    for _ in range(12):
        a, b = max(x - width, lo + h), min(x + width, hi - h)
        if not a < b:
            return x, fx
        ga, gb = slope(a), slope(b)
        if ga < 0 < gb:
            break
        width *= 4
    else:
        return x, fx
    root = _bracketed_root(slope, a, b, ga, gb, xtol=8 * eps * scale)
    froot = f(root)
    if froot <= fx + 4 * eps * max(abs(fx), 1):
        return root, froot
    return x, fx


def minimize_piecewise(f: Callable, spec: PiecewiseMinSpec, samples: int = 8, restarts: int = 3):
    """Global minimum of ``f`` over the window of ``spec``.

    Each piece between consecutive breakpoints is sampled, golden-section search
    runs from the best few sampled local minima, and the best candidate over all
    pieces and breakpoints wins.
    """
    cache: dict = {}

    def fc(x):
        v = cache.get(x)
        if v is None:
            v = cache[x] = f(x)
        return v

    breakpoints = set()
    candidates = []
    for lo, hi in spec.pieces():
        xs = [lo + (hi - lo) * k / (samples + 1) for k in range(samples + 2)]
        xs[0], xs[-1] = lo, hi
        vs = [fc(x) for x in xs]
        for x in (lo, hi):
            if x != spec.lower and x != spec.upper:
                breakpoints.add(x)
        candidates.extend(zip(xs, vs))
        local = [k for k in range(len(xs))
                 if (k == 0 or vs[k] <= vs[k - 1]) and (k == len(xs) - 1 or vs[k] <= vs[k + 1])]
        local.sort(key=lambda k: vs[k])
        for k in local[:restarts]:
            a, b = xs[max(k - 1, 0)], xs[min(k + 1, len(xs) - 1)]
            candidates.append(golden_section(fc, a, b))
    x, fx = min(candidates, key=lambda c: c[1])
    if x not in breakpoints:
        lo, hi = next((a, b) for a, b in spec.pieces() if a <= x <= b)
        x, fx = _polish(fc, x, fx, lo, hi)
    return x, fx


# ---------------------------------------------------------------------------
# numeric best response


def search_spec(jobs: Sequence[Job], profile: StrategyProfile, player: int, config: GameConfig,
                upper) -> PiecewiseMinSpec:
    job = next(j for j in jobs if j.id == player)
    r = job.release
    pts = set()
    events = set()
    for j in jobs:
        if j.id == player:
            continue
        d = profile[j.id]
        events.update((j.release, d))
        pts.update((d, 2 * d - r, (d + r) / 2, j.release))
    ev = sorted(events | {r})
    pts.update(ev)
    pts.update((a + b) / 2 for a, b in zip(ev, ev[1:]))
    lower = r + config.min_gap
    return PiecewiseMinSpec(tuple(sorted(p for p in pts if lower < p < upper)), lower, upper)


def _initial_upper(jobs, profile, player, config):
    others = [x for j in jobs if j.id != player for x in (j.release, profile[j.id])]
    job = next(j for j in jobs if j.id == player)
    alpha = config.alpha
    reach = (alpha - 1) ** (1 / alpha) * sum(j.workload for j in jobs) / min(j.priority for j in jobs) ** (1 / alpha)
    return max(others + [job.release]) + reach


def numeric_best_response(jobs: Sequence[Job], profile: StrategyProfile, player: int, mechanism,
                          config: GameConfig, samples: int = 8, restarts: int = 3) -> BestResponse:
    """Deadline minimising ``player``'s penalty with all other deadlines fixed."""
    others = [j for j in jobs if j.id != player]
    check_feasible(others, profile)
    f = penalty_function(jobs, profile, player, mechanism, config)
    job = next(j for j in jobs if j.id == player)
    lower = job.release + config.min_gap
    upper = _initial_upper(jobs, profile, player, config)
    for _ in range(MAX_DOUBLINGS):
        h = 1e-6 * (upper - lower)
        if f(upper) - f(upper - h) > 0:
            break
        upper = lower + 2 * (upper - lower)
    else:
        raise UnboundedWindowError(
            f"player {player}: penalty still non-increasing at deadline {upper} after {MAX_DOUBLINGS} doublings")
    spec = search_spec(jobs, profile, player, config, upper)
    x, fx = minimize_piecewise(f, spec, samples=samples, restarts=restarts)
    return BestResponse(x, fx)


# ---------------------------------------------------------------------------
# symmetric two-player game: closed forms


def prop_penalty(d1, d2, alpha):
    """Player 1's proportional penalty given ``d2``, with its branch label (f1..f4)."""
    if d1 <= d2 / 2:
        return d1 + d1 ** (1 - alpha), "f1"
    if d1 <= d2:
        return d1 + (d2 / 2) ** (1 - alpha), "f2"
    if d1 <= 2 * d2:
        return d1 + (d1 / 2) ** (1 - alpha), "f3"
    return d1 + (d1 - d2) ** (1 - alpha), "f4"


def marg_penalty(d_self, d_other, alpha):
    """A player's marginal penalty given the other's deadline, with its branch label (h1..h4)."""
    x, y = d_self, d_other
    if x <= y / 2:
        return x + x ** (1 - alpha) + (y - x) ** (1 - alpha) - y ** (1 - alpha), "h1"
    if x <= y:
        return x + (2 ** alpha - 1) * y ** (1 - alpha), "h2"
    if x <= 2 * y:
        return x + 2 ** alpha * x ** (1 - alpha) - y ** (1 - alpha), "h3"
    return x + (x - y) ** (1 - alpha), "h4"


def local_minima_table(alpha) -> dict:
    """The four candidate minimisers d1^(k) and their values g_k as functions of d2."""
    c = (alpha - 1) ** (1 / alpha)
    q = ((alpha - 1) / 2) ** (1 / alpha)
    return {
        "f1": (lambda d2: c, lambda d2: alpha * (alpha - 1) ** (1 / alpha - 1)),
        "f2": (lambda d2: d2 / 2, lambda d2: d2 / 2 + (d2 / 2) ** (1 - alpha)),
        "f3": (lambda d2: 2 * q, lambda d2: alpha * ((alpha - 1) / 2) ** (1 / alpha - 1)),
        "f4": (lambda d2: d2 + c, lambda d2: d2 + alpha * (alpha - 1) ** (1 / alpha - 1)),
    }


def threshold_d21(alpha):
    """Where g4 = g3: below it the response jumps past the opponent."""
    return alpha * (alpha - 1) ** (1 / alpha - 1) * (2 ** (1 - 1 / alpha) - 1)


def threshold_d22(alpha, iterations: int = 200):
    """Root of g2 = g3 in (d21, d1^(3)), by bisection.  Collapses onto d21 at alpha = 2."""
    table = local_minima_table(alpha)
    g2, g3 = table["f2"][1], table["f3"][1]
    lo, hi = threshold_d21(alpha), table["f3"][0](None)
    g3v = g3(None)
    if g2(lo) - g3v <= 0:
        return lo
    for _ in range(iterations):
        mid = (lo + hi) / 2
        if g2(mid) - g3v > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _require_alpha(alpha, strict=False):
    if alpha < 2 or (strict and alpha <= 2):
        raise PreconditionError(f"closed form needs alpha {'>' if strict else '>='} 2, got {alpha}")


def closed_form_response_prop(d_other, alpha) -> BestResponse:
    """Player's best response under proportional sharing in the symmetric unit game."""
    _require_alpha(alpha)
    if not d_other > 0:
        raise PreconditionError(f"opponent deadline must be positive, got {d_other}")
    c = (alpha - 1) ** (1 / alpha)
    d21, d22 = threshold_d21(alpha), threshold_d22(alpha)
    if d_other <= d21:
        regime = "f4"
    elif d_other <= d22:
        regime = "f3"
    elif d_other <= 2 * c:
        regime = "f2"
    else:
        regime = "f1"
    arg, value = local_minima_table(alpha)[regime]
    return BestResponse(arg(d_other), value(d_other), regime)


def delta_of_first(d1, alpha):
    return d1 / ((alpha - 1) / 2) ** (1 / alpha)


def delta_of_second(d2, alpha):
    return (d2 / (alpha - 1) ** (1 / alpha) - 1) * 2 ** (1 / alpha)


def closed_form_response_marg(d_other, alpha, responder: str = "two_given_one") -> BestResponse:
    """Best responses along the slow-convergence spiral of the symmetric marginal game.

    ``two_given_one``: the trailing player answers ``d1 = delta * ((alpha-1)/2)**(1/alpha)``
    by going ``(alpha-1)**(1/alpha)`` past it.  ``one_given_two``: the leading player
    answers ``d2 = (alpha-1)**(1/alpha) * (1 + 2**(-1/alpha) * delta)`` with the unique
    minimiser of the convex branch h1, which lies strictly between the equilibrium
    coordinate and ``delta * ((alpha-1)/2)**(1/alpha)``.
    """
    _require_alpha(alpha, strict=True)
    c = (alpha - 1) ** (1 / alpha)
    q = ((alpha - 1) / 2) ** (1 / alpha)
    if responder == "two_given_one":
        delta = delta_of_first(d_other, alpha)
        _check_delta(delta, alpha)
        d = d_other + c
        return BestResponse(d, marg_penalty(d, d_other, alpha)[0], "h4")
    if responder != "one_given_two":
        raise ValueError(f"unknown responder {responder!r}")
    delta = delta_of_second(d_other, alpha)
    _check_delta(delta, alpha)
    d2 = d_other

    def slope(x):
        return 1 + (alpha - 1) * ((d2 - x) ** (-alpha) - x ** (-alpha))

    lo, hi = q, delta * q
    x = _bracketed_root(slope, lo, hi, slope(lo), slope(hi), xtol=8 * machine_eps(d2) * hi)
    return BestResponse(x, marg_penalty(x, d2, alpha)[0], "h1")


def _check_delta(delta, alpha):
    if not 1 < delta < 2 ** (1 / alpha):
        raise PreconditionError(f"delta={delta} outside (1, 2**(1/alpha)={2 ** (1 / alpha)})")
