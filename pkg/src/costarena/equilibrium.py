"""Equilibrium computation: best-response dynamics, exhaustive pure Nash
enumeration, social optimum, and the anarchy/stability price ratios.

All exhaustive operations iterate the profile space in lexicographic order
of strategy indices and break ties lexicographically, so reports are
reproducible. The profile-space size is capped (default 10^7, overridable
through the ARENA_MAX_PROFILES environment variable).
"""

from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction

from .core import CapExceededError, GameModel, Profile, social_cost
from .potential import potential
from .protocols import Protocol

ZERO = Fraction(0)
DEFAULT_PROFILE_CAP = 10 ** 7

#: Ratio value when the optimum costs 0 but some equilibrium does not.
INFINITE = math.inf


def profile_cap() -> int:
    """Enumeration cap; ARENA_MAX_PROFILES overrides the default."""
    raw = os.environ.get("ARENA_MAX_PROFILES")
    if raw is None:
        return DEFAULT_PROFILE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"ARENA_MAX_PROFILES={raw!r} is not an integer") from None
    if cap <= 0:
        raise ValueError("ARENA_MAX_PROFILES must be positive")
    return cap


def _check_cap(model: GameModel) -> None:
    size = model.profile_space_size()
    cap = profile_cap()
    if size > cap:
        raise CapExceededError(f"profile space has {size} profiles, cap is {cap}")


def _iter_profiles(model: GameModel):
    return itertools.product(*(range(len(s)) for s in model.strategy_sets))


def _deviation_cost(model: GameModel, protocol: Protocol, usage, i: int,
                    strategy: int) -> Fraction:
    """Cost player i would pay after unilaterally switching to ``strategy``,
    given the usage masks of the current profile."""
    bit = 1 << i
    ridx = model._strategy_ridx[i][strategy]
    fns = model.cost_fns
    total = ZERO
    for r in ridx:
        total += protocol.share(fns[r], usage[r] | bit, i)
    return total


def best_response(model: GameModel, protocol: Protocol, profile: Profile,
                  i: int) -> int:
    """Strategy index minimizing i's cost with everyone else fixed.

    Keeps the current strategy when it ties the minimum; otherwise picks
    the lowest-index minimizer.
    """
    model.validate_profile(profile)
    usage = model.usage_masks(profile)
    current = profile[i]
    costs = [_deviation_cost(model, protocol, usage, i, s)
             for s in range(len(model.strategy_sets[i]))]
    best_c = min(costs)
    if costs[current] == best_c:
        return current
    return costs.index(best_c)


@dataclass(frozen=True)
class BrdStep:
    """One accepted change during best-response dynamics."""

    player: int
    old: int
    new: int
    phi: Fraction
    cost_before: Fraction
    cost_after: Fraction


@dataclass(frozen=True)
class BrdResult:
    profile: Profile
    converged: bool
    trace: tuple[BrdStep, ...]
    sweeps: int


def best_response_dynamics(model: GameModel, protocol: Protocol, start: Profile,
                           max_steps: int | None = None, *,
                           schedule: str = "round-robin",
                           seed: int | None = None) -> BrdResult:
    """Iterate best responses in sweeps over all players.

    A sweep visits every player once, in index order, or in a seeded
    shuffled order with ``schedule="random"``. The run converges when a
    full sweep accepts no change; ``max_steps`` bounds accepted changes
    (default 10x the profile-space size, comfortably above the number of
    distinct potential values). Each trace entry records the potential of
    the profile after the change.
    """
    model.validate_profile(start)
    if max_steps is None:
        max_steps = 10 * model.profile_space_size()
    if schedule not in ("round-robin", "random"):
        raise ValueError(f"unknown schedule {schedule!r}")
    rng = random.Random(seed) if schedule == "random" else None

    profile = list(start)
    trace: list[BrdStep] = []
    sweeps = 0
    changes = 0
    while True:
        sweeps += 1
        dirty = False
        players = list(range(model.n))
        if rng is not None:
            rng.shuffle(players)
        for i in players:
            if changes >= max_steps:
                return BrdResult(tuple(profile), False, tuple(trace), sweeps)
            current = profile[i]
            best_s = best_response(model, protocol, tuple(profile), i)
            if best_s != current:
                usage = model.usage_masks(tuple(profile))
                cost_now = _deviation_cost(model, protocol, usage, i, current)
                cost_new = _deviation_cost(model, protocol, usage, i, best_s)
                profile[i] = best_s
                changes += 1
                dirty = True
                trace.append(BrdStep(i, current, best_s,
                                     potential(model, tuple(profile)),
                                     cost_now, cost_new))
        if not dirty:
            return BrdResult(tuple(profile), True, tuple(trace), sweeps)


def is_pne(model: GameModel, protocol: Protocol, profile: Profile) -> bool:
    """No player can strictly lower its cost by a unilateral switch."""
    model.validate_profile(profile)
    usage = model.usage_masks(profile)
    for i in range(model.n):
        cost_now = _deviation_cost(model, protocol, usage, i, profile[i])
        for s in range(len(model.strategy_sets[i])):
            if s != profile[i] and _deviation_cost(model, protocol, usage, i, s) < cost_now:
                return False
    return True


def enumerate_pne(model: GameModel, protocol: Protocol) -> list[Profile]:
    """All pure Nash equilibria, in lexicographic profile order."""
    _check_cap(model)
    out = []
    fns = model.cost_fns
    ridx = model._strategy_ridx
    counts = model.strategy_counts()
    for profile in _iter_profiles(model):
        usage = model.usage_masks(profile)
        stable = True
        for i in range(model.n):
            bit = 1 << i
            cost_now = ZERO
            for r in ridx[i][profile[i]]:
                cost_now += protocol.share(fns[r], usage[r], i)
            for s in range(counts[i]):
                if s == profile[i]:
                    continue
                c = ZERO
                for r in ridx[i][s]:
                    c += protocol.share(fns[r], usage[r] | bit, i)
                if c < cost_now:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            out.append(profile)
    return out


def social_optimum(model: GameModel) -> tuple[Profile, Fraction]:
    """Profile of minimum social cost; lexicographically first on ties."""
    _check_cap(model)
    best_p = None
    best_c = None
    for profile in _iter_profiles(model):
        c = social_cost(model, profile)
        if best_c is None or c < best_c:
            best_p, best_c = profile, c
    return best_p, best_c


def potential_minimizer(model: GameModel) -> Profile:
    """Profile of minimum potential; lexicographically first on ties."""
    _check_cap(model)
    best_p = None
    best_v = None
    for profile in _iter_profiles(model):
        v = potential(model, profile)
        if best_v is None or v < best_v:
            best_p, best_v = profile, v
    return best_p


def _ratio(target: Fraction, opt: Fraction):
    if opt == 0:
        return Fraction(1) if target == 0 else INFINITE
    return target / opt


def price_of_anarchy(model: GameModel, protocol: Protocol):
    """Worst equilibrium cost over optimum cost.

    None when no pure Nash equilibrium exists; 1 when both costs are 0;
    infinite when only the optimum is 0.
    """
    pne = enumerate_pne(model, protocol)
    if not pne:
        return None
    _, opt = social_optimum(model)
    worst = max(social_cost(model, p) for p in pne)
    return _ratio(worst, opt)


def price_of_stability(model: GameModel, protocol: Protocol):
    """Best equilibrium cost over optimum cost; conventions as above."""
    pne = enumerate_pne(model, protocol)
    if not pne:
        return None
    _, opt = social_optimum(model)
    best = min(social_cost(model, p) for p in pne)
    return _ratio(best, opt)


@dataclass(frozen=True)
class AnalysisReport:
    """Everything the exhaustive analysis of one game produces."""

    protocol: str
    pne: tuple[Profile, ...]
    pne_costs: tuple[Fraction, ...]
    optimum: Profile
    optimum_cost: Fraction
    poa: object
    pos: object
    potentials: tuple[Fraction, ...] | None = None


def analyze(model: GameModel, protocol: Protocol, *,
            with_potential: bool = False) -> AnalysisReport:
    """Enumerate equilibria and assemble the full report in one pass."""
    pne = enumerate_pne(model, protocol)
    opt_p, opt_c = social_optimum(model)
    costs = tuple(social_cost(model, p) for p in pne)
    if pne:
        poa = _ratio(max(costs), opt_c)
        pos = _ratio(min(costs), opt_c)
    else:
        poa = pos = None
    potentials = tuple(potential(model, p) for p in pne) if with_potential else None
    return AnalysisReport(protocol.name, tuple(pne), costs, opt_p, opt_c,
                          poa, pos, potentials)
