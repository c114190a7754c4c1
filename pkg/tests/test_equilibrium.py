import itertools
import random
from fractions import Fraction

import pytest

from costarena.core import (
    CapExceededError,
    GameModel,
    SetCostFunction,
    social_cost,
)
from costarena.equilibrium import (
    INFINITE,
    analyze,
    best_response,
    best_response_dynamics,
    enumerate_pne,
    is_pne,
    potential_minimizer,
    price_of_anarchy,
    price_of_stability,
    profile_cap,
    social_optimum,
)
from costarena.potential import potential
from costarena.protocols import ShapleyProtocol, TableProtocol, private_cost
from costarena.randomgames import random_game

F = Fraction
SHAPLEY = ShapleyProtocol()


def tension_game():
    """Two players, a shared cheap edge and a private escape hatch.

    Sharing e1 costs 3/2 total; the second player can instead pay 1 alone
    on e2. Both on e1 is the unique equilibrium, split off is cheaper
    overall.
    """
    e1 = SetCostFunction.anonymous([0, 0, F(3, 2)])
    e2 = SetCostFunction.anonymous([0, 1, 2])
    return GameModel(
        2, ("e1", "e2"),
        ((frozenset({"e1"}),),
         (frozenset({"e1"}), frozenset({"e2"}))),
        (e1, e2),
    )


def chase_game():
    """No equilibrium: player 0 rides free on a shared pair, player 1
    pays everything, so 1 keeps fleeing and 0 keeps following."""
    f = SetCostFunction.anonymous([0, 1, 2])
    g = GameModel(
        2, ("A", "B"),
        ((frozenset({"A"}), frozenset({"B"})),
         (frozenset({"A"}), frozenset({"B"}))),
        (f, f),
    )
    t = TableProtocol()
    t.set_entry(f, 0b11, {0: F(0), 1: F(2)})
    return g, t


def freeloader_game():
    """One player who never pays: both opting in and out are equilibria,
    but opting in burns cost 1 nobody is charged for."""
    f = SetCostFunction.anonymous([0, 1])
    g = GameModel(1, ("r",), ((frozenset(), frozenset({"r"})),), (f,))
    t = TableProtocol()
    t.set_entry(f, 0b1, {0: F(0)}, validate=False)
    return g, t


# ---------------------------------------------------------------------------
# best response
# ---------------------------------------------------------------------------

def test_best_response_moves_to_cheaper_strategy():
    g = tension_game()
    assert best_response(g, SHAPLEY, (0, 1), 1) == 0  # join e1: 3/4 < 1
    assert best_response(g, SHAPLEY, (0, 0), 1) == 0  # already best


def test_best_response_keeps_current_on_tie():
    f = SetCostFunction.zero(2)
    g = GameModel(2, ("a", "b"),
                  ((frozenset({"a"}), frozenset({"b"})),
                   (frozenset({"a"}),)), (f, SetCostFunction.zero(2)))
    assert best_response(g, SHAPLEY, (1, 0), 0) == 1
    assert best_response(g, SHAPLEY, (0, 0), 0) == 0


def test_best_response_is_a_strict_improvement_or_fixed():
    rng = random.Random(88)
    for _ in range(40):
        g = random_game(rng, "arbitrary")
        profile = tuple(rng.randrange(len(s)) for s in g.strategy_sets)
        i = rng.randrange(g.n)
        br = best_response(g, SHAPLEY, profile, i)
        if br != profile[i]:
            moved = profile[:i] + (br,) + profile[i + 1:]
            assert (private_cost(g, SHAPLEY, moved, i)
                    < private_cost(g, SHAPLEY, profile, i))


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------

def test_brd_already_stable():
    g = tension_game()
    res = best_response_dynamics(g, SHAPLEY, (0, 0))
    assert res.converged
    assert res.profile == (0, 0)
    assert res.trace == ()
    assert res.sweeps == 1


def test_brd_converges_and_logs_steps():
    g = tension_game()
    res = best_response_dynamics(g, SHAPLEY, (0, 1))
    assert res.converged
    assert res.profile == (0, 0)
    assert len(res.trace) == 1
    step = res.trace[0]
    assert (step.player, step.old, step.new) == (1, 1, 0)
    assert step.cost_before == 1
    assert step.cost_after == F(3, 4)
    assert step.phi == potential(g, (0, 0))


def test_brd_potential_strictly_decreases():
    rng = random.Random(404)
    for _ in range(25):
        g = random_game(rng, "arbitrary")
        start = tuple(rng.randrange(len(s)) for s in g.strategy_sets)
        res = best_response_dynamics(g, SHAPLEY, start)
        assert res.converged
        assert is_pne(g, SHAPLEY, res.profile)
        phis = [potential(g, start)] + [s.phi for s in res.trace]
        assert all(a > b for a, b in zip(phis, phis[1:]))


def test_brd_random_schedule_reproducible():
    rng = random.Random(606)
    for _ in range(10):
        g = random_game(rng, "arbitrary")
        start = tuple(rng.randrange(len(s)) for s in g.strategy_sets)
        a = best_response_dynamics(g, SHAPLEY, start, schedule="random", seed=9)
        b = best_response_dynamics(g, SHAPLEY, start, schedule="random", seed=9)
        assert a == b
        assert a.converged and is_pne(g, SHAPLEY, a.profile)


def test_brd_step_budget_halts_unstable_run():
    g, t = chase_game()
    res = best_response_dynamics(g, t, (0, 0), max_steps=12)
    assert not res.converged
    assert len(res.trace) == 12


def test_brd_rejects_unknown_schedule():
    g = tension_game()
    with pytest.raises(ValueError):
        best_response_dynamics(g, SHAPLEY, (0, 0), schedule="sorted")


# ---------------------------------------------------------------------------
# equilibria and optima
# ---------------------------------------------------------------------------

def test_enumerate_pne_unique_shared_edge():
    g = tension_game()
    assert enumerate_pne(g, SHAPLEY) == [(0, 0)]
    assert is_pne(g, SHAPLEY, (0, 0))
    assert not is_pne(g, SHAPLEY, (0, 1))


def test_enumerate_pne_empty_for_chase_game():
    g, t = chase_game()
    assert enumerate_pne(g, t) == []
    for profile in itertools.product(range(2), range(2)):
        assert not is_pne(g, t, profile)


def test_shapley_games_always_have_pne():
    rng = random.Random(1234)
    for _ in range(40):
        g = random_game(rng, "arbitrary")
        pne = enumerate_pne(g, SHAPLEY)
        assert pne
        mini = potential_minimizer(g)
        assert mini in pne


def test_social_optimum_prefers_lexicographic_first():
    f = SetCostFunction.zero(2)
    g = GameModel(2, ("a", "b"),
                  ((frozenset({"a"}), frozenset({"b"})),
                   (frozenset({"a"}), frozenset({"b"}))),
                  (f, SetCostFunction.zero(2)))
    assert social_optimum(g) == ((0, 0), F(0))


def test_social_optimum_tension_game():
    g = tension_game()
    profile, cost = social_optimum(g)
    assert profile == (0, 1)
    assert cost == 1


# ---------------------------------------------------------------------------
# ratios
# ---------------------------------------------------------------------------

def test_ratios_on_tension_game():
    g = tension_game()
    assert price_of_anarchy(g, SHAPLEY) == F(3, 2)
    assert price_of_stability(g, SHAPLEY) == F(3, 2)


def test_ratios_undefined_without_equilibria():
    g, t = chase_game()
    assert price_of_anarchy(g, t) is None
    assert price_of_stability(g, t) is None


def test_ratio_conventions_zero_optimum():
    g, t = freeloader_game()
    assert sorted(enumerate_pne(g, t)) == [(0,), (1,)]
    assert social_optimum(g) == ((0,), F(0))
    assert price_of_anarchy(g, t) == INFINITE
    assert price_of_stability(g, t) == F(1)


def test_ratio_all_zero_costs():
    f = SetCostFunction.zero(1)
    g = GameModel(1, ("r",), ((frozenset({"r"}), frozenset()),), (f,))
    assert price_of_anarchy(g, SHAPLEY) == 1
    assert price_of_stability(g, SHAPLEY) == 1


def test_ratios_bracket_every_equilibrium():
    rng = random.Random(555)
    for _ in range(30):
        g = random_game(rng, "arbitrary")
        report = analyze(g, SHAPLEY)
        if report.optimum_cost == 0:
            continue
        for cost in report.pne_costs:
            ratio = cost / report.optimum_cost
            assert report.pos <= ratio <= report.poa
        assert 1 <= report.pos <= report.poa


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def test_analyze_report_contents():
    g = tension_game()
    report = analyze(g, SHAPLEY, with_potential=True)
    assert report.protocol == "shapley"
    assert report.pne == ((0, 0),)
    assert report.pne_costs == (F(3, 2),)
    assert report.optimum == (0, 1)
    assert report.optimum_cost == 1
    assert report.poa == report.pos == F(3, 2)
    assert report.potentials == (potential(g, (0, 0)),)


def test_analyze_without_potential_flag():
    g = tension_game()
    assert analyze(g, SHAPLEY).potentials is None


# ---------------------------------------------------------------------------
# caps
# ---------------------------------------------------------------------------

def test_profile_cap_env_override(monkeypatch):
    monkeypatch.delenv("ARENA_MAX_PROFILES", raising=False)
    assert profile_cap() == 10 ** 7
    monkeypatch.setenv("ARENA_MAX_PROFILES", "123")
    assert profile_cap() == 123
    monkeypatch.setenv("ARENA_MAX_PROFILES", "bogus")
    with pytest.raises(ValueError):
        profile_cap()


def test_enumeration_respects_cap(monkeypatch):
    f = SetCostFunction.zero(2)
    g = GameModel(2, ("a", "b"),
                  ((frozenset({"a"}), frozenset({"b"})),
                   (frozenset({"a"}), frozenset({"b"}))),
                  (f, SetCostFunction.zero(2)))
    monkeypatch.setenv("ARENA_MAX_PROFILES", "3")
    with pytest.raises(CapExceededError):
        enumerate_pne(g, SHAPLEY)
    with pytest.raises(CapExceededError):
        social_optimum(g)
    monkeypatch.setenv("ARENA_MAX_PROFILES", "4")
    assert len(enumerate_pne(g, SHAPLEY)) == 4
