import numpy as np
import pytest
from hypothesis import given, strategies as st

from hawkdove.game import Game, GameError, State, mixed_nash, mixed_payoff, payoff

GRID = [round(0.05 + 0.1 * i, 2) for i in range(10)]
unit = st.floats(0, 1)


@pytest.mark.parametrize("g,l,a,b,expected", [
    (0.25, 0.25, "h", "d", 1.25),
    (0.25, 0.25, "h", "h", 0.0),
    (0.5, 0.3, "d", "h", 0.7),
    (0.5, 0.3, "d", "d", 1.0),
])
def test_payoff_matrix(g, l, a, b, expected):
    assert payoff(Game(g, l), a, b) == pytest.approx(expected, abs=1e-15)


def test_mixed_payoff_examples():
    assert mixed_payoff(Game(0.25, 0.25), 1, 0.5) == pytest.approx(0.625)
    assert mixed_payoff(Game(0.7, 0.2), 0, 0) == 1
    assert mixed_payoff(Game(0.5, 0.5), 0.5, 0.5) == pytest.approx(0.75)


def test_mixed_nash_examples():
    assert mixed_nash(Game(0.5, 0.5)) == pytest.approx((0.5, 0.75))
    assert mixed_nash(Game(0.25, 0.75)) == pytest.approx((0.5, 0.625))
    for g in GRID:
        assert mixed_nash(Game(g, g)) == pytest.approx((g, (1 + g) * (1 - g)))


@given(unit, unit, unit, unit, st.sampled_from(GRID), st.sampled_from(GRID))
def test_mixed_payoff_bilinear(lam, p, q, r, g, l):
    game = Game(g, l)
    left = mixed_payoff(game, lam * p + (1 - lam) * q, r)
    right = lam * mixed_payoff(game, p, r) + (1 - lam) * mixed_payoff(game, q, r)
    assert left == pytest.approx(right, abs=1e-14)


@pytest.mark.parametrize("g", GRID)
@pytest.mark.parametrize("l", GRID)
def test_nash_indifference_and_payoff_below_one(g, l):
    game = Game(g, l)
    q, value = mixed_nash(game)
    assert abs(mixed_payoff(game, 1, q) - mixed_payoff(game, 0, q)) <= 1e-12
    assert value < 1


def test_game_validation():
    for g, l in [(0, 0.5), (1, 0.5), (0.5, 0), (0.5, 1.0), (-0.1, 0.2)]:
        with pytest.raises(GameError):
            Game(g, l)
    Game(1.5, -0.3, mode="extended")
    with pytest.raises(GameError):
        Game(0.2, -0.3, mode="extended")
    with pytest.raises(GameError):
        Game(0.5, 1.0, mode="extended")


def test_state_predicates():
    assert State(0.3, 0.3).symmetric and State(0.3, 0.3).interior
    assert not State(0.0, 1.0).interior
    with pytest.raises(ValueError):
        State(1.2, 0.1)
    with pytest.raises(ValueError):
        State(np.nan, 0.1)
