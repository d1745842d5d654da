"""Generalized hawk-dove game and population states.

Payoffs (row player)::

          h      d
    h     0    1+g
    d   1-l      1

Population states are pairs of hawk shares ``(p1, p2)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass


class Action(str, enum.Enum):
    HAWK = "h"
    DOVE = "d"


class GameError(ValueError):
    pass


@dataclass(frozen=True)
class Game:
    """Hawk gain ``g`` and dove loss ``l``.

    ``mode="strict"`` requires ``g, l in (0, 1)``; ``mode="extended"`` only
    requires ``g > 0``, ``l < 1`` and ``g + l > 0``.
    """

    g: float
    l: float  # noqa: E741
    mode: str = "strict"

    def __post_init__(self):
        g, l = float(self.g), float(self.l)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "l", l)
        if self.mode == "strict":
            if not (0.0 < g < 1.0 and 0.0 < l < 1.0):
                raise GameError(f"strict mode needs g, l in (0, 1); got g={g}, l={l}")
        elif self.mode == "extended":
            if not (g > 0.0 and l < 1.0 and g + l > 0.0):
                raise GameError(
                    f"extended mode needs g > 0, l < 1, g + l > 0; got g={g}, l={l}")
        else:
            raise GameError(f"unknown mode {self.mode!r}")

    @property
    def is_standard(self) -> bool:
        return self.g == self.l

    @property
    def nash_hawk_share(self) -> float:
        return self.g / (1.0 + self.g - self.l)


@dataclass(frozen=True)
class State:
    p1: float
    p2: float

    def __post_init__(self):
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError(f"state outside [0,1]^2: ({self.p1}, {self.p2})")

    @property
    def interior(self) -> bool:
        return 0.0 < self.p1 < 1.0 and 0.0 < self.p2 < 1.0

    @property
    def symmetric(self) -> bool:
        return self.p1 == self.p2

    def as_tuple(self) -> tuple[float, float]:
        return (self.p1, self.p2)


def payoff(game: Game, a: Action | str, b: Action | str) -> float:
    a, b = Action(a), Action(b)
    if a is Action.HAWK:
        return 0.0 if b is Action.HAWK else 1.0 + game.g
    return 1.0 - game.l if b is Action.HAWK else 1.0


def mixed_payoff(game: Game, p_own, p_opp):
    """Average payoff of a population with hawk share `p_own` against one with
    hawk share `p_opp`. Works elementwise on arrays."""
    return (p_own * (1.0 - p_opp) * (1.0 + game.g)
            + (1.0 - p_own) * p_opp * (1.0 - game.l)
            + (1.0 - p_own) * (1.0 - p_opp))


def mixed_nash(game: Game) -> tuple[float, float]:
    """Symmetric mixed equilibrium: (hawk probability, expected payoff)."""
    denom = 1.0 + game.g - game.l
    return game.g / denom, (1.0 + game.g) * (1.0 - game.l) / denom
