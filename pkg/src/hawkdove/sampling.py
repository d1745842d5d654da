"""Sample-size distributions, single-deviation thresholds and best replies to
raw samples.

All payoff comparisons go through :func:`compare`, which treats values equal
up to a relative 1e-12 as a tie so that nongeneric parameters (e.g. ``k * g``
landing exactly on an integer) resolve by the tie rule rather than by
floating-point noise.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .game import Action, Game

MAX_SAMPLE_SIZE = 64
_TIE_RTOL = 1e-12


class Dynamics(str, enum.Enum):
    ACTION = "action"
    PAYOFF = "payoff"


class TieRule(str, enum.Enum):
    DOVE = "dove"
    HAWK = "hawk"


class Strictness(str, enum.Enum):
    STRICT = "strict"
    WEAK = "weak"


class DistributionError(ValueError):
    pass


def compare(lhs: float, rhs: float) -> int:
    """Sign of ``lhs - rhs`` with a relative tie band of 1e-12."""
    scale = max(1.0, abs(lhs), abs(rhs))
    diff = lhs - rhs
    if abs(diff) <= _TIE_RTOL * scale:
        return 0
    return 1 if diff > 0 else -1


@dataclass(frozen=True)
class SampleDistribution:
    """Finite distribution ``theta`` over positive-integer sample sizes."""

    atoms: Mapping[int, float]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        clean = {}
        for k, mass in dict(self.atoms).items():
            if isinstance(k, float):
                if not math.isfinite(k) or k != int(k):
                    raise DistributionError(f"sample size must be a finite integer, got {k!r}")
            k = int(k)
            if k < 1:
                raise DistributionError(f"sample size must be >= 1, got {k}")
            if k > MAX_SAMPLE_SIZE:
                raise DistributionError(
                    f"sample size {k} exceeds the supported maximum {MAX_SAMPLE_SIZE}; "
                    "only bounded distributions are supported")
            mass = float(mass)
            if not mass > 0.0:
                raise DistributionError(f"mass of size {k} must be positive, got {mass}")
            clean[k] = clean.get(k, 0.0) + mass
        if not clean:
            raise DistributionError("empty distribution")
        total = math.fsum(clean.values())
        if abs(total - 1.0) > 1e-12:
            raise DistributionError(f"masses sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", MappingProxyType(dict(sorted(clean.items()))))
        if not self.label:
            object.__setattr__(self, "label", ",".join(f"{k}:{m:g}" for k, m in clean.items()))

    def __reduce__(self):
        return (type(self), (dict(self.atoms), self.label))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.atoms)

    @property
    def max_size(self) -> int:
        return max(self.atoms)

    def mass(self, k: int) -> float:
        return self.atoms.get(k, 0.0)

    def mean(self) -> float:
        return math.fsum(k * m for k, m in self.atoms.items())

    @property
    def is_degenerate(self) -> bool:
        return len(self.atoms) == 1

    # named families ----------------------------------------------------
    @classmethod
    def degenerate(cls, k: int) -> "SampleDistribution":
        return cls({int(k): 1.0}, label=f"degenerate:{int(k)}")

    @classmethod
    def uniform(cls, k: int) -> "SampleDistribution":
        k = int(k)
        return cls({i: 1.0 / k for i in range(1, k + 1)}, label=f"uniform:{k}")

    @classmethod
    def biased1(cls, q: float, top: int = 10) -> "SampleDistribution":
        """Share `q` has sample size one, the rest is uniform on ``{1..top}``."""
        if not 0.0 <= q <= 1.0:
            raise DistributionError(f"biased1 share must be in [0,1], got {q}")
        rest = (1.0 - q) / top
        atoms = {1: rest + q}
        if rest > 0:
            atoms.update({i: rest for i in range(2, top + 1)})
        return cls(atoms, label=f"biased1:{q:g}")

    @classmethod
    def parse(cls, text: str) -> "SampleDistribution":
        """Parse ``"k1:m1,k2:m2"`` or ``degenerate:k`` / ``uniform:k`` / ``biased1:q``.

        ``biased1`` accepts a fraction (``0.3``) or a percentage (``30%``).
        """
        text = text.strip()
        family = re.fullmatch(r"(degenerate|uniform|biased1)\s*:\s*([0-9.eE+-]+)(%?)", text)
        if family:
            name, value, pct = family.groups()
            try:
                if name == "biased1":
                    q = float(value) / (100.0 if pct else 1.0)
                    return cls.biased1(q)
                if pct:
                    raise DistributionError(f"'%' only allowed for biased1: {text!r}")
                return getattr(cls, name)(int(value))
            except ValueError as exc:
                raise DistributionError(f"bad distribution literal {text!r}: {exc}") from None
        atoms: dict[int, float] = {}
        for part in text.split(","):
            try:
                k_str, m_str = part.split(":")
                k, m = int(k_str), float(m_str)
            except ValueError:
                raise DistributionError(f"bad distribution literal {text!r}") from None
            if k in atoms:
                raise DistributionError(f"duplicate sample size {k} in {text!r}")
            atoms[k] = m
        return cls(atoms, label=text.replace(" ", ""))

    def __str__(self):
        return self.label


def as_distribution(theta) -> SampleDistribution:
    if isinstance(theta, SampleDistribution):
        return theta
    if isinstance(theta, str):
        return SampleDistribution.parse(theta)
    if isinstance(theta, int):
        return SampleDistribution.degenerate(theta)
    return SampleDistribution(theta)


def sweep_distributions() -> list[SampleDistribution]:
    """The 27 sample-size distributions of the numeric grid: degenerate and
    uniform for k = 2..10, and the 1-biased family for q = 10%..90%."""
    out = [SampleDistribution.degenerate(k) for k in range(2, 11)]
    out += [SampleDistribution.uniform(k) for k in range(2, 11)]
    out += [SampleDistribution.biased1(q / 10) for q in range(1, 10)]
    return out


SWEEP_G = tuple(round(0.05 + 0.1 * i, 2) for i in range(10))


def bounded_expectation(theta: SampleDistribution, m: float,
                        strictness: Strictness | str = Strictness.WEAK) -> float:
    """Sum of ``theta(k) * k`` over sizes ``k < m`` (strict) or ``k <= m`` (weak)."""
    strict = Strictness(strictness) is Strictness.STRICT
    total = []
    for k, mass in theta.atoms.items():
        c = compare(k, m)
        if c < 0 or (c == 0 and not strict):
            total.append(mass * k)
    return math.fsum(total)


@dataclass(frozen=True)
class Thresholds:
    m_h: float
    m_d: float


def thresholds(game: Game, kind: Dynamics | str) -> Thresholds:
    """Largest sample sizes at which one rare action flips a reviser."""
    g, l = game.g, game.l
    if Dynamics(kind) is Dynamics.ACTION:
        return Thresholds(1.0 + g / (1.0 - l), 1.0 + (1.0 - l) / g)
    return Thresholds((1.0 + g) / (1.0 - l), (1.0 + g) / g)


def corner_expectations(theta: SampleDistribution, game: Game, kind,
                        tie: TieRule | str = TieRule.DOVE) -> tuple[float, float]:
    """``(E_{<m_h}, E_{<=m_d})`` under dove-favouring ties; strict and weak swap
    under hawk-favouring ties."""
    th = thresholds(game, kind)
    if TieRule(tie) is TieRule.DOVE:
        return (bounded_expectation(theta, th.m_h, Strictness.STRICT),
                bounded_expectation(theta, th.m_d, Strictness.WEAK))
    return (bounded_expectation(theta, th.m_h, Strictness.WEAK),
            bounded_expectation(theta, th.m_d, Strictness.STRICT))


def _resolve(sign: int, tie: TieRule | str) -> Action:
    # sign > 0: hawk strictly better
    if sign > 0:
        return Action.HAWK
    if sign < 0:
        return Action.DOVE
    return Action.DOVE if TieRule(tie) is TieRule.DOVE else Action.HAWK


def action_best_reply(game: Game, tie: TieRule | str, hawks_in_sample: int, k: int) -> Action:
    """Best reply to a sample of `k` opponent actions containing
    `hawks_in_sample` hawks."""
    x = hawks_in_sample
    if k < 1 or not 0 <= x <= k:
        raise ValueError(f"need 0 <= hawks <= k and k >= 1; got hawks={x}, k={k}")
    # h iff x / k < g / (1 + g - l)
    return _resolve(compare(k * game.g, x * (1.0 + game.g - game.l)), tie)


def payoff_best_reply(game: Game, tie: TieRule | str, hawks_in_h_sample: int,
                      hawks_in_d_sample: int, k: int) -> Action:
    """Action with the higher total payoff when h is tested against a sample
    with `hawks_in_h_sample` hawks and d against one with `hawks_in_d_sample`."""
    x, y = hawks_in_h_sample, hawks_in_d_sample
    if k < 1 or not (0 <= x <= k and 0 <= y <= k):
        raise ValueError(f"need counts in [0, k] and k >= 1; got x={x}, y={y}, k={k}")
    h_total = (1.0 + game.g) * (k - x)
    d_total = k - game.l * y
    return _resolve(compare(h_total, d_total), tie)


def single_deviation_flips(game: Game, kind: Dynamics | str, tie: TieRule | str,
                           k: int, rare_action: Action | str) -> bool:
    """Whether one `rare_action` in an otherwise uniform sample changes the
    reviser's choice.

    A rare ``d`` is tested against an all-hawk opponent population (does the
    agent switch to h?); a rare ``h`` against an all-dove one (switch to d?).
    """
    rare = Action(rare_action)
    kind = Dynamics(kind)
    if rare is Action.DOVE:
        if kind is Dynamics.ACTION:
            return action_best_reply(game, tie, k - 1, k) is Action.HAWK
        return payoff_best_reply(game, tie, k - 1, k, k) is Action.HAWK
    if kind is Dynamics.ACTION:
        return action_best_reply(game, tie, 1, k) is Action.DOVE
    return payoff_best_reply(game, tie, 1, 0, k) is Action.DOVE
