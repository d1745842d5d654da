"""Finite-population stochastic counterpart of the sampling dynamics.

Two populations of ``N`` agents. Each event picks one of the ``2N`` agents
uniformly (the discrete skeleton of independent unit-rate revision clocks),
draws her sample size from ``theta`` and lets her re-choose by actually
sampling the opposing population. Shares are recorded after every ``2N``
events, i.e. once per expected revision per agent, so block ``b`` lines up
with time ``t = b`` of the mean dynamics at ``delta = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numba
import numpy as np

from .equilibria import StationaryState
from .flow import integrate
from .game import Action, Game
from .response import ResponseFunction
from .sampling import (
    Dynamics,
    SampleDistribution,
    TieRule,
    action_best_reply,
    as_distribution,
    payoff_best_reply,
)


@dataclass(frozen=True)
class SimConfig:
    game: Game
    theta: SampleDistribution
    kind: Dynamics = Dynamics.ACTION
    tie: TieRule = TieRule.DOVE
    N: int = 1000
    horizon: int = 100
    seed: int = 0
    start: Optional[tuple[float, float]] = None
    replace: bool = True

    def __post_init__(self):
        object.__setattr__(self, "theta", as_distribution(self.theta))
        object.__setattr__(self, "kind", Dynamics(self.kind))
        object.__setattr__(self, "tie", TieRule(self.tie))
        if self.N < 2:
            raise ValueError("N must be at least 2")
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if not self.replace and self.theta.max_size > self.N:
            raise ValueError("sampling without replacement needs N >= max sample size")


@dataclass
class AbmRun:
    """Recorded hawk shares, one row per block of ``2N`` events."""

    series: np.ndarray
    seed: int
    start: tuple[float, float]

    @property
    def terminal(self) -> np.ndarray:
        return self.series[-1]

    def to_csv_rows(self, replicate_id: int = 0) -> list[str]:
        return [f"{b},{p1:.6f},{p2:.6f},{replicate_id}" for b, (p1, p2) in enumerate(self.series)]


def decision_table(game: Game, theta: SampleDistribution, kind: Dynamics,
                   tie: TieRule) -> np.ndarray:
    """``table[i, x, y]``: does a reviser with sample size ``theta.support[i]``
    adopt hawk after seeing ``x`` hawks (ASD), or ``x`` hawks in the h-trial
    and ``y`` in the d-trial (PSD)?"""
    kmax = theta.max_size
    table = np.zeros((len(theta.support), kmax + 1, kmax + 1), dtype=np.bool_)
    for i, k in enumerate(theta.support):
        for x in range(k + 1):
            if kind is Dynamics.ACTION:
                table[i, x, :] = action_best_reply(game, tie, x, k) is Action.HAWK
            else:
                for y in range(k + 1):
                    table[i, x, y] = payoff_best_reply(game, tie, x, y, k) is Action.HAWK
    return table


@numba.njit(cache=True)
def _draw_hawks(opp, k, replace, perm):
    n = opp.shape[0]
    hawks = 0
    if replace:
        for _ in range(k):
            hawks += opp[int(np.random.random() * n)]
    else:
        for t in range(k):
            j = t + int(np.random.random() * (n - t))
            perm[t], perm[j] = perm[j], perm[t]
            hawks += opp[perm[t]]
    return hawks


@numba.njit(cache=True)
def _simulate(a1, a2, sizes, cum, table, payoff_kind, replace, n_blocks, block_events,
              seed, out):
    np.random.seed(seed)
    n = a1.shape[0]
    perm = np.arange(n)
    h1 = a1.sum()
    h2 = a2.sum()
    out[0, 0] = h1 / n
    out[0, 1] = h2 / n
    for b in range(n_blocks):
        for _ in range(block_events):
            who = int(np.random.random() * 2 * n)
            u = np.random.random()
            i = 0
            while i < cum.shape[0] - 1 and u >= cum[i]:
                i += 1
            k = sizes[i]
            if who < n:
                own, opp = a1, a2
                agent = who
            else:
                own, opp = a2, a1
                agent = who - n
            x = _draw_hawks(opp, k, replace, perm)
            y = 0
            if payoff_kind:
                y = _draw_hawks(opp, k, replace, perm)
            new = 1 if table[i, x, y] else 0
            delta = new - own[agent]
            own[agent] = new
            if who < n:
                h1 += delta
            else:
                h2 += delta
        out[b + 1, 0] = h1 / n
        out[b + 1, 1] = h2 / n


def _initial(N: int, share: float) -> np.ndarray:
    a = np.zeros(N, dtype=np.int64)
    a[: int(round(share * N))] = 1
    return a


def run_abm(config: SimConfig, start: Optional[tuple[float, float]] = None,
            seed: Optional[int] = None, events_per_block: Optional[int] = None) -> AbmRun:
    """Simulate one replicate; returns shares after each block.

    `events_per_block` defaults to ``2N``; passing 1 records every single
    event (used to check the transition law on tiny populations).
    """
    seed = config.seed if seed is None else seed
    start = start or config.start
    if start is None:
        start = tuple(np.random.default_rng(seed).uniform(0, 1, size=2))
    theta = config.theta
    sizes = np.array(theta.support, dtype=np.int64)
    cum = np.cumsum([theta.mass(k) for k in theta.support])
    cum[-1] = 1.0
    table = decision_table(config.game, theta, config.kind, config.tie)
    a1, a2 = _initial(config.N, start[0]), _initial(config.N, start[1])
    block = 2 * config.N if events_per_block is None else int(events_per_block)
    out = np.empty((config.horizon + 1, 2))
    _simulate(a1, a2, sizes, cum, table, config.kind is Dynamics.PAYOFF, config.replace,
              config.horizon, block, np.uint32(seed), out)
    return AbmRun(out, int(seed), (float(start[0]), float(start[1])))


def replicate_seeds(master_seed: int, replicates: int) -> list[int]:
    children = np.random.SeedSequence(master_seed).spawn(replicates)
    return [int(c.generate_state(1)[0]) for c in children]


def run_replicates(config: SimConfig, replicates: int,
                   starts: Optional[Sequence[tuple[float, float]]] = None) -> list[AbmRun]:
    """Independent replicates with seeds spawned from ``config.seed``.

    Without explicit `starts`, each replicate draws its own uniform start from
    its seed (or uses ``config.start`` when set).
    """
    seeds = replicate_seeds(config.seed, replicates)
    runs = []
    for r, s in enumerate(seeds):
        st = starts[r] if starts is not None else None
        runs.append(run_abm(config, start=st, seed=s))
    return runs


@dataclass
class DeviationReport:
    sup_norm: np.ndarray
    terminal_distance: np.ndarray
    details: dict = field(default_factory=dict)

    @property
    def mean_sup_norm(self) -> float:
        return float(np.mean(self.sup_norm))

    @property
    def mean_terminal_distance(self) -> float:
        return float(np.mean(self.terminal_distance))

    def to_dict(self) -> dict:
        return {"replicates": len(self.sup_norm),
                "sup_norm_mean": self.mean_sup_norm, "sup_norm_max": float(np.max(self.sup_norm)),
                "terminal_mean": self.mean_terminal_distance,
                "terminal_max": float(np.max(self.terminal_distance))}


def mean_field_path(f: ResponseFunction, start, blocks: int) -> np.ndarray:
    """Deterministic shares at times ``0, 1, ..., blocks``."""
    traj = integrate(f, start, t_max=max(blocks, 1), record_every=1)
    t, p1, p2 = traj.path.T
    times = np.arange(blocks + 1, dtype=float)
    return np.column_stack([np.interp(times, t, p1), np.interp(times, t, p2)])


def compare_to_mean_field(runs: Sequence[AbmRun], f: ResponseFunction) -> DeviationReport:
    """Sup-norm and terminal distance of each replicate from the mean dynamics
    started at the same initial shares."""
    sup, term = [], []
    for run in runs:
        det = mean_field_path(f, run.series[0], len(run.series) - 1)
        diff = np.abs(run.series - det)
        sup.append(diff.max())
        term.append(diff[-1].max())
    return DeviationReport(np.array(sup), np.array(term))


def attribute_terminal(run: AbmRun, states: Sequence[StationaryState], tail: int = 20):
    """Index of the stable stationary state nearest to the replicate's average
    over its last `tail` blocks."""
    point = run.series[-tail:].mean(axis=0)
    best, best_d = None, np.inf
    for i, s in enumerate(states):
        if not s.stable:
            continue
        d = max(abs(point[0] - s.location.p1), abs(point[1] - s.location.p2))
        if d < best_d:
            best, best_d = i, d
    return best
