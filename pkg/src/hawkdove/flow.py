"""Mean dynamics ``p_i' = delta * (w(p_j) - p_i)``: fixed-step RK4 integration,
convergence detection, Monte Carlo basins, phase-portrait data, and the
replicator baseline."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numba
import numpy as np
from scipy.stats import binomtest

from .equilibria import Label, StationaryState, find_stationary_states
from .game import Game, State, mixed_nash, mixed_payoff, payoff
from .response import ResponseFunction, binom

BASE_STEP = 0.01
CONVERGENCE_TOL = 1e-9
ATTRIBUTION_RADIUS = 1e-4
START_INSET = 1e-6
DEFAULT_T_MAX = 1e4

CONVERGED, CAPTURED, MAXED_OUT = 0, 1, 2


# compiled kernels ------------------------------------------------------

@numba.njit(cache=True)
def _w(c, p):
    # Bernstein evaluation with pre-scaled coefficients c_i = b_i * C(n, i)
    n = c.shape[0] - 1
    if p <= 0.5:
        q = 1.0 - p
        t = p / q
        acc = c[n]
        for i in range(n - 1, -1, -1):
            acc = acc * t + c[i]
        return acc * q ** n
    t = (1.0 - p) / p
    acc = c[0]
    for i in range(1, n + 1):
        acc = acc * t + c[i]
    return acc * p ** n


@numba.njit(cache=True)
def _clamp(x):
    return min(1.0, max(0.0, x))


@numba.njit(cache=True)
def _rk4_step(c, p1, p2, v1, v2, h, delta):
    a1 = delta * (_w(c, p2 + 0.5 * h * v2) - (p1 + 0.5 * h * v1))
    a2 = delta * (_w(c, p1 + 0.5 * h * v1) - (p2 + 0.5 * h * v2))
    b1 = delta * (_w(c, p2 + 0.5 * h * a2) - (p1 + 0.5 * h * a1))
    b2 = delta * (_w(c, p1 + 0.5 * h * a1) - (p2 + 0.5 * h * a2))
    e1 = delta * (_w(c, p2 + h * b2) - (p1 + h * b1))
    e2 = delta * (_w(c, p1 + h * b1) - (p2 + h * b2))
    n1 = p1 + h / 6.0 * (v1 + 2.0 * a1 + 2.0 * b1 + e1)
    n2 = p2 + h / 6.0 * (v2 + 2.0 * a2 + 2.0 * b2 + e2)
    return _clamp(n1), _clamp(n2)


@numba.njit(cache=True)
def _integrate_path(c, p1, p2, h, delta, max_steps, tol, record_every):
    rows = max_steps // record_every + 2
    path = np.empty((rows, 3))
    r = 0
    status = MAXED_OUT
    s = 0
    while True:
        v1 = delta * (_w(c, p2) - p1)
        v2 = delta * (_w(c, p1) - p2)
        done = max(abs(v1), abs(v2)) < tol
        if s % record_every == 0 or done or s == max_steps:
            path[r, 0] = s * h
            path[r, 1] = p1
            path[r, 2] = p2
            r += 1
        if done:
            status = CONVERGED
            break
        if s == max_steps:
            break
        p1, p2 = _rk4_step(c, p1, p2, v1, v2, h, delta)
        s += 1
    return path[:r], s, status


@numba.njit(cache=True)
def _integrate_batch(c, starts, h, delta, max_steps, tol, targets, radius):
    m = starts.shape[0]
    finals = np.empty((m, 2))
    steps = np.zeros(m, dtype=np.int64)
    status = np.full(m, MAXED_OUT, dtype=np.int64)
    for j in range(m):
        p1 = starts[j, 0]
        p2 = starts[j, 1]
        s = 0
        while True:
            v1 = delta * (_w(c, p2) - p1)
            v2 = delta * (_w(c, p1) - p2)
            if max(abs(v1), abs(v2)) < tol:
                status[j] = CONVERGED
                break
            hit = False
            for t in range(targets.shape[0]):
                if max(abs(p1 - targets[t, 0]), abs(p2 - targets[t, 1])) <= radius:
                    hit = True
            if hit:
                status[j] = CAPTURED
                break
            if s == max_steps:
                break
            p1, p2 = _rk4_step(c, p1, p2, v1, v2, h, delta)
            s += 1
        finals[j, 0] = p1
        finals[j, 1] = p2
        steps[j] = s
    return finals, steps, status


def _scaled(f: ResponseFunction) -> np.ndarray:
    n = f.degree
    return np.ascontiguousarray(
        f.bernstein * np.array([float(binom(n, i)) for i in range(n + 1)]))


# results ---------------------------------------------------------------

@dataclass
class TrajectoryResult:
    """Sampled path (rows ``t, p1, p2``) and where it ended up.

    `limit` is set only when the speed dropped below the convergence
    tolerance; `diverged` flags trajectories that hit ``t_max`` first.
    """

    path: np.ndarray
    limit: Optional[State]
    limit_state_index: Optional[int]
    diverged: bool
    steps: int
    final: State

    @property
    def converged(self) -> bool:
        return self.limit is not None

    def to_csv(self) -> str:
        lines = ["t,p1,p2"]
        lines += [f"{t:.6f},{a:.17g},{b:.17g}" for t, a, b in self.path]
        return "\n".join(lines) + "\n"


@dataclass
class BasinEstimate:
    states: list[StationaryState]
    fractions: np.ndarray
    half_widths: np.ndarray
    unattributed: float
    n: int
    seed: int
    starts: np.ndarray = field(repr=False)
    assignment: np.ndarray = field(repr=False)

    def fraction_of(self, predicate: Callable[[StationaryState], bool]) -> float:
        return float(sum(fr for s, fr in zip(self.states, self.fractions) if predicate(s)))

    def to_dict(self) -> dict:
        return {
            "n": self.n, "seed": self.seed, "unattributed": self.unattributed,
            "basins": [dict(s.to_dict(), fraction=float(fr), half_width=float(hw))
                       for s, fr, hw in zip(self.states, self.fractions, self.half_widths)],
        }


def _attribute(point, states: Sequence[StationaryState], radius=ATTRIBUTION_RADIUS):
    best, best_d = None, radius
    for i, s in enumerate(states):
        if s.label not in (Label.STABLE, Label.UNSTABLE):
            continue
        d = max(abs(point[0] - s.location.p1), abs(point[1] - s.location.p2))
        if d <= best_d:
            best, best_d = i, d
    return best


# public API ------------------------------------------------------------

def integrate(f: ResponseFunction, start: State | tuple, delta: float = 1.0,
              t_max: float = DEFAULT_T_MAX, tol: float = CONVERGENCE_TOL,
              states: Optional[Sequence[StationaryState]] = None,
              record_every: int = 10, step: float = BASE_STEP) -> TrajectoryResult:
    """Integrate the sampling dynamics from `start` with classical RK4.

    The step is ``step / delta``; the state is clamped to the unit square after
    every step. Integration stops once ``max |p'| < tol`` or at `t_max`.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    start = start if isinstance(start, State) else State(*start)
    h = step / delta
    max_steps = int(round(t_max / h))
    path, steps, status = _integrate_path(_scaled(f), start.p1, start.p2, h, float(delta),
                                          max_steps, tol, int(record_every))
    final = State(float(path[-1, 1]), float(path[-1, 2]))
    if status == CONVERGED:
        if states is None:
            states = find_stationary_states(f)
        idx = _attribute(final.as_tuple(), states)
        return TrajectoryResult(path, final, idx, False, int(steps), final)
    return TrajectoryResult(path, None, None, True, int(steps), final)


def uniform_starts(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(START_INSET, 1.0 - START_INSET, size=(n, 2))


def estimate_basins(f: ResponseFunction, n: int = 400, seed: int = 0,
                    states: Optional[Sequence[StationaryState]] = None,
                    t_max: float = DEFAULT_T_MAX, tol: float = CONVERGENCE_TOL,
                    starts: Optional[np.ndarray] = None) -> BasinEstimate:
    """Share of uniformly random interior starts reaching each stationary state.

    A trajectory is attributed once it converges within 1e-4 of a hyperbolic
    stationary state, or as soon as it enters the 1e-4 box around an
    asymptotically stable one. Wilson 95% half-widths per state.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if states is None:
        states = find_stationary_states(f)
    states = list(states)
    if starts is None:
        starts = uniform_starts(n, seed)
    stable_pts = np.array([s.location.as_tuple() for s in states if s.label is Label.STABLE]
                          ).reshape(-1, 2)
    max_steps = int(round(t_max / BASE_STEP))
    finals, _, status = _integrate_batch(_scaled(f), np.ascontiguousarray(starts, dtype=float),
                                         BASE_STEP, 1.0, max_steps, tol, stable_pts,
                                         ATTRIBUTION_RADIUS)
    assignment = np.full(n, -1)
    for j in range(n):
        if status[j] == MAXED_OUT:
            continue
        idx = _attribute(finals[j], states)
        if idx is not None:
            assignment[j] = idx
    counts = np.array([np.sum(assignment == i) for i in range(len(states))])
    fractions = counts / n
    half = np.zeros(len(states))
    for i, c in enumerate(counts):
        ci = binomtest(int(c), n).proportion_ci(confidence_level=0.95, method="wilson")
        half[i] = 0.5 * (ci.high - ci.low)
    return BasinEstimate(states, fractions, half, float(np.mean(assignment < 0)), n, seed,
                         starts, assignment)


def nullcline_field(f: ResponseFunction, resolution: int = 21,
                    curve_points: int = 201) -> dict:
    """Velocity vectors on a ``resolution x resolution`` grid together with the
    nullclines ``p2 = w(p1)`` (where ``p2' = 0``) and ``p1 = w(p2)`` (where
    ``p1' = 0``, i.e. ``p2 = w^{-1}(p1)``)."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    axis = np.linspace(0.0, 1.0, resolution)
    P1, P2 = np.meshgrid(axis, axis, indexing="ij")
    V1 = f(P2) - P1
    V2 = f(P1) - P2
    t = np.linspace(0.0, 1.0, max(curve_points, resolution))
    w_curve = np.column_stack([t, f(t)])
    inv_curve = np.column_stack([f(t), t])[::-1]
    return {
        "grid": np.column_stack([P1.ravel(), P2.ravel(), V1.ravel(), V2.ravel()]).tolist(),
        "w_curve": w_curve.tolist(),
        "w_inverse_curve": inv_curve.tolist(),
    }


def sampling_field(f: ResponseFunction, points, delta: float = 1.0) -> np.ndarray:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    return delta * np.column_stack([f(P[:, 1]) - P[:, 0], f(P[:, 0]) - P[:, 1]])


# generic RK4 and the replicator baseline -------------------------------

def rk4_step(field_fn: Callable[[np.ndarray], np.ndarray], P: np.ndarray, h: float) -> np.ndarray:
    """One unclamped RK4 step of ``P' = field_fn(P)`` for a batch of states."""
    k1 = field_fn(P)
    k2 = field_fn(P + 0.5 * h * k1)
    k3 = field_fn(P + 0.5 * h * k2)
    k4 = field_fn(P + h * k3)
    return P + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def replicator_step(game: Game, s) -> np.ndarray:
    """Replicator velocity ``p_i (u(h, p_j) - u(p_i, p_j))`` at state `s`."""
    p1, p2 = s.as_tuple() if isinstance(s, State) else s
    return replicator_field(game, np.array([[p1, p2]]))[0]


def replicator_field(game: Game, P: np.ndarray) -> np.ndarray:
    P = np.atleast_2d(P)
    p1, p2 = P[:, 0], P[:, 1]
    u_h1 = (1.0 - p2) * payoff(game, "h", "d")
    u_h2 = (1.0 - p1) * payoff(game, "h", "d")
    return np.column_stack([p1 * (u_h1 - mixed_payoff(game, p1, p2)),
                            p2 * (u_h2 - mixed_payoff(game, p2, p1))])


def replicator_states(game: Game) -> list[State]:
    q = mixed_nash(game)[0]
    return [State(0.0, 0.0), State(0.0, 1.0), State(1.0, 0.0), State(1.0, 1.0), State(q, q)]


def integrate_replicator(game: Game, starts, t_max: float = DEFAULT_T_MAX,
                         tol: float = CONVERGENCE_TOL, step: float = BASE_STEP) -> np.ndarray:
    """Integrate the replicator dynamics for a batch of starts.

    Returns the final states (one row per start); rows whose speed never fell
    below `tol` are NaN.
    """
    P = np.atleast_2d(np.asarray(starts, dtype=float)).copy()
    active = np.ones(len(P), dtype=bool)
    for _ in range(int(round(t_max / step))):
        speed = np.max(np.abs(replicator_field(game, P[active])), axis=1)
        idx = np.nonzero(active)[0]
        active[idx[speed < tol]] = False
        if not active.any():
            break
        P[active] = np.clip(rk4_step(lambda X: replicator_field(game, X), P[active], step), 0, 1)
    P[active] = np.nan
    return P
