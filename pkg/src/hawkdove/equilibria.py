"""Stationary states of the two-population dynamics and their stability.

A state ``(p1, p2)`` is stationary iff ``w(p1) = p2`` and ``w(p2) = p1``, so
every stationary ``p1`` is a root of ``G(p) = w(w(p)) - p`` and the search is
one-dimensional. The Jacobian of ``p1' = w(p2) - p1, p2' = w(p1) - p2`` is
``[[-1, w'(p2)], [w'(p1), -1]]`` with eigenvalues ``-1 +- sqrt(w'(p1) w'(p2))``.
"""
from __future__ import annotations

import cmath
import enum
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .game import Game, State
from .response import ResponseFunction
from .sampling import Dynamics, SampleDistribution, Strictness, TieRule, as_distribution, \
    bounded_expectation, corner_expectations

MARGINAL_BAND = 1e-6
BOUNDARY_BAND = 1e-9
SCAN_POINTS = 10_001
CONTINUUM_TOL = 1e-10
TANGENT_TOL = 1e-9


class Label(str, enum.Enum):
    STABLE = "AsymptoticallyStable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"
    CONTINUUM = "Continuum"


class PureStability(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    BOUNDARY = "Boundary"


class Verdict(str, enum.Enum):
    GLOBAL_MIXED = "GlobalMixed"
    PURE_REACHABLE = "PureReachable"
    BOUNDARY = "Boundary"


class NotStationaryError(ValueError):
    pass


class GridResolutionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class StationaryState:
    location: State
    slope_product: float
    eigenvalues: tuple
    label: Label
    residual: float = 0.0

    @property
    def stable(self) -> bool:
        return self.label is Label.STABLE

    @property
    def pure(self) -> bool:
        return self.location.as_tuple() in ((0.0, 1.0), (1.0, 0.0))

    def to_dict(self) -> dict:
        eig = [e.real if isinstance(e, complex) and e.imag == 0 else e for e in self.eigenvalues]
        eig = [[e.real, e.imag] if isinstance(e, complex) else float(e) for e in eig]
        return {"p1": self.location.p1, "p2": self.location.p2,
                "slope_product": self.slope_product, "eigenvalues": eig,
                "label": self.label.value}


def label_for(slope_product: float, band: float = MARGINAL_BAND) -> Label:
    if slope_product < 1.0 - band:
        return Label.STABLE
    if slope_product > 1.0 + band:
        return Label.UNSTABLE
    return Label.MARGINAL


def _eigenvalues(prod: float) -> tuple:
    if prod >= 0:
        r = math.sqrt(prod)
        return (-1.0 - r, -1.0 + r)
    r = cmath.sqrt(prod)
    return (-1.0 - r, -1.0 + r)


def classify(f: ResponseFunction, s: State, tol: float = 1e-8) -> StationaryState:
    """Linearize the dynamics at the stationary state `s`."""
    p1, p2 = s.as_tuple()
    residual = max(abs(f(p2) - p1), abs(f(p1) - p2))
    if residual > tol:
        raise NotStationaryError(f"({p1}, {p2}) is not stationary: residual {residual:.3g}")
    prod = float(f.derivative(p1) * f.derivative(p2)) + 0.0  # drop signed zero
    return StationaryState(s, prod, _eigenvalues(prod), label_for(prod), residual)


def composition_residual(f: ResponseFunction, p):
    return f(f(p)) - p


def find_stationary_states(f: ResponseFunction, tol: float = 1e-10,
                           n_grid: int = SCAN_POINTS) -> list[StationaryState]:
    """All stationary states, ordered by ``p1``.

    Scans ``G(p) = w(w(p)) - p`` on a uniform grid for sign changes, refines
    each bracket with Brent's method to `tol`, and picks up even-multiplicity
    roots from small local minima of ``|G|`` (reported as Marginal). Returns a
    single Continuum marker at ``(1/2, 1/2)`` when ``G`` vanishes identically.
    """
    grid = np.linspace(0.0, 1.0, n_grid)
    G = composition_residual(f, grid)
    if np.max(np.abs(G)) < CONTINUUM_TOL:
        mid = State(0.5, float(f(0.5)))
        return [StationaryState(mid, 1.0, (-2.0, 0.0), Label.CONTINUUM, 0.0)]

    def g_scalar(p):
        return f(f(p)) - p

    roots: list[tuple[float, bool]] = [(0.0, False), (1.0, False)]
    sym = f.fixed_point()
    roots.append((sym, False))
    sign = np.sign(G)
    for i in range(1, n_grid - 1):
        if sign[i] == 0:
            roots.append((grid[i], False))
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        roots.append((brentq(g_scalar, grid[i], grid[i + 1], xtol=tol), False))
    absG = np.abs(G)
    for i in range(2, n_grid - 2):
        if (absG[i] <= absG[i - 1] and absG[i] <= absG[i + 1] and absG[i] < 1e-6
                and sign[i - 1] == sign[i] == sign[i + 1] != 0):
            res = minimize_scalar(lambda p: abs(g_scalar(p)), bounds=(grid[i - 1], grid[i + 1]),
                                  method="bounded", options={"xatol": tol})
            if res.fun <= TANGENT_TOL:
                roots.append((float(res.x), True))

    roots.sort()
    merged: list[tuple[float, bool]] = []
    for p, tangent in roots:
        if merged and p - merged[-1][0] <= 10 * tol:
            q, t = merged[-1]
            # keep endpoints and the exact symmetric point as representatives
            keep = q if q in (0.0, 1.0, sym) else p
            merged[-1] = (keep, t or tangent)
        else:
            merged.append((p, tangent))

    spacing = grid[1] - grid[0]
    for (a, _), (b, _) in zip(merged, merged[1:]):
        if b - a < 10 * spacing:
            warnings.warn(f"stationary states at p1={a:.6g} and p1={b:.6g} are closer than "
                          "ten grid cells; some roots may be missed", GridResolutionWarning,
                          stacklevel=2)

    out = []
    for p, tangent in merged:
        if p == 0.0:
            loc = State(0.0, 1.0)
        elif p == 1.0:
            loc = State(1.0, 0.0)
        elif p == sym:
            loc = State(sym, sym)
        else:
            loc = State(p, min(1.0, max(0.0, float(f(p)))))
        st = classify(f, loc, tol=max(1e-8, 100 * tol))
        if tangent and st.label is not Label.MARGINAL:
            st = StationaryState(st.location, st.slope_product, st.eigenvalues,
                                 Label.MARGINAL, st.residual)
        out.append(st)
    return out


def symmetric_state(states: list[StationaryState]) -> StationaryState | None:
    for s in states:
        if s.label is not Label.CONTINUUM and s.location.symmetric and s.location.interior:
            return s
    return None


def states_to_json(states: list[StationaryState], **extra) -> str:
    return json.dumps([s.to_dict() for s in states], **extra)


# closed-form tests --------------------------------------------------------

def pure_state_product(game: Game, theta, kind: Dynamics | str,
                       tie: TieRule | str = TieRule.DOVE) -> float:
    e_h, e_d = corner_expectations(as_distribution(theta), game, kind, tie)
    return e_h * e_d


def pure_state_stability(game: Game, theta, kind: Dynamics | str,
                         tie: TieRule | str = TieRule.DOVE) -> PureStability:
    """Stability of ``(0,1)`` and ``(1,0)`` from ``E_{<m_h} * E_{<=m_d}``."""
    prod = pure_state_product(game, theta, kind, tie)
    if abs(prod - 1.0) <= BOUNDARY_BAND:
        return PureStability.BOUNDARY
    return PureStability.UNSTABLE if prod > 1.0 else PureStability.STABLE


def standard_game_mixed_test(g: float, theta, kind: Dynamics | str) -> bool:
    """Closed-form global-mixing condition for standard games (``g = l``).

    Raises ValueError when one of ``1/g``, ``1/(1-g)``, ``(1+g)/g``,
    ``(1+g)/(1-g)`` is an integer that the answer actually depends on, i.e.
    when counting that sample size weakly or strictly changes the verdict.
    """
    theta = as_distribution(theta)
    if not 0.0 < g < 1.0:
        raise ValueError(f"g must be in (0,1), got {g}")
    kind = Dynamics(kind)
    weak = _standard_condition(g, theta, kind, Strictness.WEAK)
    if not any(abs(x - round(x)) <= 1e-9 for x in (1 / g, 1 / (1 - g), (1 + g) / g,
                                                   (1 + g) / (1 - g))):
        return weak
    if weak != _standard_condition(g, theta, kind, Strictness.STRICT):
        raise ValueError(f"nongeneric g={g}: the verdict depends on the tie rule")
    return weak


def _standard_condition(g: float, theta: SampleDistribution, kind: Dynamics,
                        strictness: Strictness) -> bool:
    if kind is Dynamics.ACTION:
        return theta.mass(1) * bounded_expectation(theta, max(1 / g, 1 / (1 - g)), strictness) > 1.0
    if g < 1.0 / 3.0:
        return theta.mass(1) * bounded_expectation(theta, (1 + g) / g, strictness) > 1.0
    low = theta.mass(1) + 2.0 * theta.mass(2)
    return low * bounded_expectation(theta, max(3.0, (1 + g) / (1 - g)), strictness) > 1.0


def theorem1_verdict(game: Game, theta, kind: Dynamics | str,
                     tie: TieRule | str = TieRule.DOVE) -> Verdict:
    """Almost-global convergence to the interior iff the pure states are unstable."""
    stab = pure_state_stability(game, theta, kind, tie)
    if stab is PureStability.UNSTABLE:
        return Verdict.GLOBAL_MIXED
    if stab is PureStability.STABLE:
        return Verdict.PURE_REACHABLE
    return Verdict.BOUNDARY


def analyze(game: Game, theta, kind: Dynamics | str, tie: TieRule | str = TieRule.DOVE,
            tol: float = 1e-10) -> dict:
    """Stationary-state report for one environment (JSON-ready)."""
    from .response import build_response

    theta = as_distribution(theta)
    f = build_response(game, theta, kind, tie)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", GridResolutionWarning)
        states = find_stationary_states(f, tol=tol)
    return {
        "environment": {"g": game.g, "l": game.l, "mode": game.mode, "theta": theta.label,
                        "dynamics": Dynamics(kind).value, "tie": TieRule(tie).value},
        "stationary_states": [s.to_dict() for s in states],
        "pure_state_product": pure_state_product(game, theta, kind, tie),
        "pure_state_stability": pure_state_stability(game, theta, kind, tie).value,
        "theorem1_verdict": theorem1_verdict(game, theta, kind, tie).value,
        "warnings": [str(w.message) for w in caught],
    }

