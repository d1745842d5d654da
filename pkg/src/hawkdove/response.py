"""Response functions ``w(p)``: probability that a revising agent adopts hawk
when a share ``p`` of the opposing population plays hawk.

Every response function is a polynomial of degree ``n`` stored in the
Bernstein basis ``B_{i,n}(p) = C(n,i) p^i (1-p)^(n-i)``. For sampling
dynamics the Bernstein coefficients are probabilities in ``[0, 1]``, which
makes evaluation free of cancellation even at degree 128; the monomial
coefficients (needed only for dumps) grow like ``C(n, n/2)`` and are useless
for evaluation beyond degree ~30.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq

from .game import Action, Game
from .sampling import (
    Dynamics,
    SampleDistribution,
    TieRule,
    action_best_reply,
    as_distribution,
    payoff_best_reply,
)

MONOTONE_GRID = np.linspace(0.0, 1.0, 1001)


class ResponseError(ValueError):
    pass


@lru_cache(maxsize=None)
def _pascal_row(n: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _pascal_row(n - 1)
    return (1,) + tuple(a + b for a, b in zip(prev, prev[1:])) + (1,)


def binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return _pascal_row(n)[k]


def elevate(b: np.ndarray, degree: int) -> np.ndarray:
    """Re-express Bernstein coefficients `b` at a higher `degree`."""
    n = len(b) - 1
    if degree == n:
        return np.array(b, dtype=float)
    if degree < n:
        raise ValueError("cannot lower the degree")
    r = degree - n
    out = np.zeros(degree + 1)
    for j in range(degree + 1):
        lo, hi = max(0, j - r), min(n, j)
        out[j] = math.fsum(b[i] * (binom(n, i) * binom(r, j - i) / binom(degree, j))
                           for i in range(lo, hi + 1))
    return out


def bernstein_eval(b: np.ndarray, p):
    """Evaluate the Bernstein polynomial with coefficients `b` at `p`.

    Uses Horner in ``t = p/(1-p)`` on ``[0, 1/2]`` and in ``(1-p)/p`` on
    ``(1/2, 1]`` so the powers never exceed one.
    """
    n = len(b) - 1
    scaled = np.asarray(b, dtype=float) * np.array([float(binom(n, i)) for i in range(n + 1)])
    x = np.asarray(p, dtype=float)
    lo = x <= 0.5
    q = 1.0 - x
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(lo, x / q, q / x)
    t = np.where(np.isfinite(t), t, 0.0)
    val_lo = npoly.polyval(t, scaled) * q ** n
    val_hi = npoly.polyval(t, scaled[::-1]) * x ** n
    out = np.where(lo, val_lo, val_hi)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ResponseFunction:
    """Polynomial response function with its provenance.

    `bernstein` holds the coefficients; `game`, `theta`, `kind` and `tie`
    describe where it came from (``kind="limit"`` for the large-(g, l)
    payoff-sampling form, ``None`` for ad-hoc polynomials).
    """

    bernstein: np.ndarray
    game: Optional[Game] = None
    theta: Optional[SampleDistribution] = None
    kind: Optional[str] = None
    tie: TieRule = TieRule.DOVE
    _deriv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        b = np.array(self.bernstein, dtype=float)
        if b.ndim != 1 or len(b) < 1:
            raise ResponseError("need a 1-d coefficient vector")
        b.setflags(write=False)
        object.__setattr__(self, "bernstein", b)
        n = len(b) - 1
        d = n * np.diff(b) if n > 0 else np.zeros(1)
        d.setflags(write=False)
        object.__setattr__(self, "_deriv", d)

    @property
    def degree(self) -> int:
        return len(self.bernstein) - 1

    def __call__(self, p):
        return bernstein_eval(self.bernstein, p)

    evaluate = __call__

    def derivative(self, p):
        return bernstein_eval(self._deriv, p)

    @property
    def coefficients(self) -> np.ndarray:
        """Monomial coefficients, lowest degree first."""
        n = self.degree
        b = [Fraction(v) for v in self.bernstein]
        out = []
        for j in range(n + 1):
            s = sum(b[i] * binom(n, i) * binom(n - i, j - i) * (-1) ** (j - i)
                    for i in range(j + 1))
            out.append(float(s))
        return np.array(out)

    @classmethod
    def from_coefficients(cls, coeffs, **meta) -> "ResponseFunction":
        a = [Fraction(float(c)) for c in coeffs]
        n = len(a) - 1
        b = [float(sum(a[j] * Fraction(binom(i, j), binom(n, j)) for j in range(i + 1)))
             for i in range(n + 1)]
        return cls(np.array(b), **meta)

    def dumps(self) -> str:
        """JSON array of monomial coefficients, lowest degree first."""
        return json.dumps([float(c) for c in self.coefficients])

    def is_strictly_decreasing(self, grid=MONOTONE_GRID) -> bool:
        """Derivative negative at interior grid points and non-positive at
        the endpoints (it may vanish there, e.g. when ``theta(1) = 0``)."""
        d = np.atleast_1d(self.derivative(grid))
        interior = (grid > 0) & (grid < 1)
        return bool(np.all(d[interior] < 0) and np.all(d <= 0))

    def inverse(self, q: float, tol: float = 1e-12) -> float:
        """``p`` with ``|w(p) - q| <= tol``, by bisection."""
        if not 0.0 <= q <= 1.0:
            raise ResponseError(f"q must be in [0,1], got {q}")
        if not self.is_strictly_decreasing():
            raise ResponseError("inverse needs a strictly decreasing response function")
        lo, hi = 0.0, 1.0
        mid = 0.5
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            val = self(mid)
            if abs(val - q) <= tol:
                return mid
            if val > q:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 4 * np.finfo(float).eps:
                break
        return mid

    def fixed_point(self, xtol: float = 1e-14) -> float:
        """Unique ``p`` with ``w(p) = p``."""
        return brentq(lambda p: self(p) - p, 0.0, 1.0, xtol=xtol, rtol=4 * np.finfo(float).eps)

    def __repr__(self):
        src = self.kind or "custom"
        theta = f", theta={self.theta}" if self.theta is not None else ""
        game = f", g={self.game.g:g}, l={self.game.l:g}" if self.game is not None else ""
        return f"ResponseFunction({src}{game}{theta}, degree={self.degree})"


# builders ---------------------------------------------------------------

def action_cutoff(game: Game, k: int, tie: TieRule | str = TieRule.DOVE) -> int:
    """Largest hawk count in a size-`k` sample that still makes h the reply
    (``-1`` if none). Equals ``ceil(k a) - 1`` with ``a = g/(1+g-l)`` under
    dove-favouring ties."""
    m = -1
    for x in range(k + 1):
        if action_best_reply(game, tie, x, k) is Action.HAWK:
            m = x
        else:
            break
    return m


def _action_component(game: Game, k: int, tie) -> np.ndarray:
    b = np.array([1.0 if action_best_reply(game, tie, x, k) is Action.HAWK else 0.0
                  for x in range(k + 1)])
    return b


def _pair_component(k: int, event) -> np.ndarray:
    # P(event(X, Y)) for X, Y iid Bin(k, p), degree 2k
    b = [[] for _ in range(2 * k + 1)]
    for x in range(k + 1):
        for y in range(k + 1):
            if event(x, y):
                b[x + y].append(binom(k, x) * binom(k, y) / binom(2 * k, x + y))
    return np.array([math.fsum(v) for v in b])


def _payoff_component(game: Game, k: int, tie) -> np.ndarray:
    return _pair_component(
        k, lambda x, y: payoff_best_reply(game, tie, x, y, k) is Action.HAWK)


def _mix(parts: dict[int, np.ndarray], theta: SampleDistribution) -> np.ndarray:
    degree = max(len(b) - 1 for b in parts.values())
    total = np.zeros(degree + 1)
    for k, b in parts.items():
        total += theta.mass(k) * elevate(b, degree)
    return total


def build_action_response(game: Game, theta, tie: TieRule | str = TieRule.DOVE) -> ResponseFunction:
    """``w(p) = sum_k theta(k) P(X_k(p)/k < g/(1+g-l))``, ``X_k ~ Bin(k, p)``."""
    theta = as_distribution(theta)
    tie = TieRule(tie)
    parts = {k: _action_component(game, k, tie) for k in theta.support}
    return ResponseFunction(_mix(parts, theta), game=game, theta=theta,
                            kind=Dynamics.ACTION.value, tie=tie)


def build_payoff_response(game: Game, theta, tie: TieRule | str = TieRule.DOVE) -> ResponseFunction:
    """``w(p) = sum_k theta(k) P((1+g) X_k < g k + l Y_k)`` with independent
    ``X_k, Y_k ~ Bin(k, p)``."""
    theta = as_distribution(theta)
    tie = TieRule(tie)
    parts = {k: _payoff_component(game, k, tie) for k in theta.support}
    return ResponseFunction(_mix(parts, theta), game=game, theta=theta,
                            kind=Dynamics.PAYOFF.value, tie=tie)


def build_response(game: Game, theta, kind: Dynamics | str,
                   tie: TieRule | str = TieRule.DOVE) -> ResponseFunction:
    if Dynamics(kind) is Dynamics.ACTION:
        return build_action_response(game, theta, tie)
    return build_payoff_response(game, theta, tie)


def build_limit_payoff_response(k) -> ResponseFunction:
    """Payoff-sampling response in the limit ``g, l -> 1``:
    ``w_k(p) = P(2 X_k - Y_k < k)``.

    `k` may also be a sample-size distribution, giving the mixture.
    """
    theta = as_distribution(k)
    parts = {n: _pair_component(n, lambda x, y, n=n: 2 * x - y < n) for n in theta.support}
    return ResponseFunction(_mix(parts, theta), theta=theta, kind="limit")


def homogeneous_action_component(k: int, m: int) -> ResponseFunction:
    """``w_{k,m}(p) = P(X_k(p) <= m)``, the binomial CDF at `m`."""
    if not 0 <= m < k:
        raise ValueError(f"need 0 <= m < k, got m={m}, k={k}")
    b = np.array([1.0 if x <= m else 0.0 for x in range(k + 1)])
    return ResponseFunction(b, kind="binomial-cdf")
