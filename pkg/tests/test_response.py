import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hawkdove.game import Game
from hawkdove.response import (
    ResponseError,
    ResponseFunction,
    action_cutoff,
    bernstein_eval,
    build_action_response,
    build_limit_payoff_response,
    build_payoff_response,
    build_response,
    elevate,
    homogeneous_action_component,
)
from hawkdove.sampling import SampleDistribution, bounded_expectation, corner_expectations
from oracles import asd_response, limit_response, psd_response
from test_sampling import distributions

P = np.linspace(0, 1, 101)
GAME = Game(0.25, 0.25)
GRID = [round(0.05 + 0.1 * i, 2) for i in range(10)]


def test_action_closed_forms():
    for g in (0.1, 0.5, 0.9):
        f = build_action_response(Game(g, 0.3), 1)
        assert np.allclose(f(P), 1 - P, atol=1e-14)
    assert np.allclose(build_action_response(GAME, 3)(P), (1 - P) ** 3, atol=1e-14)
    f = build_action_response(GAME, {1: 0.75, 3: 0.25})
    assert np.allclose(f(P), 0.75 * (1 - P) + 0.25 * (1 - P) ** 3, atol=1e-14)


def test_payoff_closed_forms():
    assert np.allclose(build_payoff_response(GAME, 1)(P), 1 - P, atol=1e-14)
    f = build_payoff_response(GAME, 3)
    assert np.allclose(f(P), (1 - P) ** 3 + 3 * P * (1 - P) ** 2 * P ** 3, atol=1e-14)


def test_limit_closed_forms():
    f1 = build_limit_payoff_response(1)
    assert np.allclose(f1(P), 1 - P, atol=1e-14)
    assert f1.fixed_point() == pytest.approx(0.5, abs=1e-12)
    f2 = build_limit_payoff_response(2)
    assert np.allclose(f2(P), (1 - P) ** 2 + 2 * P * (1 - P) * (2 * P - P ** 2), atol=1e-14)
    p = f2.fixed_point()
    assert p == pytest.approx(0.579, abs=5e-4)
    assert abs(f2.derivative(p)) == pytest.approx(0.690, abs=5e-4)


def test_evaluate_and_derivative_examples():
    f = build_action_response(GAME, 3)
    assert f(0.5) == pytest.approx(0.125)
    assert f.derivative(0.5) == pytest.approx(-0.75)
    lin = build_action_response(GAME, 1)
    assert np.allclose(lin.derivative(P), -1)


@pytest.mark.parametrize("m", range(7))
def test_homogeneous_derivative_identity(m):
    f = homogeneous_action_component(7, m)
    for p in (0.2, 0.5, 0.8):
        closed = 7 * math.comb(6, m) * p ** m * (1 - p) ** (6 - m)
        assert abs(f.derivative(p)) == pytest.approx(closed, rel=1e-12)


@pytest.mark.parametrize("k", range(2, 12))
def test_symmetry_identity(k):
    for m in range(k):
        a = homogeneous_action_component(k, k - m - 1)
        b = homogeneous_action_component(k, m)
        assert np.max(np.abs(a(1 - P) - (1 - b(P)))) < 1e-12


@pytest.mark.parametrize("g", [0.1, 0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("l", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_oracle_equivalence_degenerate(g, l):
    game = Game(g, l)
    for k in range(1, 9):
        fa = build_action_response(game, k)
        fp = build_payoff_response(game, k)
        ra = [asd_response(g, l, {k: 1.0}, p) for p in P]
        rp = [psd_response(g, l, {k: 1.0}, p) for p in P]
        assert np.max(np.abs(fa(P) - ra)) < 1e-10
        assert np.max(np.abs(fp(P) - rp)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(distributions(kmax=10), st.sampled_from(GRID), st.sampled_from(GRID),
       st.sampled_from(["dove", "hawk"]))
def test_oracle_equivalence_mixtures(theta, g, l, tie):
    game = Game(g, l)
    pts = P[::5]
    fa = build_action_response(game, theta, tie)
    fp = build_payoff_response(game, theta, tie)
    atoms = dict(theta.atoms)
    assert np.max(np.abs(fa(pts) - [asd_response(g, l, atoms, p, tie) for p in pts])) < 1e-10
    assert np.max(np.abs(fp(pts) - [psd_response(g, l, atoms, p, tie) for p in pts])) < 1e-10


@pytest.mark.parametrize("k", [1, 2, 5, 9, 20])
def test_limit_matches_enumeration(k):
    f = build_limit_payoff_response(k)
    assert np.max(np.abs(f(P) - [limit_response(k, p) for p in P])) < 1e-10


@settings(max_examples=60, deadline=None)
@given(distributions(kmax=20), st.sampled_from(GRID), st.sampled_from(GRID),
       st.sampled_from(["action", "payoff"]))
def test_fact1_endpoints_and_monotone(theta, g, l, kind):
    f = build_response(Game(g, l), theta, kind)
    assert abs(f(0.0) - 1) <= 1e-12 and abs(f(1.0)) <= 1e-12
    assert f.is_strictly_decreasing()


@settings(max_examples=40, deadline=None)
@given(distributions(kmax=15), st.sampled_from(GRID), st.sampled_from(GRID),
       st.sampled_from(["action", "payoff"]))
def test_finite_differences(theta, g, l, kind):
    f = build_response(Game(g, l), theta, kind)
    h = 1e-6
    x = np.linspace(0.01, 0.99, 99)
    fd = (f(x + h) - f(x - h)) / (2 * h)
    assert np.max(np.abs(f.derivative(x) - fd)) <= 1e-5


@pytest.mark.parametrize("g", GRID)
@pytest.mark.parametrize("kind", ["action", "payoff"])
@pytest.mark.parametrize("tie", ["dove", "hawk"])
def test_corner_slopes(g, kind, tie):
    from hawkdove.sampling import sweep_distributions
    game = Game(g, g)
    for theta in sweep_distributions():
        f = build_response(game, theta, kind, tie)
        e_h, e_d = corner_expectations(theta, game, kind, tie)
        assert abs(abs(f.derivative(0.0)) - e_d) <= 1e-9
        assert abs(abs(f.derivative(1.0)) - e_h) <= 1e-9


def test_inverse_examples():
    lin = build_action_response(GAME, 1)
    assert lin.inverse(0.3) == pytest.approx(0.7, abs=1e-12)
    cube = build_action_response(GAME, 3)
    assert cube.inverse(0.125) == pytest.approx(0.5, abs=1e-12)
    f2 = build_limit_payoff_response(2)
    p = f2.fixed_point()
    assert f2.inverse(p) == pytest.approx(p, abs=1e-9)
    with pytest.raises(ResponseError):
        lin.inverse(1.5)
    with pytest.raises(ResponseError):
        ResponseFunction([0.2, 0.7, 0.1]).inverse(0.5)


@settings(max_examples=50, deadline=None)
@given(distributions(kmax=10), st.floats(0, 1), st.sampled_from(["action", "payoff"]))
def test_inverse_roundtrip(theta, q, kind):
    f = build_response(Game(0.35, 0.45), theta, kind)
    assert abs(f(f.inverse(q)) - q) <= 1e-12


def test_action_cutoff_is_ceil_minus_one():
    for g in GRID:
        for l in GRID:
            a = g / (1 + g - l)
            for k in range(1, 20):
                m = action_cutoff(Game(g, l), k)
                if abs(k * a - round(k * a)) > 1e-9:
                    assert m == math.ceil(k * a) - 1


def test_monomial_roundtrip_and_dump():
    f = build_payoff_response(GAME, 3)
    c = f.coefficients
    assert np.allclose(np.polynomial.polynomial.polyval(P, c), f(P), atol=1e-13)
    g = ResponseFunction.from_coefficients(c)
    assert np.allclose(g(P), f(P), atol=1e-13)
    dumped = json.loads(build_action_response(GAME, 3).dumps())
    assert dumped == pytest.approx([1, -3, 3, -1])


def test_high_degree_stability():
    # degree 128 stays accurate because the coefficients are probabilities
    f = build_payoff_response(Game(0.6, 0.4), 64)
    assert abs(f(0.0) - 1) < 1e-12 and abs(f(1.0)) < 1e-12
    x = np.linspace(0, 1, 1001)
    v = f(x)
    assert np.all((v >= -1e-15) & (v <= 1 + 1e-15))
    assert np.all(np.diff(v) <= 1e-13)
    assert f.is_strictly_decreasing()


def test_elevation_preserves_values():
    b = np.array([1.0, 0.4, 0.1, 0.0])
    for d in (3, 5, 11):
        assert np.allclose(bernstein_eval(elevate(b, d), P), bernstein_eval(b, P), atol=1e-14)
    with pytest.raises(ValueError):
        elevate(b, 2)


def test_bounded_expectation_vs_mixture_slope():
    theta = SampleDistribution({1: 0.75, 3: 0.25})
    f = build_action_response(GAME, theta)
    assert abs(f.derivative(0.0)) == pytest.approx(bounded_expectation(theta, 4, "weak"))
