import numpy as np
import pytest
from scipy.stats import binomtest

from hawkdove.equilibria import Label, classify, find_stationary_states, symmetric_state
from hawkdove.flow import (
    estimate_basins,
    integrate,
    integrate_replicator,
    nullcline_field,
    replicator_field,
    replicator_step,
    rk4_step,
    sampling_field,
    uniform_starts,
)
from hawkdove.game import Game, State, mixed_nash
from hawkdove.response import build_action_response, build_response
from hawkdove.sampling import SWEEP_G, sweep_distributions

GAME = Game(0.25, 0.25)
MIXED_THETA = {1: 0.75, 3: 0.25}


@pytest.fixture(scope="module")
def cube():
    return build_action_response(GAME, 3)


@pytest.fixture(scope="module")
def mixed():
    return build_action_response(GAME, MIXED_THETA)


def test_symmetric_start_stays_symmetric(mixed):
    for q in (0.05, 0.3, 0.9):
        traj = integrate(mixed, (q, q), record_every=1)
        assert np.max(np.abs(traj.path[:, 1] - traj.path[:, 2])) < 1e-9


def test_start_at_stationary_state(cube):
    states = find_stationary_states(cube)
    for s in states:
        traj = integrate(cube, s.location, states=states)
        assert traj.steps == 0
        assert traj.limit == s.location
        assert traj.limit_state_index == states.index(s)


def test_mixed_theta_limits_interior(mixed):
    states = find_stationary_states(mixed)
    sym = symmetric_state(states)
    for start in uniform_starts(200, 1):
        traj = integrate(mixed, tuple(start), states=states)
        assert traj.converged and traj.final.interior
        assert traj.limit_state_index == states.index(sym)


def test_limit_is_stationary_within_tolerance(mixed):
    traj = integrate(mixed, (0.1, 0.9))
    p1, p2 = traj.limit.as_tuple()
    assert max(abs(mixed(p2) - p1), abs(mixed(p1) - p2)) <= 1e-8


def test_basins_mirror_symmetry(cube):
    est = estimate_basins(cube, n=400, seed=0)
    swapped = estimate_basins(cube, n=400, starts=est.starts[:, ::-1].copy())
    lo, hi = est.states[0], est.states[-1]
    assert est.fractions[0] == swapped.fractions[-1]
    assert est.fractions[-1] == swapped.fractions[0]
    assert lo.location.as_tuple() == (0.0, 1.0) and hi.location.as_tuple() == (1.0, 0.0)


def test_basins_even_split_across_seeds(cube):
    # n = 400 per estimate; +-0.06 is about 2.4 standard errors, so a rare seed
    # may fall outside and the check is made over ten independent seeds
    inside = 0
    for seed in range(10):
        est = estimate_basins(cube, n=400, seed=seed)
        assert est.unattributed == 0
        assert est.fractions.sum() == pytest.approx(1.0)
        inside += abs(est.fractions[0] - 0.5) <= 0.06 and abs(est.fractions[-1] - 0.5) <= 0.06
    assert inside >= 9


def test_basins_mixed_theta_interior(mixed):
    est = estimate_basins(mixed, n=400, seed=0)
    sym = est.states.index(symmetric_state(est.states))
    assert est.fractions[sym] >= 0.99


def test_basins_heterogeneous_example():
    f = build_action_response(Game(0.04, 0.04), {2: 0.3, 20: 0.7})
    est = estimate_basins(f, n=400, seed=0)
    stable = [i for i, s in enumerate(est.states) if s.stable]
    sym = est.states.index(symmetric_state(est.states))
    assert len(stable) == 3 and sym in stable
    assert all(est.fractions[sym] > est.fractions[i] for i in stable if i != sym)


def test_wilson_half_widths(cube):
    est = estimate_basins(cube, n=100, seed=4)
    for fr, hw in zip(est.fractions, est.half_widths):
        ci = binomtest(int(round(fr * 100)), 100).proportion_ci(method="wilson")
        assert hw == pytest.approx((ci.high - ci.low) / 2)
    assert est.to_dict()["n"] == 100


def test_basins_deterministic(cube):
    a = estimate_basins(cube, n=50, seed=9)
    b = estimate_basins(cube, n=50, seed=9)
    assert np.array_equal(a.assignment, b.assignment)
    assert np.array_equal(a.starts, uniform_starts(50, 9))
    assert np.all((a.starts > 0) & (a.starts < 1))


def test_delta_rescales_time(mixed):
    a = integrate(mixed, (0.2, 0.7), delta=1.0, record_every=1)
    b = integrate(mixed, (0.2, 0.7), delta=2.0, record_every=1)
    n = min(len(a.path), len(b.path))
    assert np.max(np.abs(a.path[:n, 1:] - b.path[:n, 1:])) < 1e-6
    assert np.allclose(b.path[:n, 0], a.path[:n, 0] / 2)


def test_numba_kernel_matches_numpy_rk4(mixed):
    traj = integrate(mixed, (0.15, 0.65), record_every=1, t_max=5.0)
    P = np.array([[0.15, 0.65]])
    ref = [P[0].copy()]
    for _ in range(len(traj.path) - 1):
        P = np.clip(rk4_step(lambda X: sampling_field(mixed, X), P, 0.01), 0.0, 1.0)
        ref.append(P[0].copy())
    assert np.max(np.abs(traj.path[:, 1:] - np.array(ref))) < 1e-13


def test_forward_invariance_and_sign_structure():
    rng = np.random.default_rng(3)
    edges = np.array([[0, 0], [0, 1], [1, 0], [1, 1], [0, 0.5], [0.5, 0], [1, 0.3], [0.7, 1]])
    pts = np.vstack([rng.uniform(0, 1, size=(300, 2)), edges])
    for theta in sweep_distributions()[::4]:
        for kind in ("action", "payoff"):
            f = build_response(Game(0.45, 0.45), theta, kind)
            field = sampling_field(f, pts)
            assert np.array_equal(np.sign(field[:, 0]), np.sign(f(pts[:, 1]) - pts[:, 0]))
            nxt = rk4_step(lambda X: sampling_field(f, X), pts, 0.01)
            assert nxt.min() >= -1e-9 and nxt.max() <= 1 + 1e-9


def test_random_environments_converge_to_stable_states():
    rng = np.random.default_rng(11)
    dists = sweep_distributions()
    for _ in range(50):
        g = SWEEP_G[rng.integers(10)]
        theta = dists[rng.integers(27)]
        kind = ("action", "payoff")[rng.integers(2)]
        f = build_response(Game(g, g), theta, kind)
        states = find_stationary_states(f)
        for start in rng.uniform(0.01, 0.99, size=(20, 2)):
            traj = integrate(f, tuple(start), states=states)
            if not traj.converged:
                continue
            p1, p2 = traj.limit.as_tuple()
            assert max(abs(f(p2) - p1), abs(f(p1) - p2)) <= 1e-8
            if traj.limit_state_index is not None and states[traj.limit_state_index].pure:
                assert classify(f, states[traj.limit_state_index].location).label is Label.STABLE


def test_non_convergence_is_flagged(cube):
    traj = integrate(cube, (0.1, 0.8), t_max=0.5)
    assert not traj.converged and traj.diverged and traj.limit is None


def test_trajectory_csv(cube):
    lines = integrate(cube, (0.1, 0.8), t_max=1.0).to_csv().splitlines()
    assert lines[0] == "t,p1,p2"
    assert lines[1].startswith("0.000000,0.1")


def test_nullclines(cube):
    data = nullcline_field(cube, resolution=11)
    for p1, p2 in data["w_curve"]:
        # on p2 = w(p1) the second component vanishes
        assert abs(cube(p1) - p2) <= 1e-12
    for p1, p2 in data["w_inverse_curve"]:
        assert abs(cube(p2) - p1) <= 1e-12
    assert data["w_curve"][0] == [0.0, 1.0] and data["w_curve"][-1] == [1.0, 0.0]
    assert data["w_inverse_curve"][0] == [0.0, 1.0] and data["w_inverse_curve"][-1] == [1.0, 0.0]
    grid = np.array(data["grid"])
    above = (grid[:, 1] > cube(grid[:, 0])) & (grid[:, 0] > cube(grid[:, 1]))
    assert above.any()
    assert np.all(grid[above, 2] < 0) and np.all(grid[above, 3] < 0)
    with pytest.raises(ValueError):
        nullcline_field(cube, resolution=1)


def test_nullcline_intersections_are_the_stationary_states(cube):
    t = np.linspace(0, 1, 20001)
    gap = cube(cube(t)) - t
    crossings = np.sum(np.sign(gap[1:-1][:-1]) != np.sign(gap[1:-1][1:]))
    assert crossings == 1
    assert len(find_stationary_states(cube)) == 3


def test_replicator_baseline():
    for g, l in [(0.25, 0.25), (0.6, 0.3), (0.2, 0.7)]:
        game = Game(g, l)
        q = mixed_nash(game)[0]
        for p in (0.0, 0.3, 1.0):
            assert replicator_step(game, (p, q))[0] == pytest.approx(0, abs=1e-15)
        for p in (0.0, 1.0):
            v = replicator_step(game, State(p, 0.4))
            assert v[0] == 0
    finals = integrate_replicator(GAME, uniform_starts(200, 2))
    ok = np.isclose(finals, [0, 1], atol=1e-4).all(1) | np.isclose(finals, [1, 0], atol=1e-4).all(1)
    assert ok.all()
    assert replicator_field(GAME, np.array([[0.5, 0.5]])).shape == (1, 2)
