# Integrating the mean dynamics and estimating basins of attraction.
from hawkdove import Game, build_action_response, estimate_basins, integrate

f = build_action_response(Game(0.04, 0.04), {2: 0.3, 20: 0.7})

traj = integrate(f, (0.3, 0.6))
print("converged:", traj.converged, "after", traj.steps, "steps at", traj.final)

est = estimate_basins(f, n=400, seed=0)
for s, frac, hw in zip(est.states, est.fractions, est.half_widths):
    if s.stable:
        print(f"({s.location.p1:.3f}, {s.location.p2:.3f})  {frac:.3f} +- {hw:.3f}")
print("unattributed:", est.unattributed)
