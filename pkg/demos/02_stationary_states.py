# Stationary states and their stability, numerically and in closed form.
from hawkdove import (Game, build_action_response, find_stationary_states,
                      pure_state_stability, theorem1_verdict)
from hawkdove.equilibria import pure_state_product

game = Game(0.25, 0.25)

# homogeneous samples: the interior state is a saddle, the pure states attract
f = build_action_response(game, 3)
for s in find_stationary_states(f):
    print(s.location.as_tuple(), round(s.slope_product, 4), s.label.value)

# a little mass on single samples changes everything
for theta in ({1: 0.75, 2: 0.25}, {1: 0.75, 3: 0.25}):
    prod = pure_state_product(game, theta, "action")
    print(theta, "product", prod, pure_state_stability(game, theta, "action").value,
          theorem1_verdict(game, theta, "action").value)

# a heterogeneous population with five stationary states
f = build_action_response(Game(0.04, 0.04), {2: 0.3, 20: 0.7})
for s in find_stationary_states(f):
    print(tuple(round(x, 4) for x in s.location.as_tuple()), s.label.value)
