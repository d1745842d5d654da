# Response functions: how likely is a reviser to pick hawk when a share p of
# the other population plays hawk?
import numpy as np

from hawkdove import Game, build_action_response, build_payoff_response

game = Game(0.25, 0.25)

# three hawks out of three is never sampled when p is small, so for theta = 3
# action sampling picks hawk only after seeing no hawk at all
cube = build_action_response(game, 3)
for p in (0.0, 0.25, 0.5, 0.75, 1.0):
    print(f"p={p:.2f}  w={cube(p):.4f}  (1-p)^3={(1 - p) ** 3:.4f}")

# payoff sampling tests each action on fresh opponents
pay = build_payoff_response(game, 3)
print("payoff sampling, theta = 3:", pay)
print("monomial coefficients:", pay.dumps())

# both are strictly decreasing with w(0) = 1 and w(1) = 0
mix = build_payoff_response(game, "uniform:10")
p = np.linspace(0, 1, 11)
print(np.round(mix(p), 4))
print("decreasing:", mix.is_strictly_decreasing(), " inverse of 0.5:", round(mix.inverse(0.5), 6))
