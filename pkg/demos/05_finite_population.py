# A finite population of 1000 agents per side, sampling real opponents.
import numpy as np

from hawkdove import Game, SimConfig, build_action_response, compare_to_mean_field, run_replicates

game = Game(0.25, 0.25)
theta = {1: 0.75, 3: 0.25}
cfg = SimConfig(game, theta, N=1000, horizon=60, seed=1)
runs = run_replicates(cfg, 5)
for r in runs:
    print("start", np.round(r.series[0], 3), "end", np.round(r.terminal, 3))

report = compare_to_mean_field(runs, build_action_response(game, theta))
print(report.to_dict())
