# A corner of the parameter sweep and a phase portrait.
from pathlib import Path

from hawkdove import Game, build_action_response, find_stationary_states
from hawkdove.experiments import rows_to_csv, run_sweep
from hawkdove.sampling import SampleDistribution
from hawkdove.svg import phase_portrait

rows = run_sweep(gs=(0.15, 0.55), distributions=[SampleDistribution.degenerate(3),
                                                 SampleDistribution.biased1(0.6)], n=200)
print(rows_to_csv(rows))

f = build_action_response(Game(0.25, 0.25), 3)
Path("phase_theta3.svg").write_text(phase_portrait(f, find_stationary_states(f), "theta = 3"))
print("wrote phase_theta3.svg")
