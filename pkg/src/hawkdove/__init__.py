"""Sampling dynamics for two-population hawk-dove games."""
from .game import Action, Game, GameError, State, mixed_nash, mixed_payoff, payoff
from .sampling import (
    Dynamics,
    SampleDistribution,
    Strictness,
    TieRule,
    action_best_reply,
    bounded_expectation,
    payoff_best_reply,
    single_deviation_flips,
    thresholds,
)
from .response import (
    ResponseFunction,
    build_action_response,
    build_limit_payoff_response,
    build_payoff_response,
    build_response,
)
from .equilibria import (
    Label,
    StationaryState,
    analyze,
    classify,
    find_stationary_states,
    pure_state_stability,
    theorem1_verdict,
)
from .flow import TrajectoryResult, BasinEstimate, estimate_basins, integrate, nullcline_field
from .abm import SimConfig, compare_to_mean_field, run_abm, run_replicates

__version__ = "0.1.0"
