"""Python access to the legtherm simulator core."""

from ._core import (
    NOMINAL_OBS_SIZE,
    NUM_MOTORS,
    NUM_NODES,
    RESIDUAL_OBS_SIZE,
    Error,
    SimConfig,
    VecEnv,
    __version__,
    discretize,
    layout,
    layout_json,
    long_horizon,
    node_labels,
    regularization_reward,
    reward_names,
    simulate_trace,
    steady_state,
    thermal_weight,
    trace_columns,
)

__all__ = [
    "NOMINAL_OBS_SIZE",
    "NUM_MOTORS",
    "NUM_NODES",
    "RESIDUAL_OBS_SIZE",
    "Error",
    "SimConfig",
    "VecEnv",
    "__version__",
    "discretize",
    "layout",
    "layout_json",
    "long_horizon",
    "node_labels",
    "regularization_reward",
    "reward_names",
    "simulate_trace",
    "steady_state",
    "thermal_weight",
    "trace_columns",
]
