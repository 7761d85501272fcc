"""Discrete-time pneumatic test bench and its measurement protocols."""

from .fitting import ExponentialFit, fit_exponential, multiplicative_noise
from .protocols import (BATCH_STEP, FATIGUE_PRESSURE, ProtocolResult, preset,
                        run_algorithm_1, run_algorithm_2, trial_ladder)
from .response import extract_response_time, synthetic_response_log
from .rig import (DEFAULT_CONFIG, LOG_COLUMNS, BenchConfig, BenchLog, BenchState, Rig,
                  ValveSimModel, step)

__all__ = [
    "BATCH_STEP", "BenchConfig", "BenchLog", "BenchState", "DEFAULT_CONFIG", "ExponentialFit",
    "FATIGUE_PRESSURE", "LOG_COLUMNS", "ProtocolResult", "Rig", "ValveSimModel",
    "extract_response_time", "fit_exponential", "multiplicative_noise", "preset", "run_algorithm_1", "run_algorithm_2",
    "step", "synthetic_response_log", "trial_ladder",
]
