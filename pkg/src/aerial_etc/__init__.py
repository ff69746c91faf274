"""Event-triggered neural-network tracking control for an aerial manipulator.

The package simulates a command-filtered backstepping controller whose
friction estimate comes from an online-adapted three-layer network and
whose actuator channel is event-triggered, together with a time-triggered
variant and a PID baseline. Typical use::

    from aerial_etc import load_config, run_experiment, shipped_config

    outcome = run_experiment(load_config(shipped_config("ellipse_et_nn")))
    print(outcome.metrics.mean_err)
"""

from .cfilter import CompGains, CompState, FilterParams, FilterState
from .config import ConfigError, RunConfig, config_from_text, dump_config, load_config, shipped_config
from .controller import CtrlGains, ErrorCoords, TriggerParams, TriggerState
from .harness import MetricsReport, compare, read_csv, read_metrics, run_experiment
from .mathcore import NonFiniteError, SwitchParams, frac_power, rk4_integrate, rk4_step, sgn, theta
from .nnapprox import NNConfig, NNWeights
from .plant import DivergenceError, PlantParams, PlantState
from .sim import ControllerConfig, PIDGains, SimConfig, SimResult, settling_bound, simulate, value_bound
from .trajectory import TrajectorySample, TrajectorySpec, traj_sample

__version__ = "0.1.0"

__all__ = [
    "CompGains", "CompState", "ConfigError", "ControllerConfig", "CtrlGains", "DivergenceError",
    "ErrorCoords", "FilterParams", "FilterState", "MetricsReport", "NNConfig", "NNWeights",
    "NonFiniteError", "PIDGains", "PlantParams", "PlantState", "RunConfig", "SimConfig", "SimResult",
    "SwitchParams", "TrajectorySample", "TrajectorySpec", "TriggerParams", "TriggerState",
    "compare", "config_from_text", "dump_config", "frac_power", "load_config", "read_csv",
    "read_metrics", "rk4_integrate", "rk4_step", "run_experiment", "settling_bound", "sgn",
    "shipped_config", "simulate", "theta", "traj_sample", "value_bound",
]
