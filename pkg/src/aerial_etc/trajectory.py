"""Reference trajectories with exact derivatives up to third order.

Periodic references are blended in from their center with a septic
smoothstep ramp so position, velocity, acceleration and jerk are all
continuous at start-up and at the end of the ramp.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._kernels import TRAJ_ELLIPSE, TRAJ_FIGURE_EIGHT, TRAJ_SETPOINT, ramp_k, traj_k
from .mathcore import vec3

KINDS = ("ellipse", "figure_eight", "setpoint")
KIND_CODES = {"ellipse": TRAJ_ELLIPSE, "figure_eight": TRAJ_FIGURE_EIGHT, "setpoint": TRAJ_SETPOINT}


class TrajectorySample(NamedTuple):
    p_d: np.ndarray
    pd_dot: np.ndarray
    pd_ddot: np.ndarray
    pd_dddot: np.ndarray


@dataclass
class TrajectorySpec:
    kind: str = "ellipse"
    center: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    a: float = 1.0
    b: float = 0.6
    altitude_amp: float = 0.0
    omega: float = 0.5
    ramp: float = 4.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"trajectory kind must be one of {KINDS}, got {self.kind!r}")
        self.center = vec3(self.center)
        if self.kind != "setpoint" and not self.omega > 0:
            raise ValueError(f"omega must be positive for periodic trajectories, got {self.omega}")
        if not self.ramp > 0:
            raise ValueError(f"ramp duration must be positive, got {self.ramp}")


def ramp_profile(t: float, duration: float):
    """Septic smoothstep ``r(t)`` and its first three time derivatives."""
    return ramp_k(float(t), float(duration))


def traj_sample(spec: TrajectorySpec, t: float) -> TrajectorySample:
    """Desired position and its first three derivatives at time ``t``."""
    if t < 0:
        raise ValueError(f"t must be non-negative, got {t}")
    rows = traj_k(KIND_CODES[spec.kind], float(t), spec.center, spec.a, spec.b, spec.altitude_amp,
                  spec.omega, spec.ramp)
    return TrajectorySample(rows[0], rows[1], rows[2], rows[3])
