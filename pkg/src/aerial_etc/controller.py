"""Backstepping virtual controls and the event-triggered actuator command.

The trigger watches the hold error ``e = u_held - u_bar`` between the last
transmitted command and the freshly computed one. A new command is sent when
``kappa + delta * (sigma - |e_j|) < 0`` for some axis; ``kappa`` is a dynamic
slack variable integrated alongside the plant.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .cfilter import CompGains, CompState, FilterState
from ._kernels import alpha1_k, alpha2_k
from .mathcore import SwitchParams, _check_finite, diag_gain, sgn
from .plant import PlantState
from .trajectory import TrajectorySample


@dataclass
class ErrorCoords:
    x1: np.ndarray
    x2: np.ndarray
    y1: np.ndarray
    y2: np.ndarray


def _g(*xs):
    return field(default_factory=lambda: np.array(xs, dtype=float))


@dataclass
class CtrlGains:
    beta1: np.ndarray = _g(1.0, 1.0, 1.2)
    gamma1: np.ndarray = _g(1.0, 1.0, 1.2)
    beta2: np.ndarray = _g(0.6, 0.6, 0.7)
    gamma2: np.ndarray = _g(1.0, 1.0, 1.2)
    sw: SwitchParams = field(default_factory=SwitchParams)

    def __post_init__(self):
        for name in ("beta1", "gamma1", "beta2", "gamma2"):
            setattr(self, name, diag_gain(getattr(self, name), name))


@dataclass(frozen=True)
class TriggerParams:
    sigma: float = 0.05
    delta: float = 0.1
    kappa0: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not self.kappa0 >= 0:
            raise ValueError(f"kappa0 must be non-negative, got {self.kappa0}")


@dataclass(frozen=True)
class TriggerState:
    kappa: float
    u_held: np.ndarray = field(default_factory=lambda: np.zeros(3))
    t_last_event: float = -np.inf
    event_count: int = 0


def error_coords(plant: PlantState, traj: TrajectorySample, fs: FilterState, cs: CompState) -> ErrorCoords:
    """Tracking errors ``x1 = p - p_d``, ``x2 = v - chi`` and their compensated forms."""
    x1 = plant.p - traj.p_d
    x2 = plant.v - fs.chi
    return ErrorCoords(x1=x1, x2=x2, y1=x1 - cs.iota1, y2=x2 - cs.iota2)


def alpha1(traj: TrajectorySample, ec: ErrorCoords, cs: CompState, g: CtrlGains, cg: CompGains) -> np.ndarray:
    """Virtual velocity command fed to the command filter."""
    _check_finite(ec.y1)
    _check_finite(cs.iota1)
    return alpha1_k(traj.pd_dot, ec.y1, cs.iota1, cg.c1, cg.k, cg.k1, g.beta1, g.gamma1,
                    g.sw.p_exp, g.sw.switch_eps)


def alpha2(xi: np.ndarray, ec: ErrorCoords, cs: CompState, g: CtrlGains, cg: CompGains) -> np.ndarray:
    """Virtual acceleration command; ``xi`` is the filter's exact derivative of ``chi``."""
    _check_finite(ec.y2)
    _check_finite(cs.iota2)
    return alpha2_k(np.asarray(xi, dtype=float), ec.x1, ec.y2, cs.iota2, cg.c2, cg.k2, g.beta2, g.gamma2,
                    g.sw.p_exp)


def trigger_gain(kappa: float, tp: TriggerParams) -> float:
    return tp.sigma + kappa / tp.delta


def bar_u(alpha2_now: np.ndarray, y2: np.ndarray, kappa: float, tp: TriggerParams) -> np.ndarray:
    """Continuously computed command before the hold."""
    return alpha2_now - trigger_gain(kappa, tp) * sgn(y2)


def trigger_fire(kappa: float, e_tilde: np.ndarray, tp: TriggerParams) -> bool:
    """True when some axis violates ``kappa + delta*(sigma - |e_j|) >= 0``."""
    return bool(np.any(kappa + tp.delta * (tp.sigma - np.abs(e_tilde)) < 0.0))


def kappa_deriv(kappa: float, e_tilde: np.ndarray, tp: TriggerParams) -> float:
    return -kappa + float(np.max(tp.sigma - np.abs(e_tilde)))


def apply_event(ts: TriggerState, bar_u_now: np.ndarray, t: float) -> TriggerState:
    """Transmit ``bar_u_now``: it becomes the held command from time ``t`` on."""
    if t < ts.t_last_event:
        raise ValueError(f"event at t={t} precedes last event at t={ts.t_last_event}")
    return replace(ts, u_held=np.array(bar_u_now, dtype=float), t_last_event=t, event_count=ts.event_count + 1)
