"""Closed-loop simulation of the event-triggered NN controller and the PID baseline.

Each control tick (100 Hz by default) samples the reference, evaluates the
controller, decides whether to transmit, and then integrates the plant
together with every controller ODE (command filter, compensator, network
weights, trigger variable) over the control period with RK4 substeps. The
actuator command is held constant between transmissions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .cfilter import CompGains, CompState, FilterParams, FilterState, filter_init
from .controller import (
    CtrlGains,
    ErrorCoords,
    TriggerParams,
    TriggerState,
    alpha1,
    alpha2,
    apply_event,
    bar_u,
    error_coords,
    trigger_fire,
)
from ._kernels import LoopParams, loop_advance, plant_advance
from .mathcore import NonFiniteError, diag_gain
from .nnapprox import NNConfig, NNWeights, forward, init_weights, nn_input
from .plant import DivergenceError, PlantParams, PlantState, u_from_uc
from .trajectory import KIND_CODES, TrajectorySample, TrajectorySpec, traj_sample

log = logging.getLogger(__name__)

CONTROLLERS = ("et_nn", "time_triggered_nn", "baseline_pid")


@dataclass(frozen=True)
class SimConfig:
    dt_plant: float = 1.0e-3
    control_period: float = 0.01
    t_end: float = 60.0
    seed: int = 0
    # record NN weights every this many ticks; 0 disables the weight stream
    weight_decimation: int = 0

    def __post_init__(self):
        if self.weight_decimation < 0:
            raise ValueError(f"weight_decimation must be >= 0, got {self.weight_decimation}")
        if not self.dt_plant > 0 or not self.control_period > 0 or not self.t_end > 0:
            raise ValueError("dt_plant, control_period and t_end must be positive")
        ratio = self.control_period / self.dt_plant
        if abs(ratio - round(ratio)) > 1e-9 * ratio or round(ratio) < 1:
            raise ValueError(
                f"control_period {self.control_period} is not an integer multiple of dt_plant {self.dt_plant}"
            )

    @property
    def substeps(self) -> int:
        return int(round(self.control_period / self.dt_plant))

    @property
    def n_ticks(self) -> int:
        return int(round(self.t_end / self.control_period))


def _g(*xs):
    return field(default_factory=lambda: np.array(xs, dtype=float))


@dataclass
class PIDGains:
    kp: np.ndarray = _g(8.0, 8.0, 10.0)
    ki: np.ndarray = _g(1.5, 1.5, 8.0)
    kd: np.ndarray = _g(10.0, 10.0, 13.0)
    integral_limit: float = math.inf
    # "hover" preloads the z integral so the run starts in trimmed hover
    integral_init: str = "hover"

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            setattr(self, name, diag_gain(getattr(self, name), name))
        if not self.integral_limit > 0:
            raise ValueError("integral_limit must be positive")
        if self.integral_init not in ("hover", "zero"):
            raise ValueError(f"integral_init must be 'hover' or 'zero', got {self.integral_init!r}")


@dataclass
class PIDState:
    integral: np.ndarray = field(default_factory=lambda: np.zeros(3))
    saturated: bool = False


def pid_initial_state(gains: PIDGains, params: PlantParams) -> PIDState:
    integral = np.zeros(3)
    if gains.integral_init == "hover":
        integral[2] = -params.m_t * params.g / gains.ki[2]
    return PIDState(integral=integral)


def pid_control(x1: np.ndarray, x1_dot: np.ndarray, pid: PIDState, traj: TrajectorySample,
                params: PlantParams, gains: PIDGains, dt: float):
    """Baseline thrust ``U_c = -Kp e - Ki int(e) - Kd e' + m_t pd''`` (N).

    The law uses the integral accumulated so far; the rectangle ``e * dt`` is
    added afterwards for the next tick. Returns ``(U_c, new_state)``.
    """
    U_c = -gains.kp * x1 - gains.ki * pid.integral - gains.kd * x1_dot + params.m_t * traj.pd_ddot
    integral = pid.integral + x1 * dt
    saturated = False
    if np.any(np.abs(integral) > gains.integral_limit):
        integral = np.clip(integral, -gains.integral_limit, gains.integral_limit)
        saturated = True
        log.debug("PID integral clamped at %s", integral)
    return U_c, PIDState(integral=integral, saturated=saturated)


def lyapunov_surrogate(ec: ErrorCoords, cs: CompState) -> float:
    """``V_s = (|y1|^2 + |y2|^2 + |iota1|^2 + |iota2|^2) / 2`` (weight errors omitted)."""
    return 0.5 * float(ec.y1 @ ec.y1 + ec.y2 @ ec.y2 + cs.iota1 @ cs.iota1 + cs.iota2 @ cs.iota2)


def _check_bound_args(p_exp: float, omega: float):
    if not 0.0 < omega < 1.0:
        raise ValueError(f"omega must satisfy 0 < omega < 1, got {omega}")
    if not 0.5 < p_exp < 1.0:
        raise ValueError(f"exponent must satisfy 0.5 < p < 1, got {p_exp}")


def settling_bound(l: float, m: float, p_exp: float, omega: float) -> float:
    """Upper bound on the settling time for ``V' <= -l V^p - m V^2 + n``."""
    _check_bound_args(p_exp, omega)
    if not (l > 0 and m > 0):
        raise ValueError("l and m must be positive")
    return 1.0 / (l * omega * (1.0 - p_exp)) + 1.0 / (omega * m)


def value_bound(l: float, m: float, n: float, p_exp: float, omega: float) -> float:
    """Residual bound on ``V`` reached after the settling time."""
    _check_bound_args(p_exp, omega)
    if not (l > 0 and m > 0 and n >= 0):
        raise ValueError("l, m must be positive and n non-negative")
    return min((n / ((1.0 - omega) * l)) ** (1.0 / p_exp), (n / ((1.0 - omega) * m)) ** 0.5)


@dataclass
class ControllerConfig:
    """Everything one closed-loop run needs apart from the output paths."""

    plant: PlantParams = field(default_factory=PlantParams)
    comp: CompGains = field(default_factory=CompGains)
    ctrl: CtrlGains = field(default_factory=CtrlGains)
    filt: FilterParams = field(default_factory=FilterParams)
    nn: NNConfig = field(default_factory=NNConfig)
    trigger: TriggerParams = field(default_factory=TriggerParams)
    pid: PIDGains = field(default_factory=PIDGains)
    traj: TrajectorySpec = field(default_factory=TrajectorySpec)
    sim: SimConfig = field(default_factory=SimConfig)
    controller: str = "et_nn"
    p0_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}, got {self.controller!r}")
        if self.ctrl.sw != self.comp.sw:
            raise ValueError("controller and compensator must share the switch parameters")
        self.p0_offset = np.asarray(self.p0_offset, dtype=float).reshape(3)


# per-tick channels recorded by simulate(); the CSV writer picks a subset
VEC_CHANNELS = ("p", "pd", "x1", "y1", "y2", "iota1", "iota2", "alpha2", "ubar", "u_held", "fhat")
SCALAR_CHANNELS = ("t", "kappa", "V_s", "key_ineq", "w0_sq", "w1_sq")


@dataclass
class SimResult:
    controller: str
    n_ticks: int
    control_period: float
    data: dict
    event: np.ndarray
    event_count: int
    diverged: bool = False
    message: str = ""
    final_weights: NNWeights | None = None

    def __getitem__(self, key):
        return self.data[key]

    @property
    def transmission_ratio(self) -> float:
        return self.event_count / self.n_ticks if self.n_ticks else 0.0

    def event_times(self) -> np.ndarray:
        return self.data["t"][self.event.astype(bool)]


def loop_params(cfg: ControllerConfig) -> LoopParams:
    """Flatten a validated configuration for the compiled integrator."""
    pl, cg, g, fp, nn, tp, tr = cfg.plant, cfg.comp, cfg.ctrl, cfg.filt, cfg.nn, cfg.trigger, cfg.traj
    return LoopParams(
        m_t=float(pl.m_t), visc=pl.visc, coul=pl.coul, v_s=float(pl.v_s), dist_amp=pl.dist_amp,
        dist_freq=pl.dist_freq, dist_phase=pl.dist_phase, v_limit=float(pl.v_limit),
        c1=cg.c1, c2=cg.c2, k=cg.k, k1=cg.k1, k2=cg.k2,
        beta1=g.beta1, gamma1=g.gamma1, beta2=g.beta2, gamma2=g.gamma2,
        p_exp=float(g.sw.p_exp), switch_eps=float(g.sw.switch_eps),
        zeta=float(fp.zeta), rho=float(fp.rho), filt_eps=float(fp.filt_eps),
        n0=int(nn.n0), n1=int(nn.n1), n2=int(nn.n2), gamma0_nn=nn.gamma0, gamma1_nn=nn.gamma1,
        vbar0=float(nn.vbar0), vbar1=float(nn.vbar1),
        sigma=float(tp.sigma), delta=float(tp.delta),
        traj_kind=KIND_CODES[tr.kind], center=tr.center, a=float(tr.a), b=float(tr.b),
        h=float(tr.altitude_amp), omega=float(tr.omega), ramp=float(tr.ramp),
    )


def pack_state(ps: PlantState, fs: FilterState, cs: CompState, w: NNWeights, kappa: float) -> np.ndarray:
    """Flat closed-loop state: p, v, chi, xi, iota1, iota2, V0, V1 (row-major), kappa."""
    return np.concatenate([ps.p, ps.v, fs.chi, fs.xi, cs.iota1, cs.iota2,
                           w.v0_hat.ravel(), w.v1_hat.ravel(), [kappa]])


def unpack_state(x: np.ndarray, nn: NNConfig):
    n0, n1, n2 = nn.n0, nn.n1, nn.n2
    s0 = (n0 + 1) * n1
    s1 = (n1 + 1) * n2
    ps = PlantState(x[0:3], x[3:6])
    fs = FilterState(x[6:9], x[9:12])
    cs = CompState(x[12:15], x[15:18])
    w = NNWeights(x[18:18 + s0].reshape(n0 + 1, n1).copy(), x[18 + s0:18 + s0 + s1].reshape(n1 + 1, n2).copy())
    return ps, fs, cs, w, float(x[-1])


def _alloc(n: int, n_weights: int = 0) -> dict:
    data = {name: np.full((n, 3), np.nan) for name in VEC_CHANNELS}
    data.update({name: np.full(n, np.nan) for name in SCALAR_CHANNELS})
    # flattened [V0, V1] (row-major) per tick; width 0 for the PID baseline
    data["weights"] = np.full((n, n_weights), np.nan)
    return data


def _truncate(data: dict, n: int) -> dict:
    return {k: v[:n] for k, v in data.items()}


def simulate(cfg: ControllerConfig) -> SimResult:
    """Run one closed loop and return per-tick telemetry.

    A :class:`DivergenceError` or non-finite state ends the run early; the
    telemetry recorded up to that tick is kept and ``diverged`` is set.
    """
    if cfg.controller == "baseline_pid":
        return _simulate_pid(cfg)
    return _simulate_nn(cfg)


def _initial_plant(cfg: ControllerConfig) -> PlantState:
    tr0 = traj_sample(cfg.traj, 0.0)
    return PlantState(p=tr0.p_d + cfg.p0_offset, v=tr0.pd_dot.copy())


def _simulate_nn(cfg: ControllerConfig) -> SimResult:
    sc = cfg.sim
    n = sc.n_ticks
    h = sc.dt_plant
    lp = loop_params(cfg)
    event_triggered = cfg.controller == "et_nn"

    ps = _initial_plant(cfg)
    cs = CompState()
    tr0 = traj_sample(cfg.traj, 0.0)
    ec0 = error_coords(ps, tr0, FilterState(np.zeros(3), np.zeros(3)), cs)
    fs = filter_init(alpha1(tr0, ec0, cs, cfg.ctrl, cfg.comp))
    w = init_weights(cfg.nn, sc.seed)
    ts = TriggerState(kappa=cfg.trigger.kappa0)
    x = pack_state(ps, fs, cs, w, cfg.trigger.kappa0)
    n_w = w.v0_hat.size + w.v1_hat.size

    data = _alloc(n, n_w)
    event = np.zeros(n, dtype=np.int8)
    diverged, message = False, ""
    k = 0
    try:
        for k in range(n):
            t = k * sc.control_period
            ps, fs, cs, w, kappa = unpack_state(x, cfg.nn)
            traj = traj_sample(cfg.traj, t)
            ec = error_coords(ps, traj, fs, cs)
            fhat = forward(w, nn_input(traj.pd_dot))
            a2 = alpha2(fs.xi, ec, cs, cfg.ctrl, cfg.comp)
            ub = bar_u(a2, ec.y2, kappa, cfg.trigger)
            e_tilde = ts.u_held - ub
            if k == 0 or not event_triggered or trigger_fire(kappa, e_tilde, cfg.trigger):
                ts = apply_event(ts, ub, t)
                event[k] = 1
                e_tilde = ts.u_held - ub
            ts = TriggerState(kappa=kappa, u_held=ts.u_held, t_last_event=ts.t_last_event,
                              event_count=ts.event_count)

            data["t"][k] = t
            data["p"][k] = ps.p
            data["pd"][k] = traj.p_d
            data["x1"][k] = ec.x1
            data["y1"][k] = ec.y1
            data["y2"][k] = ec.y2
            data["iota1"][k] = cs.iota1
            data["iota2"][k] = cs.iota2
            data["alpha2"][k] = a2
            data["ubar"][k] = ub
            data["u_held"][k] = ts.u_held
            data["fhat"][k] = fhat
            data["kappa"][k] = kappa
            data["V_s"][k] = lyapunov_surrogate(ec, cs)
            data["key_ineq"][k] = float(ec.y2 @ (ts.u_held - a2))
            data["w0_sq"][k] = float(np.sum(w.v0_hat ** 2))
            data["w1_sq"][k] = float(np.sum(w.v1_hat ** 2))
            data["weights"][k] = x[18:18 + n_w]

            x, ok = loop_advance(x, t, h, sc.substeps, ts.u_held, e_tilde, lp)
            if not ok:
                raise DivergenceError(f"state left the safety envelope during ({t:.3f}, {t + sc.control_period:.3f}]")
        k = n
    except (DivergenceError, NonFiniteError) as exc:
        diverged, message = True, f"t={k * sc.control_period:.3f}: {exc}"
        log.warning("run diverged at %s", message)
        k += 1 if not np.isnan(data["t"][k]) else 0
    final = unpack_state(x, cfg.nn)[3] if not diverged else None
    return SimResult(cfg.controller, n, sc.control_period, _truncate(data, k), event[:k],
                     int(event[:k].sum()), diverged, message, final)


def _simulate_pid(cfg: ControllerConfig) -> SimResult:
    sc = cfg.sim
    n = sc.n_ticks
    h = sc.dt_plant
    params = cfg.plant
    lp = loop_params(cfg)
    ps = _initial_plant(cfg)
    pid = pid_initial_state(cfg.pid, params)
    x = np.concatenate([ps.p, ps.v])
    data = _alloc(n)
    event = np.ones(n, dtype=np.int8)
    diverged, message = False, ""
    zero = np.zeros(3)
    k = 0
    try:
        for k in range(n):
            t = k * sc.control_period
            p, v = x[:3].copy(), x[3:].copy()
            traj = traj_sample(cfg.traj, t)
            e1 = p - traj.p_d
            e1_dot = v - traj.pd_dot
            U_c, pid = pid_control(e1, e1_dot, pid, traj, params, cfg.pid, sc.control_period)
            u = u_from_uc(U_c, params)
            ec = ErrorCoords(x1=e1, x2=e1_dot, y1=e1, y2=e1_dot)

            data["t"][k] = t
            data["p"][k] = p
            data["pd"][k] = traj.p_d
            data["x1"][k] = e1
            data["y1"][k] = e1
            data["y2"][k] = e1_dot
            data["iota1"][k] = zero
            data["iota2"][k] = zero
            data["alpha2"][k] = u
            data["ubar"][k] = u
            data["u_held"][k] = u
            data["fhat"][k] = zero
            data["kappa"][k] = 0.0
            data["V_s"][k] = lyapunov_surrogate(ec, CompState())
            data["key_ineq"][k] = 0.0
            data["w0_sq"][k] = 0.0
            data["w1_sq"][k] = 0.0

            x, ok = plant_advance(x, t, h, sc.substeps, u, lp)
            if not ok:
                raise DivergenceError(f"state left the safety envelope during ({t:.3f}, {t + sc.control_period:.3f}]")
        k = n
    except (DivergenceError, NonFiniteError) as exc:
        diverged, message = True, f"t={k * sc.control_period:.3f}: {exc}"
        log.warning("run diverged at %s", message)
        k += 1 if not np.isnan(data["t"][k]) else 0
    return SimResult(cfg.controller, n, sc.control_period, _truncate(data, k), event[:k],
                     int(event[:k].sum()), diverged, message, None)
