"""Normalized translational dynamics of the aerial manipulator.

The multirotor is a point mass driven by the normalized thrust command
``u = U_c / m_t - g e3``::

    p' = v
    v' = u + disturbance(t) + friction(v)

The arm reaction force and unmodeled forcing are lumped into one bounded
sinusoidal disturbance; friction is viscous plus a tanh-smoothed Coulomb term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import disturbance_k, friction_k
from .mathcore import E3, NonFiniteError, vec3


class DivergenceError(RuntimeError):
    """Raised when the simulated velocity leaves the configured safety envelope."""


def _v3(*xs):
    return field(default_factory=lambda: np.array(xs, dtype=float))


@dataclass
class PlantParams:
    m_t: float = 4.85
    g: float = 9.8
    visc: np.ndarray = _v3(1.5, 1.5, 1.0)
    coul: np.ndarray = _v3(0.8, 0.8, 0.5)
    v_s: float = 0.05
    dist_amp: np.ndarray = _v3(0.3, 0.3, 0.2)
    dist_freq: np.ndarray = _v3(1.0, 1.3, 0.7)
    dist_phase: np.ndarray = _v3(0.0, 0.0, 0.0)
    delta_bar: float = 0.5
    v_limit: float = 50.0

    def __post_init__(self):
        for name in ("visc", "coul", "dist_amp", "dist_freq", "dist_phase"):
            setattr(self, name, vec3(getattr(self, name)))
        if not self.m_t > 0:
            raise ValueError(f"m_t must be positive, got {self.m_t}")
        if not self.g > 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if not self.v_s > 0:
            raise ValueError(f"v_s must be positive, got {self.v_s}")
        if np.any(self.visc < 0) or np.any(self.coul < 0):
            raise ValueError("friction coefficients must be non-negative")
        if not self.v_limit > 0:
            raise ValueError(f"v_limit must be positive, got {self.v_limit}")
        if np.linalg.norm(self.dist_amp) > self.delta_bar:
            raise ValueError(
                f"disturbance amplitude norm {np.linalg.norm(self.dist_amp):.6g} "
                f"exceeds delta_bar {self.delta_bar}"
            )

    @property
    def friction_lipschitz(self) -> float:
        """Global Lipschitz constant of :func:`friction_true`."""
        return float((np.max(self.visc) + np.max(self.coul) / self.v_s) / self.m_t)


@dataclass
class PlantState:
    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.p = vec3(self.p)
        self.v = vec3(self.v)


def friction_true(v: np.ndarray, params: PlantParams) -> np.ndarray:
    """Friction acceleration ``-(visc*v + coul*tanh(v/v_s)) / m_t``."""
    return friction_k(np.asarray(v, dtype=float), params.visc, params.coul, params.v_s, params.m_t)


def disturbance(t: float, params: PlantParams) -> np.ndarray:
    """Lumped arm-reaction and unmodeled acceleration; norm never exceeds ``delta_bar``."""
    return disturbance_k(float(t), params.dist_amp, params.dist_freq, params.dist_phase)


def plant_deriv(state: PlantState, u: np.ndarray, t: float, params: PlantParams):
    """Return ``(p', v')`` for the normalized dynamics."""
    v = state.v
    if not np.all(np.isfinite(v)) or not np.all(np.isfinite(u)):
        raise NonFiniteError("non-finite plant input")
    if float(v @ v) > params.v_limit ** 2:
        raise DivergenceError(f"|v| = {np.linalg.norm(v):.3g} m/s exceeds limit {params.v_limit}")
    return v.copy(), u + disturbance(t, params) + friction_true(v, params)


def u_from_uc(U_c: np.ndarray, params: PlantParams) -> np.ndarray:
    """Thrust force (N) to normalized command (m/s^2)."""
    return np.asarray(U_c, dtype=float) / params.m_t - params.g * E3


def uc_from_u(u: np.ndarray, params: PlantParams) -> np.ndarray:
    """Normalized command (m/s^2) to thrust force (N)."""
    return params.m_t * (np.asarray(u, dtype=float) + params.g * E3)
