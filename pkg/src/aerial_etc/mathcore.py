"""Small-vector arithmetic shared by the controller, plant and simulator.

Vectors are plain ``numpy`` arrays of shape ``(3,)``. Diagonal gain matrices
are stored as their diagonal (also shape ``(3,)``) and applied elementwise,
so ``gain * s`` is the matrix product ``diag(gain) @ s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._kernels import frac_power_k, theta_k, theta_rows_k

E3 = np.array([0.0, 0.0, 1.0])


class NonFiniteError(ValueError):
    """Raised when a NaN or Inf shows up where a finite value is required."""


def vec3(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """Coerce ``values`` to a finite float array of shape (3,)."""
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"expected 3 components, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"non-finite vector {arr}")
    return arr


def diag_gain(values: Sequence[float] | np.ndarray, name: str = "gain") -> np.ndarray:
    """Validate a positive-definite diagonal gain given by its three diagonal entries."""
    arr = vec3(values)
    if np.any(arr <= 0.0):
        raise ValueError(f"{name} must have strictly positive diagonal entries, got {arr}")
    return arr


def gain_norm(gain: np.ndarray) -> float:
    """Induced 2-norm of a positive diagonal matrix (its largest entry)."""
    return float(np.max(gain))


@dataclass(frozen=True)
class SwitchParams:
    """Exponent ``p_exp`` of the fractional terms and threshold of the switch map."""

    p_exp: float = 0.75
    switch_eps: float = 1.0e-4

    def __post_init__(self):
        if not 0.5 < self.p_exp < 1.0:
            raise ValueError(f"exponent must satisfy 0.5 < p < 1, got {self.p_exp}")
        if not self.switch_eps > 0.0:
            raise ValueError(f"switch threshold must be positive, got {self.switch_eps}")


def _check_finite(s: np.ndarray) -> None:
    if not (math.isfinite(s[0]) and math.isfinite(s[1]) and math.isfinite(s[2])):
        raise NonFiniteError(f"non-finite input {s}")


def frac_power(s: np.ndarray, p_exp: float) -> np.ndarray:
    """Return ``s / (s's)^(1-p)``, extended continuously by zero at the origin.

    The result has magnitude ``|s|^(2p-1)``, which vanishes at ``s = 0`` for
    ``p > 1/2``.
    """
    s = np.asarray(s, dtype=float)
    _check_finite(s)
    return frac_power_k(s, p_exp)


def theta(s: np.ndarray, sp: SwitchParams) -> np.ndarray:
    """Smooth switch map.

    Equal to :func:`frac_power` outside the ball ``|s|^2 <= eps`` and scaled
    by ``sin^2(pi |s|^2 / (2 eps))`` inside it, so the map and its first
    derivatives stay bounded near the origin. Satisfies
    ``|theta(s)| <= |s| + 1`` everywhere.
    """
    s = np.asarray(s, dtype=float)
    _check_finite(s)
    return theta_k(s, sp.p_exp, sp.switch_eps)


def theta_many(S: np.ndarray, sp: SwitchParams) -> np.ndarray:
    """Row-wise :func:`theta` for an ``(N, 3)`` array."""
    S = np.ascontiguousarray(S, dtype=float)
    if S.ndim != 2 or S.shape[1] != 3:
        raise ValueError(f"expected shape (N, 3), got {S.shape}")
    if not np.all(np.isfinite(S)):
        raise NonFiniteError("non-finite input rows")
    return theta_rows_k(S, sp.p_exp, sp.switch_eps)


def sgn(s: np.ndarray) -> np.ndarray:
    """Componentwise sign with ``sgn(0) = 0``."""
    return np.sign(s)


Deriv = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(deriv: Deriv, state: np.ndarray, t: float, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of ``x' = deriv(t, x)``."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    half = 0.5 * dt
    k1 = deriv(t, state)
    k2 = deriv(t + half, state + half * k1)
    k3 = deriv(t + half, state + half * k2)
    k4 = deriv(t + dt, state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_integrate(deriv: Deriv, state: np.ndarray, t0: float, dt: float, n_steps: int) -> np.ndarray:
    """Apply :func:`rk4_step` ``n_steps`` times starting from ``t0``."""
    x = np.asarray(state, dtype=float)
    for i in range(n_steps):
        x = rk4_step(deriv, x, t0 + i * dt, dt)
    return x
