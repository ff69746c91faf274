"""Three-layer sigmoid network estimating friction at the desired velocity.

Shapes follow the usual bias-augmented convention::

    x_d   = [pd_dot; 1]                    (n0 + 1,)
    V0    : (n0 + 1, n1)
    phi   = [sigmoid(V0' x_d); 1]          (n1 + 1,)
    V1    : (n1 + 1, n2)
    f_hat = V1' phi                        (n2,)

Weights adapt along the gradient of ``y2' f_hat`` scaled by diagonal gains,
with a Frobenius-ball projection keeping each matrix bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import forward_k, proj_k, raw_updates_k, sigmoid_k


@dataclass
class NNConfig:
    n0: int = 3
    n1: int = 4
    n2: int = 3
    vbar0: float = 100.0
    vbar1: float = 100.0
    gamma0: np.ndarray = None
    gamma1: np.ndarray = None
    init_scale: float = 0.1

    def __post_init__(self):
        if self.n0 != 3 or self.n2 != 3:
            raise ValueError("input and output layers must have width 3")
        if self.n1 < 1:
            raise ValueError(f"hidden width must be >= 1, got {self.n1}")
        if self.gamma0 is None:
            self.gamma0 = np.full(self.n0 + 1, 100.0)
        if self.gamma1 is None:
            self.gamma1 = np.full(self.n1 + 1, 100.0)
        self.gamma0 = np.asarray(self.gamma0, dtype=float).reshape(-1)
        self.gamma1 = np.asarray(self.gamma1, dtype=float).reshape(-1)
        if self.gamma0.shape != (self.n0 + 1,) or self.gamma1.shape != (self.n1 + 1,):
            raise ValueError(
                f"gamma0/gamma1 must have {self.n0 + 1}/{self.n1 + 1} entries, "
                f"got {self.gamma0.size}/{self.gamma1.size}"
            )
        if np.any(self.gamma0 <= 0) or np.any(self.gamma1 <= 0):
            raise ValueError("adaptation gains must be strictly positive")
        if not (self.vbar0 > 0 and self.vbar1 > 0):
            raise ValueError("weight norm bounds must be positive")
        if not self.init_scale >= 0:
            raise ValueError("init_scale must be non-negative")


@dataclass
class NNWeights:
    v0_hat: np.ndarray
    v1_hat: np.ndarray

    def copy(self) -> "NNWeights":
        return NNWeights(self.v0_hat.copy(), self.v1_hat.copy())


def init_weights(cfg: NNConfig, seed: int) -> NNWeights:
    """Uniform(-init_scale, init_scale) weights from a seeded generator."""
    rng = np.random.default_rng(seed)
    s = cfg.init_scale
    v0 = rng.uniform(-s, s, size=(cfg.n0 + 1, cfg.n1))
    v1 = rng.uniform(-s, s, size=(cfg.n1 + 1, cfg.n2))
    return NNWeights(v0, v1)


def nn_input(pd_dot: np.ndarray) -> np.ndarray:
    """Augment the desired velocity with the constant bias input."""
    return np.append(np.asarray(pd_dot, dtype=float), 1.0)


def sigmoid(z):
    return sigmoid_k(np.atleast_1d(np.asarray(z, dtype=float)))


def phi(z: np.ndarray) -> np.ndarray:
    """Hidden activations with the trailing constant 1 appended."""
    return np.append(sigmoid(z), 1.0)


def phi_prime(z: np.ndarray) -> np.ndarray:
    """Jacobian of :func:`phi`; the last row (constant activation) is zero."""
    s = sigmoid(np.asarray(z, dtype=float))
    n1 = s.size
    out = np.zeros((n1 + 1, n1))
    out[np.arange(n1), np.arange(n1)] = s * (1.0 - s)
    return out


def forward(w: NNWeights, x: np.ndarray) -> np.ndarray:
    """Network output ``V1' phi(V0' x)``."""
    return forward_k(w.v0_hat, w.v1_hat, np.asarray(x, dtype=float))


def proj(raw_update: np.ndarray, w_current: np.ndarray, vbar: float) -> np.ndarray:
    """Remove the outward radial part of an update on the Frobenius ball boundary.

    Inside the ball (``|W|_F^2 < vbar``) or when the update points inward the
    update is returned unchanged.
    """
    return proj_k(np.asarray(raw_update, dtype=float), np.asarray(w_current, dtype=float), float(vbar))


def raw_updates(w: NNWeights, x: np.ndarray, y2: np.ndarray, cfg: NNConfig):
    """Un-projected weight rates ``(V0_dot, V1_dot)``."""
    # phi_prime' V1 y2 collapses to s(1-s) * (V1 y2)[:n1] because the bias row of phi_prime is zero
    return raw_updates_k(w.v0_hat, w.v1_hat, np.asarray(x, dtype=float), np.asarray(y2, dtype=float),
                         cfg.gamma0, cfg.gamma1)


def update_deriv(w: NNWeights, x: np.ndarray, y2: np.ndarray, cfg: NNConfig):
    """Projected weight rates ``(V0_dot, V1_dot)``."""
    v0_dot, v1_dot = raw_updates(w, x, y2, cfg)
    return proj(v0_dot, w.v0_hat, cfg.vbar0), proj(v1_dot, w.v1_hat, cfg.vbar1)


def clamp_to_ball(w: np.ndarray, vbar: float) -> np.ndarray:
    """Radially rescale ``w`` back onto the ball if integration overshot it."""
    sq = float(np.sum(w * w))
    if sq <= vbar:
        return w
    return w * np.sqrt(vbar / sq)
