"""Second-order command filter and the compensation system for its mismatch.

The filter turns the virtual velocity command ``alpha1`` into a smooth signal
``chi`` whose derivative ``xi`` is available exactly. The compensator states
``iota1``, ``iota2`` absorb the mismatch ``chi - alpha1`` and carry the neural
friction estimate into the second error channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import comp_deriv_k, filter_deriv_k
from .mathcore import SwitchParams, _check_finite, diag_gain, vec3


@dataclass(frozen=True)
class FilterParams:
    zeta: float = 0.5
    rho: float = 0.1
    filt_eps: float = 0.3

    def __post_init__(self):
        for name in ("zeta", "rho", "filt_eps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"filter parameter {name} must be positive")


@dataclass
class FilterState:
    chi: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        self.chi = vec3(self.chi)
        self.xi = vec3(self.xi)


@dataclass
class CompState:
    iota1: np.ndarray = field(default_factory=lambda: np.zeros(3))
    iota2: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.iota1 = vec3(self.iota1)
        self.iota2 = vec3(self.iota2)


def _g(*xs):
    return field(default_factory=lambda: np.array(xs, dtype=float))


@dataclass
class CompGains:
    c1: np.ndarray = _g(1.0, 1.0, 1.2)
    c2: np.ndarray = _g(1.0, 1.0, 1.2)
    k: np.ndarray = _g(3.0, 3.0, 4.0)
    k1: np.ndarray = _g(1.0, 1.0, 1.2)
    k2: np.ndarray = _g(0.8, 0.8, 1.2)
    sw: SwitchParams = field(default_factory=SwitchParams)

    def __post_init__(self):
        for name in ("c1", "c2", "k", "k1", "k2"):
            setattr(self, name, diag_gain(getattr(self, name), name))


def filter_init(alpha1_0: np.ndarray) -> FilterState:
    """Start the filter at rest on the initial virtual command."""
    return FilterState(chi=np.array(alpha1_0, dtype=float), xi=np.zeros(3))


def filter_deriv(fs: FilterState, alpha1: np.ndarray, fp: FilterParams):
    """Return ``(chi', xi')``; the arctan nonlinearity bounds the filter's acceleration."""
    return filter_deriv_k(fs.chi, fs.xi, np.asarray(alpha1, dtype=float), fp.zeta, fp.rho, fp.filt_eps)


def comp_deriv(cs: CompState, chi: np.ndarray, alpha1: np.ndarray, fd_hat: np.ndarray, g: CompGains):
    """Return ``(iota1', iota2')`` of the compensation system."""
    _check_finite(cs.iota1)
    _check_finite(cs.iota2)
    return comp_deriv_k(cs.iota1, cs.iota2, np.asarray(chi, dtype=float), np.asarray(alpha1, dtype=float),
                        np.asarray(fd_hat, dtype=float), g.c1, g.c2, g.k, g.k1, g.k2,
                        g.sw.p_exp, g.sw.switch_eps)
